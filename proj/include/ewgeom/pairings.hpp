#pragma once

#include <map>

#include "ewgeom/tensor.hpp"

namespace ewgeom {

enum class PairObject : std::uint8_t {
    Delta,        // up slot against down slot of the same species
    EpsilonUp,    // two down slots of a 2-dim species
    EpsilonDown,  // two up slots of a 2-dim species
    MetricUp,     // two down spacetime slots
    MetricDown,   // two up spacetime slots
};

inline const char* pair_object_name(PairObject o) {
    switch (o) {
        case PairObject::Delta: return "delta";
        case PairObject::EpsilonUp: return "eps^";
        case PairObject::EpsilonDown: return "eps_";
        case PairObject::MetricUp: return "g^";
        case PairObject::MetricDown: return "g_";
    }
    return "?";
}

struct SchemePair {
    int first;
    int second;
    PairObject object;

    friend bool operator==(const SchemePair& a, const SchemePair& b) {
        return a.first == b.first && a.second == b.second && a.object == b.object;
    }
};

struct ContractionScheme {
    std::vector<SchemePair> pairs;

    std::string str() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (i) os << " ";
            os << pair_object_name(pairs[i].object) << "(" << pairs[i].first << ","
               << pairs[i].second << ")";
        }
        return os.str();
    }

    friend bool operator==(const ContractionScheme& a, const ContractionScheme& b) {
        return a.pairs == b.pairs;
    }
};

namespace detail {

inline PairObject object_for(const Slot& a, const Slot& b) {
    if (a.species != b.species)
        throw TensorError(cat("cannot pair slots of species ", species_name(a.species),
                              " and ", species_name(b.species)));
    if (a.variance != b.variance) return PairObject::Delta;
    if (a.species == Species::Spacetime)
        return a.variance == Variance::Down ? PairObject::MetricUp : PairObject::MetricDown;
    return a.variance == Variance::Down ? PairObject::EpsilonUp : PairObject::EpsilonDown;
}

inline void matchings(std::vector<int>& avail, std::vector<std::pair<int, int>>& acc,
                      std::vector<std::vector<std::pair<int, int>>>& out) {
    if (avail.empty()) {
        out.push_back(acc);
        return;
    }
    int first = avail.front();
    for (std::size_t j = 1; j < avail.size(); ++j) {
        int partner = avail[j];
        std::vector<int> rest;
        for (std::size_t k = 1; k < avail.size(); ++k)
            if (k != j) rest.push_back(avail[k]);
        acc.emplace_back(first, partner);
        matchings(rest, acc, out);
        acc.pop_back();
    }
}

inline bool permutation_even(const std::vector<int>& seq) {
    int inv = 0;
    for (std::size_t i = 0; i < seq.size(); ++i)
        for (std::size_t j = i + 1; j < seq.size(); ++j)
            if (seq[i] > seq[j]) ++inv;
    return inv % 2 == 0;
}

}  // namespace detail

// All perfect matchings of each species group among the given slots,
// combined across groups as a Cartesian product, in lexicographic order.
// Each antisymmetric pair is oriented so the concatenated slot sequence of
// its group is an even permutation of the ascending order; the paper-style
// cyclic triples (AB)(CD), (CA)(BD), (AD)(BC) come out of this rule.
inline std::vector<ContractionScheme> enumerate_pair_contractions(
    const std::vector<Slot>& slots) {
    // Group slot positions by species, preserving position order.
    std::map<Species, std::vector<int>> groups;
    for (int k = 0; k < static_cast<int>(slots.size()); ++k)
        groups[slots[k].species].push_back(k);

    std::vector<std::vector<std::vector<SchemePair>>> per_group;
    for (auto& [sp, positions] : groups) {
        if (positions.size() % 2 != 0)
            throw TensorError(cat("species group ", species_name(sp),
                                  " has an odd number of slots (", positions.size(), ")"));
        std::vector<std::vector<std::pair<int, int>>> raw;
        std::vector<std::pair<int, int>> acc;
        detail::matchings(positions, acc, raw);

        std::vector<std::vector<SchemePair>> oriented;
        for (auto& m : raw) {
            // Orientation: delta pairs as (up, down); antisymmetric pairs
            // ascending, with the last one flipped if the group sequence
            // would otherwise be an odd permutation.
            std::vector<SchemePair> pairs;
            int last_antisym = -1;
            for (auto& [x, y] : m) {
                const Slot& sx = slots[x];
                const Slot& sy = slots[y];
                PairObject obj = detail::object_for(sx, sy);
                int f = x, s = y;
                if (obj == PairObject::Delta && sx.variance == Variance::Down) std::swap(f, s);
                pairs.push_back({f, s, obj});
                if (obj != PairObject::Delta)
                    last_antisym = static_cast<int>(pairs.size()) - 1;
            }
            std::vector<int> seq;
            for (auto& p : pairs) {
                seq.push_back(p.first);
                seq.push_back(p.second);
            }
            if (!detail::permutation_even(seq) && last_antisym >= 0)
                std::swap(pairs[last_antisym].first, pairs[last_antisym].second);
            oriented.push_back(std::move(pairs));
        }
        per_group.push_back(std::move(oriented));
    }

    std::vector<ContractionScheme> schemes;
    std::vector<std::size_t> pick(per_group.size(), 0);
    while (true) {
        ContractionScheme s;
        for (std::size_t gi = 0; gi < per_group.size(); ++gi) {
            const auto& pairs = per_group[gi][pick[gi]];
            s.pairs.insert(s.pairs.end(), pairs.begin(), pairs.end());
        }
        schemes.push_back(std::move(s));
        std::size_t gi = per_group.size();
        while (gi > 0) {
            --gi;
            if (++pick[gi] < per_group[gi].size()) break;
            pick[gi] = 0;
            if (gi == 0) return schemes;
        }
        if (per_group.empty()) return schemes;
    }
}

namespace detail {

inline double pair_weight(PairObject obj, int u, int v) {
    switch (obj) {
        case PairObject::Delta: return u == v ? 1.0 : 0.0;
        case PairObject::EpsilonUp:
        case PairObject::EpsilonDown:
            if (u == v) return 0.0;
            return (u == 0 && v == 1) ? 1.0 : -1.0;
        case PairObject::MetricUp:
        case PairObject::MetricDown: return u == v ? minkowski_diag(u) : 0.0;
    }
    return 0.0;
}

}  // namespace detail

// Full contraction of a tensor against a scheme covering every slot.
// The tensor's factor order is never touched, so no statistics signs arise
// here; only the pairing weights enter (their moduli in magnitude mode).
inline GrassmannElement apply_scheme(const Tensor& t, const ContractionScheme& scheme) {
    if (static_cast<int>(scheme.pairs.size()) * 2 != t.rank())
        throw TensorError("scheme does not cover all slots");
    std::vector<int> idx(t.rank(), 0);
    GrassmannElement acc;
    std::size_t npairs = scheme.pairs.size();
    std::vector<int> u(npairs, 0), v(npairs, 0);
    while (true) {
        double w = 1.0;
        bool nonzero = true;
        for (std::size_t p = 0; p < npairs; ++p) {
            double pw = detail::pair_weight(scheme.pairs[p].object, u[p], v[p]);
            if (pw == 0.0) {
                nonzero = false;
                break;
            }
            w *= pw;
        }
        if (nonzero) {
            for (std::size_t p = 0; p < npairs; ++p) {
                idx[scheme.pairs[p].first] = u[p];
                idx[scheme.pairs[p].second] = v[p];
            }
            acc += t.at(idx) * (t.is_magnitude() ? std::abs(w) : w);
        }
        // Advance the (u, v) odometer.
        std::size_t p = npairs;
        bool done = true;
        while (p > 0) {
            --p;
            int du = species_dim(t.slots()[scheme.pairs[p].first].species);
            int dv = species_dim(t.slots()[scheme.pairs[p].second].species);
            if (++v[p] < dv) {
                done = false;
                break;
            }
            v[p] = 0;
            if (++u[p] < du) {
                done = false;
                break;
            }
            u[p] = 0;
        }
        if (done) break;
    }
    return acc;
}

}  // namespace ewgeom
