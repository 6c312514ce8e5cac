#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "ewgeom/grassmann.hpp"
#include "ewgeom/rng.hpp"
#include "ewgeom/sigma.hpp"

namespace ewgeom {

enum class Species : std::uint8_t { Spacetime, Spinor, SpinorDotted, Isospin };

inline int species_dim(Species s) { return s == Species::Spacetime ? 4 : 2; }

inline const char* species_name(Species s) {
    switch (s) {
        case Species::Spacetime: return "spacetime";
        case Species::Spinor: return "spinor";
        case Species::SpinorDotted: return "spinor-dotted";
        case Species::Isospin: return "isospin";
    }
    return "?";
}

enum class Variance : std::uint8_t { Up, Down };

inline const char* variance_name(Variance v) { return v == Variance::Up ? "up" : "down"; }

struct Slot {
    Species species;
    Variance variance;

    friend bool operator==(const Slot& a, const Slot& b) {
        return a.species == b.species && a.variance == b.variance;
    }
    std::string str() const {
        return cat(species_name(species), "(", variance_name(variance), ")");
    }
};

// Dense multi-index array of graded scalars with typed slots, a uniform
// parity, and a rational length-unit exponent. Values are immutable in
// spirit: mutation is confined to construction helpers.
class Tensor {
  public:
    Tensor() : parity_(Parity::Even) {}

    Tensor(std::vector<Slot> slots, Parity parity, Rational weight = Rational(0))
        : slots_(std::move(slots)), parity_(parity), weight_(weight) {
        data_.assign(total_size(slots_), GrassmannElement{});
    }

    static Tensor scalar(GrassmannElement v, Parity parity = Parity::Even,
                         Rational weight = Rational(0)) {
        Tensor t({}, parity, weight);
        if (!v.compatible_with(parity)) throw TensorError("scalar entry parity mismatch");
        t.data_[0] = std::move(v);
        return t;
    }

    const std::vector<Slot>& slots() const { return slots_; }
    int rank() const { return static_cast<int>(slots_.size()); }
    Parity parity() const { return parity_; }
    Rational weight() const { return weight_; }
    std::size_t size() const { return data_.size(); }
    bool is_magnitude() const { return magnitude_; }

    const GrassmannElement& operator[](std::size_t flat) const { return data_[flat]; }

    const GrassmannElement& at(std::span<const int> idx) const { return data_[offset(idx)]; }

    void set(std::span<const int> idx, GrassmannElement v) {
        if (!v.compatible_with(parity_))
            throw TensorError(cat("entry parity incompatible with tensor parity at flat index ",
                                  offset(idx)));
        data_[offset(idx)] = std::move(v);
    }

    void set(std::initializer_list<int> idx, GrassmannElement v) {
        set(std::span<const int>(idx.begin(), idx.size()), std::move(v));
    }

    const GrassmannElement& at(std::initializer_list<int> idx) const {
        return at(std::span<const int>(idx.begin(), idx.size()));
    }

    std::size_t offset(std::span<const int> idx) const {
        if (idx.size() != slots_.size()) throw TensorError("index rank mismatch");
        std::size_t off = 0;
        for (std::size_t k = 0; k < slots_.size(); ++k) {
            int d = species_dim(slots_[k].species);
            if (idx[k] < 0 || idx[k] >= d) throw TensorError("index out of range");
            off = off * d + static_cast<std::size_t>(idx[k]);
        }
        return off;
    }

    void unflatten(std::size_t flat, std::span<int> idx) const {
        for (std::size_t k = slots_.size(); k-- > 0;) {
            int d = species_dim(slots_[k].species);
            idx[k] = static_cast<int>(flat % d);
            flat /= d;
        }
    }

    GrassmannElement scalar_value() const {
        if (!slots_.empty()) throw TensorError("tensor is not rank 0");
        return data_[0];
    }

    // Einstein summation over one up/down slot pair of the same species.
    Tensor contract(int up_slot, int down_slot) const {
        check_slot(up_slot);
        check_slot(down_slot);
        if (up_slot == down_slot) throw TensorError("cannot contract a slot with itself");
        const Slot& u = slots_[up_slot];
        const Slot& d = slots_[down_slot];
        if (u.variance != Variance::Up || d.variance != Variance::Down ||
            u.species != d.species) {
            throw TensorError(cat("contraction mismatch: slot ", up_slot, " is ", u.str(),
                                  ", slot ", down_slot, " is ", d.str(),
                                  "; need same species, up then down"));
        }
        std::vector<Slot> out_slots;
        std::vector<int> keep;
        for (int k = 0; k < rank(); ++k) {
            if (k != up_slot && k != down_slot) {
                out_slots.push_back(slots_[k]);
                keep.push_back(k);
            }
        }
        Tensor out(out_slots, parity_, weight_);
        out.magnitude_ = magnitude_;
        std::vector<int> idx(slots_.size(), 0);
        std::vector<int> oidx(out_slots.size(), 0);
        int dsum = species_dim(u.species);
        for (std::size_t flat = 0; flat < out.data_.size(); ++flat) {
            out.unflatten(flat, oidx);
            GrassmannElement acc;
            for (int v = 0; v < dsum; ++v) {
                for (std::size_t k = 0; k < keep.size(); ++k) idx[keep[k]] = oidx[k];
                idx[up_slot] = v;
                idx[down_slot] = v;
                acc += data_[offset(idx)];
            }
            out.data_[flat] = std::move(acc);
        }
        return out;
    }

    // Entrywise conjugate with slot retyping: spinor <-> dotted, isospin
    // variance flips, spacetime slots unchanged.
    Tensor conjugate() const {
        std::vector<Slot> out_slots(slots_);
        for (Slot& s : out_slots) {
            switch (s.species) {
                case Species::Spinor: s.species = Species::SpinorDotted; break;
                case Species::SpinorDotted: s.species = Species::Spinor; break;
                case Species::Isospin:
                    s.variance = (s.variance == Variance::Up) ? Variance::Down : Variance::Up;
                    break;
                case Species::Spacetime: break;
            }
        }
        Tensor out(out_slots, parity_, weight_);
        out.magnitude_ = magnitude_;
        for (std::size_t i = 0; i < data_.size(); ++i)
            out.data_[i] = grassmann_conjugate(data_[i]);
        return out;
    }

    // Magnitude shadow: coefficients replaced by their moduli and the
    // tensor switched to magnitude arithmetic, where products never carry
    // statistics signs. Contracting shadows accumulates the
    // pre-cancellation mass feeding every coefficient of an expression.
    Tensor abs_shadow() const {
        Tensor out(slots_, parity_, weight_);
        out.magnitude_ = true;
        for (std::size_t i = 0; i < data_.size(); ++i) {
            GrassmannElement e;
            for (const auto& [k, c] : data_[i].terms())
                e += GrassmannElement::term(k, cplx{std::abs(c), 0.0});
            out.data_[i] = std::move(e);
        }
        return out;
    }

    Tensor reversed_weight_tag(Rational w) const {
        Tensor out = *this;
        out.weight_ = w;
        return out;
    }

    // Slot permutation: out slot k is this slot perm[k]. A pure data
    // shuffle; no statistics signs are involved in re-indexing.
    Tensor transpose(std::span<const int> perm) const {
        if (perm.size() != slots_.size()) throw TensorError("transpose rank mismatch");
        std::vector<Slot> out_slots(slots_.size());
        for (std::size_t k = 0; k < perm.size(); ++k)
            out_slots[k] = slots_[static_cast<std::size_t>(perm[k])];
        Tensor out(out_slots, parity_, weight_);
        out.magnitude_ = magnitude_;
        std::vector<int> oidx(slots_.size(), 0), idx(slots_.size(), 0);
        for (std::size_t flat = 0; flat < out.data_.size(); ++flat) {
            out.unflatten(flat, oidx);
            for (std::size_t k = 0; k < perm.size(); ++k)
                idx[static_cast<std::size_t>(perm[k])] = oidx[k];
            out.data_[flat] = data_[offset(idx)];
        }
        return out;
    }

    friend Tensor operator*(const Tensor& a, const Tensor& b) {
        return graded_product({&a, &b});
    }

    friend Tensor operator+(const Tensor& a, const Tensor& b) {
        if (a.slots_ != b.slots_) throw TensorError("tensor addition slot mismatch");
        if (a.parity_ != b.parity_) throw TensorError("tensor addition parity mismatch");
        if (a.weight_ != b.weight_) throw TensorError("tensor addition unit-weight mismatch");
        if (a.magnitude_ != b.magnitude_)
            throw TensorError("cannot mix magnitude and value tensors");
        Tensor out = a;
        for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += b.data_[i];
        return out;
    }

    friend Tensor operator-(const Tensor& a, const Tensor& b) {
        return a + (b * cplx{-1.0, 0.0});
    }

    friend Tensor operator*(const Tensor& a, cplx s) {
        Tensor out = a;
        if (a.magnitude_) s = cplx{std::abs(s), 0.0};
        for (auto& e : out.data_) e = e * s;
        return out;
    }
    friend Tensor operator*(cplx s, const Tensor& a) { return a * s; }

    // Ordered graded tensor product; entries multiply in factor order, so
    // swapping two adjacent odd factors negates the result.
    static Tensor graded_product(std::span<const Tensor* const> factors) {
        std::vector<Slot> slots;
        Parity parity = Parity::Even;
        Rational weight(0);
        std::size_t total = 1;
        for (const Tensor* f : factors) {
            slots.insert(slots.end(), f->slots_.begin(), f->slots_.end());
            parity = parity + f->parity_;
            weight = weight + f->weight_;
            total *= f->data_.size();
        }
        Tensor out(slots, parity, weight);
        bool magnitude = false;
        for (const Tensor* f : factors) magnitude = magnitude || f->magnitude_;
        out.magnitude_ = magnitude;
        if (factors.empty()) {
            out.data_[0] = GrassmannElement(1.0);
            return out;
        }
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t rem = flat;
            GrassmannElement prod(1.0);
            // Peel factor offsets from the right so slot order matches
            // concatenation order.
            std::size_t divs = total;
            bool zero = false;
            for (const Tensor* f : factors) {
                divs /= f->data_.size();
                std::size_t fi = rem / divs;
                rem %= divs;
                prod = magnitude ? GrassmannElement::mul_magnitude(prod, f->data_[fi])
                                 : prod * f->data_[fi];
                if (prod.is_zero()) {
                    zero = true;
                    break;
                }
            }
            out.data_[flat] = zero ? GrassmannElement{} : std::move(prod);
        }
        return out;
    }

    static Tensor graded_product(std::initializer_list<const Tensor*> factors) {
        return graded_product(std::span<const Tensor* const>(factors.begin(), factors.size()));
    }

    // Product a (x) b with the listed (a-slot, b-slot) pairs summed during
    // the multiplication, so the outer product is never materialized.
    // Entries multiply in (a, b) order; surviving slots keep a-then-b order.
    static Tensor binary_contract(const Tensor& a, const Tensor& b,
                                  std::span<const std::pair<int, int>> pairs) {
        std::vector<int> a_paired(a.slots_.size(), -1), b_paired(b.slots_.size(), -1);
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            auto [ia, ib] = pairs[p];
            const Slot& sa = a.slots_[static_cast<std::size_t>(ia)];
            const Slot& sb = b.slots_[static_cast<std::size_t>(ib)];
            if (sa.species != sb.species || sa.variance == sb.variance)
                throw TensorError(cat("binary contraction mismatch: a-slot ", ia, " is ",
                                      sa.str(), ", b-slot ", ib, " is ", sb.str()));
            a_paired[static_cast<std::size_t>(ia)] = static_cast<int>(p);
            b_paired[static_cast<std::size_t>(ib)] = static_cast<int>(p);
        }
        std::vector<Slot> out_slots;
        std::vector<int> a_keep, b_keep;
        for (int s = 0; s < a.rank(); ++s)
            if (a_paired[static_cast<std::size_t>(s)] < 0) {
                out_slots.push_back(a.slots_[static_cast<std::size_t>(s)]);
                a_keep.push_back(s);
            }
        for (int s = 0; s < b.rank(); ++s)
            if (b_paired[static_cast<std::size_t>(s)] < 0) {
                out_slots.push_back(b.slots_[static_cast<std::size_t>(s)]);
                b_keep.push_back(s);
            }
        Tensor out(out_slots, a.parity_ + b.parity_, a.weight_ + b.weight_);
        const bool magnitude = a.magnitude_ || b.magnitude_;
        out.magnitude_ = magnitude;

        std::vector<int> dims(pairs.size());
        for (std::size_t p = 0; p < pairs.size(); ++p)
            dims[p] = species_dim(a.slots_[static_cast<std::size_t>(pairs[p].first)].species);

        std::vector<int> oidx(out_slots.size(), 0);
        std::vector<int> ai(a.slots_.size(), 0), bi(b.slots_.size(), 0);
        std::vector<int> dummy(pairs.size(), 0);
        for (std::size_t flat = 0; flat < out.data_.size(); ++flat) {
            out.unflatten(flat, oidx);
            for (std::size_t k = 0; k < a_keep.size(); ++k)
                ai[static_cast<std::size_t>(a_keep[k])] = oidx[k];
            for (std::size_t k = 0; k < b_keep.size(); ++k)
                bi[static_cast<std::size_t>(b_keep[k])] = oidx[a_keep.size() + k];
            GrassmannElement acc;
            std::fill(dummy.begin(), dummy.end(), 0);
            while (true) {
                for (std::size_t p = 0; p < pairs.size(); ++p) {
                    ai[static_cast<std::size_t>(pairs[p].first)] = dummy[p];
                    bi[static_cast<std::size_t>(pairs[p].second)] = dummy[p];
                }
                const GrassmannElement& ea = a.data_[a.offset(ai)];
                if (!ea.is_zero()) {
                    const GrassmannElement& eb = b.data_[b.offset(bi)];
                    if (!eb.is_zero())
                        acc += magnitude ? GrassmannElement::mul_magnitude(ea, eb) : ea * eb;
                }
                std::size_t p = pairs.size();
                bool done = true;
                while (p > 0) {
                    --p;
                    if (++dummy[p] < dims[p]) {
                        done = false;
                        break;
                    }
                    dummy[p] = 0;
                }
                if (done) break;
            }
            out.data_[flat] = std::move(acc);
        }
        return out;
    }

  private:
    void check_slot(int k) const {
        if (k < 0 || k >= rank()) throw TensorError(cat("slot index ", k, " out of range"));
    }

    static std::size_t total_size(const std::vector<Slot>& slots) {
        std::size_t n = 1;
        for (const Slot& s : slots) n *= static_cast<std::size_t>(species_dim(s.species));
        return n;
    }

    std::vector<Slot> slots_;
    std::vector<GrassmannElement> data_;
    Parity parity_;
    Rational weight_;
    bool magnitude_ = false;
};

inline Tensor graded_product(std::initializer_list<const Tensor*> factors) {
    return Tensor::graded_product(factors);
}

// --- builtin constant tensors ------------------------------------------

inline Tensor delta(Species sp) {
    Tensor t({{sp, Variance::Up}, {sp, Variance::Down}}, Parity::Even);
    for (int i = 0; i < species_dim(sp); ++i) t.set({i, i}, GrassmannElement(1.0));
    return t;
}

// eps_{01} = s, eps_{10} = -s for a 2-dimensional species.
inline Tensor epsilon_lower(Species sp, cplx s = cplx{1.0, 0.0}) {
    if (species_dim(sp) != 2) throw TensorError("epsilon needs a 2-dimensional species");
    Tensor t({{sp, Variance::Down}, {sp, Variance::Down}}, Parity::Even);
    t.set({0, 1}, GrassmannElement(s));
    t.set({1, 0}, GrassmannElement(-s));
    return t;
}

// Normalized so that eps^{AB} eps_{CB} = delta^A_C; for a lower form scaled
// by s the upper form is scaled by 1/s.
inline Tensor epsilon_upper(Species sp, cplx s = cplx{1.0, 0.0}) {
    if (species_dim(sp) != 2) throw TensorError("epsilon needs a 2-dimensional species");
    Tensor t({{sp, Variance::Up}, {sp, Variance::Up}}, Parity::Even);
    t.set({0, 1}, GrassmannElement(cplx{1.0, 0.0} / s));
    t.set({1, 0}, GrassmannElement(-cplx{1.0, 0.0} / s));
    return t;
}

inline Tensor metric_upper() {
    Tensor t({{Species::Spacetime, Variance::Up}, {Species::Spacetime, Variance::Up}},
             Parity::Even);
    for (int mu = 0; mu < 4; ++mu) t.set({mu, mu}, GrassmannElement(minkowski_diag(mu)));
    return t;
}

inline Tensor metric_lower() {
    Tensor t({{Species::Spacetime, Variance::Down}, {Species::Spacetime, Variance::Down}},
             Parity::Even);
    for (int mu = 0; mu < 4; ++mu) t.set({mu, mu}, GrassmannElement(minkowski_diag(mu)));
    return t;
}

// --- Pauli-frame conversions between spacetime and Hermitian-pair slots --

// Covector components w_lambda from a (spinor-down, dotted-down) pair:
// w_lambda = w_{A Adot} tau_lambda^{A Adot}.
inline Tensor hstar_pair_to_spacetime(const Tensor& t, int slot_a, int slot_adot) {
    const auto& slots = t.slots();
    if (slots[slot_a].species != Species::Spinor ||
        slots[slot_a].variance != Variance::Down ||
        slots[slot_adot].species != Species::SpinorDotted ||
        slots[slot_adot].variance != Variance::Down)
        throw TensorError("hstar_pair_to_spacetime expects spinor-down, dotted-down slots");

    std::vector<Slot> out_slots;
    std::vector<int> keep;
    for (int k = 0; k < t.rank(); ++k) {
        if (k != slot_a && k != slot_adot) {
            out_slots.push_back(slots[k]);
            keep.push_back(k);
        }
    }
    out_slots.push_back({Species::Spacetime, Variance::Down});

    Tensor out(out_slots, t.parity(), t.weight());
    std::vector<int> idx(slots.size(), 0);
    std::vector<int> oidx(out_slots.size(), 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        out.unflatten(flat, oidx);
        int lambda = oidx.back();
        GrassmannElement acc;
        for (int a = 0; a < 2; ++a) {
            for (int ad = 0; ad < 2; ++ad) {
                for (std::size_t k = 0; k < keep.size(); ++k) idx[keep[k]] = oidx[k];
                idx[slot_a] = a;
                idx[slot_adot] = ad;
                acc += t.at(idx) * tau_up(lambda, a, ad);
            }
        }
        out.set(oidx, std::move(acc));
    }
    return out;
}

// Lowered Pauli frame (tau_mu)_{A Adot} = eps_{BA} epsbar_{Bdot Adot}
// tau_mu^{B Bdot}: lowering both indices with the symplectic pair is the
// cofactor map [[a,b],[c,d]] -> [[d,-c],[-b,a]].
inline cplx tau_down(int mu, int a, int adot) {
    int b = 1 - a, bdot = 1 - adot;
    double sign = (a == adot) ? 1.0 : -1.0;
    return sign * tau_up(mu, b, bdot);
}

// Inverse of hstar_pair_to_spacetime on one spacetime-down slot:
// w_{A Adot} = g^{mu nu} w_nu (tau_mu flat)_{A Adot}.
inline Tensor spacetime_to_hstar_pair(const Tensor& t, int slot) {
    const auto& slots = t.slots();
    if (slots[slot].species != Species::Spacetime || slots[slot].variance != Variance::Down)
        throw TensorError("spacetime_to_hstar_pair expects a spacetime-down slot");

    std::vector<Slot> out_slots;
    std::vector<int> keep;
    for (int k = 0; k < t.rank(); ++k) {
        if (k != slot) {
            out_slots.push_back(slots[k]);
            keep.push_back(k);
        }
    }
    out_slots.push_back({Species::Spinor, Variance::Down});
    out_slots.push_back({Species::SpinorDotted, Variance::Down});

    Tensor out(out_slots, t.parity(), t.weight());
    std::vector<int> idx(slots.size(), 0);
    std::vector<int> oidx(out_slots.size(), 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        out.unflatten(flat, oidx);
        int a = oidx[oidx.size() - 2];
        int ad = oidx[oidx.size() - 1];
        GrassmannElement acc;
        for (int mu = 0; mu < 4; ++mu) {
            for (std::size_t k = 0; k < keep.size(); ++k) idx[keep[k]] = oidx[k];
            idx[slot] = mu;
            // g^{mu mu} tau_mu-flat = tau_mu with both diagonal signs folded.
            acc += t.at(idx) * (minkowski_diag(mu) * tau_down(mu, a, ad));
        }
        out.set(oidx, std::move(acc));
    }
    return out;
}

// --- random sampling -----------------------------------------------------

// Bosonic: i.i.d. CN(0,1) entries. Fermionic: entry k is c_k * theta_k with
// a fresh generator per entry; conjugate partners must be derived with
// Tensor::conjugate, never resampled.
inline Tensor sample_random(std::vector<Slot> slots, Parity statistics, RngStream& rng,
                            GeneratorPool* pool = nullptr, Rational weight = Rational(0)) {
    Tensor t(std::move(slots), statistics, weight);
    std::vector<int> idx(t.rank(), 0);
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
        t.unflatten(flat, idx);
        cplx c = rng.next_complex_gaussian();
        if (statistics == Parity::Even) {
            t.set(idx, GrassmannElement(c));
        } else {
            if (pool == nullptr)
                throw Error("fermionic sampling needs a generator pool");
            int g = pool->alloc();
            t.set(idx, GrassmannElement::term(GrassmannElement::Key{1} << g, c));
        }
    }
    return t;
}

}  // namespace ewgeom
