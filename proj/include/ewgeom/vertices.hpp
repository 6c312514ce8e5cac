#pragma once

#include <map>
#include <set>

#include "ewgeom/ewmodel.hpp"
#include "ewgeom/rng.hpp"

namespace ewgeom {

// --- exact coefficient arithmetic ----------------------------------------

struct CRat {
    Rational re{0}, im{0};

    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    cplx value() const { return {re.value(), im.value()}; }

    friend CRat operator+(const CRat& a, const CRat& b) { return {a.re + b.re, a.im + b.im}; }
    friend CRat operator*(const CRat& a, const CRat& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend CRat operator-(const CRat& a) { return {-a.re, -a.im}; }
    CRat conj() const { return {re, -im}; }
};

inline CRat crat(long long re_n, long long re_d, long long im_n, long long im_d) {
    return {Rational(re_n, re_d), Rational(im_n, im_d)};
}

// Monomial exponents in q, sin(theta), cos(theta), m, lambda and sqrt(2);
// sec(theta) is a negative cos power, sqrt2 is kept in {0, 1}.
struct TrigKey {
    int pq = 0, psin = 0, pcos = 0, pm = 0, plambda = 0, psqrt2 = 0;

    auto tie() const { return std::tie(pq, psin, pcos, pm, plambda, psqrt2); }
    friend bool operator<(const TrigKey& a, const TrigKey& b) { return a.tie() < b.tie(); }
    friend bool operator==(const TrigKey& a, const TrigKey& b) { return a.tie() == b.tie(); }

    double value(const EWParams& p) const {
        double v = 1.0;
        v *= std::pow(p.q, pq);
        v *= std::pow(std::sin(p.theta), psin);
        v *= std::pow(std::cos(p.theta), pcos);
        v *= std::pow(p.m, pm);
        v *= std::pow(p.lambda, plambda);
        if (psqrt2) v *= kSqrt2;
        return v;
    }

    std::string str() const {
        std::ostringstream os;
        auto tag = [&](const char* n, int e) {
            if (e) os << n << "^" << e << " ";
        };
        tag("q", pq);
        tag("sin", psin);
        tag("cos", pcos);
        tag("m", pm);
        tag("lambda", plambda);
        tag("sqrt2", psqrt2);
        std::string s = os.str();
        if (!s.empty()) s.pop_back();
        return s.empty() ? "1" : s;
    }
};

// Sum of exact monomials.
struct TrigPoly {
    std::map<TrigKey, CRat> terms;

    static TrigPoly mono(CRat c, TrigKey k = {}) {
        TrigPoly p;
        // fold sqrt2^2 -> 2
        if (k.psqrt2 < 0 || k.psqrt2 > 1) {
            int two = k.psqrt2 >= 0 ? k.psqrt2 / 2 : (k.psqrt2 - 1) / 2;
            k.psqrt2 -= 2 * two;
            Rational f = two >= 0 ? Rational(1LL << two) : Rational(1, 1LL << (-two));
            c = c * CRat{f, Rational(0)};
        }
        if (!c.is_zero()) p.terms[k] = c;
        return p;
    }

    bool is_zero() const { return terms.empty(); }

    cplx value(const EWParams& p) const {
        cplx v{0.0, 0.0};
        for (const auto& [k, c] : terms) v += c.value() * k.value(p);
        return v;
    }

    TrigPoly conj() const {
        TrigPoly p;
        for (const auto& [k, c] : terms) p.terms[k] = c.conj();
        return p;
    }

    friend TrigPoly operator+(const TrigPoly& a, const TrigPoly& b) {
        TrigPoly p = a;
        for (const auto& [k, c] : b.terms) {
            auto it = p.terms.find(k);
            if (it == p.terms.end()) {
                p.terms[k] = c;
            } else {
                it->second = it->second + c;
                if (it->second.is_zero()) p.terms.erase(it);
            }
        }
        return p;
    }

    friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
        TrigPoly p;
        for (const auto& [ka, ca] : a.terms)
            for (const auto& [kb, cb] : b.terms) {
                TrigKey k{ka.pq + kb.pq,         ka.psin + kb.psin, ka.pcos + kb.pcos,
                          ka.pm + kb.pm,         ka.plambda + kb.plambda,
                          ka.psqrt2 + kb.psqrt2};
                p = p + mono(ca * cb, k);
            }
        return p;
    }
};

// --- legs and vector atoms ------------------------------------------------

enum class Leg : std::uint8_t {
    H,
    Phi0,
    PhiP,
    PhiM,
    A,
    Z,
    Wp,
    Wm,
    Bil1,   // <PsiBar_L1, Psi_R>
    Bil2,   // <PsiBar_L2, Psi_R>
    Bil1c,  // <PsiBar_R, Psi_L1>
    Bil2c,  // <PsiBar_R, Psi_L2>
};

inline const char* leg_name(Leg l) {
    switch (l) {
        case Leg::H: return "H";
        case Leg::Phi0: return "phi0";
        case Leg::PhiP: return "phi+";
        case Leg::PhiM: return "phi-";
        case Leg::A: return "A";
        case Leg::Z: return "Z";
        case Leg::Wp: return "W+";
        case Leg::Wm: return "W-";
        case Leg::Bil1: return "PsiLbar1xPsiR";
        case Leg::Bil2: return "PsiLbar2xPsiR";
        case Leg::Bil1c: return "PsiRbarxPsiL1";
        case Leg::Bil2c: return "PsiRbarxPsiL2";
    }
    return "?";
}

// Spacetime-vector factors appearing in the covariant derivative: either a
// fluctuation momentum or a gauge-field direction.
enum class VecAtom : std::uint8_t { PH, PPhi0, PPhiP, PPhiM, VA, VZ, VWp, VWm };

inline const char* vec_atom_name(VecAtom v) {
    switch (v) {
        case VecAtom::PH: return "p_H";
        case VecAtom::PPhi0: return "p_phi0";
        case VecAtom::PPhiP: return "p_phi+";
        case VecAtom::PPhiM: return "p_phi-";
        case VecAtom::VA: return "A";
        case VecAtom::VZ: return "Z";
        case VecAtom::VWp: return "W+";
        case VecAtom::VWm: return "W-";
    }
    return "?";
}

inline Leg vec_atom_leg(VecAtom v) {
    switch (v) {
        case VecAtom::PH: return Leg::H;
        case VecAtom::PPhi0: return Leg::Phi0;
        case VecAtom::PPhiP: return Leg::PhiP;
        case VecAtom::PPhiM: return Leg::PhiM;
        case VecAtom::VA: return Leg::A;
        case VecAtom::VZ: return Leg::Z;
        case VecAtom::VWp: return Leg::Wp;
        case VecAtom::VWm: return Leg::Wm;
    }
    return Leg::H;
}

inline VecAtom vec_atom_conj(VecAtom v) {
    switch (v) {
        case VecAtom::PPhiP: return VecAtom::PPhiM;
        case VecAtom::PPhiM: return VecAtom::PPhiP;
        case VecAtom::VWp: return VecAtom::VWm;
        case VecAtom::VWm: return VecAtom::VWp;
        default: return v;
    }
}

inline Leg leg_conj(Leg l) {
    switch (l) {
        case Leg::PhiP: return Leg::PhiM;
        case Leg::PhiM: return Leg::PhiP;
        case Leg::Wp: return Leg::Wm;
        case Leg::Wm: return Leg::Wp;
        case Leg::Bil1: return Leg::Bil1c;
        case Leg::Bil2: return Leg::Bil2c;
        case Leg::Bil1c: return Leg::Bil1;
        case Leg::Bil2c: return Leg::Bil2;
        default: return l;
    }
}

// One term of a covariant-derivative component: coeff * (scalar legs) *
// vector-atom_lambda.
struct CovTerm {
    VecAtom vec;
    std::vector<Leg> fields;  // sorted multiset
    TrigPoly coeff;
};

namespace detail {

inline std::vector<Leg> sorted(std::vector<Leg> v) {
    std::sort(v.begin(), v.end());
    return v;
}

inline TrigPoly tp(CRat c, TrigKey k = {}) { return TrigPoly::mono(c, k); }

}  // namespace detail

// Symbolic expansion of the first covariant-derivative component.
inline std::vector<CovTerm> nabla_phi1_terms() {
    using detail::tp;
    const CRat one = crat(1, 1, 0, 1);
    const CRat i = crat(0, 1, 1, 1);
    const CRat mi_half = crat(0, 1, -1, 2);  // -i/2
    std::vector<CovTerm> t;
    // Momentum atoms carry their own field leg; fields list the extra ones.
    t.push_back({VecAtom::PH, {}, tp(i)});
    t.push_back({VecAtom::PPhi0, {}, tp(-one)});
    // -(i/2) q sec(th) (m + H + i phi0) Z
    t.push_back({VecAtom::VZ, {}, tp(mi_half, {1, 0, -1, 1, 0, 0})});
    t.push_back({VecAtom::VZ, {Leg::H}, tp(mi_half, {1, 0, -1, 0, 0, 0})});
    t.push_back({VecAtom::VZ, {Leg::Phi0}, tp(mi_half * i, {1, 0, -1, 0, 0, 0})});
    // -(i/sqrt2) q phi+ W-
    t.push_back({VecAtom::VWm, {Leg::PhiP}, tp(crat(0, 1, -1, 2), {1, 0, 0, 0, 0, 1})});
    return t;
}

// Symbolic expansion of the second component; cos(2 theta) is expanded as
// cos^2 - sin^2.
inline std::vector<CovTerm> nabla_phi2_terms() {
    using detail::tp;
    const CRat i = crat(0, 1, 1, 1);
    const CRat i_half = crat(0, 1, 1, 2);
    std::vector<CovTerm> t;
    t.push_back({VecAtom::PPhiP, {}, tp(i)});
    // -i sin(th) q phi+ A
    t.push_back({VecAtom::VA, {Leg::PhiP}, tp(-i, {1, 1, 0, 0, 0, 0})});
    // +(i/2) sec(th) cos(2th) q phi+ Z
    t.push_back({VecAtom::VZ, {Leg::PhiP},
                 tp(i_half, {1, 0, 1, 0, 0, 0}) + tp(-i_half, {1, 2, -1, 0, 0, 0})});
    // -(i/sqrt2) q (m + H + i phi0) W+
    t.push_back({VecAtom::VWp, {}, tp(crat(0, 1, -1, 2), {1, 0, 0, 1, 0, 1})});
    t.push_back({VecAtom::VWp, {Leg::H}, tp(crat(0, 1, -1, 2), {1, 0, 0, 0, 0, 1})});
    t.push_back({VecAtom::VWp, {Leg::Phi0}, tp(crat(0, 1, -1, 2) * i, {1, 0, 0, 0, 0, 1})});
    return t;
}

inline std::vector<CovTerm> conj_terms(const std::vector<CovTerm>& in) {
    std::vector<CovTerm> out;
    for (const CovTerm& t : in) {
        CovTerm c;
        c.vec = vec_atom_conj(t.vec);
        for (Leg l : t.fields) c.fields.push_back(leg_conj(l));
        c.fields = detail::sorted(c.fields);
        c.coeff = t.coeff.conj();
        out.push_back(std::move(c));
    }
    return out;
}

// --- vertex tables ----------------------------------------------------------

// One monomial of a Lagrangian term: a leg multiset, an exact coefficient
// and a spacetime-structure tag ("1" for pure scalars, "g(x|y)" for a
// metric contraction of two vector atoms).
struct VertexEntry {
    std::vector<Leg> legs;  // sorted
    TrigPoly coeff;
    std::string tag;
    // Vector atoms behind the tag, when present.
    bool has_vectors = false;
    VecAtom va{}, vb{};
};

struct VertexTable {
    std::string term;
    std::vector<VertexEntry> entries;
};

namespace detail {

inline std::string pair_tag(VecAtom a, VecAtom b) {
    std::string x = vec_atom_name(a), y = vec_atom_name(b);
    if (y < x) std::swap(x, y);
    return cat("g(", x, "|", y, ")");
}

struct EntryKey {
    std::vector<Leg> legs;
    std::string tag;
    friend bool operator<(const EntryKey& a, const EntryKey& b) {
        return std::tie(a.legs, a.tag) < std::tie(b.legs, b.tag);
    }
};

// Small polynomial over leg multisets with TrigPoly coefficients.
struct LegPoly {
    std::map<std::vector<Leg>, TrigPoly> terms;

    friend LegPoly operator+(const LegPoly& a, const LegPoly& b) {
        LegPoly p = a;
        for (const auto& [k, c] : b.terms) {
            auto it = p.terms.find(k);
            if (it == p.terms.end())
                p.terms[k] = c;
            else {
                it->second = it->second + c;
                if (it->second.is_zero()) p.terms.erase(it);
            }
        }
        return p;
    }

    friend LegPoly operator*(const LegPoly& a, const LegPoly& b) {
        LegPoly p;
        for (const auto& [ka, ca] : a.terms)
            for (const auto& [kb, cb] : b.terms) {
                std::vector<Leg> k = ka;
                k.insert(k.end(), kb.begin(), kb.end());
                std::sort(k.begin(), k.end());
                TrigPoly c = ca * cb;
                auto it = p.terms.find(k);
                if (it == p.terms.end())
                    p.terms[k] = c;
                else {
                    it->second = it->second + c;
                    if (it->second.is_zero()) p.terms.erase(it);
                }
            }
        return p;
    }
};

inline LegPoly lp_mono(std::vector<Leg> legs, TrigPoly c) {
    LegPoly p;
    p.terms[sorted(std::move(legs))] = std::move(c);
    return p;
}

}  // namespace detail

// g^{lm} nabla_l phibar_alpha nabla_m phi^alpha expanded into monomial
// vertex entries.
inline VertexTable extract_vertices_kinetic() {
    std::vector<std::vector<CovTerm>> nabla = {nabla_phi1_terms(), nabla_phi2_terms()};
    std::map<detail::EntryKey, VertexEntry> acc;
    for (int alpha = 0; alpha < 2; ++alpha) {
        std::vector<CovTerm> bar = conj_terms(nabla[alpha]);
        for (const CovTerm& tl : bar)
            for (const CovTerm& tr : nabla[alpha]) {
                VertexEntry e;
                e.legs = tl.fields;
                e.legs.insert(e.legs.end(), tr.fields.begin(), tr.fields.end());
                e.legs.push_back(vec_atom_leg(tl.vec));
                e.legs.push_back(vec_atom_leg(tr.vec));
                std::sort(e.legs.begin(), e.legs.end());
                e.coeff = tl.coeff * tr.coeff;
                e.tag = detail::pair_tag(tl.vec, tr.vec);
                e.has_vectors = true;
                e.va = tl.vec;
                e.vb = tr.vec;
                detail::EntryKey key{e.legs, e.tag};
                auto it = acc.find(key);
                if (it == acc.end())
                    acc[key] = std::move(e);
                else
                    it->second.coeff = it->second.coeff + e.coeff;
            }
    }
    VertexTable t;
    t.term = "higgs-kinetic";
    for (auto& [k, e] : acc)
        if (!e.coeff.is_zero()) t.entries.push_back(std::move(e));
    return t;
}

// V[phi] expanded around the vacuum: V = lambda m^4 - lambda sigma^2 with
// sigma = 2 m H + H^2 + phi0^2 + phi+ phi-.
inline VertexTable extract_vertices_potential() {
    using detail::lp_mono;
    using detail::LegPoly;
    const CRat one = crat(1, 1, 0, 1);
    LegPoly sigma = lp_mono({Leg::H}, TrigPoly::mono(crat(2, 1, 0, 1), {0, 0, 0, 1, 0, 0})) +
                    lp_mono({Leg::H, Leg::H}, TrigPoly::mono(one)) +
                    lp_mono({Leg::Phi0, Leg::Phi0}, TrigPoly::mono(one)) +
                    lp_mono({Leg::PhiP, Leg::PhiM}, TrigPoly::mono(one));
    LegPoly v = lp_mono({}, TrigPoly::mono(one, {0, 0, 0, 4, 1, 0}));
    LegPoly s2 = sigma * sigma;
    for (auto& [legs, c] : s2.terms)
        v = v + lp_mono(std::vector<Leg>(legs),
                        c * TrigPoly::mono(-one, {0, 0, 0, 0, 1, 0}));
    VertexTable t;
    t.term = "higgs-potential";
    for (auto& [legs, c] : v.terms) {
        if (c.is_zero()) continue;
        VertexEntry e;
        e.legs = legs;
        e.coeff = c;
        e.tag = "1";
        t.entries.push_back(std::move(e));
    }
    return t;
}

// -(<PsiBar_L phi Psi_R> + <PsiBar_R phibar Psi_L>) at the contraction
// level: the fermion bilinears are legs of their own.
inline VertexTable extract_vertices_yukawa() {
    using detail::lp_mono;
    using detail::LegPoly;
    const CRat one = crat(1, 1, 0, 1);
    const CRat i = crat(0, 1, 1, 1);
    // (m + H + i phi0) Bil1 + phi+ Bil2, plus the conjugate block.
    LegPoly term =
        lp_mono({Leg::Bil1}, TrigPoly::mono(-one, {0, 0, 0, 1, 0, 0})) +
        lp_mono({Leg::H, Leg::Bil1}, TrigPoly::mono(-one)) +
        lp_mono({Leg::Phi0, Leg::Bil1}, TrigPoly::mono(-i)) +
        lp_mono({Leg::PhiP, Leg::Bil2}, TrigPoly::mono(-one)) +
        lp_mono({Leg::Bil1c}, TrigPoly::mono(-one, {0, 0, 0, 1, 0, 0})) +
        lp_mono({Leg::H, Leg::Bil1c}, TrigPoly::mono(-one)) +
        lp_mono({Leg::Phi0, Leg::Bil1c}, TrigPoly::mono(i)) +
        lp_mono({Leg::PhiM, Leg::Bil2c}, TrigPoly::mono(-one));
    VertexTable t;
    t.term = "yukawa";
    for (auto& [legs, c] : term.terms) {
        VertexEntry e;
        e.legs = legs;
        e.coeff = c;
        e.tag = "1";
        t.entries.push_back(std::move(e));
    }
    return t;
}

inline VertexTable extract_vertices(const std::string& term) {
    if (term == "higgs-kinetic") return extract_vertices_kinetic();
    if (term == "higgs-potential") return extract_vertices_potential();
    if (term == "yukawa") return extract_vertices_yukawa();
    throw Error(cat("unknown lagrangian term '", term,
                    "'; expected higgs-kinetic, higgs-potential or yukawa"));
}

// --- numeric validation -----------------------------------------------------

// Independent numeric value of a term as a polynomial in per-leg scalar
// multipliers; conjugate legs are deliberately decoupled so coefficients can
// be read off holomorphically.
struct VertexProbe {
    EWParams params;
    // Fixed random directions and momenta.
    std::array<double, 4> dirA{}, dirZ{};
    std::array<cplx, 4> dirWp{}, dirWm{};
    std::array<double, 4> pH{}, pPhi0{}, pPhiP{};

    static VertexProbe random(const EWParams& p, RngStream& rng) {
        VertexProbe pr;
        pr.params = p;
        for (int l = 0; l < 4; ++l) {
            pr.dirA[l] = rng.next_gaussian();
            pr.dirZ[l] = rng.next_gaussian();
            pr.dirWp[l] = rng.next_complex_gaussian();
            pr.dirWm[l] = rng.next_complex_gaussian();
            pr.pH[l] = rng.next_gaussian();
            pr.pPhi0[l] = rng.next_gaussian();
            pr.pPhiP[l] = rng.next_gaussian();
        }
        return pr;
    }

    std::array<cplx, 4> atom_vector(VecAtom v) const {
        auto lift = [](const std::array<double, 4>& r) {
            std::array<cplx, 4> c;
            for (int l = 0; l < 4; ++l) c[l] = r[l];
            return c;
        };
        switch (v) {
            case VecAtom::PH: return lift(pH);
            case VecAtom::PPhi0: return lift(pPhi0);
            case VecAtom::PPhiP: return lift(pPhiP);
            case VecAtom::PPhiM: return lift(pPhiP);  // same momentum as phi+
            case VecAtom::VA: return lift(dirA);
            case VecAtom::VZ: return lift(dirZ);
            case VecAtom::VWp: return dirWp;
            case VecAtom::VWm: return dirWm;
        }
        return {};
    }

    cplx tag_value(const VertexEntry& e) const {
        if (!e.has_vectors) return {1.0, 0.0};
        std::array<cplx, 4> x = atom_vector(e.va), y = atom_vector(e.vb);
        cplx acc{0.0, 0.0};
        for (int l = 0; l < 4; ++l) acc += minkowski_diag(l) * x[l] * y[l];
        return acc;
    }

    // Literal covariant-derivative formulas with independent conjugate legs.
    cplx term_value(const std::string& term, const std::map<Leg, cplx>& t) const {
        auto get = [&](Leg l) {
            auto it = t.find(l);
            return it == t.end() ? cplx{0.0, 0.0} : it->second;
        };
        const cplx iu{0.0, 1.0};
        const EWParams& p = params;
        cplx H = get(Leg::H), phi0 = get(Leg::Phi0);
        cplx phiP = get(Leg::PhiP), phiM = get(Leg::PhiM);
        if (term == "higgs-potential") {
            cplx s = (p.m + H) * (p.m + H) + phi0 * phi0 + phiP * phiM;
            return p.lambda * (2.0 * p.m * p.m * s - s * s);
        }
        if (term == "yukawa") {
            return -((p.m + H + iu * phi0) * get(Leg::Bil1) + phiP * get(Leg::Bil2) +
                     (p.m + H - iu * phi0) * get(Leg::Bil1c) + phiM * get(Leg::Bil2c));
        }
        if (term == "higgs-kinetic") {
            double sec = 1.0 / std::cos(p.theta);
            double sn = std::sin(p.theta);
            double c2 = std::cos(2.0 * p.theta);
            cplx acc{0.0, 0.0};
            for (int l = 0; l < 4; ++l) {
                cplx Al = get(Leg::A) * dirA[l];
                cplx Zl = get(Leg::Z) * dirZ[l];
                cplx Wpl = get(Leg::Wp) * dirWp[l];
                cplx Wml = get(Leg::Wm) * dirWm[l];
                cplx d1 = iu * pH[l] * H - pPhi0[l] * phi0 -
                          (iu / 2.0) * p.q * sec * (p.m + H + iu * phi0) * Zl -
                          (iu / kSqrt2) * p.q * phiP * Wml;
                cplx d2 = iu * pPhiP[l] * phiP - iu * sn * p.q * phiP * Al +
                          (iu / 2.0) * sec * c2 * p.q * phiP * Zl -
                          (iu / kSqrt2) * p.q * (p.m + H + iu * phi0) * Wpl;
                cplx d1b = -iu * pH[l] * H - pPhi0[l] * phi0 +
                           (iu / 2.0) * p.q * sec * (p.m + H - iu * phi0) * Zl +
                           (iu / kSqrt2) * p.q * phiM * Wpl;
                cplx d2b = -iu * pPhiP[l] * phiM + iu * sn * p.q * phiM * Al -
                           (iu / 2.0) * sec * c2 * p.q * phiM * Zl +
                           (iu / kSqrt2) * p.q * (p.m + H - iu * phi0) * Wml;
                acc += minkowski_diag(l) * (d1b * d1 + d2b * d2);
            }
            return acc;
        }
        throw Error(cat("unknown lagrangian term '", term, "'"));
    }
};

namespace detail {

// Coefficient of prod_i x_i^{deg_i} in a polynomial evaluated on an integer
// grid, one dimension at a time; exact for polynomial inputs.
inline cplx extract_monomial(const std::function<cplx(const std::vector<double>&)>& f,
                             const std::vector<int>& degs, const std::vector<int>& maxdegs,
                             std::vector<double>& point, std::size_t dim) {
    if (dim == degs.size()) return f(point);
    int n = maxdegs[dim] + 1;
    Eigen::MatrixXcd vand(n, n);
    Eigen::VectorXcd vals(n);
    for (int k = 0; k < n; ++k) {
        double x = static_cast<double>(k) - static_cast<double>(n - 1) / 2.0;
        point[dim] = x;
        vals[k] = extract_monomial(f, degs, maxdegs, point, dim + 1);
        double pw = 1.0;
        for (int j = 0; j < n; ++j) {
            vand(k, j) = pw;
            pw *= x;
        }
    }
    point[dim] = 0.0;
    Eigen::VectorXcd coefs = vand.colPivHouseholderQr().solve(vals);
    return coefs[degs[dim]];
}

}  // namespace detail

struct VertexCheckResult {
    double max_rel_deviation = 0.0;
    double reconstruction_rel_deviation = 0.0;
    int monomials_checked = 0;
};

// Validates every table coefficient against numerical differentiation of
// the term at random field points, and the full table against direct
// evaluation.
inline VertexCheckResult validate_vertex_table(const VertexTable& table, const EWParams& p,
                                               std::uint64_t seed, int probes = 3) {
    VertexCheckResult res;
    // Distinct leg multisets with their expected aggregated value factors.
    std::map<std::vector<Leg>, std::vector<const VertexEntry*>> groups;
    for (const VertexEntry& e : table.entries) groups[e.legs].push_back(&e);

    for (int pr = 0; pr < probes; ++pr) {
        RngStream rng = RngStream::keyed(seed, cat("vertex-probe-", table.term), pr);
        VertexProbe probe = VertexProbe::random(p, rng);

        for (const auto& [legs, entries] : groups) {
            // Variables: distinct legs of this multiset with degrees.
            std::vector<Leg> vars;
            std::vector<int> degs;
            for (Leg l : legs) {
                if (!vars.empty() && vars.back() == l)
                    ++degs.back();
                else {
                    vars.push_back(l);
                    degs.push_back(1);
                }
            }
            // Maximum degree of each variable anywhere in the term (legs
            // multiplicity across the table bounds it).
            std::vector<int> maxdegs(vars.size(), 0);
            for (std::size_t vi = 0; vi < vars.size(); ++vi) {
                int md = degs[vi];
                for (const VertexEntry& e : table.entries) {
                    int cnt = static_cast<int>(std::count(e.legs.begin(), e.legs.end(), vars[vi]));
                    md = std::max(md, cnt);
                }
                maxdegs[vi] = md;
            }
            auto f = [&](const std::vector<double>& x) {
                std::map<Leg, cplx> t;
                for (std::size_t vi = 0; vi < vars.size(); ++vi) t[vars[vi]] = x[vi];
                return probe.term_value(table.term, t);
            };
            std::vector<double> point(vars.size(), 0.0);
            cplx numeric = detail::extract_monomial(f, degs, maxdegs, point, 0);
            cplx expected{0.0, 0.0};
            for (const VertexEntry* e : entries)
                expected += e->coeff.value(p) * probe.tag_value(*e);
            double scale = std::max({std::abs(numeric), std::abs(expected), 1e-12});
            res.max_rel_deviation =
                std::max(res.max_rel_deviation, std::abs(numeric - expected) / scale);
            ++res.monomials_checked;
        }

        // Whole-table reconstruction at a random point.
        std::map<Leg, cplx> t;
        std::set<Leg> all_legs;
        for (const VertexEntry& e : table.entries)
            for (Leg l : e.legs) all_legs.insert(l);
        for (Leg l : all_legs) t[l] = rng.next_gaussian();
        cplx direct = probe.term_value(table.term, t);
        cplx rebuilt{0.0, 0.0};
        for (const VertexEntry& e : table.entries) {
            cplx mono = e.coeff.value(p) * probe.tag_value(e);
            for (Leg l : e.legs) mono *= t[l];
            rebuilt += mono;
        }
        double scale = std::max({std::abs(direct), std::abs(rebuilt), 1e-12});
        res.reconstruction_rel_deviation =
            std::max(res.reconstruction_rel_deviation, std::abs(direct - rebuilt) / scale);
    }
    return res;
}

// CSV rows: legs, coefficient numerator/denominator, the imaginary-unit
// power, trig-power tags and the index-structure tag. Mixed real+imaginary
// coefficients split into two rows.
inline std::string vertex_table_csv(const VertexTable& table) {
    std::ostringstream os;
    os << "legs,coeff_num,coeff_den,i_power,trig_tags,structure\n";
    for (const VertexEntry& e : table.entries) {
        std::string legs;
        for (std::size_t i = 0; i < e.legs.size(); ++i) {
            if (i) legs += "*";
            legs += leg_name(e.legs[i]);
        }
        if (legs.empty()) legs = "1";
        for (const auto& [k, c] : e.coeff.terms) {
            auto row = [&](const Rational& r, int ipow) {
                if (r.is_zero()) return;
                os << legs << "," << r.num << "," << r.den << "," << ipow << "," << k.str()
                   << "," << e.tag << "\n";
            };
            row(c.re, 0);
            row(c.im, 1);
        }
    }
    return os.str();
}

}  // namespace ewgeom
