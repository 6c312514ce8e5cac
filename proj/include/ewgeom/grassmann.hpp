#pragma once

#include <bit>
#include <cmath>
#include <map>

#include "ewgeom/common.hpp"

namespace ewgeom {

enum class Parity : std::uint8_t { Even, Odd };

inline Parity operator+(Parity a, Parity b) {
    return (a == b) ? Parity::Even : Parity::Odd;
}

enum class TermParity : std::uint8_t { Zero, Even, Odd, Mixed };

// A scalar of the Z2-graded algebra over at most 64 anticommuting generators.
// Terms map a generator subset (bitmask, canonically ascending) to a complex
// coefficient. Purely complex numbers are the empty-subset case.
class GrassmannElement {
  public:
    using Key = std::uint64_t;
    using TermMap = std::map<Key, cplx>;

    GrassmannElement() = default;
    GrassmannElement(cplx body) {
        if (body != cplx{0.0, 0.0}) terms_[0] = body;
    }
    GrassmannElement(double body) : GrassmannElement(cplx{body, 0.0}) {}

    static GrassmannElement generator(int index) {
        if (index < 0 || index >= 64) throw Error("generator index out of range");
        GrassmannElement g;
        g.terms_[Key{1} << index] = cplx{1.0, 0.0};
        return g;
    }

    static GrassmannElement term(Key subset, cplx coeff) {
        GrassmannElement g;
        if (coeff != cplx{0.0, 0.0}) g.terms_[subset] = coeff;
        return g;
    }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    cplx body() const {
        auto it = terms_.find(0);
        return it == terms_.end() ? cplx{0.0, 0.0} : it->second;
    }

    cplx coeff(Key subset) const {
        auto it = terms_.find(subset);
        return it == terms_.end() ? cplx{0.0, 0.0} : it->second;
    }

    TermParity parity() const {
        if (terms_.empty()) return TermParity::Zero;
        bool even = false, odd = false;
        for (const auto& [k, c] : terms_) {
            (std::popcount(k) % 2 == 0 ? even : odd) = true;
        }
        if (even && odd) return TermParity::Mixed;
        return even ? TermParity::Even : TermParity::Odd;
    }

    bool compatible_with(Parity p) const {
        TermParity tp = parity();
        if (tp == TermParity::Zero) return true;
        if (tp == TermParity::Mixed) return false;
        return (tp == TermParity::Even) == (p == Parity::Even);
    }

    double one_norm() const {
        double s = 0.0;
        for (const auto& [k, c] : terms_) s += std::abs(c);
        return s;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
        return m;
    }

    GrassmannElement& operator+=(const GrassmannElement& o) {
        for (const auto& [k, c] : o.terms_) {
            cplx& slot = terms_[k];
            slot += c;
            if (slot == cplx{0.0, 0.0}) terms_.erase(k);
        }
        return *this;
    }

    GrassmannElement& operator-=(const GrassmannElement& o) {
        for (const auto& [k, c] : o.terms_) {
            cplx& slot = terms_[k];
            slot -= c;
            if (slot == cplx{0.0, 0.0}) terms_.erase(k);
        }
        return *this;
    }

    friend GrassmannElement operator+(GrassmannElement a, const GrassmannElement& b) {
        a += b;
        return a;
    }
    friend GrassmannElement operator-(GrassmannElement a, const GrassmannElement& b) {
        a -= b;
        return a;
    }
    friend GrassmannElement operator-(const GrassmannElement& a) {
        GrassmannElement r;
        for (const auto& [k, c] : a.terms_) r.terms_[k] = -c;
        return r;
    }

    friend GrassmannElement operator*(const GrassmannElement& a, cplx s) {
        GrassmannElement r;
        if (s == cplx{0.0, 0.0}) return r;
        for (const auto& [k, c] : a.terms_) r.terms_[k] = c * s;
        return r;
    }
    friend GrassmannElement operator*(cplx s, const GrassmannElement& a) { return a * s; }
    friend GrassmannElement operator*(const GrassmannElement& a, double s) {
        return a * cplx{s, 0.0};
    }
    friend GrassmannElement operator*(double s, const GrassmannElement& a) {
        return a * cplx{s, 0.0};
    }

    friend GrassmannElement operator*(const GrassmannElement& a, const GrassmannElement& b) {
        GrassmannElement r;
        for (const auto& [ka, ca] : a.terms_) {
            for (const auto& [kb, cb] : b.terms_) {
                if (ka & kb) continue;  // repeated generator: nilpotent
                cplx c = ca * cb;
                if (interleave_sign(ka, kb) < 0) c = -c;
                cplx& slot = r.terms_[ka | kb];
                slot += c;
                if (slot == cplx{0.0, 0.0}) r.terms_.erase(ka | kb);
            }
        }
        return r;
    }

    // Magnitude arithmetic: same key bookkeeping (including nilpotency) but
    // coefficient magnitudes accumulate without statistics signs. Used by
    // the scale shadows, which track the pre-cancellation mass feeding each
    // coefficient.
    static GrassmannElement mul_magnitude(const GrassmannElement& a,
                                          const GrassmannElement& b) {
        GrassmannElement r;
        for (const auto& [ka, ca] : a.terms_) {
            for (const auto& [kb, cb] : b.terms_) {
                if (ka & kb) continue;
                r.terms_[ka | kb] += std::abs(ca) * std::abs(cb);
            }
        }
        return r;
    }

    friend bool operator==(const GrassmannElement& a, const GrassmannElement& b) {
        return a.terms_ == b.terms_;
    }

    // Sign acquired by merging two ascending generator lists into one
    // ascending list: (-1)^{#inversions between a and b}.
    static int interleave_sign(Key a, Key b) {
        int inv = 0;
        Key bb = b;
        while (bb) {
            int y = std::countr_zero(bb);
            bb &= bb - 1;
            inv += std::popcount(a >> (y + 1));
        }
        return (inv % 2 == 0) ? 1 : -1;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [k, c] : terms_) {
            if (!first) os << " + ";
            first = false;
            os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
            Key kk = k;
            while (kk) {
                int g = std::countr_zero(kk);
                kk &= kk - 1;
                os << "*t" << g;
            }
        }
        return os.str();
    }

  private:
    TermMap terms_;
};

inline GrassmannElement grassmann_mul(const GrassmannElement& a, const GrassmannElement& b) {
    return a * b;
}

// Conjugation: complex-conjugate coefficients and reverse each generator
// subset, so (ab)~ = conj(b) conj(a). Reversing k generators costs
// k(k-1)/2 transpositions.
inline GrassmannElement grassmann_conjugate(const GrassmannElement& a) {
    GrassmannElement r;
    for (const auto& [k, c] : a.terms()) {
        int n = std::popcount(k);
        int flips = (n * (n - 1) / 2) % 2;
        cplx cc = std::conj(c);
        r += GrassmannElement::term(k, flips ? -cc : cc);
    }
    return r;
}

// Relative zero test against an accumulated magnitude scale. The floor is a
// fixed absolute guard for the degenerate scale == 0 case.
inline bool near_zero(const GrassmannElement& a, double scale, double tol) {
    constexpr double kFloor = 1e-12;
    return a.max_abs_coeff() <= tol * std::max(scale, kFloor);
}

// Coefficient-wise relative residual: each coefficient of the residual is
// compared to the pre-cancellation mass of the same generator subset.
inline double rel_max_residual(const GrassmannElement& residual,
                               const GrassmannElement& scale) {
    constexpr double kFloor = 1e-12;
    double worst = 0.0;
    for (const auto& [k, c] : residual.terms()) {
        double mass = scale.coeff(k).real();
        worst = std::max(worst, std::abs(c) / std::max(mass, kFloor));
    }
    return worst;
}

// Run-scoped allocator of fresh generators; never reuses an index within
// one evaluation context.
class GeneratorPool {
  public:
    int alloc() {
        if (next_ >= 64) throw Error("generator pool exhausted (64 max per evaluation)");
        return next_++;
    }
    int count() const { return next_; }

  private:
    int next_ = 0;
};

}  // namespace ewgeom
