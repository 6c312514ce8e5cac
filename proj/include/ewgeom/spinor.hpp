#pragma once

#include <Eigen/Dense>
#include <array>

#include "ewgeom/common.hpp"
#include "ewgeom/sigma.hpp"

namespace ewgeom {

using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using Eigen::Vector2cd;
using Eigen::Vector4cd;

// A normalized symplectic form on the 2-spinor fiber, fixed only up to a
// unit phase: eps_{01} = phase. Raising is normalized by
// eps^{AB} eps_{CB} = delta^A_C, so sharp(flat(u)) = u with no extra sign.
struct EpsilonForm {
    cplx phase{1.0, 0.0};

    cplx lower(int a, int b) const {
        if (a == b) return {0.0, 0.0};
        return (a == 0) ? phase : -phase;
    }
    cplx upper(int a, int b) const {
        if (a == b) return {0.0, 0.0};
        return (a == 0) ? cplx{1.0, 0.0} / phase : -cplx{1.0, 0.0} / phase;
    }
    // Conjugate-space (dotted) components.
    cplx lower_dot(int a, int b) const { return std::conj(lower(a, b)); }
    cplx upper_dot(int a, int b) const { return std::conj(upper(a, b)); }

    Vector2cd flat(const Vector2cd& u) const {
        // (u flat)_B = u^A eps_{AB}
        return Vector2cd(-phase * u[1], phase * u[0]);
    }
    Vector2cd sharp(const Vector2cd& lam) const {
        // (lam sharp)^A = eps^{AB} lam_B
        return Vector2cd(lam[1] / phase, -lam[0] / phase);
    }
    Vector2cd flat_dot(const Vector2cd& u) const {
        return Vector2cd(-std::conj(phase) * u[1], std::conj(phase) * u[0]);
    }
    Vector2cd sharp_dot(const Vector2cd& lam) const {
        return Vector2cd(lam[1] / std::conj(phase), -lam[0] / std::conj(phase));
    }
};

// Element of the complexified Hermitian fiber: components y^{A Adot};
// Hermitian members are Minkowski directions.
struct HVector {
    Matrix2cd y = Matrix2cd::Zero();

    static HVector pauli(int mu) {
        HVector v;
        for (int a = 0; a < 2; ++a)
            for (int ad = 0; ad < 2; ++ad) v.y(a, ad) = tau_up(mu, a, ad);
        return v;
    }

    static HVector from_spacetime(const std::array<cplx, 4>& t) {
        HVector v;
        for (int mu = 0; mu < 4; ++mu)
            for (int a = 0; a < 2; ++a)
                for (int ad = 0; ad < 2; ++ad) v.y(a, ad) += t[mu] * tau_up(mu, a, ad);
        return v;
    }

    bool is_hermitian(double tol = 1e-12) const {
        return (y - y.adjoint()).norm() <= tol * std::max(1.0, y.norm());
    }

    friend HVector operator+(const HVector& a, const HVector& b) { return {a.y + b.y}; }
    friend HVector operator-(const HVector& a, const HVector& b) { return {a.y - b.y}; }
    friend HVector operator*(cplx s, const HVector& a) { return {s * a.y}; }
};

// The Lorentz metric induced by eps x epsbar; independent of the epsilon
// phase and real on Hermitian arguments.
struct LorentzMetric {
    EpsilonForm eps;

    cplx operator()(const HVector& x, const HVector& z) const {
        cplx acc{0.0, 0.0};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                if (a == b) continue;
                for (int ad = 0; ad < 2; ++ad)
                    for (int bd = 0; bd < 2; ++bd) {
                        if (ad == bd) continue;
                        acc += eps.lower(a, b) * eps.lower_dot(ad, bd) * x.y(a, ad) *
                               z.y(b, bd);
                    }
            }
        return acc;
    }

    // Upper spacetime components of a Hermitian direction.
    std::array<cplx, 4> spacetime_components(const HVector& v) const {
        std::array<cplx, 4> t;
        for (int mu = 0; mu < 4; ++mu)
            t[mu] = minkowski_diag(mu) * (*this)(v, HVector::pauli(mu));
        return t;
    }
};

inline LorentzMetric lorentz_metric(const EpsilonForm& eps) { return LorentzMetric{eps}; }

// Dirac spinor (u, lambda_bar) in its Weyl decomposition; lambda_bar holds
// the dotted covector components.
struct DiracSpinor {
    Vector2cd u = Vector2cd::Zero();
    Vector2cd lambda_bar = Vector2cd::Zero();

    Vector4cd stacked() const {
        Vector4cd v;
        v << u[0], u[1], lambda_bar[0], lambda_bar[1];
        return v;
    }
    static DiracSpinor from_stacked(const Vector4cd& v) {
        DiracSpinor s;
        s.u << v[0], v[1];
        s.lambda_bar << v[2], v[3];
        return s;
    }
    double norm() const { return stacked().norm(); }
};

// Dual Dirac covector (a, b_bar) with pairing <(a, b_bar), (u, chi)> =
// a_A u^A + b_bar^Adot chi_Adot.
struct DiracCovector {
    Vector2cd a = Vector2cd::Zero();
    Vector2cd b_bar = Vector2cd::Zero();

    cplx pair(const DiracSpinor& s) const {
        return a[0] * s.u[0] + a[1] * s.u[1] + b_bar[0] * s.lambda_bar[0] +
               b_bar[1] * s.lambda_bar[1];
    }
};

// The Clifford map on simple tensors, extended by linearity:
// top block sends chi to sqrt(2) y^{A Adot} chi_Adot, bottom block sends u
// to sqrt(2) eps_{CD} epsbar_{Adot Bdot} y^{C Adot} u^D. Acting on stacked
// (u, chi) 4-vectors.
inline Matrix4cd gamma(const HVector& v, const EpsilonForm& eps = {}) {
    Matrix4cd g = Matrix4cd::Zero();
    for (int a = 0; a < 2; ++a)
        for (int ad = 0; ad < 2; ++ad) g(a, 2 + ad) = kSqrt2 * v.y(a, ad);
    for (int bd = 0; bd < 2; ++bd)
        for (int d = 0; d < 2; ++d) {
            cplx acc{0.0, 0.0};
            for (int c = 0; c < 2; ++c)
                for (int ad = 0; ad < 2; ++ad)
                    acc += eps.lower(c, d) * eps.lower_dot(ad, bd) * v.y(c, ad);
            g(2 + bd, d) = kSqrt2 * acc;
        }
    return g;
}

// Antilinear Dirac adjunction (u, chi) -> (conj chi, conj u).
inline DiracCovector dirac_adjoint(const DiracSpinor& s) {
    DiracCovector c;
    c.a = s.lambda_bar.conjugate();
    c.b_bar = s.u.conjugate();
    return c;
}

// Matrix H of the sesquilinear form <adjoint(x), y> = x^dag H y.
inline Matrix4cd dirac_adjunction_form() {
    Matrix4cd h = Matrix4cd::Zero();
    for (int k = 0; k < 4; ++k) {
        Vector4cd e = Vector4cd::Zero();
        e[k] = 1.0;
        DiracCovector row = dirac_adjoint(DiracSpinor::from_stacked(e));
        for (int j = 0; j < 4; ++j) {
            Vector4cd f = Vector4cd::Zero();
            f[j] = 1.0;
            h(k, j) = row.pair(DiracSpinor::from_stacked(f));
        }
    }
    return h;
}

// Unit future-pointing timelike direction attached to a Dirac spinor with
// nonvanishing <lambda, u>.
inline HVector tau_of(const DiracSpinor& psi, const EpsilonForm& eps = {},
                      double tol = 1e-10) {
    Vector2cd lam = psi.lambda_bar.conjugate();  // lambda_A
    cplx z = lam.transpose() * psi.u;
    double scale = lam.norm() * psi.u.norm();
    if (std::abs(z) <= tol * std::max(scale, 1e-300))
        throw SingularInputError(cat("tau construction is singular: |<lambda,u>| = ",
                                     std::abs(z), " below tolerance"));
    Vector2cd lam_sharp = eps.sharp(lam);
    HVector t;
    t.y = (psi.u * psi.u.adjoint() + lam_sharp * lam_sharp.adjoint()) / (kSqrt2 * std::abs(z));
    return t;
}

// Splits psi into the two mass-shell eigenparts of gamma[p sharp] for an
// on-shell future-pointing covector p with g(p#, p#) = m^2.
struct MassShellParts {
    DiracSpinor plus;
    DiracSpinor minus;
};

inline MassShellParts mass_shell_project(const DiracSpinor& psi,
                                         const std::array<double, 4>& p_cov, double m,
                                         const EpsilonForm& eps = {}) {
    std::array<cplx, 4> p_up;
    for (int mu = 0; mu < 4; ++mu) p_up[mu] = minkowski_diag(mu) * p_cov[mu];
    double p2 = (p_cov[0] * p_cov[0]) - (p_cov[1] * p_cov[1]) - (p_cov[2] * p_cov[2]) -
                (p_cov[3] * p_cov[3]);
    double dev = p2 - m * m;
    if (std::abs(dev) > 1e-9 * m * m)
        throw OffShellError(cat("momentum is off shell: g(p#,p#) - m^2 = ", dev), dev);
    HVector y = HVector::from_spacetime(p_up);
    Matrix4cd g = gamma(y, eps);
    Matrix4cd id = Matrix4cd::Identity();
    Vector4cd v = psi.stacked();
    MassShellParts parts;
    parts.plus = DiracSpinor::from_stacked(((m * id + g) / (2.0 * m)) * v);
    parts.minus = DiracSpinor::from_stacked(((m * id - g) / (2.0 * m)) * v);
    return parts;
}

// QED interaction, gamma route: -e <adjoint(psi), gamma[A#] psi'> for a
// covector A in H*.
inline cplx qed_vertex_gamma_route(const DiracSpinor& psi, const Matrix2cd& a_cov,
                                   const DiracSpinor& psi_prime, double e,
                                   const EpsilonForm& eps = {}) {
    // A# ^{A Adot} = eps^{AB} epsbar^{Adot Bdot} a_{B Bdot}
    HVector a_sharp;
    for (int a = 0; a < 2; ++a)
        for (int ad = 0; ad < 2; ++ad) {
            cplx acc{0.0, 0.0};
            for (int b = 0; b < 2; ++b)
                for (int bd = 0; bd < 2; ++bd)
                    acc += eps.upper(a, b) * eps.upper_dot(ad, bd) * a_cov(b, bd);
            a_sharp.y(a, ad) = acc;
        }
    DiracCovector bar = dirac_adjoint(psi);
    Vector4cd gv = gamma(a_sharp, eps) * psi_prime.stacked();
    return -e * bar.pair(DiracSpinor::from_stacked(gv));
}

// u x vbar + mu# x lambdabar#: the direction whose g-orthogonal covectors
// annihilate the vertex.
inline HVector qed_vertex_kernel_direction(const DiracSpinor& psi,
                                           const DiracSpinor& psi_prime,
                                           const EpsilonForm& eps = {}) {
    Vector2cd mu = psi.lambda_bar.conjugate();
    Vector2cd mu_sharp = eps.sharp(mu);
    Vector2cd lamb_sharp = eps.sharp_dot(psi_prime.lambda_bar);
    HVector k;
    k.y = psi_prime.u * psi.u.conjugate().transpose() + mu_sharp * lamb_sharp.transpose();
    return k;
}

// The same interaction by the independent two-spinor formula:
// -e sqrt(2) g(A#, u x vbar + mu# x lambdabar#).
inline cplx qed_vertex_two_spinor_route(const DiracSpinor& psi, const Matrix2cd& a_cov,
                                        const DiracSpinor& psi_prime, double e,
                                        const EpsilonForm& eps = {}) {
    HVector a_sharp;
    for (int a = 0; a < 2; ++a)
        for (int ad = 0; ad < 2; ++ad) {
            cplx acc{0.0, 0.0};
            for (int b = 0; b < 2; ++b)
                for (int bd = 0; bd < 2; ++bd)
                    acc += eps.upper(a, b) * eps.upper_dot(ad, bd) * a_cov(b, bd);
            a_sharp.y(a, ad) = acc;
        }
    HVector k = qed_vertex_kernel_direction(psi, psi_prime, eps);
    LorentzMetric g{eps};
    return -e * kSqrt2 * g(a_sharp, k);
}

// Local gauge field alpha^i_a with the structure constants of the chosen
// frame; c^i_{jk} antisymmetric in (j, k).
struct GaugeFieldLocal {
    int lie_dim = 0;
    std::vector<cplx> alpha;  // [i * 4 + a]
    std::vector<double> c;    // [i * n * n + j * n + k]

    GaugeFieldLocal(int n, std::vector<cplx> a, std::vector<double> sc)
        : lie_dim(n), alpha(std::move(a)), c(std::move(sc)) {
        if (alpha.size() != static_cast<std::size_t>(n) * 4 ||
            c.size() != static_cast<std::size_t>(n) * n * n)
            throw Error("gauge field dimension mismatch");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    if (std::abs(cc(i, j, k) + cc(i, k, j)) > 1e-12)
                        throw Error("structure constants not antisymmetric in (j,k)");
    }

    cplx a(int i, int sp) const { return alpha[static_cast<std::size_t>(i) * 4 + sp]; }
    double cc(int i, int j, int k) const {
        return c[(static_cast<std::size_t>(i) * lie_dim + j) * lie_dim + k];
    }
};

struct CurvatureLike {
    int lie_dim = 0;
    std::vector<cplx> rho;  // [i * 16 + a * 4 + b], antisymmetric in (a, b)

    cplx at(int i, int a, int b) const {
        return rho[static_cast<std::size_t>(i) * 16 + a * 4 + b];
    }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& v : rho) m = std::max(m, std::abs(v));
        return m;
    }
};

// rho^i_{ab} = i (p_a alpha^i_b - p_b alpha^i_a) + c^i_{jk} alpha^j_a
// alpha^k_b; antisymmetry in (a, b) filled by construction.
inline CurvatureLike curvature_like(const std::array<double, 4>& p,
                                    const GaugeFieldLocal& f) {
    CurvatureLike out;
    out.lie_dim = f.lie_dim;
    out.rho.assign(static_cast<std::size_t>(f.lie_dim) * 16, cplx{0.0, 0.0});
    const cplx iu{0.0, 1.0};
    for (int i = 0; i < f.lie_dim; ++i)
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b) {
                cplx v = iu * (p[a] * f.a(i, b) - p[b] * f.a(i, a));
                for (int j = 0; j < f.lie_dim; ++j)
                    for (int k = 0; k < f.lie_dim; ++k)
                        v += f.cc(i, j, k) * f.a(j, a) * f.a(k, b);
                out.rho[static_cast<std::size_t>(i) * 16 + a * 4 + b] = v;
                out.rho[static_cast<std::size_t>(i) * 16 + b * 4 + a] = -v;
            }
    return out;
}

// The gauge replacement alpha -> p x chi + alpha, materialized on the field.
inline GaugeFieldLocal gauge_replace(const GaugeFieldLocal& f, const std::array<double, 4>& p,
                                     const std::vector<cplx>& chi) {
    if (chi.size() != static_cast<std::size_t>(f.lie_dim))
        throw Error("chi dimension mismatch");
    GaugeFieldLocal out = f;
    for (int i = 0; i < f.lie_dim; ++i)
        for (int a = 0; a < 4; ++a)
            out.alpha[static_cast<std::size_t>(i) * 4 + a] += p[a] * chi[static_cast<std::size_t>(i)];
    return out;
}

}  // namespace ewgeom
