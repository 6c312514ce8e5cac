#pragma once

#include <Eigen/Dense>

#include "ewgeom/tensor.hpp"

namespace ewgeom {

using Eigen::Matrix2cd;
using Eigen::MatrixXcd;
using Eigen::Vector2cd;

struct EWParams {
    double q = 1.0;       // gauge coupling
    double theta = 0.5;   // mixing angle, in (0, pi/2)
    double m = 1.0;       // vacuum magnitude
    double lambda = 1.0;  // quartic coupling

    void validate() const {
        if (q <= 0.0) throw Error("coupling q must be positive");
        if (!(theta > 0.0 && theta < kPi / 2.0))
            throw Error("mixing angle must lie strictly inside (0, pi/2)");
        if (m <= 0.0) throw Error("vacuum magnitude m must be positive");
        if (lambda <= 0.0) throw Error("quartic coupling lambda must be positive");
    }
};

// iota_0 = identity, iota_1..3 the Pauli matrices on the isospin fiber.
inline std::array<Matrix2cd, 4> pauli_isospin_frame() {
    std::array<Matrix2cd, 4> iota;
    for (int mu = 0; mu < 4; ++mu)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) iota[mu](a, b) = sigma_matrices()[mu][a][b];
    return iota;
}

// The non-orthogonal frame of End(I) adapted to the broken splitting.
struct BrokenFrame {
    Matrix2cd e_prime;
    Matrix2cd e_second;
    Matrix2cd e_plus;
    Matrix2cd e_minus;
};

// Basis-unit form: e' = -2 sin(th) x1 (x) x^1, e'' = sec(th) [cos(2th)
// x1 (x) x^1 - x2 (x) x^2], e+- = sqrt(2) off-diagonal units.
inline BrokenFrame broken_frame(double theta) {
    if (!(theta > 0.0 && theta < kPi / 2.0))
        throw Error("broken frame degenerate: theta must lie inside (0, pi/2)");
    double s = std::sin(theta), c = std::cos(theta);
    BrokenFrame f;
    f.e_prime = Matrix2cd::Zero();
    f.e_prime(0, 0) = -2.0 * s;
    f.e_second = Matrix2cd::Zero();
    f.e_second(0, 0) = std::cos(2.0 * theta) / c;
    f.e_second(1, 1) = -1.0 / c;
    f.e_plus = Matrix2cd::Zero();
    f.e_plus(1, 0) = kSqrt2;
    f.e_minus = Matrix2cd::Zero();
    f.e_minus(0, 1) = kSqrt2;
    return f;
}

// Same frame assembled from the Pauli combinations; the two constructions
// must agree for every admissible theta.
inline BrokenFrame broken_frame_from_pauli(double theta) {
    if (!(theta > 0.0 && theta < kPi / 2.0))
        throw Error("broken frame degenerate: theta must lie inside (0, pi/2)");
    auto iota = pauli_isospin_frame();
    double s = std::sin(theta), c = std::cos(theta);
    const cplx iu{0.0, 1.0};
    BrokenFrame f;
    f.e_prime = -s * (iota[0] + iota[3]);
    f.e_second = -(s * s / c) * iota[0] + c * iota[3];
    f.e_plus = (iota[1] - iu * iota[2]) / kSqrt2;
    f.e_minus = (iota[1] + iu * iota[2]) / kSqrt2;
    return f;
}

// Component fields in the broken frame; the minus components are tied to
// their partners by conjugation.
struct EWFieldValues {
    double H = 0.0;
    double phi0 = 0.0;
    cplx phiPlus{0.0, 0.0};
    std::array<double, 4> A{};
    std::array<double, 4> Z{};
    std::array<cplx, 4> Wplus{};

    cplx phiMinus() const { return std::conj(phiPlus); }
    cplx Wminus(int lam) const { return std::conj(Wplus[lam]); }
};

struct FluctuationMomenta {
    std::array<double, 4> pH{};
    std::array<double, 4> pPhi0{};
    std::array<double, 4> pPhiPlus{};
};

// Anti-Hermitian gauge-field value at spacetime index lambda:
// (i/2) q (A e' + Z e'' + W+ e+ + W- e-).
inline Matrix2cd gauge_matrix(const EWFieldValues& fv, const BrokenFrame& f,
                              const EWParams& p, int lam) {
    const cplx iu{0.0, 1.0};
    Matrix2cd w = fv.A[lam] * f.e_prime + fv.Z[lam] * f.e_second +
                  fv.Wplus[lam] * f.e_plus + fv.Wminus(lam) * f.e_minus;
    return (iu / 2.0) * p.q * w;
}

// The full gauge field as a typed tensor W^alpha_{lambda alpha'}.
inline Tensor recompose_gauge_field(const EWFieldValues& fv, const BrokenFrame& f,
                                    const EWParams& p) {
    Tensor t({{Species::Spacetime, Variance::Down},
              {Species::Isospin, Variance::Up},
              {Species::Isospin, Variance::Down}},
             Parity::Even);
    for (int lam = 0; lam < 4; ++lam) {
        Matrix2cd w = gauge_matrix(fv, f, p, lam);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) t.set({lam, a, b}, GrassmannElement(w(a, b)));
    }
    return t;
}

struct GaugeComponents {
    std::array<cplx, 4> A{}, Z{}, Wplus{}, Wminus{};
};

// Inverts recompose_gauge_field by a per-lambda linear solve in the
// (not orthogonal) frame.
inline GaugeComponents decompose_gauge_field(const Tensor& w, const BrokenFrame& f,
                                             const EWParams& p) {
    const cplx iu{0.0, 1.0};
    Eigen::Matrix4cd basis;
    auto col = [](const Matrix2cd& e) {
        Eigen::Vector4cd v;
        v << e(0, 0), e(0, 1), e(1, 0), e(1, 1);
        return v;
    };
    basis.col(0) = col(f.e_prime);
    basis.col(1) = col(f.e_second);
    basis.col(2) = col(f.e_plus);
    basis.col(3) = col(f.e_minus);
    auto solver = basis.colPivHouseholderQr();

    GaugeComponents out;
    for (int lam = 0; lam < 4; ++lam) {
        Eigen::Vector4cd rhs;
        rhs << w.at({lam, 0, 0}).body(), w.at({lam, 0, 1}).body(), w.at({lam, 1, 0}).body(),
            w.at({lam, 1, 1}).body();
        rhs /= (iu / 2.0) * p.q;
        Eigen::Vector4cd x = solver.solve(rhs);
        out.A[lam] = x[0];
        out.Z[lam] = x[1];
        out.Wplus[lam] = x[2];
        out.Wminus[lam] = x[3];
    }
    return out;
}

struct HiggsComponents {
    cplx phi1, phi2;      // phi^alpha
    cplx phibar1, phibar2;  // conjugates
};

inline HiggsComponents higgs_field_components(const EWFieldValues& fv, const EWParams& p) {
    HiggsComponents h;
    h.phi1 = cplx{p.m + fv.H, fv.phi0};
    h.phi2 = fv.phiPlus;
    h.phibar1 = std::conj(h.phi1);
    h.phibar2 = std::conj(h.phi2);
    return h;
}

// V[phi] = lambda (2 m^2 <phibar,phi> - <phibar,phi>^2), stationary in the
// pairing at m^2.
inline double higgs_potential(cplx phi1, cplx phi2, const EWParams& p) {
    double s = std::norm(phi1) + std::norm(phi2);
    return p.lambda * (2.0 * p.m * p.m * s - s * s);
}

struct CovariantDerivative {
    std::array<cplx, 4> phi1{};
    std::array<cplx, 4> phi2{};
};

// Momentum-substituted component formulas of the covariant derivative in
// the broken frame (partial derivatives replaced by i p per fluctuation).
inline CovariantDerivative higgs_covariant_derivative(const EWFieldValues& fv,
                                                      const FluctuationMomenta& mom,
                                                      const EWParams& p) {
    const cplx iu{0.0, 1.0};
    double sec = 1.0 / std::cos(p.theta);
    double sn = std::sin(p.theta);
    double c2 = std::cos(2.0 * p.theta);
    cplx phi1 = cplx{p.m + fv.H, fv.phi0};
    CovariantDerivative d;
    for (int lam = 0; lam < 4; ++lam) {
        d.phi1[lam] = iu * mom.pH[lam] * fv.H - mom.pPhi0[lam] * fv.phi0 -
                      (iu / 2.0) * p.q * sec * phi1 * fv.Z[lam] -
                      (iu / kSqrt2) * p.q * fv.phiPlus * fv.Wminus(lam);
        d.phi2[lam] = iu * mom.pPhiPlus[lam] * fv.phiPlus -
                      iu * sn * p.q * fv.phiPlus * fv.A[lam] +
                      (iu / 2.0) * sec * c2 * p.q * fv.phiPlus * fv.Z[lam] -
                      (iu / kSqrt2) * p.q * phi1 * fv.Wplus[lam];
    }
    return d;
}

// The same derivative through the frame matrices: the broken-frame gauge
// value acts on (phi^1, phi^2) and its trace acts on the unit-determinant
// factor with the opposite sign.
inline CovariantDerivative higgs_covariant_derivative_matrix_route(
    const EWFieldValues& fv, const FluctuationMomenta& mom, const EWParams& p,
    const BrokenFrame& f) {
    const cplx iu{0.0, 1.0};
    Vector2cd phi(cplx{p.m + fv.H, fv.phi0}, fv.phiPlus);
    CovariantDerivative d;
    for (int lam = 0; lam < 4; ++lam) {
        Matrix2cd g = gauge_matrix(fv, f, p, lam);
        Vector2cd dphi(iu * mom.pH[lam] * fv.H - mom.pPhi0[lam] * fv.phi0,
                       iu * mom.pPhiPlus[lam] * fv.phiPlus);
        Vector2cd full = dphi - g * phi + g.trace() * phi;
        d.phi1[lam] = full[0];
        d.phi2[lam] = full[1];
    }
    return d;
}

// --- vacuum splitting ------------------------------------------------

// Splitting of F_L induced by a maximal-rank vacuum map H0 : F_R -> F_L,
// with the conformal-isometry constant and the anti-Hermitian block
// decomposition relative to the image and its h_L-orthocomplement.
struct VacuumSplit {
    MatrixXcd f_prime_basis;  // h_L-orthonormal basis of H0(F_R)
    MatrixXcd f_perp_basis;   // h_L-orthonormal basis of the complement
    double mu_squared = 0.0;  // recovered from h_L(H0 ., H0 .) = mu^2/dim h_R
    double isometry_residual = 0.0;
    MatrixXcd h_L;

    MatrixXcd projector_prime() const {
        return f_prime_basis * f_prime_basis.adjoint() * h_L;
    }
    MatrixXcd projector_perp() const { return f_perp_basis * f_perp_basis.adjoint() * h_L; }

    struct Blocks {
        MatrixXcd prime, plus, minus, perp;
    };

    Blocks split(const MatrixXcd& xi) const {
        MatrixXcd pp = projector_prime();
        MatrixXcd pq = projector_perp();
        return {pp * xi * pp, pq * xi * pp, pp * xi * pq, pq * xi * pq};
    }
};

inline VacuumSplit vacuum_split(const MatrixXcd& h0, const MatrixXcd& h_R,
                                const MatrixXcd& h_L) {
    const int nL = static_cast<int>(h0.rows());
    const int nR = static_cast<int>(h0.cols());
    Eigen::ColPivHouseholderQR<MatrixXcd> rank_qr(h0);
    if (rank_qr.rank() < nR)
        throw SingularInputError("vacuum map is rank deficient");

    VacuumSplit out;
    out.h_L = h_L;

    // h_L-orthonormalize the image columns, then extend to the complement.
    auto hdot = [&](const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
        return (x.adjoint() * h_L * y)(0, 0);
    };
    std::vector<Eigen::VectorXcd> prime;
    for (int j = 0; j < nR; ++j) {
        Eigen::VectorXcd v = h0.col(j);
        for (const auto& b : prime) v -= hdot(b, v) * b;
        v /= std::sqrt(std::real(hdot(v, v)));
        prime.push_back(v);
    }
    std::vector<Eigen::VectorXcd> perp;
    for (int j = 0; j < nL; ++j) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(nL);
        v[j] = 1.0;
        for (const auto& b : prime) v -= hdot(b, v) * b;
        for (const auto& b : perp) v -= hdot(b, v) * b;
        double n2 = std::real(hdot(v, v));
        if (n2 > 1e-12) {
            v /= std::sqrt(n2);
            perp.push_back(v);
        }
    }
    out.f_prime_basis.resize(nL, nR);
    for (int j = 0; j < nR; ++j) out.f_prime_basis.col(j) = prime[static_cast<std::size_t>(j)];
    out.f_perp_basis.resize(nL, static_cast<int>(perp.size()));
    for (std::size_t j = 0; j < perp.size(); ++j)
        out.f_perp_basis.col(static_cast<int>(j)) = perp[j];

    // h_L(H0 x, H0 y) = (mu^2 / dim F_R) h_R(x, y)
    MatrixXcd lhs = h0.adjoint() * h_L * h0;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < nR; ++i)
        for (int j = 0; j < nR; ++j) {
            num += std::real(lhs(i, j) * std::conj(h_R(i, j)));
            den += std::norm(h_R(i, j));
        }
    double ratio = num / den;
    out.mu_squared = ratio * nR;
    out.isometry_residual = (lhs - ratio * h_R).norm() / std::max(1.0, lhs.norm());
    return out;
}

// Adjoint with respect to a Hermitian metric h: A^dag = h^{-1} A^H h.
inline MatrixXcd metric_adjoint(const MatrixXcd& h, const MatrixXcd& a) {
    return h.inverse() * a.adjoint() * h;
}

}  // namespace ewgeom
