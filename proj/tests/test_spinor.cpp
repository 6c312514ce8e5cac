#include <gtest/gtest.h>

#include "ewgeom/rng.hpp"
#include "ewgeom/spinor.hpp"

using namespace ewgeom;

namespace {

DiracSpinor random_spinor(RngStream& rng) {
    DiracSpinor s;
    for (int i = 0; i < 2; ++i) {
        s.u[i] = rng.next_complex_gaussian();
        s.lambda_bar[i] = rng.next_complex_gaussian();
    }
    return s;
}

HVector random_hermitian(RngStream& rng) {
    Matrix2cd m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = rng.next_complex_gaussian();
    HVector h;
    h.y = m + m.adjoint();
    return h;
}

TEST(Spinor, GammaOfZeroVanishes) {
    EXPECT_EQ(gamma(HVector{}).norm(), 0.0);
}

TEST(Spinor, CliffordRelation) {
    RngStream rng = RngStream::keyed(42, "t-clifford", 0);
    LorentzMetric g{};
    for (int k = 0; k < 100; ++k) {
        HVector x = random_hermitian(rng), y = random_hermitian(rng);
        Matrix4cd gx = gamma(x), gy = gamma(y);
        Matrix4cd lhs = gx * gy + gy * gx;
        Matrix4cd rhs = 2.0 * g(x, y) * Matrix4cd::Identity();
        double scale = gx.norm() * gy.norm() + std::abs(2.0 * g(x, y));
        EXPECT_LT((lhs - rhs).norm(), 1e-12 * scale);
    }
}

TEST(Spinor, MetricPhaseClassInvariance) {
    RngStream rng = RngStream::keyed(42, "t-phase", 0);
    HVector x = random_hermitian(rng), y = random_hermitian(rng);
    LorentzMetric base{};
    cplx ref = base(x, y);
    for (int j = 1; j <= 8; ++j) {
        EpsilonForm eps{std::polar(1.0, 2.0 * kPi * j / 8.0)};
        EXPECT_LT(std::abs(lorentz_metric(eps)(x, y) - ref), 1e-13 * (1.0 + std::abs(ref)));
        EXPECT_LT((gamma(x, eps) - gamma(x)).norm(), 1e-13 * gamma(x).norm());
        // Intermediates do depend on the phase.
        Vector2cd u(1.0, 0.5);
        if (j != 8) EXPECT_GT((eps.flat(u) - EpsilonForm{}.flat(u)).norm(), 1e-3);
    }
}

TEST(Spinor, NullElements) {
    RngStream rng = RngStream::keyed(42, "t-null", 0);
    LorentzMetric g{};
    for (int k = 0; k < 20; ++k) {
        Vector2cd u(rng.next_complex_gaussian(), rng.next_complex_gaussian());
        HVector h;
        h.y = u * u.adjoint();
        EXPECT_LT(std::abs(g(h, h)), 1e-13 * std::pow(u.norm(), 4.0));
        EXPECT_TRUE(h.is_hermitian());
    }
}

TEST(Spinor, PauliGram) {
    LorentzMetric g{};
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            double want = (mu == nu) ? minkowski_diag(mu) : 0.0;
            EXPECT_NEAR(std::real(g(HVector::pauli(mu), HVector::pauli(nu))), want, 1e-14);
            EXPECT_NEAR(std::imag(g(HVector::pauli(mu), HVector::pauli(nu))), 0.0, 1e-14);
        }
}

TEST(Spinor, AdjunctionSignature) {
    Matrix4cd h = dirac_adjunction_form();
    EXPECT_LT((h - h.adjoint()).norm(), 1e-14);
    Eigen::SelfAdjointEigenSolver<Matrix4cd> es(h);
    int pos = 0, neg = 0;
    for (int i = 0; i < 4; ++i) {
        if (es.eigenvalues()[i] > 0.1) ++pos;
        if (es.eigenvalues()[i] < -0.1) ++neg;
    }
    EXPECT_EQ(pos, 2);
    EXPECT_EQ(neg, 2);
    // <adjoint(psi), psi> is real for random spinors.
    RngStream rng = RngStream::keyed(42, "t-adj", 0);
    for (int k = 0; k < 50; ++k) {
        DiracSpinor psi = random_spinor(rng);
        EXPECT_LT(std::abs(std::imag(dirac_adjoint(psi).pair(psi))),
                  1e-13 * (1.0 + psi.norm() * psi.norm()));
    }
}

TEST(Spinor, DoubleAdjunctionRecovers) {
    RngStream rng = RngStream::keyed(42, "t-adj2", 0);
    for (int k = 0; k < 20; ++k) {
        DiracSpinor psi = random_spinor(rng);
        DiracCovector c = dirac_adjoint(psi);
        DiracSpinor back;
        back.u = c.b_bar.conjugate();
        back.lambda_bar = c.a.conjugate();
        EXPECT_LT((back.stacked() - psi.stacked()).norm(), 1e-14 * (1.0 + psi.norm()));
    }
}

TEST(Spinor, TauUnitNormAndSignDichotomy) {
    RngStream rng = RngStream::keyed(42, "t-tau", 0);
    LorentzMetric g{};
    for (int k = 0; k < 100; ++k) {
        DiracSpinor psi = random_spinor(rng);
        HVector t = tau_of(psi);
        EXPECT_TRUE(t.is_hermitian(1e-12));
        EXPECT_LT(std::abs(g(t, t) - 1.0), 1e-10);
        // Future-pointing: positive time component.
        EXPECT_GT(std::real(g(t, HVector::pauli(0))), 0.0);

        Vector2cd lam = psi.lambda_bar.conjugate();
        cplx z = lam.transpose() * psi.u;
        for (int sgn = 0; sgn < 2; ++sgn) {
            DiracSpinor forced = psi;
            cplx w = std::conj(z) / std::abs(z);
            forced.u *= (sgn == 0 ? w : -w);
            HVector tf = tau_of(forced);
            Vector4cd lhs = gamma(tf) * forced.stacked();
            Vector4cd rhs = (sgn == 0 ? 1.0 : -1.0) * forced.stacked();
            EXPECT_LT((lhs - rhs).norm(), 1e-12 * forced.norm());
        }
        // Complex pairing: no eigenrelation with either sign.
        if (std::abs(std::arg(z)) > 0.3 && std::abs(std::abs(std::arg(z)) - kPi) > 0.3) {
            Vector4cd gv = gamma(t) * psi.stacked();
            double d = std::min((gv - psi.stacked()).norm(), (gv + psi.stacked()).norm());
            EXPECT_GT(d, 1e-3 * psi.norm());
        }
    }
}

TEST(Spinor, TauUniqueness) {
    RngStream rng = RngStream::keyed(42, "t-tauu", 0);
    LorentzMetric g{};
    for (int k = 0; k < 25; ++k) {
        DiracSpinor psi = random_spinor(rng);
        Vector2cd lam = psi.lambda_bar.conjugate();
        cplx z = lam.transpose() * psi.u;
        psi.u *= std::conj(z) / std::abs(z);
        HVector t = tau_of(psi);
        Eigen::MatrixXd a(8, 4);
        Eigen::VectorXd b(8);
        for (int mu = 0; mu < 4; ++mu) {
            Vector4cd col = gamma(HVector::pauli(mu)) * psi.stacked();
            for (int i = 0; i < 4; ++i) {
                a(i, mu) = col[i].real();
                a(4 + i, mu) = col[i].imag();
            }
        }
        Vector4cd rhs = psi.stacked();
        for (int i = 0; i < 4; ++i) {
            b[i] = rhs[i].real();
            b[4 + i] = rhs[i].imag();
        }
        Eigen::VectorXd sol = a.colPivHouseholderQr().solve(b);
        auto tc = g.spacetime_components(t);
        for (int mu = 0; mu < 4; ++mu) EXPECT_NEAR(sol[mu], tc[mu].real(), 1e-8);
    }
}

TEST(Spinor, TauSingularInput) {
    DiracSpinor psi;
    psi.u << 1.0, 0.0;
    psi.lambda_bar << 0.0, 1.0;  // lambda = (0,1)*, <lambda,u> = 0
    EXPECT_THROW(tau_of(psi), SingularInputError);
}

TEST(Spinor, MassShellProjection) {
    RngStream rng = RngStream::keyed(42, "t-shell", 0);
    for (int k = 0; k < 50; ++k) {
        DiracSpinor psi = random_spinor(rng);
        std::array<double, 4> up;
        double s2 = 0.0;
        for (int i = 1; i < 4; ++i) {
            up[i] = rng.next_gaussian();
            s2 += up[i] * up[i];
        }
        up[0] = 2.0 + std::sqrt(s2);
        double norm = std::sqrt(up[0] * up[0] - s2);
        double mass = 0.5 + rng.next_double();
        std::array<double, 4> p;
        for (int mu = 0; mu < 4; ++mu) p[mu] = mass * minkowski_diag(mu) * up[mu] / norm;
        MassShellParts parts = mass_shell_project(psi, p, mass);
        EXPECT_LT((parts.plus.stacked() + parts.minus.stacked() - psi.stacked()).norm(),
                  1e-12 * psi.norm());
        // A vector already in the plus part has no minus component.
        MassShellParts again = mass_shell_project(parts.plus, p, mass);
        EXPECT_LT(again.minus.stacked().norm(), 1e-12 * (1.0 + parts.plus.norm()));
    }
}

TEST(Spinor, MassShellOffShellError) {
    DiracSpinor psi;
    psi.u << 1.0, 0.0;
    psi.lambda_bar << 1.0, 0.0;
    std::array<double, 4> p = {2.0, 0.0, 0.0, 0.0};
    try {
        mass_shell_project(psi, p, 1.0);
        FAIL() << "expected OffShellError";
    } catch (const OffShellError& e) {
        EXPECT_NEAR(e.deviation(), 3.0, 1e-12);  // g(p#,p#) - m^2 = 4 - 1
    }
}

TEST(Spinor, MassShellAlignsWithTau) {
    RngStream rng = RngStream::keyed(42, "t-shelltau", 0);
    LorentzMetric g{};
    for (int k = 0; k < 30; ++k) {
        DiracSpinor psi = random_spinor(rng);
        Vector2cd lam = psi.lambda_bar.conjugate();
        cplx z = lam.transpose() * psi.u;
        psi.u *= std::conj(z) / std::abs(z);
        HVector t = tau_of(psi);
        double mass = 0.5 + rng.next_double();
        auto tc = g.spacetime_components(t);
        std::array<double, 4> p;
        for (int mu = 0; mu < 4; ++mu) p[mu] = mass * minkowski_diag(mu) * tc[mu].real();
        MassShellParts parts = mass_shell_project(psi, p, mass);
        EXPECT_LT(parts.minus.stacked().norm(), 1e-12 * psi.norm());
    }
}

TEST(Qed, TwoRoutesAgree) {
    RngStream rng = RngStream::keyed(42, "t-qed", 0);
    for (int k = 0; k < 100; ++k) {
        DiracSpinor psi = random_spinor(rng), psi2 = random_spinor(rng);
        Matrix2cd a;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) a(i, j) = rng.next_complex_gaussian();
        double e = 0.5 + rng.next_double();
        cplx v1 = qed_vertex_gamma_route(psi, a, psi2, e);
        cplx v2 = qed_vertex_two_spinor_route(psi, a, psi2, e);
        EXPECT_LT(std::abs(v1 - v2), 1e-12 * (1.0 + std::abs(v1)));
    }
}

TEST(Qed, KernelAndZeroField) {
    RngStream rng = RngStream::keyed(42, "t-qedk", 0);
    EpsilonForm eps;
    LorentzMetric g{};
    for (int k = 0; k < 50; ++k) {
        DiracSpinor psi = random_spinor(rng), psi2 = random_spinor(rng);
        HVector kd = qed_vertex_kernel_direction(psi, psi2);
        cplx kk = g(kd, kd);
        if (std::abs(kk) < 1e-3) continue;
        Matrix2cd a;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) a(i, j) = rng.next_complex_gaussian();
        HVector a_sharp;
        for (int i = 0; i < 2; ++i)
            for (int ad = 0; ad < 2; ++ad) {
                cplx acc{0.0, 0.0};
                for (int b = 0; b < 2; ++b)
                    for (int bd = 0; bd < 2; ++bd)
                        acc += eps.upper(i, b) * eps.upper_dot(ad, bd) * a(b, bd);
                a_sharp.y(i, ad) = acc;
            }
        Matrix2cd klow;
        for (int b = 0; b < 2; ++b)
            for (int bd = 0; bd < 2; ++bd) {
                cplx acc{0.0, 0.0};
                for (int c = 0; c < 2; ++c)
                    for (int cd = 0; cd < 2; ++cd)
                        acc += eps.lower(c, b) * eps.lower_dot(cd, bd) * kd.y(c, cd);
                klow(b, bd) = acc;
            }
        Matrix2cd orth = a - (g(a_sharp, kd) / kk) * klow;
        cplx v = qed_vertex_gamma_route(psi, orth, psi2, 1.0);
        double scale = kSqrt2 * (a.norm() + klow.norm()) * (1.0 + kd.y.norm());
        EXPECT_LT(std::abs(v), 1e-10 * scale);
    }
    DiracSpinor psi = random_spinor(rng), psi2 = random_spinor(rng);
    EXPECT_EQ(qed_vertex_gamma_route(psi, Matrix2cd::Zero(), psi2, 1.0), cplx(0.0, 0.0));
}

TEST(Curvature, AbelianReplacementExact) {
    RngStream rng = RngStream::keyed(42, "t-abelian", 0);
    auto dyadic = [&]() {
        return static_cast<double>(static_cast<int>(rng.next_u64() % 17) - 8) / 4.0;
    };
    for (int k = 0; k < 50; ++k) {
        const int n = 2;
        std::vector<cplx> alpha(n * 4);
        for (auto& a : alpha) a = cplx{dyadic(), dyadic()};
        GaugeFieldLocal f(n, alpha, std::vector<double>(n * n * n, 0.0));
        std::array<double, 4> p;
        for (auto& x : p) x = dyadic();
        std::vector<cplx> chi(n);
        for (auto& x : chi) x = cplx{dyadic(), dyadic()};
        CurvatureLike r0 = curvature_like(p, f);
        CurvatureLike r1 = curvature_like(p, gauge_replace(f, p, chi));
        for (std::size_t i = 0; i < r0.rho.size(); ++i)
            EXPECT_EQ(r1.rho[i], r0.rho[i]);  // exact, no tolerance
    }
}

TEST(Curvature, ZeroFieldAndAntisymmetry) {
    const int n = 2;
    GaugeFieldLocal zero(n, std::vector<cplx>(n * 4, cplx{0.0, 0.0}),
                         std::vector<double>(n * n * n, 0.0));
    CurvatureLike r = curvature_like({1.0, 2.0, 3.0, 4.0}, zero);
    EXPECT_EQ(r.max_abs(), 0.0);

    RngStream rng = RngStream::keyed(42, "t-asym", 0);
    std::vector<cplx> alpha(n * 4);
    for (auto& a : alpha) a = rng.next_complex_gaussian();
    std::vector<double> c(n * n * n, 0.0);
    c[(0 * n + 0) * n + 1] = 0.4;
    c[(0 * n + 1) * n + 0] = -0.4;
    GaugeFieldLocal f(n, alpha, c);
    std::array<double, 4> p = {0.3, -0.2, 0.9, 0.1};
    CurvatureLike rr = curvature_like(p, f);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                EXPECT_EQ(rr.at(i, a, b), -rr.at(i, b, a));
}

TEST(Curvature, NonAbelianResidualReported) {
    RngStream rng = RngStream::keyed(42, "t-nonab", 0);
    const int n = 3;
    std::vector<cplx> alpha(n * 4);
    for (auto& a : alpha) a = rng.next_complex_gaussian();
    std::vector<double> c(n * n * n, 0.0);
    auto set = [&](int i, int j, int k, double v) {
        c[(static_cast<std::size_t>(i) * n + j) * n + k] = v;
        c[(static_cast<std::size_t>(i) * n + k) * n + j] = -v;
    };
    set(0, 1, 2, 1.0);
    set(1, 2, 0, 1.0);
    set(2, 0, 1, 1.0);
    GaugeFieldLocal f(n, alpha, c);
    std::array<double, 4> p = {1.1, 0.4, -0.3, 0.7};
    std::vector<cplx> chi = {cplx{0.2, 0.1}, cplx{-0.4, 0.3}, cplx{0.5, -0.2}};
    CurvatureLike r0 = curvature_like(p, f);
    CurvatureLike r1 = curvature_like(p, gauge_replace(f, p, chi));
    double resid = 0.0;
    for (std::size_t i = 0; i < r0.rho.size(); ++i)
        resid = std::max(resid, std::abs(r1.rho[i] - r0.rho[i]));
    // The replacement genuinely shifts the non-abelian curvature; the
    // residual is reported, never asserted to vanish.
    EXPECT_GT(resid, 1e-3);
}

TEST(Curvature, StructureConstantValidation) {
    std::vector<double> bad(8, 0.0);
    bad[1] = 1.0;  // c^0_{01} without the antisymmetric partner
    EXPECT_THROW(GaugeFieldLocal(2, std::vector<cplx>(8, cplx{}), bad), Error);
}

}  // namespace
