#include <gtest/gtest.h>

#include "ewgeom/ewmodel.hpp"
#include "ewgeom/rng.hpp"

using namespace ewgeom;

namespace {

EWParams random_params(RngStream& rng) {
    EWParams p;
    p.q = 0.3 + rng.next_double();
    p.theta = 0.15 + 1.2 * rng.next_double();
    p.m = 0.5 + rng.next_double();
    p.lambda = 0.3 + rng.next_double();
    return p;
}

EWFieldValues random_fields(RngStream& rng) {
    EWFieldValues fv;
    fv.H = rng.next_gaussian();
    fv.phi0 = rng.next_gaussian();
    fv.phiPlus = rng.next_complex_gaussian();
    for (int l = 0; l < 4; ++l) {
        fv.A[l] = rng.next_gaussian();
        fv.Z[l] = rng.next_gaussian();
        fv.Wplus[l] = rng.next_complex_gaussian();
    }
    return fv;
}

TEST(EWModel, PauliIsospinFrame) {
    auto iota = pauli_isospin_frame();
    EXPECT_LT((iota[0] - Matrix2cd::Identity()).norm(), 1e-15);
    const cplx iu{0.0, 1.0};
    // [iota1, iota2] = 2i iota3
    Matrix2cd comm = iota[1] * iota[2] - iota[2] * iota[1];
    EXPECT_LT((comm - 2.0 * iu * iota[3]).norm(), 1e-14);
    for (int mu = 0; mu < 4; ++mu)
        EXPECT_LT((iota[mu] - iota[mu].adjoint()).norm(), 1e-15);
}

TEST(EWModel, BrokenFrameClosedFormsAgree) {
    RngStream rng = RngStream::keyed(42, "t-frame", 0);
    for (int k = 0; k < 20; ++k) {
        double theta = 0.05 + 1.4 * rng.next_double();
        BrokenFrame a = broken_frame(theta);
        BrokenFrame b = broken_frame_from_pauli(theta);
        EXPECT_LT((a.e_prime - b.e_prime).norm(), 1e-13);
        EXPECT_LT((a.e_second - b.e_second).norm(), 1e-13);
        EXPECT_LT((a.e_plus - b.e_plus).norm(), 1e-13);
        EXPECT_LT((a.e_minus - b.e_minus).norm(), 1e-13);
    }
}

TEST(EWModel, BrokenFrameAtQuarterPi) {
    BrokenFrame f = broken_frame(kPi / 4.0);
    Matrix2cd want = Matrix2cd::Zero();
    want(1, 1) = -kSqrt2;
    EXPECT_LT((f.e_second - want).norm(), 1e-14);
}

TEST(EWModel, ChargedFrameAdjoints) {
    BrokenFrame f = broken_frame(0.6);
    EXPECT_LT((f.e_plus.adjoint() - f.e_minus).norm(), 1e-15);
}

TEST(EWModel, BrokenFrameDegenerateAngles) {
    EXPECT_THROW(broken_frame(0.0), Error);
    EXPECT_THROW(broken_frame(kPi / 2.0), Error);
    EXPECT_THROW(broken_frame(-0.3), Error);
}

TEST(EWModel, GaugeFieldRoundTripAndAntiHermiticity) {
    RngStream rng = RngStream::keyed(42, "t-gauge", 0);
    for (int k = 0; k < 20; ++k) {
        EWParams p = random_params(rng);
        EWFieldValues fv = random_fields(rng);
        BrokenFrame f = broken_frame(p.theta);
        for (int l = 0; l < 4; ++l) {
            Matrix2cd g = gauge_matrix(fv, f, p, l);
            EXPECT_LT((g + g.adjoint()).norm(), 1e-13 * (1.0 + g.norm()));
        }
        Tensor w = recompose_gauge_field(fv, f, p);
        EXPECT_EQ(w.slots().size(), 3u);
        GaugeComponents got = decompose_gauge_field(w, f, p);
        for (int l = 0; l < 4; ++l) {
            EXPECT_NEAR(std::abs(got.A[l] - fv.A[l]), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(got.Z[l] - fv.Z[l]), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(got.Wplus[l] - fv.Wplus[l]), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(got.Wminus[l] - fv.Wminus(l)), 0.0, 1e-12);
        }
        // All components zero -> zero tensor.
        EWFieldValues zero;
        Tensor wz = recompose_gauge_field(zero, f, p);
        for (std::size_t fl = 0; fl < wz.size(); ++fl) EXPECT_TRUE(wz[fl].is_zero());
    }
}

TEST(EWModel, HiggsComponents) {
    RngStream rng = RngStream::keyed(42, "t-higgs", 0);
    EWParams p = random_params(rng);
    EWFieldValues vac;
    HiggsComponents h = higgs_field_components(vac, p);
    EXPECT_EQ(h.phi1, cplx(p.m, 0.0));
    EXPECT_EQ(h.phi2, cplx(0.0, 0.0));
    EXPECT_NEAR(std::real(h.phibar1 * h.phi1 + h.phibar2 * h.phi2), p.m * p.m, 1e-14);

    EWFieldValues fv = random_fields(rng);
    HiggsComponents hr = higgs_field_components(fv, p);
    EXPECT_EQ(hr.phibar1, std::conj(hr.phi1));
    EXPECT_EQ(hr.phibar2, std::conj(hr.phi2));
}

TEST(EWModel, HiggsPotentialValues) {
    RngStream rng = RngStream::keyed(42, "t-pot", 0);
    for (int k = 0; k < 10; ++k) {
        EWParams p = random_params(rng);
        EXPECT_NEAR(higgs_potential(cplx{p.m, 0.0}, cplx{0.0, 0.0}, p),
                    p.lambda * std::pow(p.m, 4.0), 1e-12 * p.lambda * std::pow(p.m, 4.0));
        EXPECT_EQ(higgs_potential(cplx{0.0, 0.0}, cplx{0.0, 0.0}, p), 0.0);
        // Stationary in s = <phibar, phi> at s = m^2 (finite difference).
        double s0 = p.m * p.m, h = 1e-5 * s0;
        auto v = [&](double s) { return p.lambda * (2.0 * p.m * p.m * s - s * s); };
        EXPECT_LT(std::abs((v(s0 + h) - v(s0 - h)) / (2.0 * h)), 1e-6 * p.lambda * s0);
    }
}

TEST(EWModel, CovariantDerivativeTwoRoutes) {
    RngStream rng = RngStream::keyed(42, "t-cd", 0);
    for (int k = 0; k < 100; ++k) {
        EWParams p = random_params(rng);
        EWFieldValues fv = random_fields(rng);
        FluctuationMomenta mom;
        for (int l = 0; l < 4; ++l) {
            mom.pH[l] = rng.next_gaussian();
            mom.pPhi0[l] = rng.next_gaussian();
            mom.pPhiPlus[l] = rng.next_gaussian();
        }
        BrokenFrame f = broken_frame(p.theta);
        CovariantDerivative a = higgs_covariant_derivative(fv, mom, p);
        CovariantDerivative b = higgs_covariant_derivative_matrix_route(fv, mom, p, f);
        double scale = 0.0;
        for (int l = 0; l < 4; ++l)
            scale = std::max({scale, std::abs(a.phi1[l]), std::abs(a.phi2[l]), 1.0});
        for (int l = 0; l < 4; ++l) {
            EXPECT_LT(std::abs(a.phi1[l] - b.phi1[l]), 1e-12 * scale);
            EXPECT_LT(std::abs(a.phi2[l] - b.phi2[l]), 1e-12 * scale);
        }
    }
}

TEST(EWModel, CovariantDerivativeLimits) {
    RngStream rng = RngStream::keyed(42, "t-cdlim", 0);
    EWParams p = random_params(rng);
    const cplx iu{0.0, 1.0};
    // No gauge fields: pure momentum terms.
    EWFieldValues fv = random_fields(rng);
    fv.A = fv.Z = {};
    fv.Wplus = {};
    FluctuationMomenta mom;
    for (int l = 0; l < 4; ++l) {
        mom.pH[l] = rng.next_gaussian();
        mom.pPhi0[l] = rng.next_gaussian();
        mom.pPhiPlus[l] = rng.next_gaussian();
    }
    CovariantDerivative d = higgs_covariant_derivative(fv, mom, p);
    for (int l = 0; l < 4; ++l) {
        EXPECT_LT(std::abs(d.phi1[l] - (iu * mom.pH[l] * fv.H - mom.pPhi0[l] * fv.phi0)),
                  1e-14);
        EXPECT_LT(std::abs(d.phi2[l] - iu * mom.pPhiPlus[l] * fv.phiPlus), 1e-14);
    }
    // Vacuum with only Z: the first component picks up -(i/2) q sec m Z.
    EWFieldValues vz;
    for (int l = 0; l < 4; ++l) vz.Z[l] = rng.next_gaussian();
    CovariantDerivative dz = higgs_covariant_derivative(vz, FluctuationMomenta{}, p);
    for (int l = 0; l < 4; ++l) {
        cplx want = -(iu / 2.0) * p.q * (p.m / std::cos(p.theta)) * vz.Z[l];
        EXPECT_LT(std::abs(dz.phi1[l] - want), 1e-14 * (1.0 + std::abs(want)));
        EXPECT_LT(std::abs(dz.phi2[l]), 1e-14);
    }
}

TEST(EWModel, InducedDeterminantWeight) {
    // X = W-hat reads X_l = W^0_l in the isospin frame.
    RngStream rng = RngStream::keyed(42, "t-xhat", 0);
    EWParams p = random_params(rng);
    auto iota = pauli_isospin_frame();
    const cplx iu{0.0, 1.0};
    for (int k = 0; k < 10; ++k) {
        std::array<double, 4> wmu;
        for (auto& x : wmu) x = rng.next_gaussian();
        Matrix2cd w = Matrix2cd::Zero();
        for (int mu = 0; mu < 4; ++mu) w += wmu[mu] * iota[mu];
        Matrix2cd full = (iu / 2.0) * p.q * w;
        EXPECT_LT(std::abs(full.trace() - iu * p.q * wmu[0]), 1e-13);
        EXPECT_LT((w - w.adjoint()).norm(), 1e-13);
    }
}

TEST(EWModel, VacuumSplitElectroweakCase) {
    RngStream rng = RngStream::keyed(42, "t-split", 0);
    EWParams p = random_params(rng);
    MatrixXcd h0(2, 1);
    h0 << cplx{p.m, 0.0}, cplx{0.0, 0.0};
    VacuumSplit vs = vacuum_split(h0, MatrixXcd::Identity(1, 1), MatrixXcd::Identity(2, 2));
    EXPECT_NEAR(vs.mu_squared, p.m * p.m, 1e-12);
    EXPECT_LT(vs.isometry_residual, 1e-14);
    // F' = span x1, complement = span x2.
    EXPECT_NEAR(std::abs(vs.f_prime_basis(0, 0)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(vs.f_perp_basis(1, 0)), 1.0, 1e-14);

    for (int k = 0; k < 20; ++k) {
        Matrix2cd a;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) a(i, j) = rng.next_complex_gaussian();
        MatrixXcd xi = a - a.adjoint();
        auto blocks = vs.split(xi);
        EXPECT_LT((metric_adjoint(MatrixXcd::Identity(2, 2), blocks.minus) + blocks.plus)
                      .norm(),
                  1e-13 * (1.0 + xi.norm()));
        EXPECT_LT((blocks.prime + blocks.plus + blocks.minus + blocks.perp - xi).norm(),
                  1e-13 * (1.0 + xi.norm()));
    }
}

TEST(EWModel, VacuumSplitRankDeficient) {
    MatrixXcd h0 = MatrixXcd::Zero(2, 1);
    EXPECT_THROW(
        vacuum_split(h0, MatrixXcd::Identity(1, 1), MatrixXcd::Identity(2, 2)),
        SingularInputError);
}

TEST(EWModel, VacuumSplitNonTrivialMetric) {
    // A non-identity h_L still satisfies (xi-)^dag_h = -xi+.
    RngStream rng = RngStream::keyed(42, "t-splith", 0);
    const int nl = 3, nr = 1;
    MatrixXcd b(nl, nl);
    for (int i = 0; i < nl; ++i)
        for (int j = 0; j < nl; ++j) b(i, j) = rng.next_complex_gaussian();
    MatrixXcd hl = b * b.adjoint() + 0.5 * MatrixXcd::Identity(nl, nl);
    MatrixXcd h0(nl, nr);
    for (int i = 0; i < nl; ++i) h0(i, 0) = rng.next_complex_gaussian();
    VacuumSplit vs = vacuum_split(h0, MatrixXcd::Identity(nr, nr), hl);
    MatrixXcd a(nl, nl);
    for (int i = 0; i < nl; ++i)
        for (int j = 0; j < nl; ++j) a(i, j) = rng.next_complex_gaussian();
    // h_L-anti-Hermitian: xi^dag_h = -xi.
    MatrixXcd xi = a - metric_adjoint(hl, a);
    auto blocks = vs.split(xi);
    EXPECT_LT((metric_adjoint(hl, blocks.minus) + blocks.plus).norm(),
              1e-10 * (1.0 + xi.norm()));
    EXPECT_LT((blocks.prime + blocks.plus + blocks.minus + blocks.perp - xi).norm(),
              1e-10 * (1.0 + xi.norm()));
}

TEST(EWModel, ParameterValidation) {
    EWParams p;
    p.q = -1.0;
    EXPECT_THROW(p.validate(), Error);
    p = EWParams{};
    p.theta = 2.0;
    EXPECT_THROW(p.validate(), Error);
    p = EWParams{};
    EXPECT_NO_THROW(p.validate());
}

}  // namespace
