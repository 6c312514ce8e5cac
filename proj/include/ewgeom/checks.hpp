#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <thread>

#include "ewgeom/ewmodel.hpp"
#include "ewgeom/invariants.hpp"
#include "ewgeom/spinor.hpp"
#include "ewgeom/vertices.hpp"

namespace ewgeom {

struct CheckOutcome {
    double residual = 0.0;
    double scale = 1.0;
};

struct CheckDef {
    std::string name;
    std::string suite;
    std::string statistics = "n/a";
    double tol = 1e-10;
    bool asserted = true;
    std::function<CheckOutcome(std::uint64_t seed, int sample)> eval;
};

struct CheckResult {
    std::string name;
    std::string statistics;
    double max_rel_residual = 0.0;
    double tol = 0.0;
    bool pass = false;
    bool asserted = true;
    double millis = 0.0;
};

struct RelationResult {
    std::string family;
    std::string statistics;
    int nullspace_dim = 0;
    std::vector<std::vector<double>> basis;
    double millis = 0.0;
};

struct SuiteConfig {
    std::uint64_t seed = 42;
    int samples = 100;
    bool bosonic = true;
    bool fermionic = true;
    double identity_tol = 1e-10;
    std::vector<std::string> suites;  // empty = all
    int threads = 0;                  // 0 = auto

    bool suite_enabled(const std::string& s) const {
        if (suites.empty()) return true;
        for (const auto& x : suites)
            if (x == s || x == "all") return true;
        return false;
    }
    bool stat_enabled(const std::string& s) const {
        if (s == "bosonic") return bosonic;
        if (s == "fermionic") return fermionic;
        return true;
    }
};

struct SuiteResults {
    std::vector<CheckResult> checks;
    std::vector<RelationResult> relations;
    std::map<std::string, std::string> resolved_signs;
    double total_millis = 0.0;

    bool all_asserted_pass() const {
        for (const auto& c : checks)
            if (c.asserted && !c.pass) return false;
        return true;
    }
};

namespace detail {

inline DiracSpinor random_spinor(RngStream& rng) {
    DiracSpinor s;
    for (int i = 0; i < 2; ++i) {
        s.u[i] = rng.next_complex_gaussian();
        s.lambda_bar[i] = rng.next_complex_gaussian();
    }
    return s;
}

inline HVector random_hermitian(RngStream& rng) {
    Matrix2cd m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = rng.next_complex_gaussian();
    HVector h;
    h.y = m + m.adjoint();
    return h;
}

inline EWParams random_params(RngStream& rng) {
    EWParams p;
    p.q = 0.3 + rng.next_double();
    p.theta = 0.15 + 1.2 * rng.next_double();
    p.m = 0.5 + rng.next_double();
    p.lambda = 0.3 + rng.next_double();
    return p;
}

inline EWFieldValues random_fields(RngStream& rng) {
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

inline FluctuationMomenta random_momenta(RngStream& rng) {
    FluctuationMomenta mom;
    for (int l = 0; l < 4; ++l) {
        mom.pH[l] = rng.next_gaussian();
        mom.pPhi0[l] = rng.next_gaussian();
        mom.pPhiPlus[l] = rng.next_gaussian();
    }
    return mom;
}

// Dyadic rationals with a few bits; arithmetic on them is exact in doubles.
inline double random_dyadic(RngStream& rng) {
    return static_cast<double>(static_cast<int>(rng.next_u64() % 17) - 8) / 4.0;
}

inline double cd_max_abs(const CovariantDerivative& d) {
    double m = 0.0;
    for (int l = 0; l < 4; ++l)
        m = std::max({m, std::abs(d.phi1[l]), std::abs(d.phi2[l])});
    return m;
}

}  // namespace detail

// --- geometry / qed / ew checks ---------------------------------------------

inline std::vector<CheckDef> structural_checks() {
    std::vector<CheckDef> defs;
    auto add = [&](std::string name, std::string suite, double tol,
                   std::function<CheckOutcome(std::uint64_t, int)> f, bool asserted = true,
                   std::string stat = "n/a") {
        defs.push_back({std::move(name), std::move(suite), std::move(stat), tol, asserted,
                        std::move(f)});
    };

    // -- geometry ------------------------------------------------------------
    add("clifford relation gamma[x]gamma[y]+gamma[y]gamma[x]=2g(x,y)", "geometry", 1e-12,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "clifford", static_cast<std::uint64_t>(k));
            HVector x = detail::random_hermitian(rng), y = detail::random_hermitian(rng);
            LorentzMetric g{};
            Matrix4cd gx = gamma(x), gy = gamma(y);
            Matrix4cd lhs = gx * gy + gy * gx;
            Matrix4cd rhs = 2.0 * g(x, y) * Matrix4cd::Identity();
            double scale = gx.norm() * gy.norm() + std::abs(2.0 * g(x, y));
            return CheckOutcome{(lhs - rhs).norm(), scale};
        });

    add("sharp then flat is the identity", "geometry", 1e-12,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "sharpflat", static_cast<std::uint64_t>(k));
            double th = 2.0 * kPi * rng.next_double();
            EpsilonForm eps{std::polar(1.0, th)};
            Vector2cd u(rng.next_complex_gaussian(), rng.next_complex_gaussian());
            double r = (eps.sharp(eps.flat(u)) - u).norm() +
                       (eps.flat(eps.sharp(u)) - u).norm();
            return CheckOutcome{r, u.norm()};
        });

    add("pauli-frame gram matrix is diag(1,-1,-1,-1)", "geometry", 1e-12,
        [](std::uint64_t, int) {
            LorentzMetric g{};
            double r = 0.0;
            for (int mu = 0; mu < 4; ++mu)
                for (int nu = 0; nu < 4; ++nu) {
                    cplx want = (mu == nu) ? cplx{minkowski_diag(mu), 0.0} : cplx{0.0, 0.0};
                    r = std::max(r, std::abs(g(HVector::pauli(mu), HVector::pauli(nu)) - want));
                }
            return CheckOutcome{r, 1.0};
        });

    add("simple tensors u x ubar are null", "geometry", 1e-12,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "null", static_cast<std::uint64_t>(k));
            Vector2cd u(rng.next_complex_gaussian(), rng.next_complex_gaussian());
            HVector h;
            h.y = u * u.adjoint();
            LorentzMetric g{};
            return CheckOutcome{std::abs(g(h, h)), std::norm(u.norm())};
        });

    add("metric is epsilon-phase invariant", "geometry", 1e-12,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "gphase", static_cast<std::uint64_t>(k));
            HVector x = detail::random_hermitian(rng), y = detail::random_hermitian(rng);
            LorentzMetric base{};
            cplx ref = base(x, y);
            double r = 0.0;
            for (int j = 1; j <= 8; ++j) {
                EpsilonForm eps{std::polar(1.0, 2.0 * kPi * j / 8.0)};
                r = std::max(r, std::abs(lorentz_metric(eps)(x, y) - ref));
            }
            return CheckOutcome{r, std::abs(ref) + 1.0};
        });

    add("clifford map is epsilon-phase invariant", "geometry", 1e-12,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "gammaphase", static_cast<std::uint64_t>(k));
            HVector x = detail::random_hermitian(rng);
            Matrix4cd ref = gamma(x);
            double r = 0.0;
            for (int j = 1; j <= 8; ++j) {
                EpsilonForm eps{std::polar(1.0, 2.0 * kPi * j / 8.0)};
                r = std::max(r, (gamma(x, eps) - ref).norm());
            }
            return CheckOutcome{r, ref.norm()};
        });

    add("adjunction form has signature (+,+,-,-)", "geometry", 1e-12,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "signature", static_cast<std::uint64_t>(k));
            Matrix4cd h = dirac_adjunction_form();
            double herm = (h - h.adjoint()).norm();
            Eigen::SelfAdjointEigenSolver<Matrix4cd> es(h);
            int pos = 0, neg = 0;
            for (int i = 0; i < 4; ++i) {
                if (es.eigenvalues()[i] > 0.0) ++pos;
                if (es.eigenvalues()[i] < 0.0) ++neg;
            }
            double sig = (pos == 2 && neg == 2) ? 0.0 : 1.0;
            DiracSpinor psi = detail::random_spinor(rng);
            double realness = std::abs(std::imag(dirac_adjoint(psi).pair(psi)));
            return CheckOutcome{herm + sig + realness, 1.0 + psi.norm() * psi.norm()};
        });

    add("double adjunction recovers the spinor", "geometry", 1e-12,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "adjinv", static_cast<std::uint64_t>(k));
            DiracSpinor psi = detail::random_spinor(rng);
            DiracCovector c = dirac_adjoint(psi);
            // The inverse antilinear map on covectors.
            DiracSpinor back;
            back.u = c.b_bar.conjugate();
            back.lambda_bar = c.a.conjugate();
            return CheckOutcome{(back.stacked() - psi.stacked()).norm(), psi.norm()};
        });

    add("tau has unit norm g(tau,tau)=1", "geometry", 1e-10,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "taunorm", static_cast<std::uint64_t>(k));
            DiracSpinor psi = detail::random_spinor(rng);
            HVector t = tau_of(psi);
            LorentzMetric g{};
            return CheckOutcome{std::abs(g(t, t) - 1.0), 1.0};
        });

    for (int sgn = 0; sgn < 2; ++sgn) {
        bool plus = sgn == 0;
        add(cat("gamma[tau] psi = ", plus ? "+" : "-", "psi for ",
                plus ? "positive" : "negative", " <lambda,u>"),
            "geometry", 1e-12, [plus](std::uint64_t seed, int k) {
                RngStream rng = RngStream::keyed(seed, plus ? "taup" : "taum",
                                                 static_cast<std::uint64_t>(k));
                DiracSpinor psi = detail::random_spinor(rng);
                Vector2cd lam = psi.lambda_bar.conjugate();
                cplx z = lam.transpose() * psi.u;
                // Rescale u so the pairing is real of the requested sign.
                cplx w = std::conj(z) / std::abs(z);
                if (!plus) w = -w;
                psi.u *= w;
                HVector t = tau_of(psi);
                Vector4cd lhs = gamma(t) * psi.stacked();
                Vector4cd rhs = (plus ? 1.0 : -1.0) * psi.stacked();
                return CheckOutcome{(lhs - rhs).norm(), psi.norm()};
            });
    }

    add("tau is the unique timelike eigendirection", "geometry", 1e-8,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "tauuniq", static_cast<std::uint64_t>(k));
            DiracSpinor psi = detail::random_spinor(rng);
            Vector2cd lam = psi.lambda_bar.conjugate();
            cplx z = lam.transpose() * psi.u;
            psi.u *= std::conj(z) / std::abs(z);
            HVector t = tau_of(psi);
            // Least squares for gamma[t'] psi = psi over real components t'.
            Eigen::MatrixXd a(8, 4);
            Eigen::VectorXd b(8);
            Vector4cd rhs = psi.stacked();
            for (int mu = 0; mu < 4; ++mu) {
                Vector4cd col = gamma(HVector::pauli(mu)) * psi.stacked();
                for (int i = 0; i < 4; ++i) {
                    a(i, mu) = col[i].real();
                    a(4 + i, mu) = col[i].imag();
                }
            }
            for (int i = 0; i < 4; ++i) {
                b[i] = rhs[i].real();
                b[4 + i] = rhs[i].imag();
            }
            Eigen::VectorXd sol = a.colPivHouseholderQr().solve(b);
            LorentzMetric g{};
            auto tc = g.spacetime_components(t);
            double r = 0.0;
            for (int mu = 0; mu < 4; ++mu) r = std::max(r, std::abs(sol[mu] - tc[mu].real()));
            return CheckOutcome{r, 1.0};
        });

    add("mass-shell projectors are idempotent and reconstruct psi", "geometry", 1e-12,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "massshell", static_cast<std::uint64_t>(k));
            DiracSpinor psi = detail::random_spinor(rng);
            // On-shell future-pointing momentum.
            std::array<double, 4> up;
            double s2 = 0.0;
            for (int i = 1; i < 4; ++i) {
                up[i] = rng.next_gaussian();
                s2 += up[i] * up[i];
            }
            up[0] = 2.0 + std::sqrt(s2);
            double norm2 = up[0] * up[0] - s2;
            double mass = 0.5 + rng.next_double();
            std::array<double, 4> p;
            for (int mu = 0; mu < 4; ++mu)
                p[mu] = mass * minkowski_diag(mu) * up[mu] / std::sqrt(norm2);
            MassShellParts parts = mass_shell_project(psi, p, mass);
            HVector y = HVector::from_spacetime(
                {minkowski_diag(0) * p[0], minkowski_diag(1) * p[1], minkowski_diag(2) * p[2],
                 minkowski_diag(3) * p[3]});
            Matrix4cd g = gamma(y);
            double r = 0.0;
            r = std::max(r, (parts.plus.stacked() + parts.minus.stacked() - psi.stacked()).norm());
            r = std::max(r, (g * parts.plus.stacked() - mass * parts.plus.stacked()).norm());
            r = std::max(r, (g * parts.minus.stacked() + mass * parts.minus.stacked()).norm());
            // Projector algebra.
            Matrix4cd pp = (mass * Matrix4cd::Identity() + g) / (2.0 * mass);
            Matrix4cd pm = (mass * Matrix4cd::Identity() - g) / (2.0 * mass);
            r = std::max(r, (pp * pp - pp).norm());
            r = std::max(r, (pm * pm - pm).norm());
            r = std::max(r, (pp * pm).norm());
            return CheckOutcome{r, 1.0 + psi.norm()};
        });

    add("psi with positive pairing lies in the plus mass shell of m*tau", "geometry", 1e-12,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "shelltau", static_cast<std::uint64_t>(k));
            DiracSpinor psi = detail::random_spinor(rng);
            Vector2cd lam = psi.lambda_bar.conjugate();
            cplx z = lam.transpose() * psi.u;
            psi.u *= std::conj(z) / std::abs(z);
            HVector t = tau_of(psi);
            double mass = 0.5 + rng.next_double();
            LorentzMetric g{};
            auto tc = g.spacetime_components(t);
            std::array<double, 4> p;
            for (int mu = 0; mu < 4; ++mu)
                p[mu] = mass * minkowski_diag(mu) * tc[mu].real();
            MassShellParts parts = mass_shell_project(psi, p, mass);
            return CheckOutcome{parts.minus.stacked().norm(), psi.norm()};
        });

    add("abelian gauge replacement preserves the curvature tensor (exact)", "geometry", 0.0,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "abelian", static_cast<std::uint64_t>(k));
            const int n = 2;
            std::vector<cplx> alpha(n * 4);
            for (auto& a : alpha)
                a = cplx{detail::random_dyadic(rng), detail::random_dyadic(rng)};
            std::vector<double> c(n * n * n, 0.0);
            GaugeFieldLocal f(n, alpha, c);
            std::array<double, 4> p;
            for (auto& x : p) x = detail::random_dyadic(rng);
            std::vector<cplx> chi(n);
            for (auto& x : chi) x = cplx{detail::random_dyadic(rng), detail::random_dyadic(rng)};
            CurvatureLike r0 = curvature_like(p, f);
            CurvatureLike r1 = curvature_like(p, gauge_replace(f, p, chi));
            double r = 0.0;
            for (std::size_t i = 0; i < r0.rho.size(); ++i)
                r = std::max(r, std::abs(r1.rho[i] - r0.rho[i]));
            return CheckOutcome{r, 1.0};
        });

    add("non-abelian gauge replacement residual (reported)", "geometry", 0.0,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "nonabelian", static_cast<std::uint64_t>(k));
            const int n = 3;
            std::vector<cplx> alpha(n * 4);
            for (auto& a : alpha) a = rng.next_complex_gaussian();
            // su(2)-like structure constants: fully antisymmetric in all
            // index pairs.
            std::vector<double> c(n * n * n, 0.0);
            auto set = [&](int i, int j, int kk, double v) {
                c[(static_cast<std::size_t>(i) * n + j) * n + kk] = v;
            };
            set(0, 1, 2, 1.0);
            set(0, 2, 1, -1.0);
            set(1, 2, 0, 1.0);
            set(1, 0, 2, -1.0);
            set(2, 0, 1, 1.0);
            set(2, 1, 0, -1.0);
            GaugeFieldLocal f(n, alpha, c);
            std::array<double, 4> p;
            for (auto& x : p) x = rng.next_gaussian();
            std::vector<cplx> chi(n);
            for (auto& x : chi) x = rng.next_complex_gaussian();
            CurvatureLike r0 = curvature_like(p, f);
            CurvatureLike r1 = curvature_like(p, gauge_replace(f, p, chi));
            double r = 0.0;
            for (std::size_t i = 0; i < r0.rho.size(); ++i)
                r = std::max(r, std::abs(r1.rho[i] - r0.rho[i]));
            return CheckOutcome{r, std::max(r0.max_abs(), 1.0)};
        },
        /*asserted=*/false);

    add("curvature tensor is antisymmetric in its form indices", "geometry", 1e-14,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "curvasym", static_cast<std::uint64_t>(k));
            const int n = 2;
            std::vector<cplx> alpha(n * 4);
            for (auto& a : alpha) a = rng.next_complex_gaussian();
            std::vector<double> c(n * n * n, 0.0);
            c[(0 * n + 0) * n + 1] = 0.7;
            c[(0 * n + 1) * n + 0] = -0.7;
            GaugeFieldLocal f(n, alpha, c);
            std::array<double, 4> p;
            for (auto& x : p) x = rng.next_gaussian();
            CurvatureLike r0 = curvature_like(p, f);
            double r = 0.0;
            for (int i = 0; i < n; ++i)
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b)
                        r = std::max(r, std::abs(r0.at(i, a, b) + r0.at(i, b, a)));
            return CheckOutcome{r, std::max(r0.max_abs(), 1.0)};
        });

    // -- qed -------------------------------------------------------------------
    add("qed vertex: gamma route equals two-spinor route", "qed", 1e-12,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "qedroutes", static_cast<std::uint64_t>(k));
            DiracSpinor psi = detail::random_spinor(rng);
            DiracSpinor psi2 = detail::random_spinor(rng);
            Matrix2cd a;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) a(i, j) = rng.next_complex_gaussian();
            double e = 0.5 + rng.next_double();
            cplx v1 = qed_vertex_gamma_route(psi, a, psi2, e);
            cplx v2 = qed_vertex_two_spinor_route(psi, a, psi2, e);
            return CheckOutcome{std::abs(v1 - v2), std::abs(v1) + std::abs(v2) + 1.0};
        });

    add("qed vertex vanishes on covectors orthogonal to the kernel direction", "qed", 1e-10,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "qedkernel", static_cast<std::uint64_t>(k));
            DiracSpinor psi = detail::random_spinor(rng);
            DiracSpinor psi2 = detail::random_spinor(rng);
            HVector kdir = qed_vertex_kernel_direction(psi, psi2);
            LorentzMetric g{};
            cplx kk = g(kdir, kdir);
            Matrix2cd a;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) a(i, j) = rng.next_complex_gaussian();
            // Project the kernel component out of A.
            EpsilonForm eps;
            HVector a_sharp;
            for (int i = 0; i < 2; ++i)
                for (int ad = 0; ad < 2; ++ad) {
                    cplx acc{0.0, 0.0};
                    for (int b = 0; b < 2; ++b)
                        for (int bd = 0; bd < 2; ++bd)
                            acc += eps.upper(i, b) * eps.upper_dot(ad, bd) * a(b, bd);
                    a_sharp.y(i, ad) = acc;
                }
            if (std::abs(kk) < 1e-3) return CheckOutcome{0.0, 1.0};  // ill-conditioned draw
            cplx coef = g(a_sharp, kdir) / kk;
            // Lower the kernel direction to covector components.
            Matrix2cd klow;
            for (int b = 0; b < 2; ++b)
                for (int bd = 0; bd < 2; ++bd) {
                    cplx acc{0.0, 0.0};
                    for (int c = 0; c < 2; ++c)
                        for (int cd = 0; cd < 2; ++cd)
                            acc += eps.lower(c, b) * eps.lower_dot(cd, bd) * kdir.y(c, cd);
                    klow(b, bd) = acc;
                }
            Matrix2cd a_orth = a - coef * klow;
            double e = 1.0;
            cplx v = qed_vertex_gamma_route(psi, a_orth, psi2, e);
            double scale = kSqrt2 * (a.norm() + klow.norm()) * (1.0 + kdir.y.norm());
            return CheckOutcome{std::abs(v), scale};
        });

    add("qed vertex vanishes for zero field", "qed", 1e-14,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "qedzero", static_cast<std::uint64_t>(k));
            DiracSpinor psi = detail::random_spinor(rng);
            DiracSpinor psi2 = detail::random_spinor(rng);
            cplx v = qed_vertex_gamma_route(psi, Matrix2cd::Zero(), psi2, 1.0);
            return CheckOutcome{std::abs(v), 1.0};
        });

    // -- ew ---------------------------------------------------------------------
    add("broken frame: basis-unit and pauli closed forms agree", "ew", 1e-12,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "frameforms", static_cast<std::uint64_t>(k));
            double theta = 0.05 + 1.4 * rng.next_double();
            BrokenFrame a = broken_frame(theta);
            BrokenFrame b = broken_frame_from_pauli(theta);
            double r = (a.e_prime - b.e_prime).norm() + (a.e_second - b.e_second).norm() +
                       (a.e_plus - b.e_plus).norm() + (a.e_minus - b.e_minus).norm();
            double scale = a.e_prime.norm() + a.e_second.norm() + a.e_plus.norm() +
                           a.e_minus.norm();
            return CheckOutcome{r, scale};
        });

    add("broken frame at theta=pi/4: e'' = -sqrt2 x2 (x) x^2", "ew", 1e-12,
        [](std::uint64_t, int) {
            BrokenFrame f = broken_frame(kPi / 4.0);
            Matrix2cd want = Matrix2cd::Zero();
            want(1, 1) = -kSqrt2;
            return CheckOutcome{(f.e_second - want).norm(), kSqrt2};
        });

    add("charged frame elements are mutual adjoints", "ew", 1e-14,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "frameadj", static_cast<std::uint64_t>(k));
            double theta = 0.05 + 1.4 * rng.next_double();
            BrokenFrame f = broken_frame(theta);
            return CheckOutcome{
                (f.e_plus.adjoint() - f.e_minus).norm(), f.e_plus.norm()};
        });

    add("recomposed gauge field is anti-Hermitian valued", "ew", 1e-13,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "gaugeherm", static_cast<std::uint64_t>(k));
            EWParams p = detail::random_params(rng);
            EWFieldValues fv = detail::random_fields(rng);
            BrokenFrame f = broken_frame(p.theta);
            double r = 0.0, scale = 1.0;
            for (int l = 0; l < 4; ++l) {
                Matrix2cd g = gauge_matrix(fv, f, p, l);
                r = std::max(r, (g + g.adjoint()).norm());
                scale = std::max(scale, g.norm());
            }
            return CheckOutcome{r, scale};
        });

    add("gauge field decomposition inverts recomposition", "ew", 1e-12,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "gaugeinv", static_cast<std::uint64_t>(k));
            EWParams p = detail::random_params(rng);
            EWFieldValues fv = detail::random_fields(rng);
            BrokenFrame f = broken_frame(p.theta);
            Tensor w = recompose_gauge_field(fv, f, p);
            GaugeComponents got = decompose_gauge_field(w, f, p);
            double r = 0.0, scale = 1.0;
            for (int l = 0; l < 4; ++l) {
                r = std::max(r, std::abs(got.A[l] - fv.A[l]));
                r = std::max(r, std::abs(got.Z[l] - fv.Z[l]));
                r = std::max(r, std::abs(got.Wplus[l] - fv.Wplus[l]));
                r = std::max(r, std::abs(got.Wminus[l] - fv.Wminus(l)));
                scale = std::max({scale, std::abs(fv.A[l]), std::abs(fv.Z[l]),
                                  std::abs(fv.Wplus[l])});
            }
            return CheckOutcome{r, scale};
        });

    add("right-sector matching: induced weight of W equals its iota_0 part", "ew", 1e-13,
        [](std::uint64_t seed, int k) {
            // With W = (i/2) q W^mu iota_mu, the induced endomorphism on the
            // determinant line is tr = i q W^0; matching X = i q X_l gives
            // X_l = W^0_l.
            RngStream rng = RngStream::keyed(seed, "xhatw", static_cast<std::uint64_t>(k));
            EWParams p = detail::random_params(rng);
            auto iota = pauli_isospin_frame();
            const cplx iu{0.0, 1.0};
            double r = 0.0, scale = 1.0;
            for (int l = 0; l < 4; ++l) {
                std::array<double, 4> wmu;
                for (auto& x : wmu) x = rng.next_gaussian();
                Matrix2cd w = Matrix2cd::Zero();
                for (int mu = 0; mu < 4; ++mu) w += wmu[mu] * iota[mu];
                w = (iu / 2.0) * p.q * w;
                cplx induced = w.trace();
                cplx want = iu * p.q * wmu[0];
                r = std::max(r, std::abs(induced - want));
                scale = std::max(scale, std::abs(want));
            }
            return CheckOutcome{r, scale};
        });

    add("isospin gauge value W^mu iota_mu is Hermitian for real components", "ew", 1e-14,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "wherm", static_cast<std::uint64_t>(k));
            auto iota = pauli_isospin_frame();
            Matrix2cd w = Matrix2cd::Zero();
            for (int mu = 0; mu < 4; ++mu) w += rng.next_gaussian() * iota[mu];
            return CheckOutcome{(w - w.adjoint()).norm(), w.norm()};
        });

    add("higgs components at the vacuum are (m, 0) with pairing m^2", "ew", 1e-14,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "higgsvac", static_cast<std::uint64_t>(k));
            EWParams p = detail::random_params(rng);
            EWFieldValues fv;  // all fluctuations zero
            HiggsComponents h = higgs_field_components(fv, p);
            double r = std::abs(h.phi1 - p.m) + std::abs(h.phi2);
            double pairing = std::real(h.phibar1 * h.phi1 + h.phibar2 * h.phi2);
            r += std::abs(pairing - p.m * p.m);
            return CheckOutcome{r, p.m * p.m + p.m};
        });

    add("higgs potential: V(vacuum) = lambda m^4 and V(0) = 0", "ew", 1e-14,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "vval", static_cast<std::uint64_t>(k));
            EWParams p = detail::random_params(rng);
            double v1 = higgs_potential(cplx{p.m, 0.0}, cplx{0.0, 0.0}, p);
            double v0 = higgs_potential(cplx{0.0, 0.0}, cplx{0.0, 0.0}, p);
            double want = p.lambda * std::pow(p.m, 4);
            return CheckOutcome{std::abs(v1 - want) + std::abs(v0), want};
        });

    add("higgs potential is stationary in the pairing at m^2", "ew", 1e-6,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "vstat", static_cast<std::uint64_t>(k));
            EWParams p = detail::random_params(rng);
            // Central difference of V as a function of s = <phibar, phi>.
            auto v_of_s = [&](double s) {
                return p.lambda * (2.0 * p.m * p.m * s - s * s);
            };
            double s0 = p.m * p.m;
            double h = 1e-5 * s0;
            double deriv = (v_of_s(s0 + h) - v_of_s(s0 - h)) / (2.0 * h);
            return CheckOutcome{std::abs(deriv), p.lambda * p.m * p.m};
        });

    add("covariant derivative: component formulas equal the frame-matrix route", "ew", 1e-12,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "cdroutes", static_cast<std::uint64_t>(k));
            EWParams p = detail::random_params(rng);
            EWFieldValues fv = detail::random_fields(rng);
            FluctuationMomenta mom = detail::random_momenta(rng);
            BrokenFrame f = broken_frame(p.theta);
            CovariantDerivative a = higgs_covariant_derivative(fv, mom, p);
            CovariantDerivative b =
                higgs_covariant_derivative_matrix_route(fv, mom, p, f);
            double r = 0.0;
            for (int l = 0; l < 4; ++l)
                r = std::max({r, std::abs(a.phi1[l] - b.phi1[l]),
                              std::abs(a.phi2[l] - b.phi2[l])});
            return CheckOutcome{r, std::max(detail::cd_max_abs(a), 1.0)};
        });

    add("covariant derivative reduces to momentum terms without gauge fields", "ew", 1e-14,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "cdfree", static_cast<std::uint64_t>(k));
            EWParams p = detail::random_params(rng);
            EWFieldValues fv = detail::random_fields(rng);
            fv.A = fv.Z = {};
            fv.Wplus = {};
            FluctuationMomenta mom = detail::random_momenta(rng);
            CovariantDerivative d = higgs_covariant_derivative(fv, mom, p);
            const cplx iu{0.0, 1.0};
            double r = 0.0;
            for (int l = 0; l < 4; ++l) {
                cplx want1 = iu * mom.pH[l] * fv.H - mom.pPhi0[l] * fv.phi0;
                cplx want2 = iu * mom.pPhiPlus[l] * fv.phiPlus;
                r = std::max({r, std::abs(d.phi1[l] - want1), std::abs(d.phi2[l] - want2)});
            }
            return CheckOutcome{r, std::max(detail::cd_max_abs(d), 1.0)};
        });

    add("covariant derivative at the vacuum with only Z: -(i/2) q sec m Z", "ew", 1e-14,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "cdvacz", static_cast<std::uint64_t>(k));
            EWParams p = detail::random_params(rng);
            EWFieldValues fv;
            for (int l = 0; l < 4; ++l) fv.Z[l] = rng.next_gaussian();
            FluctuationMomenta mom;
            CovariantDerivative d = higgs_covariant_derivative(fv, mom, p);
            const cplx iu{0.0, 1.0};
            double r = 0.0;
            for (int l = 0; l < 4; ++l) {
                cplx want = -(iu / 2.0) * p.q * (p.m / std::cos(p.theta)) * fv.Z[l];
                r = std::max({r, std::abs(d.phi1[l] - want), std::abs(d.phi2[l])});
            }
            return CheckOutcome{r, std::max(detail::cd_max_abs(d), 1.0)};
        });

    for (const char* term : {"higgs-kinetic", "higgs-potential", "yukawa"}) {
        add(cat("vertex table '", term, "' matches numerical differentiation"), "ew", 1e-8,
            [term](std::uint64_t seed, int k) {
                RngStream rng =
                    RngStream::keyed(seed, cat("vertexp-", term), static_cast<std::uint64_t>(k));
                EWParams p = detail::random_params(rng);
                VertexTable t = extract_vertices(term);
                VertexCheckResult r = validate_vertex_table(t, p, seed + static_cast<std::uint64_t>(k), 1);
                return CheckOutcome{
                    std::max(r.max_rel_deviation, r.reconstruction_rel_deviation), 1.0};
            });
    }

    add("vacuum splitting: conformal isometry and block adjunction", "ew", 1e-12,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "vacsplit", static_cast<std::uint64_t>(k));
            // Electroweak case: F_R one-dimensional, H0 = m x1.
            EWParams p = detail::random_params(rng);
            MatrixXcd h0(2, 1);
            h0 << cplx{p.m, 0.0}, cplx{0.0, 0.0};
            MatrixXcd hr = MatrixXcd::Identity(1, 1);
            MatrixXcd hl = MatrixXcd::Identity(2, 2);
            VacuumSplit vs = vacuum_split(h0, hr, hl);
            double r = std::abs(vs.mu_squared - p.m * p.m) + vs.isometry_residual;
            // F' = span x1, complement = span x2.
            MatrixXcd pp = vs.projector_prime();
            r += std::abs(pp(0, 0) - 1.0) + std::abs(pp(1, 1)) + std::abs(pp(0, 1)) +
                 std::abs(pp(1, 0));
            // Random anti-Hermitian xi: (xi-)^dag = -xi+.
            Matrix2cd a;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) a(i, j) = rng.next_complex_gaussian();
            MatrixXcd xi = a - a.adjoint();
            auto blocks = vs.split(xi);
            r += (metric_adjoint(hl, blocks.minus) + blocks.plus).norm();
            // Blocks reassemble xi.
            r += (blocks.prime + blocks.plus + blocks.minus + blocks.perp - xi).norm();
            return CheckOutcome{r, p.m * p.m + xi.norm() + 1.0};
        });

    add("vacuum splitting in a random higher-dimensional fiber", "ew", 1e-10,
        [](std::uint64_t seed, int k) {
            RngStream rng = RngStream::keyed(seed, "vacsplit-n", static_cast<std::uint64_t>(k));
            const int nl = 4, nr = 2;
            // Conformally isometric vacuum: orthonormal columns scaled by mu.
            MatrixXcd raw(nl, nr);
            for (int i = 0; i < nl; ++i)
                for (int j = 0; j < nr; ++j) raw(i, j) = rng.next_complex_gaussian();
            Eigen::HouseholderQR<MatrixXcd> qr(raw);
            MatrixXcd qfull = qr.householderQ();
            MatrixXcd q = qfull.leftCols(nr);
            double mu = 0.5 + rng.next_double();
            // Columns of norm mu/sqrt(nr) give the conformal constant mu^2/nr.
            MatrixXcd h0 = (mu / std::sqrt(static_cast<double>(nr))) * q;
            MatrixXcd hr = MatrixXcd::Identity(nr, nr);
            MatrixXcd hl = MatrixXcd::Identity(nl, nl);
            VacuumSplit vs = vacuum_split(h0, hr, hl);
            double r = vs.isometry_residual + std::abs(vs.mu_squared - mu * mu);
            MatrixXcd a(nl, nl);
            for (int i = 0; i < nl; ++i)
                for (int j = 0; j < nl; ++j) a(i, j) = rng.next_complex_gaussian();
            MatrixXcd xi = a - a.adjoint();
            auto blocks = vs.split(xi);
            r += (metric_adjoint(hl, blocks.minus) + blocks.plus).norm();
            r += (blocks.prime + blocks.plus + blocks.minus + blocks.perp - xi).norm();
            return CheckOutcome{r, xi.norm() + 1.0};
        });

    return defs;
}

// --- suite runner -------------------------------------------------------------

namespace detail {

template <typename F>
void parallel_samples(int samples, int threads, F&& body) {
    if (threads <= 1) {
        for (int k = 0; k < samples; ++k) body(k);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int k = next.fetch_add(1); k < samples; k = next.fetch_add(1)) body(k);
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail

inline SuiteResults run_identity_suite(const SuiteConfig& cfg) {
    auto t_start = std::chrono::steady_clock::now();
    SuiteResults res;
    int threads = cfg.threads > 0
                      ? cfg.threads
                      : static_cast<int>(std::min(4u, std::max(1u, std::thread::hardware_concurrency())));

    auto run_check = [&](const CheckDef& def) {
        auto t0 = std::chrono::steady_clock::now();
        std::vector<double> rels(static_cast<std::size_t>(cfg.samples), 0.0);
        detail::parallel_samples(cfg.samples, threads, [&](int k) {
            CheckOutcome out = def.eval(cfg.seed, k);
            rels[static_cast<std::size_t>(k)] = out.residual / std::max(out.scale, 1e-12);
        });
        CheckResult cr;
        cr.name = def.name;
        cr.statistics = def.statistics;
        cr.tol = def.tol;
        cr.asserted = def.asserted;
        for (double r : rels) cr.max_rel_residual = std::max(cr.max_rel_residual, r);
        cr.pass = !def.asserted || cr.max_rel_residual <= def.tol;
        cr.millis = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        res.checks.push_back(std::move(cr));
    };

    for (const CheckDef& def : structural_checks())
        if (cfg.suite_enabled(def.suite)) run_check(def);

    // Families are evaluated once and shared by identity checks, relation
    // discovery and sign resolution. Cache construction runs the parallel
    // sample loop with per-index slots, so results are order-independent.
    std::map<std::string, FamilyCache> caches;
    auto get_cache = [&](const ScalarFamily& fam) -> const FamilyCache& {
        std::string key = cat(fam.name, "|", fam.statistics);
        auto it = caches.find(key);
        if (it == caches.end()) {
            FamilyCache cache;
            cache.samples.resize(static_cast<std::size_t>(cfg.samples));
            detail::parallel_samples(cfg.samples, threads, [&](int k) {
                cache.samples[static_cast<std::size_t>(k)] = fam.evaluate(cfg.seed, k);
            });
            it = caches.emplace(std::move(key), std::move(cache)).first;
        }
        return it->second;
    };

    for (const LinearIdentity& id : linear_identities()) {
        if (!cfg.suite_enabled(id.suite) || !cfg.stat_enabled(id.family.statistics)) continue;
        auto t0 = std::chrono::steady_clock::now();
        const FamilyCache& cache = get_cache(id.family);
        CheckResult cr;
        cr.name = id.name;
        cr.statistics = id.family.statistics;
        cr.tol = cfg.identity_tol;
        cr.asserted = true;
        cr.max_rel_residual = identity_from_cache(cache, id.coeffs).max_rel_residual;
        cr.pass = cr.max_rel_residual <= cr.tol;
        cr.millis = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        res.checks.push_back(std::move(cr));
    }

    // Relation discovery attached to suites.
    auto run_relations = [&](const ScalarFamily& fam) {
        auto t0 = std::chrono::steady_clock::now();
        const FamilyCache& cache = get_cache(fam);
        RelationBasis rb = find_linear_relations_from_samples(fam.name, fam.member_names,
                                                              cache.samples);
        RelationResult rr;
        rr.family = fam.name;
        rr.statistics = fam.statistics;
        rr.nullspace_dim = rb.nullspace_dim;
        rr.basis = rb.basis;
        rr.millis =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        res.relations.push_back(std::move(rr));
    };

    if (cfg.suite_enabled("I")) run_relations(family_I());
    if (cfg.suite_enabled("J")) {
        run_relations(family_J());
        run_relations(family_IJ());
    }
    if (cfg.suite_enabled("S")) {
        if (cfg.bosonic) run_relations(family_S(Parity::Even));
        if (cfg.fermionic) run_relations(family_S(Parity::Odd));
    }
    if (cfg.suite_enabled("mixed")) {
        if (cfg.bosonic) run_relations(family_mixed(Parity::Even));
        if (cfg.fermionic) run_relations(family_mixed(Parity::Odd));
        run_relations(family_threeleg());
    }

    // Statistics-dependent signs, resolved by measuring both candidates on
    // the cached samples; recorded as the sign making the combination
    // vanish.
    auto resolve_sign = [&](const std::string& label, const ScalarFamily& fam,
                            std::vector<double> plus_coeffs, std::vector<double> minus_coeffs,
                            const char* plus_label, const char* minus_label) {
        const FamilyCache& cache = get_cache(fam);
        double rp = identity_from_cache(cache, plus_coeffs).max_rel_residual;
        double rm = identity_from_cache(cache, minus_coeffs).max_rel_residual;
        res.resolved_signs[label] = rp <= rm ? plus_label : minus_label;
    };
    if (cfg.suite_enabled("S")) {
        if (cfg.bosonic) {
            resolve_sign("S1 -+ S3 - S4 = 0 (bosonic)", family_S(Parity::Even),
                         {1, 0, -1, -1, 0}, {1, 0, 1, -1, 0}, "S1 - S3 - S4", "S1 + S3 - S4");
            resolve_sign("crossed eps-pairing = -+ S4 (bosonic)",
                         family_S_footnote(Parity::Even), {1, 1}, {1, -1}, "-S4", "+S4");
        }
        if (cfg.fermionic) {
            resolve_sign("S1 -+ S3 - S4 = 0 (fermionic)", family_S(Parity::Odd),
                         {1, 0, 1, -1, 0}, {1, 0, -1, -1, 0}, "S1 + S3 - S4", "S1 - S3 - S4");
            resolve_sign("crossed eps-pairing = -+ S4 (fermionic)",
                         family_S_footnote(Parity::Odd), {1, -1}, {1, 1}, "+S4", "-S4");
        }
    }
    if (cfg.suite_enabled("mixed")) {
        res.resolved_signs["mixed 9-sum sign vectors"] =
            "all-plus within each of K1, K2, K3";
    }

    res.total_millis = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t_start)
                           .count();
    return res;
}

}  // namespace ewgeom
