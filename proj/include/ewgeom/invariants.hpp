#pragma once

#include "ewgeom/pairings.hpp"
#include "ewgeom/relations.hpp"

namespace ewgeom {

// --- contraction networks ---------------------------------------------------

// A slot of a specific factor in a contraction network.
struct NetRef {
    int factor;
    int slot;
};

struct NetPair {
    NetRef a, b;
};

// Multiplies the factors in the given order (graded product semantics) and
// sums every listed contraction as soon as both slots are available, so
// large outer products are never materialized. Factor order is never
// changed, so all statistics signs are the ones of the written-down
// expression.
inline Tensor fold_contract(std::span<const Tensor* const> factors,
                            std::span<const NetPair> pairs) {
    if (factors.empty()) throw TensorError("empty contraction network");

    // Contract pairs internal to one factor, tracking surviving slot ids.
    auto internal = [&](const Tensor& t, int f, std::vector<int>& slot_ids) {
        Tensor cur = t;
        slot_ids.resize(static_cast<std::size_t>(t.rank()));
        for (int s = 0; s < t.rank(); ++s) slot_ids[static_cast<std::size_t>(s)] = s;
        for (const NetPair& pr : pairs) {
            if (pr.a.factor != f || pr.b.factor != f) continue;
            int ia = -1, ib = -1;
            for (std::size_t s = 0; s < slot_ids.size(); ++s) {
                if (slot_ids[s] == pr.a.slot) ia = static_cast<int>(s);
                if (slot_ids[s] == pr.b.slot) ib = static_cast<int>(s);
            }
            if (ia < 0 || ib < 0) throw TensorError("bad internal contraction pair");
            int up = ia, down = ib;
            if (cur.slots()[static_cast<std::size_t>(ia)].variance == Variance::Down)
                std::swap(up, down);
            cur = cur.contract(up, down);
            slot_ids.erase(slot_ids.begin() + std::max(ia, ib));
            slot_ids.erase(slot_ids.begin() + std::min(ia, ib));
        }
        return cur;
    };

    std::vector<int> first_ids;
    Tensor cur = internal(*factors[0], 0, first_ids);
    std::vector<NetRef> origin;
    for (int id : first_ids) origin.push_back({0, id});
    std::size_t satisfied = 0;
    for (const NetPair& pr : pairs)
        if (pr.a.factor == 0 && pr.b.factor == 0) ++satisfied;

    for (int f = 1; f < static_cast<int>(factors.size()); ++f) {
        std::vector<int> ids;
        Tensor next = internal(*factors[f], f, ids);
        for (const NetPair& pr : pairs)
            if (pr.a.factor == f && pr.b.factor == f) ++satisfied;

        // Pairs crossing from already-merged factors into this one.
        std::vector<std::pair<int, int>> cross;
        std::vector<bool> next_used(ids.size(), false);
        for (const NetPair& pr : pairs) {
            NetRef in_next{}, in_cur{};
            if (pr.a.factor == f && pr.b.factor < f) {
                in_next = pr.a;
                in_cur = pr.b;
            } else if (pr.b.factor == f && pr.a.factor < f) {
                in_next = pr.b;
                in_cur = pr.a;
            } else {
                continue;
            }
            int ic = -1, in = -1;
            for (std::size_t s = 0; s < origin.size(); ++s)
                if (origin[s].factor == in_cur.factor && origin[s].slot == in_cur.slot)
                    ic = static_cast<int>(s);
            for (std::size_t s = 0; s < ids.size(); ++s)
                if (ids[s] == in_next.slot) in = static_cast<int>(s);
            if (ic < 0 || in < 0)
                throw TensorError("contraction pair references a consumed slot");
            cross.emplace_back(ic, in);
            next_used[static_cast<std::size_t>(in)] = true;
            ++satisfied;
        }
        cur = Tensor::binary_contract(cur, next, cross);

        std::vector<NetRef> new_origin;
        std::vector<bool> cur_used(origin.size(), false);
        for (auto& [ic, in] : cross) cur_used[static_cast<std::size_t>(ic)] = true;
        for (std::size_t s = 0; s < origin.size(); ++s)
            if (!cur_used[s]) new_origin.push_back(origin[s]);
        for (std::size_t s = 0; s < ids.size(); ++s)
            if (!next_used[s]) new_origin.push_back({f, ids[s]});
        origin = std::move(new_origin);
    }
    if (satisfied != pairs.size())
        throw TensorError("contraction network has unsatisfied pairs");
    return cur;
}

// The same network evaluated in magnitude arithmetic. The result tracks,
// for every generator subset, the pre-cancellation mass ("scale") that fed
// its coefficient.
inline GrassmannElement fold_contract_shadow(std::span<const Tensor* const> factors,
                                             std::span<const NetPair> pairs) {
    std::vector<Tensor> shadows;
    shadows.reserve(factors.size());
    for (const Tensor* f : factors) shadows.push_back(f->abs_shadow());
    std::vector<const Tensor*> ptrs;
    for (const Tensor& s : shadows) ptrs.push_back(&s);
    Tensor r = fold_contract(ptrs, pairs);
    if (r.rank() != 0) throw TensorError("scale network must contract to a scalar");
    return r.scalar_value();
}

struct NetScalar {
    GrassmannElement value;
    GrassmannElement scale;
};

inline NetScalar net_scalar(std::initializer_list<const Tensor*> factors,
                            std::initializer_list<NetPair> pairs) {
    std::span<const Tensor* const> f(factors.begin(), factors.size());
    std::span<const NetPair> p(pairs.begin(), pairs.size());
    Tensor v = fold_contract(f, p);
    if (v.rank() != 0) throw TensorError("network must contract to a scalar");
    return {v.scalar_value(), fold_contract_shadow(f, p)};
}

// --- sampled field contexts --------------------------------------------------

inline const Slot kStDown{Species::Spacetime, Variance::Down};
inline const Slot kIsoUp{Species::Isospin, Variance::Up};
inline const Slot kIsoDown{Species::Isospin, Variance::Down};
inline const Slot kSpinDown{Species::Spinor, Variance::Down};
inline const Slot kDotUp{Species::SpinorDotted, Variance::Up};
inline const Slot kDotDown{Species::SpinorDotted, Variance::Down};

// Unconstrained gauge tensor with a Higgs pair, all bosonic.
struct IJSample {
    Tensor W;       // [st down, iso up, iso down]
    Tensor phi;     // [iso up]
    Tensor phibar;  // conjugate of phi
};

inline IJSample sample_ij(std::uint64_t seed, int k) {
    RngStream rng = RngStream::keyed(seed, "sample-IJ", static_cast<std::uint64_t>(k));
    IJSample s;
    s.W = sample_random({kStDown, kIsoUp, kIsoDown}, Parity::Even, rng);
    s.phi = sample_random({kIsoUp}, Parity::Even, rng);
    s.phibar = s.phi.conjugate();
    return s;
}

// Spin-1 mixing field in its two-spinor form, either statistics; the
// spacetime form is derived through the Pauli frame, and the conjugate
// partner shares the sample (and its generators).
struct OmegaSample {
    Tensor omega;        // [iso up, spinor down, dotted down]
    Tensor omegabar;     // conjugate: [iso down, dotted down, spinor down]
    Tensor omega_st;     // [iso up, st down]
    Tensor omegabar_st;  // [iso down, st down]
};

inline OmegaSample sample_omega(std::uint64_t seed, int k, Parity statistics) {
    RngStream rng = RngStream::keyed(
        seed, statistics == Parity::Odd ? "sample-omega-f" : "sample-omega-b",
        static_cast<std::uint64_t>(k));
    GeneratorPool pool;
    OmegaSample s;
    s.omega = sample_random({kIsoUp, kSpinDown, kDotDown}, statistics, rng, &pool);
    s.omegabar = s.omega.conjugate();
    s.omega_st = hstar_pair_to_spacetime(s.omega, 1, 2);
    s.omegabar_st = hstar_pair_to_spacetime(s.omegabar, 2, 1);
    return s;
}

// Extended Higgs: isospin vector of dotted endomorphisms, even parity.
struct PhiExtSample {
    Tensor phi;     // [iso up, dotted up, dotted down]
    Tensor phibar;  // [iso down, spinor up, spinor down]
};

inline PhiExtSample sample_phi_ext(std::uint64_t seed, int k) {
    RngStream rng = RngStream::keyed(seed, "sample-phiext", static_cast<std::uint64_t>(k));
    PhiExtSample s;
    s.phi = sample_random({kIsoUp, kDotUp, kDotDown}, Parity::Even, rng);
    s.phibar = s.phi.conjugate();
    return s;
}

// --- family evaluators over explicit fields ----------------------------------

namespace detail {

inline void push_net(FamilySample& out, NetScalar n) {
    out.values.push_back(std::move(n.value));
    out.scales.push_back(std::move(n.scale));
}

inline Tensor shadow_fold(std::vector<const Tensor*> factors, std::span<const NetPair> pairs) {
    std::vector<Tensor> sh;
    sh.reserve(factors.size());
    for (auto* t : factors) sh.push_back(t->abs_shadow());
    std::vector<const Tensor*> ptrs;
    for (auto& t : sh) ptrs.push_back(&t);
    return fold_contract(ptrs, pairs);
}

// Applies all nine spinor pairings of an 8-slot tensor, with scales.
inline void push_scheme_family(FamilySample& out, const Tensor& t, const Tensor& shadow) {
    auto schemes = enumerate_pair_contractions(t.slots());
    if (schemes.size() != 9) throw Error("expected 9 spinor pairings");
    for (const auto& sc : schemes) {
        out.values.push_back(apply_scheme(t, sc));
        out.scales.push_back(apply_scheme(shadow, sc));
    }
}

}  // namespace detail

// Quadratic gauge-Higgs invariants I1..I4 of an unconstrained gauge tensor.
inline FamilySample eval_I_family(const Tensor& W, const Tensor& phi, const Tensor& phibar) {
    Tensor g = metric_upper();
    FamilySample out;
    // I1 = g^{lm} W_l^a_{a'} W_m^b_a phi^{a'} phibar_b
    detail::push_net(out, net_scalar({&g, &W, &W, &phi, &phibar},
                                     {{{0, 0}, {1, 0}},
                                      {{0, 1}, {2, 0}},
                                      {{1, 1}, {2, 2}},
                                      {{1, 2}, {3, 0}},
                                      {{2, 1}, {4, 0}}}));
    // I2 = g^{lm} W_l^a_{a'} W_m^b_b phi^{a'} phibar_a
    detail::push_net(out, net_scalar({&g, &W, &W, &phi, &phibar},
                                     {{{0, 0}, {1, 0}},
                                      {{0, 1}, {2, 0}},
                                      {{2, 1}, {2, 2}},
                                      {{1, 2}, {3, 0}},
                                      {{1, 1}, {4, 0}}}));
    // I3 = g^{lm} W_l^a_a W_m^b_b phi^c phibar_c
    detail::push_net(out, net_scalar({&g, &W, &W, &phi, &phibar},
                                     {{{0, 0}, {1, 0}},
                                      {{0, 1}, {2, 0}},
                                      {{1, 1}, {1, 2}},
                                      {{2, 1}, {2, 2}},
                                      {{3, 0}, {4, 0}}}));
    // I4 = g^{lm} W_l^a_b W_m^b_a phi^c phibar_c
    detail::push_net(out, net_scalar({&g, &W, &W, &phi, &phibar},
                                     {{{0, 0}, {1, 0}},
                                      {{0, 1}, {2, 0}},
                                      {{1, 1}, {2, 2}},
                                      {{2, 1}, {1, 2}},
                                      {{3, 0}, {4, 0}}}));
    return out;
}

// Symplectic gauge-Higgs invariants J1..J3; every term carries one lower
// and one upper isospin epsilon, so the phase class drops out.
inline FamilySample eval_J_family(const Tensor& W, const Tensor& phi, const Tensor& phibar,
                                  cplx eps_phase = cplx{1.0, 0.0}) {
    Tensor g = metric_upper();
    Tensor el = epsilon_lower(Species::Isospin, eps_phase);
    Tensor eu = epsilon_upper(Species::Isospin, eps_phase);
    FamilySample out;
    // J1 = g^{lm} eps_{ab} eps^{a'b'} W_l^a_{a'} W_m^b_{b'} phi^c phibar_c
    detail::push_net(out, net_scalar({&g, &el, &eu, &W, &W, &phi, &phibar},
                                     {{{0, 0}, {3, 0}},
                                      {{0, 1}, {4, 0}},
                                      {{1, 0}, {3, 1}},
                                      {{1, 1}, {4, 1}},
                                      {{2, 0}, {3, 2}},
                                      {{2, 1}, {4, 2}},
                                      {{5, 0}, {6, 0}}}));
    // J2 = g^{lm} eps_{ac} eps^{a'c'} W_l^a_{a'} W_m^b_b phi^c phibar_{c'}
    detail::push_net(out, net_scalar({&g, &el, &eu, &W, &W, &phi, &phibar},
                                     {{{0, 0}, {3, 0}},
                                      {{0, 1}, {4, 0}},
                                      {{1, 0}, {3, 1}},
                                      {{1, 1}, {5, 0}},
                                      {{2, 0}, {3, 2}},
                                      {{2, 1}, {6, 0}},
                                      {{4, 1}, {4, 2}}}));
    // J3 = g^{lm} eps_{ac} eps^{b'c'} W_l^a_b W_m^b_{b'} phi^c phibar_{c'}
    detail::push_net(out, net_scalar({&g, &el, &eu, &W, &W, &phi, &phibar},
                                     {{{0, 0}, {3, 0}},
                                      {{0, 1}, {4, 0}},
                                      {{1, 0}, {3, 1}},
                                      {{1, 1}, {5, 0}},
                                      {{3, 2}, {4, 1}},
                                      {{2, 0}, {4, 2}},
                                      {{2, 1}, {6, 0}}}));
    return out;
}

namespace detail {

// M_{l m a}^b = m^2 OmegaBar_{l a} Omega_m^b; slot order
// [iso down, st down, iso up, st down].
inline Tensor m_tensor(const Tensor& omegabar_st, const Tensor& omega_st, double mass) {
    return Tensor::graded_product({&omegabar_st, &omega_st}) * (mass * mass);
}

inline void check_statistics(const Tensor& omegabar_st, const Tensor& omega_st) {
    if (omega_st.parity() != omegabar_st.parity())
        throw Error("omega and its conjugate carry different statistics");
}

}  // namespace detail

// Quartic self-contractions S1..S5 of the spin-1 mixing field; inputs are
// the spacetime forms [iso down, st down] and [iso up, st down].
inline FamilySample eval_S_family(const Tensor& omegabar_st, const Tensor& omega_st,
                                  double mass) {
    detail::check_statistics(omegabar_st, omega_st);
    Tensor m = detail::m_tensor(omegabar_st, omega_st, mass);
    Tensor g = metric_upper();
    Tensor eu = epsilon_upper(Species::Isospin);
    Tensor el = epsilon_lower(Species::Isospin);
    Tensor mt = m.contract(2, 0);  // M_{l m}
    FamilySample out;
    // S1 = g^{lm} g^{nr} M_{lm} M_{nr}
    detail::push_net(out, net_scalar({&g, &mt, &g, &mt},
                                     {{{0, 0}, {1, 0}},
                                      {{0, 1}, {1, 1}},
                                      {{2, 0}, {3, 0}},
                                      {{2, 1}, {3, 1}}}));
    // S2 = g^{ln} g^{mr} M_{lm} M_{nr}
    detail::push_net(out, net_scalar({&g, &mt, &g, &mt},
                                     {{{0, 0}, {1, 0}},
                                      {{0, 1}, {3, 0}},
                                      {{2, 0}, {1, 1}},
                                      {{2, 1}, {3, 1}}}));
    // S3 = g^{lr} g^{mn} M_{lm} M_{nr}
    detail::push_net(out, net_scalar({&g, &mt, &g, &mt},
                                     {{{0, 0}, {1, 0}},
                                      {{0, 1}, {3, 1}},
                                      {{2, 0}, {1, 1}},
                                      {{2, 1}, {3, 0}}}));
    // S4 = g^{lm} g^{nr} eps^{aa'} eps_{bb'} M_{lma}^b M_{nra'}^{b'}
    // (M factors first and last so every merge contracts immediately)
    detail::push_net(out, net_scalar({&m, &g, &g, &eu, &el, &m},
                                     {{{1, 0}, {0, 1}},
                                      {{1, 1}, {0, 3}},
                                      {{2, 0}, {5, 1}},
                                      {{2, 1}, {5, 3}},
                                      {{3, 0}, {0, 0}},
                                      {{3, 1}, {5, 0}},
                                      {{4, 0}, {0, 2}},
                                      {{4, 1}, {5, 2}}}));
    // S5 = g^{ln} g^{mr} eps eps M M
    detail::push_net(out, net_scalar({&m, &g, &g, &eu, &el, &m},
                                     {{{1, 0}, {0, 1}},
                                      {{1, 1}, {5, 1}},
                                      {{2, 0}, {0, 3}},
                                      {{2, 1}, {5, 3}},
                                      {{3, 0}, {0, 0}},
                                      {{3, 1}, {5, 0}},
                                      {{4, 0}, {0, 2}},
                                      {{4, 1}, {5, 2}}}));
    return out;
}

// [crossed pairing g^{lr} g^{mn} eps eps M M, S4]; the first equals -S4 for
// bosonic statistics and +S4 for fermionic.
inline FamilySample eval_S_footnote(const Tensor& omegabar_st, const Tensor& omega_st,
                                    double mass) {
    detail::check_statistics(omegabar_st, omega_st);
    Tensor m = detail::m_tensor(omegabar_st, omega_st, mass);
    Tensor g = metric_upper();
    Tensor eu = epsilon_upper(Species::Isospin);
    Tensor el = epsilon_lower(Species::Isospin);
    FamilySample out;
    detail::push_net(out, net_scalar({&m, &g, &g, &eu, &el, &m},
                                     {{{1, 0}, {0, 1}},
                                      {{1, 1}, {5, 3}},
                                      {{2, 0}, {0, 3}},
                                      {{2, 1}, {5, 1}},
                                      {{3, 0}, {0, 0}},
                                      {{3, 1}, {5, 0}},
                                      {{4, 0}, {0, 2}},
                                      {{4, 1}, {5, 2}}}));
    detail::push_net(out, net_scalar({&m, &g, &g, &eu, &el, &m},
                                     {{{1, 0}, {0, 1}},
                                      {{1, 1}, {0, 3}},
                                      {{2, 0}, {5, 1}},
                                      {{2, 1}, {5, 3}},
                                      {{3, 0}, {0, 0}},
                                      {{3, 1}, {5, 0}},
                                      {{4, 0}, {0, 2}},
                                      {{4, 1}, {5, 2}}}));
    return out;
}

// Mixed Omega-Higgs quartics S'1..S'3.
inline FamilySample eval_Sprime_family(const Tensor& omegabar_st, const Tensor& omega_st,
                                       const Tensor& phibar, const Tensor& phi, double mass) {
    detail::check_statistics(omegabar_st, omega_st);
    Tensor g = metric_upper();
    Tensor eu = epsilon_upper(Species::Isospin);
    Tensor el = epsilon_lower(Species::Isospin);
    const Tensor &ob = omegabar_st, &o = omega_st;
    double m2 = mass * mass;
    FamilySample out;
    auto push = [&](NetScalar n) {
        out.values.push_back(n.value * m2);
        out.scales.push_back(n.scale * m2);
    };
    // S'1 = m^2 g^{lm} Obar_{la} Omega_m^a phibar_b phi^b
    push(net_scalar({&g, &ob, &o, &phibar, &phi},
                    {{{0, 0}, {1, 1}}, {{0, 1}, {2, 1}}, {{1, 0}, {2, 0}}, {{3, 0}, {4, 0}}}));
    // S'2 = m^2 g^{lm} Obar_{la} Omega_m^b phibar_b phi^a
    push(net_scalar({&g, &ob, &o, &phibar, &phi},
                    {{{0, 0}, {1, 1}}, {{0, 1}, {2, 1}}, {{1, 0}, {4, 0}}, {{2, 0}, {3, 0}}}));
    // S'3 = m^2 g^{lm} eps^{aa'} eps_{bb'} Obar_{la} Omega_m^b phibar_{a'} phi^{b'}
    push(net_scalar({&g, &eu, &el, &ob, &o, &phibar, &phi},
                    {{{0, 0}, {3, 1}},
                     {{0, 1}, {4, 1}},
                     {{1, 0}, {3, 0}},
                     {{1, 1}, {5, 0}},
                     {{2, 0}, {4, 0}},
                     {{2, 1}, {6, 0}}}));
    return out;
}

// [ -|phi|^4 - (S'1+S'2+S'3) ,  -(|phi|^4 + 2 m^2 Omega^2 |phi|^2) ]
inline FamilySample eval_assembled_potential(const Tensor& omegabar_st, const Tensor& omega_st,
                                             const Tensor& phibar, const Tensor& phi,
                                             double mass) {
    FamilySample sprime = eval_Sprime_family(omegabar_st, omega_st, phibar, phi, mass);
    Tensor g = metric_upper();
    NetScalar phi2 = net_scalar({&phibar, &phi}, {{{0, 0}, {1, 0}}});
    NetScalar omega2 =
        net_scalar({&g, &omegabar_st, &omega_st},
                   {{{0, 0}, {1, 1}}, {{0, 1}, {2, 1}}, {{1, 0}, {2, 0}}});
    GrassmannElement phi4 = phi2.value * phi2.value;
    GrassmannElement phi4_scale = GrassmannElement::mul_magnitude(phi2.scale, phi2.scale);

    GrassmannElement lhs =
        -1.0 * phi4 - (sprime.values[0] + sprime.values[1] + sprime.values[2]);
    GrassmannElement lhs_scale =
        phi4_scale + sprime.scales[0] + sprime.scales[1] + sprime.scales[2];
    GrassmannElement rhs =
        -1.0 * (phi4 + 2.0 * mass * mass * (omega2.value * phi2.value));
    GrassmannElement rhs_scale =
        phi4_scale + (2.0 * mass * mass) *
                         GrassmannElement::mul_magnitude(omega2.scale, phi2.scale);

    FamilySample out;
    out.values = {std::move(lhs), std::move(rhs)};
    out.scales = {std::move(lhs_scale), std::move(rhs_scale)};
    return out;
}

// The 18 two-spinor contraction scalars: two isospin bases, nine epsilon
// pairings each, fixed factor order OmegaBar Omega OmegaBar Omega.
inline FamilySample eval_18_family(const Tensor& omega, const Tensor& omegabar) {
    const Tensor &o = omega, &ob = omegabar;
    Tensor eu = epsilon_upper(Species::Isospin);
    Tensor el = epsilon_lower(Species::Isospin);
    std::vector<const Tensor*> f1 = {&ob, &o, &ob, &o};
    std::vector<NetPair> p1 = {{{1, 0}, {0, 0}}, {{3, 0}, {2, 0}}};
    Tensor t1 = fold_contract(f1, p1);
    Tensor t1s = detail::shadow_fold(f1, p1);
    std::vector<const Tensor*> f2 = {&eu, &el, &ob, &o, &ob, &o};
    std::vector<NetPair> p2 = {
        {{0, 0}, {2, 0}}, {{0, 1}, {4, 0}}, {{1, 0}, {3, 0}}, {{1, 1}, {5, 0}}};
    Tensor t2 = fold_contract(f2, p2);
    Tensor t2s = detail::shadow_fold(f2, p2);

    FamilySample out;
    detail::push_scheme_family(out, t1, t1s);
    detail::push_scheme_family(out, t2, t2s);
    return out;
}

// Extended-Higgs quartic contractions: pairing-engine route then trace
// route, eight scalars in total.
inline FamilySample eval_phi4_routes(const Tensor& phi_ext, const Tensor& phibar_ext) {
    const Tensor &P = phi_ext, &Pb = phibar_ext;

    Tensor trP = P.contract(1, 2);
    Tensor trPb = Pb.contract(1, 2);
    Tensor trPsh = P.abs_shadow().contract(1, 2);
    Tensor trPbsh = Pb.abs_shadow().contract(1, 2);
    auto compose_tr = [](const Tensor& x, const Tensor& y) {
        return fold_contract(std::vector<const Tensor*>{&x, &y},
                             std::vector<NetPair>{{{0, 1}, {1, 2}}, {{1, 1}, {0, 2}}});
    };
    Tensor trPP = compose_tr(P, P);
    Tensor trPbPb = compose_tr(Pb, Pb);
    Tensor trPPsh = compose_tr(P.abs_shadow(), P.abs_shadow());
    Tensor trPbPbsh = compose_tr(Pb.abs_shadow(), Pb.abs_shadow());

    auto dot11 = [](const Tensor& a, const Tensor& b) {
        return fold_contract(std::vector<const Tensor*>{&a, &b},
                             std::vector<NetPair>{{{0, 0}, {1, 0}}})
            .scalar_value();
    };
    auto dot22 = [](const Tensor& a, const Tensor& b) {
        return fold_contract(std::vector<const Tensor*>{&a, &b},
                             std::vector<NetPair>{{{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}})
            .scalar_value();
    };
    GrassmannElement s1 = dot11(trP, trPb);
    GrassmannElement c1 = s1 * s1;
    Tensor trP2 = Tensor::graded_product({&trP, &trP});
    Tensor trPb2 = Tensor::graded_product({&trPb, &trPb});
    GrassmannElement c2 = dot22(trP2, trPbPb);
    GrassmannElement c3 = dot22(trPb2, trPP);
    GrassmannElement c4 = dot22(trPP, trPbPb);
    GrassmannElement s1s = dot11(trPsh, trPbsh);
    GrassmannElement c1s = GrassmannElement::mul_magnitude(s1s, s1s);
    Tensor trPsh2 = Tensor::graded_product({&trPsh, &trPsh});
    Tensor trPbsh2 = Tensor::graded_product({&trPbsh, &trPbsh});
    GrassmannElement c2s = dot22(trPsh2, trPbPbsh);
    GrassmannElement c3s = dot22(trPbsh2, trPPsh);
    GrassmannElement c4s = dot22(trPPsh, trPbPbsh);

    // Trace route with plain 2x2 complex matrices stored row-major.
    std::array<std::array<cplx, 4>, 2> Pm{}, Pbm{};
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                Pm[static_cast<std::size_t>(a)][static_cast<std::size_t>(i * 2 + j)] =
                    P.at({a, i, j}).body();
                Pbm[static_cast<std::size_t>(a)][static_cast<std::size_t>(i * 2 + j)] =
                    Pb.at({a, i, j}).body();
            }
    auto tr = [](const std::array<cplx, 4>& m) { return m[0] + m[3]; };
    auto trmul = [](const std::array<cplx, 4>& x, const std::array<cplx, 4>& y) {
        return x[0] * y[0] + x[1] * y[2] + x[2] * y[1] + x[3] * y[3];
    };
    cplx t1{0, 0}, t2{0, 0}, t3{0, 0}, t4{0, 0};
    for (int a = 0; a < 2; ++a) t1 += tr(Pm[a]) * tr(Pbm[a]);
    t1 *= t1;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            t2 += tr(Pm[a]) * tr(Pm[b]) * trmul(Pbm[a], Pbm[b]);
            t3 += tr(Pbm[a]) * tr(Pbm[b]) * trmul(Pm[a], Pm[b]);
            t4 += trmul(Pm[a], Pm[b]) * trmul(Pbm[a], Pbm[b]);
        }

    FamilySample out;
    out.values = {c1,
                  c2,
                  c3,
                  c4,
                  GrassmannElement(t1),
                  GrassmannElement(t2),
                  GrassmannElement(t3),
                  GrassmannElement(t4)};
    out.scales = {c1s, c2s, c3s, c4s, c1s, c2s, c3s, c4s};
    return out;
}

// The four pairing-route contractions alone.
inline FamilySample eval_phi4_traces(const Tensor& phi_ext, const Tensor& phibar_ext) {
    FamilySample both = eval_phi4_routes(phi_ext, phibar_ext);
    FamilySample out;
    out.values.assign(both.values.begin(), both.values.begin() + 4);
    out.scales.assign(both.scales.begin(), both.scales.begin() + 4);
    return out;
}

// Isospin-symplectic contractions of the extended Higgs; all vanish.
inline FamilySample eval_phi4_symplectic(const Tensor& phi_ext, const Tensor& phibar_ext) {
    const Tensor &P = phi_ext, &Pb = phibar_ext;
    Tensor eu = epsilon_upper(Species::Isospin);
    Tensor el = epsilon_lower(Species::Isospin);
    Tensor trP = P.contract(1, 2);
    Tensor trPb = Pb.contract(1, 2);
    auto compose_tr = [](const Tensor& x, const Tensor& y) {
        return fold_contract(std::vector<const Tensor*>{&x, &y},
                             std::vector<NetPair>{{{0, 1}, {1, 2}}, {{1, 1}, {0, 2}}});
    };
    Tensor trPP = compose_tr(P, P);
    Tensor trPbPb = compose_tr(Pb, Pb);

    FamilySample out;
    detail::push_net(out,
                     net_scalar({&el, &trP, &trP}, {{{0, 0}, {1, 0}}, {{0, 1}, {2, 0}}}));
    detail::push_net(out, net_scalar({&el, &trPP}, {{{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}}));
    detail::push_net(out,
                     net_scalar({&eu, &trPb, &trPb}, {{{0, 0}, {1, 0}}, {{0, 1}, {2, 0}}}));
    detail::push_net(out, net_scalar({&eu, &trPbPb}, {{{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}}));
    detail::push_net(out, net_scalar({&el, &eu, &trP, &trP, &trPb, &trPb},
                                     {{{0, 0}, {2, 0}},
                                      {{0, 1}, {3, 0}},
                                      {{1, 0}, {4, 0}},
                                      {{1, 1}, {5, 0}}}));
    detail::push_net(out, net_scalar({&el, &eu, &trPP, &trPbPb},
                                     {{{0, 0}, {2, 0}},
                                      {{0, 1}, {2, 1}},
                                      {{1, 0}, {3, 0}},
                                      {{1, 1}, {3, 1}}}));
    return out;
}

// The 27 mixed Phi-Omega scalars: three isospin gluings, nine spinor
// pairings each, in the fixed factor order Phi PhiBar Omega OmegaBar.
inline FamilySample eval_mixed_PhiOmega(const Tensor& phi_ext, const Tensor& phibar_ext,
                                        const Tensor& omega, const Tensor& omegabar) {
    const Tensor &P = phi_ext, &Pb = phibar_ext, &O = omega, &Ob = omegabar;
    Tensor eu = epsilon_upper(Species::Isospin);
    Tensor el = epsilon_lower(Species::Isospin);

    FamilySample out;
    auto run_base = [&](std::vector<const Tensor*> factors, std::vector<NetPair> pairs) {
        Tensor t = fold_contract(factors, pairs);
        Tensor ts = detail::shadow_fold(factors, pairs);
        detail::push_scheme_family(out, t, ts);
    };
    // K1: Phi^a PhiBar_a Omega^b OmegaBar_b
    run_base({&P, &Pb, &O, &Ob}, {{{0, 0}, {1, 0}}, {{2, 0}, {3, 0}}});
    // K2: Phi^a PhiBar_b Omega^b OmegaBar_a
    run_base({&P, &Pb, &O, &Ob}, {{{0, 0}, {3, 0}}, {{2, 0}, {1, 0}}});
    // K3: eps^{a'b'} eps_{ab} Phi^a PhiBar_{a'} Omega^b OmegaBar_{b'}
    run_base({&eu, &el, &P, &Pb, &O, &Ob},
             {{{1, 0}, {2, 0}}, {{1, 1}, {4, 0}}, {{0, 0}, {3, 0}}, {{0, 1}, {5, 0}}});
    return out;
}

// Momentum-dependent three-leg contractions q W k PhiBar Phi with W, k
// spacetime covectors mapped to Hermitian-pair form via the Pauli frame.
inline FamilySample eval_momentum_threeleg(const Tensor& w_cov, const Tensor& k_cov,
                                           const Tensor& phi_ext, const Tensor& phibar_ext,
                                           double q) {
    Tensor wh = spacetime_to_hstar_pair(w_cov, 0);
    Tensor kh = spacetime_to_hstar_pair(k_cov, 0);
    std::vector<const Tensor*> factors = {&wh, &kh, &phibar_ext, &phi_ext};
    std::vector<NetPair> pairs = {{{3, 0}, {2, 0}}};
    Tensor t = fold_contract(factors, pairs) * q;
    Tensor ts = detail::shadow_fold(factors, pairs) * std::abs(q);
    FamilySample out;
    detail::push_scheme_family(out, t, ts);
    return out;
}

// --- sampled scalar families --------------------------------------------------

inline ScalarFamily family_I() {
    ScalarFamily f;
    f.name = "I";
    f.member_names = {"I1", "I2", "I3", "I4"};
    f.statistics = "bosonic";
    f.evaluate = [](std::uint64_t seed, int k) {
        IJSample s = sample_ij(seed, k);
        return eval_I_family(s.W, s.phi, s.phibar);
    };
    return f;
}

inline ScalarFamily family_J(cplx eps_phase = cplx{1.0, 0.0}) {
    ScalarFamily f;
    f.name = "J";
    f.member_names = {"J1", "J2", "J3"};
    f.statistics = "bosonic";
    f.evaluate = [eps_phase](std::uint64_t seed, int k) {
        IJSample s = sample_ij(seed, k);
        return eval_J_family(s.W, s.phi, s.phibar, eps_phase);
    };
    return f;
}

// Joint family sharing one sample per row.
inline ScalarFamily family_IJ() {
    ScalarFamily f;
    f.name = "IJ";
    f.member_names = {"I1", "I2", "I3", "I4", "J1", "J2", "J3"};
    f.statistics = "bosonic";
    f.evaluate = [](std::uint64_t seed, int k) {
        IJSample s = sample_ij(seed, k);
        FamilySample a = eval_I_family(s.W, s.phi, s.phibar);
        FamilySample b = eval_J_family(s.W, s.phi, s.phibar);
        for (std::size_t i = 0; i < b.values.size(); ++i) {
            a.values.push_back(std::move(b.values[i]));
            a.scales.push_back(b.scales[i]);
        }
        return a;
    };
    return f;
}

inline const char* stat_name(Parity statistics) {
    return statistics == Parity::Odd ? "fermionic" : "bosonic";
}

inline ScalarFamily family_S(Parity statistics, double mass = 1.0) {
    ScalarFamily f;
    f.name = "S";
    f.member_names = {"S1", "S2", "S3", "S4", "S5"};
    f.statistics = stat_name(statistics);
    f.evaluate = [statistics, mass](std::uint64_t seed, int k) {
        OmegaSample s = sample_omega(seed, k, statistics);
        return eval_S_family(s.omegabar_st, s.omega_st, mass);
    };
    return f;
}

inline ScalarFamily family_S_footnote(Parity statistics, double mass = 1.0) {
    ScalarFamily f;
    f.name = "Sfootnote";
    f.member_names = {"crossed", "S4"};
    f.statistics = stat_name(statistics);
    f.evaluate = [statistics, mass](std::uint64_t seed, int k) {
        OmegaSample s = sample_omega(seed, k, statistics);
        return eval_S_footnote(s.omegabar_st, s.omega_st, mass);
    };
    return f;
}

inline Tensor sample_higgs_pair(std::uint64_t seed, int k, Tensor* phibar_out) {
    RngStream rng = RngStream::keyed(seed, "sample-sprime-higgs", static_cast<std::uint64_t>(k));
    Tensor phi = sample_random({kIsoUp}, Parity::Even, rng);
    if (phibar_out) *phibar_out = phi.conjugate();
    return phi;
}

inline ScalarFamily family_Sprime(Parity statistics, double mass = 1.0) {
    ScalarFamily f;
    f.name = "Sprime";
    f.member_names = {"S'1", "S'2", "S'3"};
    f.statistics = stat_name(statistics);
    f.evaluate = [statistics, mass](std::uint64_t seed, int k) {
        OmegaSample s = sample_omega(seed, k, statistics);
        Tensor phibar;
        Tensor phi = sample_higgs_pair(seed, k, &phibar);
        return eval_Sprime_family(s.omegabar_st, s.omega_st, phibar, phi, mass);
    };
    return f;
}

inline ScalarFamily family_assembled_potential(Parity statistics, double mass = 1.0) {
    ScalarFamily f;
    f.name = "assembled-potential";
    f.member_names = {"minus|phi|4-sumS'", "-(|phi|4+2m2O2|phi|2)"};
    f.statistics = stat_name(statistics);
    f.evaluate = [statistics, mass](std::uint64_t seed, int k) {
        OmegaSample s = sample_omega(seed, k, statistics);
        Tensor phibar;
        Tensor phi = sample_higgs_pair(seed, k, &phibar);
        return eval_assembled_potential(s.omegabar_st, s.omega_st, phibar, phi, mass);
    };
    return f;
}

inline ScalarFamily family_T18(Parity statistics) {
    ScalarFamily f;
    f.name = "T18";
    for (int base = 0; base < 2; ++base)
        for (int i = 0; i < 9; ++i)
            f.member_names.push_back(cat(base == 0 ? "delta" : "eps", "-scheme", i));
    f.statistics = stat_name(statistics);
    f.evaluate = [statistics](std::uint64_t seed, int k) {
        OmegaSample s = sample_omega(seed, k, statistics);
        return eval_18_family(s.omega, s.omegabar);
    };
    return f;
}

inline ScalarFamily family_phi4_routes() {
    ScalarFamily f;
    f.name = "phi4";
    f.member_names = {"eng1", "eng2", "eng3", "eng4", "tr1", "tr2", "tr3", "tr4"};
    f.statistics = "bosonic";
    f.evaluate = [](std::uint64_t seed, int k) {
        PhiExtSample s = sample_phi_ext(seed, k);
        return eval_phi4_routes(s.phi, s.phibar);
    };
    return f;
}

inline ScalarFamily family_phi4_symplectic() {
    ScalarFamily f;
    f.name = "phi4-symplectic";
    f.member_names = {"eps_trtr_P", "eps_trcomp_P", "eps_trtr_Pb",
                      "eps_trcomp_Pb", "epseps_trtr4", "epseps_trcomp4"};
    f.statistics = "bosonic";
    f.evaluate = [](std::uint64_t seed, int k) {
        PhiExtSample s = sample_phi_ext(seed, k);
        return eval_phi4_symplectic(s.phi, s.phibar);
    };
    return f;
}

inline ScalarFamily family_mixed(Parity statistics) {
    ScalarFamily f;
    f.name = "mixed";
    const char* bases[3] = {"K1", "K2", "K3"};
    for (const char* b : bases)
        for (int i = 0; i < 9; ++i) f.member_names.push_back(cat(b, "-scheme", i));
    f.statistics = stat_name(statistics);
    f.evaluate = [statistics](std::uint64_t seed, int k) {
        OmegaSample so = sample_omega(seed, k, statistics);
        PhiExtSample sp = sample_phi_ext(seed, k);
        return eval_mixed_PhiOmega(sp.phi, sp.phibar, so.omega, so.omegabar);
    };
    return f;
}

inline ScalarFamily family_threeleg(double q = 1.0) {
    ScalarFamily f;
    f.name = "threeleg";
    for (int i = 0; i < 9; ++i) f.member_names.push_back(cat("scheme", i));
    f.statistics = "bosonic";
    f.evaluate = [q](std::uint64_t seed, int k) {
        RngStream rng = RngStream::keyed(seed, "sample-threeleg", static_cast<std::uint64_t>(k));
        Tensor w({kStDown}, Parity::Even);
        Tensor kk({kStDown}, Parity::Even);
        for (int mu = 0; mu < 4; ++mu) {
            w.set({mu}, GrassmannElement(rng.next_gaussian()));
            kk.set({mu}, GrassmannElement(rng.next_gaussian()));
        }
        PhiExtSample sp = sample_phi_ext(seed, k);
        return eval_momentum_threeleg(w, kk, sp.phi, sp.phibar, q);
    };
    return f;
}

// --- linear identities over the families -----------------------------------

struct LinearIdentity {
    std::string name;
    std::string suite;
    ScalarFamily family;
    std::vector<double> coeffs;
    double tol = 1e-10;
};

inline std::vector<LinearIdentity> linear_identities() {
    std::vector<LinearIdentity> ids;
    auto add = [&](std::string name, std::string suite, ScalarFamily fam,
                   std::vector<double> c) {
        ids.push_back({std::move(name), std::move(suite), std::move(fam), std::move(c)});
    };

    add("2I1-2I2+I3-I4", "I", family_I(), {2, -2, 1, -1});
    add("J1-2J2+2J3", "J", family_J(), {1, -2, 2});

    add("S1-S3-S4 (bosonic)", "S", family_S(Parity::Even), {1, 0, -1, -1, 0});
    add("S5 (bosonic)", "S", family_S(Parity::Even), {0, 0, 0, 0, 1});
    add("S1+S3-S4 (fermionic)", "S", family_S(Parity::Odd), {1, 0, 1, -1, 0});
    add("2S2-S5 (fermionic)", "S", family_S(Parity::Odd), {0, 2, 0, 0, -1});
    add("S1+S3-S4+(2S2-S5) (fermionic)", "S", family_S(Parity::Odd), {1, 2, 1, -1, -1});
    add("S1+S3-S4-(2S2-S5) (fermionic)", "S", family_S(Parity::Odd), {1, -2, 1, -1, 1});
    add("crossed+S4 (bosonic)", "S", family_S_footnote(Parity::Even), {1, 1});
    add("crossed-S4 (fermionic)", "S", family_S_footnote(Parity::Odd), {1, -1});

    add("S'2+S'3-S'1 (bosonic)", "Sprime", family_Sprime(Parity::Even), {-1, 1, 1});
    add("S'2+S'3-S'1 (fermionic)", "Sprime", family_Sprime(Parity::Odd), {-1, 1, 1});
    add("omega-phi potential assembly (bosonic)", "Sprime",
        family_assembled_potential(Parity::Even), {1, -1});
    add("omega-phi potential assembly (fermionic)", "Sprime",
        family_assembled_potential(Parity::Odd), {1, -1});

    for (Parity st : {Parity::Even, Parity::Odd}) {
        std::vector<double> first9(18, 0.0), last9(18, 0.0);
        for (int i = 0; i < 9; ++i) {
            first9[static_cast<std::size_t>(i)] = 1.0;
            last9[static_cast<std::size_t>(9 + i)] = 1.0;
        }
        add(cat("sum of delta-basis 9-uple (", stat_name(st), ")"), "T18", family_T18(st),
            first9);
        add(cat("sum of eps-basis 9-uple (", stat_name(st), ")"), "T18", family_T18(st),
            last9);
    }

    for (int i = 0; i < 4; ++i) {
        std::vector<double> c(8, 0.0);
        c[static_cast<std::size_t>(i)] = 1.0;
        c[static_cast<std::size_t>(4 + i)] = -1.0;
        add(cat("phi4 contraction ", i + 1, ": pairing route = trace route"), "phi4",
            family_phi4_routes(), c);
    }
    for (int i = 0; i < 6; ++i) {
        std::vector<double> c(6, 0.0);
        c[static_cast<std::size_t>(i)] = 1.0;
        add(cat("phi4 symplectic contraction ", i + 1, " vanishes"), "phi4",
            family_phi4_symplectic(), c);
    }

    for (Parity st : {Parity::Even, Parity::Odd}) {
        for (int base = 0; base < 3; ++base) {
            std::vector<double> c(27, 0.0);
            for (int i = 0; i < 9; ++i) c[static_cast<std::size_t>(base * 9 + i)] = 1.0;
            add(cat("mixed K", base + 1, " 9-sum, all-plus signs (", stat_name(st), ")"),
                "mixed", family_mixed(st), c);
        }
        add(cat("mixed overall 27-sum (", stat_name(st), ")"), "mixed", family_mixed(st),
            std::vector<double>(27, 1.0));
    }

    return ids;
}

// Residual of sum(coeffs * values) over the family, relative to the summed
// pre-cancellation scale; maximum over samples.
struct IdentityRun {
    double max_rel_residual = 0.0;
};

// Cached family evaluations shared across identity checks, mutation tests
// and relation discovery.
struct FamilyCache {
    std::vector<FamilySample> samples;

    static FamilyCache build(const ScalarFamily& fam, std::uint64_t seed, int n) {
        FamilyCache c;
        c.samples.reserve(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) c.samples.push_back(fam.evaluate(seed, k));
        return c;
    }
};

inline IdentityRun identity_from_cache(const FamilyCache& cache,
                                       const std::vector<double>& coeffs) {
    IdentityRun run;
    for (const FamilySample& fs : cache.samples) {
        GrassmannElement acc, scale;
        for (std::size_t j = 0; j < coeffs.size(); ++j) {
            acc += coeffs[j] * fs.values[j];
            scale += std::abs(coeffs[j]) * fs.scales[j];
        }
        run.max_rel_residual = std::max(run.max_rel_residual, rel_max_residual(acc, scale));
    }
    return run;
}

inline IdentityRun run_identity(const LinearIdentity& id, const std::vector<double>& coeffs,
                                std::uint64_t seed, int samples) {
    return identity_from_cache(FamilyCache::build(id.family, seed, samples), coeffs);
}

inline IdentityRun run_identity(const LinearIdentity& id, std::uint64_t seed, int samples) {
    return run_identity(id, id.coeffs, seed, samples);
}

}  // namespace ewgeom
