// Brute-force loop oracles for the family evaluators and the expression
// engine. These share only the graded scalar type with the library; all
// summation is written as raw index loops over tensor entries, independent
// of contract/graded_product/fold machinery.
#pragma once

#include "ewgeom/invariants.hpp"
#include "ewgeom/plan.hpp"

namespace oracles {

using namespace ewgeom;

inline double gdiag(int mu) { return mu == 0 ? 1.0 : -1.0; }

// epsilon with both indices up or both down, eps(0,1) = +1.
inline double eps2(int a, int b) {
    if (a == b) return 0.0;
    return a == 0 ? 1.0 : -1.0;
}

// I family: W slots [st, iso-up, iso-down], phi [iso-up], phibar [iso-down].
inline std::array<GrassmannElement, 4> eval_I(const Tensor& W, const Tensor& phi,
                                              const Tensor& phibar) {
    std::array<GrassmannElement, 4> out;
    for (int l = 0; l < 4; ++l) {
        double g = gdiag(l);
        for (int a = 0; a < 2; ++a)
            for (int a2 = 0; a2 < 2; ++a2)
                for (int b = 0; b < 2; ++b) {
                    out[0] += g * (W.at({l, a, a2}) * W.at({l, b, a}) * phi.at({a2}) *
                                   phibar.at({b}));
                    out[1] += g * (W.at({l, a, a2}) * W.at({l, b, b}) * phi.at({a2}) *
                                   phibar.at({a}));
                    out[2] += g * (W.at({l, a, a}) * W.at({l, b, b}) * phi.at({a2}) *
                                   phibar.at({a2}));
                    out[3] += g * (W.at({l, a, b}) * W.at({l, b, a}) * phi.at({a2}) *
                                   phibar.at({a2}));
                }
    }
    return out;
}

inline std::array<GrassmannElement, 3> eval_J(const Tensor& W, const Tensor& phi,
                                              const Tensor& phibar) {
    std::array<GrassmannElement, 3> out;
    for (int l = 0; l < 4; ++l) {
        double g = gdiag(l);
        GrassmannElement trW = W.at({l, 0, 0}) + W.at({l, 1, 1});
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                if (a == b) continue;
                for (int a2 = 0; a2 < 2; ++a2)
                    for (int b2 = 0; b2 < 2; ++b2) {
                        if (a2 == b2) continue;
                        double w = g * eps2(a, b) * eps2(a2, b2);
                        for (int c = 0; c < 2; ++c)
                            out[0] += w * (W.at({l, a, a2}) * W.at({l, b, b2}) * phi.at({c}) *
                                           phibar.at({c}));
                        out[1] += w * (W.at({l, a, a2}) * trW * phi.at({b}) * phibar.at({b2}));
                        for (int bb = 0; bb < 2; ++bb)
                            out[2] += w * (W.at({l, a, bb}) * W.at({l, bb, a2}) * phi.at({b}) *
                                           phibar.at({b2}));
                    }
            }
    }
    return out;
}

// M_{l m a}^b = m^2 OmegaBar_{l a} Omega_m^b from the spacetime forms
// (OmegaBar slots [iso-down, st], Omega slots [iso-up, st]).
inline GrassmannElement m_entry(const Tensor& ob, const Tensor& o, double mass, int l, int m,
                                int a, int b) {
    return (mass * mass) * (ob.at({a, l}) * o.at({b, m}));
}

inline std::array<GrassmannElement, 5> eval_S(const Tensor& ob, const Tensor& o, double mass) {
    std::array<GrassmannElement, 5> out;
    auto mt = [&](int l, int m) {
        GrassmannElement acc;
        for (int a = 0; a < 2; ++a) acc += m_entry(ob, o, mass, l, m, a, a);
        return acc;
    };
    for (int l = 0; l < 4; ++l)
        for (int n = 0; n < 4; ++n) {
            double gg = gdiag(l) * gdiag(n);
            out[0] += gg * (mt(l, l) * mt(n, n));
            out[1] += gg * (mt(l, n) * mt(l, n));
            out[2] += gg * (mt(l, n) * mt(n, l));
            for (int a = 0; a < 2; ++a)
                for (int a2 = 0; a2 < 2; ++a2)
                    for (int b = 0; b < 2; ++b)
                        for (int b2 = 0; b2 < 2; ++b2) {
                            double w = eps2(a, a2) * eps2(b, b2);
                            if (w == 0.0) continue;
                            out[3] += gg * w *
                                      (m_entry(ob, o, mass, l, l, a, b) *
                                       m_entry(ob, o, mass, n, n, a2, b2));
                            out[4] += gg * w *
                                      (m_entry(ob, o, mass, l, n, a, b) *
                                       m_entry(ob, o, mass, l, n, a2, b2));
                        }
        }
    return out;
}

// phi slots [iso-up], phibar [iso-down].
inline std::array<GrassmannElement, 3> eval_Sprime(const Tensor& ob, const Tensor& o,
                                                   const Tensor& phibar, const Tensor& phi,
                                                   double mass) {
    std::array<GrassmannElement, 3> out;
    double m2 = mass * mass;
    for (int l = 0; l < 4; ++l) {
        double g = gdiag(l) * m2;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                out[0] += g * (ob.at({a, l}) * o.at({a, l}) * phibar.at({b}) * phi.at({b}));
                out[1] += g * (ob.at({a, l}) * o.at({b, l}) * phibar.at({b}) * phi.at({a}));
                for (int a2 = 0; a2 < 2; ++a2)
                    for (int b2 = 0; b2 < 2; ++b2) {
                        double w = eps2(a, a2) * eps2(b, b2);
                        if (w == 0.0) continue;
                        out[2] += g * w *
                                  (ob.at({a, l}) * o.at({b, l}) * phibar.at({a2}) *
                                   phi.at({b2}));
                    }
            }
    }
    return out;
}

// The paper-oriented all-down pairing triples on an ascending quadruple:
// (01)(23), (02)(31), (03)(12).
inline double pairing3(int which, int x0, int x1, int x2, int x3) {
    switch (which) {
        case 0: return eps2(x0, x1) * eps2(x2, x3);
        case 1: return eps2(x0, x2) * eps2(x3, x1);
        case 2: return eps2(x0, x3) * eps2(x1, x2);
    }
    return 0.0;
}

// Up-first mixed triples: delta(x0,x1) eps(x2,x3) and its cyclic partners.
inline double mixed_pairing3(int which, int x0, int x1, int x2, int x3) {
    switch (which) {
        case 0: return (x0 == x1 ? 1.0 : 0.0) * eps2(x2, x3);
        case 1: return (x0 == x2 ? 1.0 : 0.0) * eps2(x3, x1);
        case 2: return (x0 == x3 ? 1.0 : 0.0) * eps2(x1, x2);
    }
    return 0.0;
}

// The 18 scalars; Omega slots [iso-up, spin, dot], OmegaBar [iso-down, dot,
// spin]. Ascending slot positions give undotted letters (A, B, C, D) =
// (Obar1.spin, O1.spin, Obar2.spin, O2.spin) and likewise dotted.
inline std::array<GrassmannElement, 18> eval_T18(const Tensor& ob, const Tensor& o) {
    std::array<GrassmannElement, 18> out;
    for (int base = 0; base < 2; ++base)
        for (int iu = 0; iu < 3; ++iu)
            for (int id = 0; id < 3; ++id) {
                GrassmannElement acc;
                for (int A = 0; A < 2; ++A)
                    for (int B = 0; B < 2; ++B)
                        for (int C = 0; C < 2; ++C)
                            for (int D = 0; D < 2; ++D) {
                                double wu = pairing3(iu, A, B, C, D);
                                if (wu == 0.0) continue;
                                for (int Ad = 0; Ad < 2; ++Ad)
                                    for (int Bd = 0; Bd < 2; ++Bd)
                                        for (int Cd = 0; Cd < 2; ++Cd)
                                            for (int Dd = 0; Dd < 2; ++Dd) {
                                                double wd = pairing3(id, Ad, Bd, Cd, Dd);
                                                if (wd == 0.0) continue;
                                                GrassmannElement iso;
                                                if (base == 0) {
                                                    for (int a = 0; a < 2; ++a)
                                                        for (int b = 0; b < 2; ++b)
                                                            iso += ob.at({a, Ad, A}) *
                                                                   o.at({a, B, Bd}) *
                                                                   ob.at({b, Cd, C}) *
                                                                   o.at({b, D, Dd});
                                                } else {
                                                    for (int a = 0; a < 2; ++a)
                                                        for (int a2 = 0; a2 < 2; ++a2)
                                                            for (int b = 0; b < 2; ++b)
                                                                for (int b2 = 0; b2 < 2;
                                                                     ++b2) {
                                                                    double wi =
                                                                        eps2(a, a2) *
                                                                        eps2(b, b2);
                                                                    if (wi == 0.0) continue;
                                                                    iso +=
                                                                        wi *
                                                                        (ob.at({a, Ad, A}) *
                                                                         o.at({b, B, Bd}) *
                                                                         ob.at({a2, Cd, C}) *
                                                                         o.at({b2, D, Dd}));
                                                                }
                                                }
                                                acc += (wu * wd) * iso;
                                            }
                            }
                out[static_cast<std::size_t>(base * 9 + iu * 3 + id)] = acc;
            }
    return out;
}

// Mixed Phi-Omega scalars in factor order Phi PhiBar Omega OmegaBar.
// Phi slots [iso-up, dot-up, dot-down], PhiBar [iso-down, spin-up,
// spin-down], Omega [iso-up, spin, dot], OmegaBar [iso-down, dot, spin].
// Ascending positions put the up slot first in each spinor group.
inline std::array<GrassmannElement, 27> eval_mixed(const Tensor& phi, const Tensor& phibar,
                                                   const Tensor& o, const Tensor& ob) {
    std::array<GrassmannElement, 27> out;
    for (int base = 0; base < 3; ++base)
        for (int iu = 0; iu < 3; ++iu)
            for (int id = 0; id < 3; ++id) {
                GrassmannElement acc;
                // Undotted letters (ascending positions): A = PhiBar.up,
                // B = PhiBar.down, C = Omega.spin, D = OmegaBar.spin.
                for (int A = 0; A < 2; ++A)
                    for (int B = 0; B < 2; ++B)
                        for (int C = 0; C < 2; ++C)
                            for (int D = 0; D < 2; ++D) {
                                double wu = mixed_pairing3(iu, A, B, C, D);
                                if (wu == 0.0) continue;
                                // Dotted: Ad = Phi.up, Bd = Phi.down,
                                // Cd = Omega.dot, Dd = OmegaBar.dot.
                                for (int Ad = 0; Ad < 2; ++Ad)
                                    for (int Bd = 0; Bd < 2; ++Bd)
                                        for (int Cd = 0; Cd < 2; ++Cd)
                                            for (int Dd = 0; Dd < 2; ++Dd) {
                                                double wd =
                                                    mixed_pairing3(id, Ad, Bd, Cd, Dd);
                                                if (wd == 0.0) continue;
                                                GrassmannElement iso;
                                                if (base == 0) {
                                                    for (int a = 0; a < 2; ++a)
                                                        for (int b = 0; b < 2; ++b)
                                                            iso += phi.at({a, Ad, Bd}) *
                                                                   phibar.at({a, A, B}) *
                                                                   o.at({b, C, Cd}) *
                                                                   ob.at({b, Dd, D});
                                                } else if (base == 1) {
                                                    for (int a = 0; a < 2; ++a)
                                                        for (int b = 0; b < 2; ++b)
                                                            iso += phi.at({a, Ad, Bd}) *
                                                                   phibar.at({b, A, B}) *
                                                                   o.at({b, C, Cd}) *
                                                                   ob.at({a, Dd, D});
                                                } else {
                                                    for (int a = 0; a < 2; ++a)
                                                        for (int b = 0; b < 2; ++b)
                                                            for (int a2 = 0; a2 < 2; ++a2)
                                                                for (int b2 = 0; b2 < 2;
                                                                     ++b2) {
                                                                    double wi =
                                                                        eps2(a, b) *
                                                                        eps2(a2, b2);
                                                                    if (wi == 0.0) continue;
                                                                    iso +=
                                                                        wi *
                                                                        (phi.at({a, Ad, Bd}) *
                                                                         phibar.at(
                                                                             {a2, A, B}) *
                                                                         o.at({b, C, Cd}) *
                                                                         ob.at({b2, Dd, D}));
                                                                }
                                                }
                                                acc += (wu * wd) * iso;
                                            }
                            }
                out[static_cast<std::size_t>(base * 9 + iu * 3 + id)] = acc;
            }
    return out;
}

// Momentum three-leg: wh, kh [spin, dot]; the up slot sits third in the
// ascending undotted order (A = wh.spin, B = kh.spin, C = PhiBar.up,
// D = PhiBar.down), so the canonically oriented matchings read
// eps(A,B)d(C,D), d(C,A)eps(B,D), eps(D,A)d(C,B).
inline double threeleg_pairing3(int which, int A, int B, int C, int D) {
    switch (which) {
        case 0: return eps2(A, B) * (C == D ? 1.0 : 0.0);
        case 1: return (C == A ? 1.0 : 0.0) * eps2(B, D);
        case 2: return eps2(D, A) * (B == C ? 1.0 : 0.0);
    }
    return 0.0;
}

inline std::array<GrassmannElement, 9> eval_threeleg(const Tensor& wh, const Tensor& kh,
                                                     const Tensor& phibar, const Tensor& phi,
                                                     double q) {
    std::array<GrassmannElement, 9> out;
    for (int iu = 0; iu < 3; ++iu)
        for (int id = 0; id < 3; ++id) {
            GrassmannElement acc;
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B)
                    for (int C = 0; C < 2; ++C)
                        for (int D = 0; D < 2; ++D) {
                            double wu = threeleg_pairing3(iu, A, B, C, D);
                            if (wu == 0.0) continue;
                            for (int Ad = 0; Ad < 2; ++Ad)
                                for (int Bd = 0; Bd < 2; ++Bd)
                                    for (int Cd = 0; Cd < 2; ++Cd)
                                        for (int Dd = 0; Dd < 2; ++Dd) {
                                            double wd =
                                                threeleg_pairing3(id, Ad, Bd, Cd, Dd);
                                            if (wd == 0.0) continue;
                                            GrassmannElement iso;
                                            for (int a = 0; a < 2; ++a)
                                                iso += phibar.at({a, C, D}) *
                                                       phi.at({a, Cd, Dd});
                                            acc += (q * wu * wd) *
                                                   (wh.at({A, Ad}) * kh.at({B, Bd}) * iso);
                                        }
                        }
            out[static_cast<std::size_t>(iu * 3 + id)] = acc;
        }
    return out;
}

// Generic expression-term oracle: loops over every index assignment and
// multiplies entries in written factor order.
inline Tensor eval_expression(const ExpressionAST& ast, const SymbolTable& table,
                              const Bindings& bindings) {
    if (ast.terms.empty()) return Tensor::scalar(GrassmannElement{});

    std::map<std::string, int> dims;
    std::map<std::string, Slot> slot_of;
    for (const Term& term : ast.terms)
        for (const Factor& f : term.factors) {
            const SymbolDecl& d = table.symbols.at(f.symbol);
            for (std::size_t s = 0; s < f.indices.size(); ++s) {
                dims[f.indices[s]] = species_dim(d.slots[s].species);
                slot_of[f.indices[s]] = d.slots[s];
            }
        }
    // Free letters: single occurrence within the first term (validation
    // guarantees agreement across terms).
    std::vector<std::string> free;
    {
        std::map<std::string, int> c;
        for (const Factor& f : ast.terms[0].factors)
            for (const auto& ix : f.indices) c[ix] += 1;
        for (const auto& [ix, n] : c)
            if (n == 1) free.push_back(ix);
        std::sort(free.begin(), free.end());
    }
    std::vector<Slot> out_slots;
    for (const auto& ix : free) out_slots.push_back(slot_of.at(ix));
    Parity out_parity = Parity::Even;
    for (const Factor& f : ast.terms[0].factors)
        out_parity = out_parity + table.symbols.at(f.symbol).parity;
    Tensor out(out_slots, out_parity, Rational(0));

    std::vector<int> fidx(free.size(), 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        out.unflatten(flat, fidx);
        GrassmannElement total;
        for (const Term& term : ast.terms) {
            std::vector<std::string> dummies;
            {
                std::map<std::string, int> seen;
                for (const Factor& f : term.factors)
                    for (const auto& ix : f.indices) seen[ix] += 1;
                for (const auto& [ix, n] : seen)
                    if (std::find(free.begin(), free.end(), ix) == free.end())
                        dummies.push_back(ix);
            }
            std::map<std::string, int> assign;
            for (std::size_t i = 0; i < free.size(); ++i) assign[free[i]] = fidx[i];
            std::vector<int> dv(dummies.size(), 0);
            while (true) {
                for (std::size_t i = 0; i < dummies.size(); ++i) assign[dummies[i]] = dv[i];
                GrassmannElement prod(term.coeff.value());
                for (const Factor& f : term.factors) {
                    std::vector<int> idx;
                    for (const auto& ix : f.indices) idx.push_back(assign.at(ix));
                    prod = prod * bindings.at(f.symbol).at(idx);
                    if (prod.is_zero()) break;
                }
                total += prod;
                std::size_t p = dummies.size();
                bool done = true;
                while (p > 0) {
                    --p;
                    if (++dv[p] < dims.at(dummies[p])) {
                        done = false;
                        break;
                    }
                    dv[p] = 0;
                }
                if (done) break;
            }
        }
        out.set(fidx, std::move(total));
    }
    return out;
}

}  // namespace oracles
