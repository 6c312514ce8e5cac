#pragma once

#include "ewgeom/expr.hpp"

namespace ewgeom {

// Binary contraction tree for one term. Node costs are the product of the
// surviving index dimensions; flops estimate the loop size of the step.
struct PlanNode {
    int left = -1, right = -1;  // children, or
    int factor = -1;            // leaf factor position
    std::vector<std::string> surviving;
    double node_cost = 1.0;
    double flops = 0.0;
};

struct TermPlan {
    std::vector<PlanNode> nodes;
    int root = -1;
    double total_flops = 0.0;
};

struct ContractionPlan {
    std::vector<TermPlan> terms;

    double total_flops() const {
        double f = 0.0;
        for (const auto& t : terms) f += t.total_flops;
        return f;
    }
};

namespace detail {

struct TermIndexInfo {
    // occurrence count of each letter across the term, its dimension, and
    // whether it survives to the output (free letters do).
    std::map<std::string, int> count;
    std::map<std::string, int> dim;
};

inline TermIndexInfo index_info(const Term& term, const SymbolTable& table) {
    TermIndexInfo info;
    for (const Factor& f : term.factors) {
        const SymbolDecl& decl = table.symbols.at(f.symbol);
        for (std::size_t s = 0; s < f.indices.size(); ++s) {
            info.count[f.indices[s]] += 1;
            info.dim[f.indices[s]] = species_dim(decl.slots[s].species);
        }
    }
    return info;
}

// Letters surviving a subset: those with at least one occurrence inside and
// at least one occurrence outside (or declared free via total count 1).
inline std::vector<std::string> surviving_letters(const Term& term, const SymbolTable& table,
                                                  const TermIndexInfo& info,
                                                  unsigned mask) {
    std::map<std::string, int> inside;
    for (std::size_t fi = 0; fi < term.factors.size(); ++fi) {
        if (!(mask & (1u << fi))) continue;
        for (const std::string& ix : term.factors[fi].indices) inside[ix] += 1;
    }
    std::vector<std::string> out;
    for (const auto& [ix, cnt] : inside) {
        if (cnt < info.count.at(ix)) out.push_back(ix);  // partner outside
        else if (info.count.at(ix) == 1) out.push_back(ix);  // free index
    }
    return out;
}

inline double dims_product(const std::vector<std::string>& letters,
                           const TermIndexInfo& info) {
    double p = 1.0;
    for (const auto& ix : letters) p *= info.dim.at(ix);
    return p;
}

}  // namespace detail

// Exact dynamic program over factor subsets for terms of up to 12 factors
// (left-to-right fold beyond that); minimizes the summed per-step loop
// sizes. Plan evaluation is semantics-preserving regardless of the order.
inline TermPlan plan_term(const Term& term, const SymbolTable& table) {
    const int n = static_cast<int>(term.factors.size());
    detail::TermIndexInfo info = detail::index_info(term, table);
    TermPlan plan;

    auto leaf = [&](int fi) {
        PlanNode node;
        node.factor = fi;
        node.surviving = detail::surviving_letters(term, table, info, 1u << fi);
        node.node_cost = detail::dims_product(node.surviving, info);
        node.flops = 0.0;
        plan.nodes.push_back(std::move(node));
        return static_cast<int>(plan.nodes.size()) - 1;
    };

    if (n == 1) {
        plan.root = leaf(0);
        plan.total_flops = 0.0;
        return plan;
    }

    if (n <= 12) {
        const unsigned full = (1u << n) - 1u;
        struct Best {
            double flops = -1.0;
            int node = -1;
        };
        std::vector<Best> best(full + 1);
        for (int fi = 0; fi < n; ++fi) {
            best[1u << fi] = {0.0, leaf(fi)};
        }
        // Iterate subsets in increasing popcount order (by value works since
        // any proper subset is numerically smaller).
        for (unsigned s = 1; s <= full; ++s) {
            if (best[s].node >= 0 || std::popcount(s) < 2) continue;
            Best b;
            // Enumerate proper sub-splits; canonical: left contains lowest bit.
            unsigned low = s & (~s + 1u);
            for (unsigned l = (s - 1u) & s; l > 0; l = (l - 1u) & s) {
                if (!(l & low)) continue;
                unsigned r = s & ~l;
                if (best[l].node < 0 || best[r].node < 0) continue;
                // Step flops: loop over the union of both children's
                // surviving letters.
                std::vector<std::string> uni = plan.nodes[best[l].node].surviving;
                for (const auto& ix : plan.nodes[best[r].node].surviving)
                    if (std::find(uni.begin(), uni.end(), ix) == uni.end()) uni.push_back(ix);
                double step = detail::dims_product(uni, info);
                double total = best[l].flops + best[r].flops + step;
                // First-found wins ties; the enumeration order is fixed, so
                // plans are deterministic.
                if (b.node < 0 || total < b.flops) {
                    if (b.node < 0) {
                        PlanNode node;
                        plan.nodes.push_back(node);
                        b.node = static_cast<int>(plan.nodes.size()) - 1;
                    }
                    PlanNode& node = plan.nodes[b.node];
                    node.left = best[l].node;
                    node.right = best[r].node;
                    node.factor = -1;
                    node.surviving = detail::surviving_letters(term, table, info, s);
                    node.node_cost = detail::dims_product(node.surviving, info);
                    node.flops = step;
                    b.flops = total;
                }
            }
            best[s] = b;
        }
        plan.root = best[full].node;
        plan.total_flops = best[full].flops;
        return plan;
    }

    // Left-to-right fallback.
    int cur = leaf(0);
    unsigned mask = 1u;
    double total = 0.0;
    for (int fi = 1; fi < n; ++fi) {
        int rhs = leaf(fi);
        mask |= (1u << fi);
        PlanNode node;
        node.left = cur;
        node.right = rhs;
        node.surviving = detail::surviving_letters(term, table, info, mask);
        node.node_cost = detail::dims_product(node.surviving, info);
        std::vector<std::string> uni = plan.nodes[cur].surviving;
        for (const auto& ix : plan.nodes[rhs].surviving)
            if (std::find(uni.begin(), uni.end(), ix) == uni.end()) uni.push_back(ix);
        node.flops = detail::dims_product(uni, info);
        total += node.flops;
        plan.nodes.push_back(std::move(node));
        cur = static_cast<int>(plan.nodes.size()) - 1;
    }
    plan.root = cur;
    plan.total_flops = total;
    return plan;
}

inline ContractionPlan plan_contraction(const ExpressionAST& ast, const SymbolTable& table) {
    ContractionPlan plan;
    for (const Term& t : ast.terms) plan.terms.push_back(plan_term(t, table));
    return plan;
}

// Left-to-right plan of the same term, for cost comparisons.
inline TermPlan plan_term_left_fold(const Term& term, const SymbolTable& table) {
    const int n = static_cast<int>(term.factors.size());
    detail::TermIndexInfo info = detail::index_info(term, table);
    TermPlan plan;
    auto leaf = [&](int fi) {
        PlanNode node;
        node.factor = fi;
        node.surviving = detail::surviving_letters(term, table, info, 1u << fi);
        node.node_cost = detail::dims_product(node.surviving, info);
        plan.nodes.push_back(std::move(node));
        return static_cast<int>(plan.nodes.size()) - 1;
    };
    int cur = leaf(0);
    unsigned mask = 1u;
    double total = 0.0;
    for (int fi = 1; fi < n; ++fi) {
        int rhs = leaf(fi);
        mask |= (1u << fi);
        PlanNode node;
        node.left = cur;
        node.right = rhs;
        node.surviving = detail::surviving_letters(term, table, info, mask);
        node.node_cost = detail::dims_product(node.surviving, info);
        std::vector<std::string> uni = plan.nodes[cur].surviving;
        for (const auto& ix : plan.nodes[rhs].surviving)
            if (std::find(uni.begin(), uni.end(), ix) == uni.end()) uni.push_back(ix);
        node.flops = detail::dims_product(uni, info);
        total += node.flops;
        plan.nodes.push_back(std::move(node));
        cur = static_cast<int>(plan.nodes.size()) - 1;
    }
    plan.root = cur;
    plan.total_flops = total;
    return plan;
}

// --- evaluation ----------------------------------------------------------------

using Bindings = std::map<std::string, Tensor>;

namespace detail {

struct EvalNode {
    Tensor tensor;
    std::vector<std::string> letters;     // letter per tensor slot
    std::vector<int> factor_positions;    // original positions, plan order
    std::vector<Parity> factor_parities;
};

// Contract any letter that appears twice inside the node and has no
// partner elsewhere in the term.
inline void contract_internal(EvalNode& node, const std::map<std::string, int>& total_count) {
    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t i = 0; i < node.letters.size() && !progress; ++i) {
            for (std::size_t j = i + 1; j < node.letters.size() && !progress; ++j) {
                if (node.letters[i] != node.letters[j]) continue;
                if (total_count.at(node.letters[i]) != 2) continue;
                int up = static_cast<int>(i), down = static_cast<int>(j);
                if (node.tensor.slots()[i].variance == Variance::Down) std::swap(up, down);
                node.tensor = node.tensor.contract(up, down);
                node.letters.erase(node.letters.begin() + j);
                node.letters.erase(node.letters.begin() + i);
                progress = true;
            }
        }
    }
}

inline EvalNode eval_node(const TermPlan& plan, int node_id, const Term& term,
                          const SymbolTable& table, const Bindings& bindings,
                          const std::map<std::string, int>& total_count) {
    const PlanNode& pn = plan.nodes[static_cast<std::size_t>(node_id)];
    if (pn.factor >= 0) {
        const Factor& f = term.factors[static_cast<std::size_t>(pn.factor)];
        auto it = bindings.find(f.symbol);
        if (it == bindings.end()) throw Error(cat("no binding for symbol '", f.symbol, "'"));
        const SymbolDecl& decl = table.symbols.at(f.symbol);
        if (it->second.slots() != decl.slots)
            throw Error(cat("binding for '", f.symbol, "' does not match its declared slots"));
        if (it->second.parity() != decl.parity)
            throw Error(cat("binding for '", f.symbol, "' does not match its declared parity"));
        EvalNode node{it->second, f.indices, {pn.factor},
                      {decl.parity}};
        contract_internal(node, total_count);
        return node;
    }
    EvalNode l = eval_node(plan, pn.left, term, table, bindings, total_count);
    EvalNode r = eval_node(plan, pn.right, term, table, bindings, total_count);
    // Letters shared between the children are summed during the product.
    std::vector<std::pair<int, int>> pairs;
    std::vector<bool> l_used(l.letters.size(), false), r_used(r.letters.size(), false);
    for (std::size_t i = 0; i < l.letters.size(); ++i)
        for (std::size_t j = 0; j < r.letters.size(); ++j) {
            if (r_used[j] || l.letters[i] != r.letters[j]) continue;
            if (total_count.at(l.letters[i]) != 2) continue;
            pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
            l_used[i] = true;
            r_used[j] = true;
            break;
        }
    EvalNode node;
    node.tensor = Tensor::binary_contract(l.tensor, r.tensor, pairs);
    for (std::size_t i = 0; i < l.letters.size(); ++i)
        if (!l_used[i]) node.letters.push_back(l.letters[i]);
    for (std::size_t j = 0; j < r.letters.size(); ++j)
        if (!r_used[j]) node.letters.push_back(r.letters[j]);
    node.factor_positions = l.factor_positions;
    node.factor_positions.insert(node.factor_positions.end(), r.factor_positions.begin(),
                                 r.factor_positions.end());
    node.factor_parities = l.factor_parities;
    node.factor_parities.insert(node.factor_parities.end(), r.factor_parities.begin(),
                                r.factor_parities.end());
    return node;
}

// Koszul sign for restoring the written factor order: one flip per inverted
// pair of odd factors.
inline int koszul_sign(const std::vector<int>& positions, const std::vector<Parity>& parities) {
    int inv = 0;
    for (std::size_t i = 0; i < positions.size(); ++i)
        for (std::size_t j = i + 1; j < positions.size(); ++j)
            if (positions[i] > positions[j] && parities[i] == Parity::Odd &&
                parities[j] == Parity::Odd)
                ++inv;
    return inv % 2 == 0 ? 1 : -1;
}

}  // namespace detail

// Evaluates a planned expression against tensor bindings. Free letters are
// returned as tensor slots sorted by letter name; a fully contracted
// expression yields a rank-0 tensor.
inline Tensor evaluate_plan(const ContractionPlan& plan, const ExpressionAST& ast,
                            const SymbolTable& table, const Bindings& bindings) {
    std::optional<Tensor> acc;
    for (std::size_t t = 0; t < ast.terms.size(); ++t) {
        const Term& term = ast.terms[t];
        std::map<std::string, int> total_count;
        for (const Factor& f : term.factors)
            for (const std::string& ix : f.indices) total_count[ix] += 1;

        detail::EvalNode node = detail::eval_node(plan.terms[t], plan.terms[t].root, term,
                                                  table, bindings, total_count);
        int sign = detail::koszul_sign(node.factor_positions, node.factor_parities);
        Tensor value = node.tensor * (term.coeff.value() * sign);

        // Canonical free-slot order: letters ascending.
        std::vector<int> perm(node.letters.size());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
        std::sort(perm.begin(), perm.end(), [&](int a, int b) {
            return node.letters[static_cast<std::size_t>(a)] <
                   node.letters[static_cast<std::size_t>(b)];
        });
        value = value.transpose(perm);

        if (!acc) {
            acc = std::move(value);
        } else {
            *acc = *acc + value;
        }
    }
    if (!acc) return Tensor::scalar(GrassmannElement{});
    return *acc;
}

inline Tensor evaluate_expression(std::string_view text, const SymbolTable& table,
                                  const Bindings& bindings) {
    ExpressionAST ast = parse_expression(text, table);
    ContractionPlan plan = plan_contraction(ast, table);
    return evaluate_plan(plan, ast, table, bindings);
}

}  // namespace ewgeom
