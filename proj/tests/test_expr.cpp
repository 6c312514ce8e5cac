#include <gtest/gtest.h>

#include "ewgeom/plan.hpp"
#include "oracles.hpp"

using namespace ewgeom;

namespace {

double dist(const GrassmannElement& a, const GrassmannElement& b) {
    return (a - b).max_abs_coeff();
}

SymbolTable ij_table() {
    SymbolTable t;
    t.symbols["g"] = {{{Species::Spacetime, Variance::Up}, {Species::Spacetime, Variance::Up}},
                      Parity::Even};
    t.symbols["W"] = {{kStDown, kIsoUp, kIsoDown}, Parity::Even};
    t.symbols["phi"] = {{kIsoUp}, Parity::Even};
    t.symbols["phibar"] = {{kIsoDown}, Parity::Even};
    t.symbols["eps"] = {{kIsoDown, kIsoDown}, Parity::Even};
    t.symbols["epsup"] = {{kIsoUp, kIsoUp}, Parity::Even};
    return t;
}

Bindings ij_bindings(std::uint64_t seed) {
    IJSample s = sample_ij(seed, 0);
    Bindings b;
    b.emplace("g", metric_upper());
    b.emplace("W", s.W);
    b.emplace("phi", s.phi);
    b.emplace("phibar", s.phibar);
    b.emplace("eps", epsilon_lower(Species::Isospin));
    b.emplace("epsup", epsilon_upper(Species::Isospin));
    return b;
}

const char* kI1 = "g^{l m} W_{l}^{a}_{b} W_{m}^{c}_{a} phi^{b} phibar_{c}";

TEST(Expr, ParseI1Pattern) {
    SymbolTable t = ij_table();
    ExpressionAST ast = parse_expression(kI1, t);
    ASSERT_EQ(ast.terms.size(), 1u);
    const Term& term = ast.terms[0];
    EXPECT_EQ(term.coeff, Rational(1));
    ASSERT_EQ(term.factors.size(), 5u);
    EXPECT_EQ(term.factors[0].symbol, "g");
    EXPECT_EQ(term.factors[1].indices, (std::vector<std::string>{"l", "a", "b"}));
    EXPECT_EQ(term.factors[4].symbol, "phibar");
}

TEST(Expr, PairingEvaluates) {
    SymbolTable t = ij_table();
    Bindings b = ij_bindings(42);
    Tensor v = evaluate_expression("phi^{a} phibar_{a}", t, b);
    GrassmannElement want;
    for (int a = 0; a < 2; ++a) want += b.at("phi").at({a}) * b.at("phibar").at({a});
    EXPECT_LT(dist(v.scalar_value(), want), 1e-14);
}

TEST(Expr, SameVarianceTwiceIsAnError) {
    SymbolTable t = ij_table();
    try {
        parse_expression("W_{l}^{a}_{b} W_{l}^{a}_{b}", t);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("same variance"), std::string::npos);
    }
}

TEST(Expr, Diagnostics) {
    SymbolTable t = ij_table();
    // unknown symbol, offset carried
    try {
        parse_expression("phi^{a} nosuch_{a}", t);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("unknown symbol"), std::string::npos);
        EXPECT_EQ(e.offset(), 8u);
    }
    // appearing once without free declaration
    EXPECT_THROW(parse_expression("phi^{a} phibar_{b}", t), ParseError);
    // three appearances
    EXPECT_THROW(parse_expression("phi^{a} phibar_{a} phibar_{a}", t), ParseError);
    // species clash
    EXPECT_THROW(parse_expression("g^{l m} W_{l}^{m}_{b} phi^{b}", t), ParseError);
    // arity mismatch
    EXPECT_THROW(parse_expression("W_{l}^{a}", t), ParseError);
    // free declaration makes single use valid
    SymbolTable tf = ij_table();
    tf.free_indices.insert("a");
    EXPECT_NO_THROW(parse_expression("phi^{a}", tf));
}

TEST(Expr, DottedPrimeRule) {
    SymbolTable t;
    t.symbols["omega"] = {{kIsoUp, kSpinDown, kDotDown}, Parity::Odd};
    t.symbols["omegabar"] = {{kIsoDown, kDotDown, kSpinDown}, Parity::Odd};
    t.symbols["epsS"] = {{{Species::Spinor, Variance::Up}, {Species::Spinor, Variance::Up}},
                         Parity::Even};
    t.symbols["epsD"] = {{kDotUp, kDotUp}, Parity::Even};
    EXPECT_NO_THROW(parse_expression(
        "omega^{a}_{B B'} omegabar_{a}_{C' C} epsS^{B C} epsD^{B' C'}", t));
    // An unprimed letter cannot sit in a conjugate-spinor slot.
    EXPECT_THROW(parse_expression("omega^{a}_{B C} omegabar_{a}_{C B}", t), ParseError);
    // A primed letter cannot sit in a plain spinor slot.
    EXPECT_THROW(parse_expression(
                     "omega^{a}_{B' B} omegabar_{a}_{C' C} epsS^{B' C} epsD^{B C'}", t),
                 ParseError);
}

TEST(Expr, PrintParseRoundTrip) {
    SymbolTable t = ij_table();
    for (const char* text :
         {kI1, "phi^{a} phibar_{a}",
          "2 g^{l m} W_{l}^{a}_{a} W_{m}^{b}_{b} phi^{c} phibar_{c} - 1/2 phi^{a} phibar_{a}",
          "- 3/4 eps_{a b} epsup^{a b} + phi^{c} phibar_{c}"}) {
        ExpressionAST ast = parse_expression(text, t);
        std::string printed = print_expression(ast, t);
        ExpressionAST again = parse_expression(printed, t);
        EXPECT_TRUE(ast == again) << "text: " << text << "\nprinted: " << printed;
    }
}

TEST(Expr, PlannerBasics) {
    SymbolTable t = ij_table();
    // Two factors: a single contraction node.
    ExpressionAST two = parse_expression("phi^{a} phibar_{a}", t);
    TermPlan p2 = plan_term(two.terms[0], t);
    EXPECT_EQ(p2.nodes.size(), 3u);  // two leaves + one merge
    // I1 pattern: the planned cost never exceeds the left-to-right fold.
    ExpressionAST i1 = parse_expression(kI1, t);
    TermPlan dp = plan_term(i1.terms[0], t);
    TermPlan lf = plan_term_left_fold(i1.terms[0], t);
    EXPECT_LE(dp.total_flops, lf.total_flops);
    EXPECT_GT(dp.total_flops, 0.0);
}

TEST(Expr, PlanMatchesOracleAndLeftFold) {
    SymbolTable t = ij_table();
    Bindings b = ij_bindings(43);
    for (const char* text :
         {kI1, "g^{l m} W_{l}^{a}_{b} W_{m}^{c}_{c} phi^{b} phibar_{a}",
          "eps_{a c} epsup^{b d} W_{l}^{a}_{b} W_{m}^{c}_{d} g^{l m}",
          "2 phi^{a} phibar_{a} phi^{b} phibar_{b} - phi^{c} phibar_{c}"}) {
        ExpressionAST ast = parse_expression(text, t);
        ContractionPlan plan = plan_contraction(ast, t);
        Tensor v = evaluate_plan(plan, ast, t, b);
        Tensor o = oracles::eval_expression(ast, t, b);
        ASSERT_EQ(v.rank(), 0) << text;
        EXPECT_LT(dist(v.scalar_value(), o.scalar_value()),
                  1e-12 * (1.0 + o.scalar_value().one_norm()))
            << text;
        // A different valid plan agrees.
        ContractionPlan lf;
        for (const Term& term : ast.terms) lf.terms.push_back(plan_term_left_fold(term, t));
        Tensor v2 = evaluate_plan(lf, ast, t, b);
        EXPECT_LT(dist(v2.scalar_value(), v.scalar_value()),
                  1e-12 * (1.0 + v.scalar_value().one_norm()))
            << text;
    }
}

TEST(Expr, CrossModuleAgreementWithInvariantLab) {
    SymbolTable t = ij_table();
    IJSample s = sample_ij(44, 0);
    Bindings b;
    b.emplace("g", metric_upper());
    b.emplace("W", s.W);
    b.emplace("phi", s.phi);
    b.emplace("phibar", s.phibar);
    Tensor v = evaluate_expression(kI1, t, b);
    FamilySample fam = eval_I_family(s.W, s.phi, s.phibar);
    EXPECT_LT(dist(v.scalar_value(), fam.values[0]), 1e-12 * (1.0 + fam.scales[0].body().real()));
}

TEST(Expr, FreeIndicesProduceTensors) {
    SymbolTable t = ij_table();
    t.free_indices.insert("a");
    t.free_indices.insert("b");
    Bindings b = ij_bindings(45);
    // W traced over spacetime with g: remaining isospin slots free.
    Tensor v = evaluate_expression("g^{l m} W_{l}^{a}_{b} W_{m}^{c}_{c}", t, b);
    ASSERT_EQ(v.rank(), 2);
    Tensor o = oracles::eval_expression(parse_expression("g^{l m} W_{l}^{a}_{b} W_{m}^{c}_{c}", t), t, b);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            EXPECT_LT(dist(v.at({i, j}), o.at({i, j})), 1e-12);
}

TEST(Expr, GradedSignAcrossPlanReordering) {
    // Four odd scalars contracted pairwise (a c)(b d); a hand-built plan
    // merging (a,c) and (b,d) first must agree with the in-order oracle.
    SymbolTable t;
    t.symbols["a"] = {{kSpinDown}, Parity::Odd};
    t.symbols["b"] = {{kSpinDown}, Parity::Odd};
    t.symbols["c"] = {{{Species::Spinor, Variance::Up}}, Parity::Odd};
    t.symbols["d"] = {{{Species::Spinor, Variance::Up}}, Parity::Odd};
    RngStream rng = RngStream::keyed(46, "odd", 0);
    GeneratorPool pool;
    Bindings bind;
    bind.emplace("a", sample_random({kSpinDown}, Parity::Odd, rng, &pool));
    bind.emplace("b", sample_random({kSpinDown}, Parity::Odd, rng, &pool));
    bind.emplace("c", sample_random({{Species::Spinor, Variance::Up}}, Parity::Odd, rng, &pool));
    bind.emplace("d", sample_random({{Species::Spinor, Variance::Up}}, Parity::Odd, rng, &pool));

    const char* text = "a_{A} b_{B} c^{A} d^{B}";
    ExpressionAST ast = parse_expression(text, t);
    // Plan that pairs factor 0 with 2 and factor 1 with 3.
    TermPlan manual;
    for (int f = 0; f < 4; ++f) {
        PlanNode leaf;
        leaf.factor = f;
        manual.nodes.push_back(leaf);
    }
    PlanNode ac;
    ac.left = 0;
    ac.right = 2;
    manual.nodes.push_back(ac);
    PlanNode bd;
    bd.left = 1;
    bd.right = 3;
    manual.nodes.push_back(bd);
    PlanNode root;
    root.left = 4;
    root.right = 5;
    manual.nodes.push_back(root);
    manual.root = 6;
    ContractionPlan plan;
    plan.terms.push_back(manual);

    Tensor v = evaluate_plan(plan, ast, t, bind);
    Tensor o = oracles::eval_expression(ast, t, bind);
    EXPECT_LT(dist(v.scalar_value(), o.scalar_value()), 1e-13);
    // And the DP plan agrees as well.
    Tensor v2 = evaluate_plan(plan_contraction(ast, t), ast, t, bind);
    EXPECT_LT(dist(v2.scalar_value(), o.scalar_value()), 1e-13);
}

TEST(Expr, EmptyExpressionIsZero) {
    SymbolTable t;
    ExpressionAST ast = parse_expression("", t);
    EXPECT_TRUE(ast.terms.empty());
    Tensor v = evaluate_plan(plan_contraction(ast, t), ast, t, {});
    EXPECT_EQ(v.rank(), 0);
    EXPECT_TRUE(v.scalar_value().is_zero());
}

TEST(Expr, BindingValidation) {
    SymbolTable t = ij_table();
    Bindings b = ij_bindings(47);
    // Wrong shape: bind phi to a rank-2 tensor.
    Bindings bad = b;
    bad.erase("phi");
    bad.emplace("phi", metric_upper());
    EXPECT_THROW(evaluate_expression("phi^{a} phibar_{a}", t, bad), Error);
    // Missing binding.
    Bindings missing;
    EXPECT_THROW(evaluate_expression("phi^{a} phibar_{a}", t, missing), Error);
}

}  // namespace
