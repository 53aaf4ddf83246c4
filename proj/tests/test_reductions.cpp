// Copyright (c) SPTG Toolkit contributors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace sptg;

TEST(Family, Structure) {
    Game g0 = gen_exp_family(0);
    EXPECT_EQ(g0.size(), 2u);
    EXPECT_EQ(event_point_iteration(g0)[1], PwlFunction::from_points({{0, 1}, {1, 0}}));
    Game g = gen_exp_family(3);
    EXPECT_EQ(g.size(), 8u);
    EXPECT_EQ(g.edges().size(), 13u);
    EXPECT_EQ(g.state(g.index("vl2")).owner, Owner::Min);
    EXPECT_EQ(g.state(g.index("vr2")).rate, Rational(0));
    for (const auto& e : g.edges()) {
        if (g.state(e.to).id == "vr1") {
            EXPECT_EQ(e.cost, Rational(0));
        }
        if (g.state(e.to).id == "vl1") {
            EXPECT_EQ(e.cost, Rational(1, 4));
        }
    }
    EXPECT_THROW(gen_exp_family(-1), std::invalid_argument);
}

TEST(Family, ClosedFormExamples) {
    auto cf = family_closed_form(2);
    EXPECT_EQ(cf[4].evaluate(0), ExtendedValue(Rational(3, 4)));
    EXPECT_EQ(cf[5].evaluate(0), ExtendedValue(1));
    EXPECT_EQ(cf[4].evaluate(1), ExtendedValue(Rational(1, 4)));
    EXPECT_EQ(event_point_iteration(gen_exp_family(1)), family_closed_form(1));
}

TEST(Family, ClosedFormMatchesLevelRecursion) {
    for (int i = 0; i <= 6; ++i) {
        auto cf = family_closed_form(i);
        for (int k = 0; k <= i; ++k)
            for (int x = 0; x <= 256; ++x) {
                Rational t(x, 256);
                auto [l, r] = oracle::family_point(k, t);
                ASSERT_EQ(cf[std::size_t(2 * k)].evaluate(t), ExtendedValue(l));
                ASSERT_EQ(cf[std::size_t(2 * k + 1)].evaluate(t), ExtendedValue(r));
            }
    }
}

TEST(Family, SolverMatchesClosedFormAndCounts) {
    for (int i = 0; i <= 8; ++i) {
        auto vm = event_point_iteration(gen_exp_family(i));
        ASSERT_EQ(vm, family_closed_form(i));
        EXPECT_EQ(event_points(vm).size(), std::size_t(1) << i);
        EXPECT_EQ(vm[std::size_t(2 * i)].segment_count(), std::size_t(1) << i);
    }
}

TEST(Family, DifferenceIdentities) {
    for (int k = 1; k <= 6; ++k) {
        auto f = family_closed_form(k)[std::size_t(2 * k)];
        for (std::int64_t x = 0; (x + 1) * 2 <= (std::int64_t(1) << k); ++x) {
            Rational a = Rational(x) * Rational::pow2(1 - k), b = Rational(x + 1) * Rational::pow2(1 - k);
            EXPECT_EQ(f.evaluate(a).value() - f.evaluate(b).value(), Rational::pow2(-k));
        }
    }
}

TEST(ScaleCurrency, Examples) {
    Game g = gen_exp_family(1);
    EXPECT_EQ(scale_currency(g, 1), g);
    Game h;
    h.add_state("a", Owner::Max, Rational(1, 2));
    EXPECT_EQ(scale_currency(h, 2).state(0).rate, Rational(1));
    EXPECT_EQ(value_at(scale_currency(g, 2), "vr0", 0), ExtendedValue(2));
    EXPECT_THROW(scale_currency(g, 0), std::invalid_argument);
}

TEST(ScaleCurrency, ValuesScaleAndEventPointsStay) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        Game g = oracle::random_dag(rng, 6);
        Rational phi = oracle::random_rational(rng, 9, 4) + Rational(1, 3);
        auto a = event_point_iteration(g), b = event_point_iteration(scale_currency(g, phi));
        ASSERT_EQ(event_points(a), event_points(b));
        for (std::size_t v = 0; v < g.size(); ++v) {
            ASSERT_EQ(a[v].is_infinite(), b[v].is_infinite());
            if (a[v].is_infinite()) continue;
            ASSERT_EQ(a[v].points().size(), b[v].points().size());
            for (std::size_t k = 0; k < a[v].points().size(); ++k) ASSERT_EQ(a[v].points()[k].v * phi, b[v].points()[k].v);
        }
    }
}

TEST(RestrictTime, Examples) {
    Game g = gen_exp_family(2);
    auto vm = event_point_iteration(g);
    auto id = event_point_iteration(restrict_time(g, 0, 1));
    for (std::size_t v = 0; v < g.size(); ++v) EXPECT_EQ(id[v], vm[v]);

    auto half = event_point_iteration(restrict_time(gen_exp_family(1), Rational(1, 2), 1));
    EXPECT_EQ(half[1], PwlFunction::from_points({{0, Rational(1, 2)}, {1, 0}}));
    EXPECT_THROW(restrict_time(g, Rational(1, 2), Rational(1, 2)), std::invalid_argument);
}

TEST(RestrictTime, ValueCorrespondenceOnRandomDags) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 30; ++trial) {
        Game g = oracle::random_dag(rng, 5);
        Rational a = oracle::random_rational(rng, 3, 8), b = oracle::random_rational(rng, 8, 8);
        a = min(a, Rational(1, 2));
        b = max(min(b, Rational(1)), a + Rational(1, 8));
        auto vm = event_point_iteration(g), rv = event_point_iteration(restrict_time(g, a, b));
        for (std::size_t v = 0; v < g.size(); ++v)
            for (int x = 0; x <= 16; ++x) {
                Rational t(x, 16);
                ASSERT_EQ(rv[v].evaluate(t), vm[v].evaluate(a + (b - a) * t));
            }
    }
}

TEST(VariableGadget, Examples) {
    auto r = gen_variable_gadget(1, true, EncodingKind::Straight);
    EXPECT_EQ(r.game.size(), 10u);
    auto vm = event_point_iteration(r.game);
    EXPECT_EQ(vm[r.game.index("L")], PwlFunction::from_points({{0, 2}, {1, Rational(3, 2)}}));
    auto neg = gen_variable_gadget(2, false, EncodingKind::Straight);
    EXPECT_TRUE(encoding_check(event_point_iteration(neg.game)[neg.state], literal_function(2, false), base_params(2, EncodingKind::Straight)));
    EXPECT_THROW(gen_variable_gadget(0, true, EncodingKind::Straight), std::invalid_argument);
}

TEST(VariableGadget, AllVariantsEncodeTheirLiteral) {
    for (int i = 1; i <= 5; ++i)
        for (bool pos : {true, false})
            for (auto kind : {EncodingKind::Straight, EncodingKind::Reverse}) {
                auto r = gen_variable_gadget(i, pos, kind, false);
                std::string why;
                EXPECT_TRUE(encoding_check(event_point_iteration(r.game)[r.state], literal_function(i, pos), base_params(i, kind), &why))
                    << "i=" << i << " pos=" << pos << ": " << why;
                auto alt = variable_gadget_via_restriction(i, pos, kind, Rational::pow2(-i - 2));
                EXPECT_TRUE(encoding_check(event_point_iteration(alt.game)[alt.state], literal_function(i, pos), base_params(i, kind), &why))
                    << "restricted i=" << i << ": " << why;
            }
}

TEST(CompileFormula, LiteralAndGates) {
    auto r = compile_formula(Formula::lit(1), 1, EncodingKind::Straight);
    EXPECT_TRUE(encoding_check(event_point_iteration(r.game)[r.state], literal_function(1, true), base_params(1, EncodingKind::Straight)));

    Game g;
    std::size_t a = add_variable_gadget(g, 1, true, EncodingKind::Straight, "a.");
    std::size_t b = add_variable_gadget(g, 2, false, EncodingKind::Straight, "b.");
    std::size_t conj = g.add_state("and", Owner::Min, 1), disj = g.add_state("or", Owner::Max, 0);
    for (auto s : {conj, disj}) g.add_edge(s, a, 0), g.add_edge(s, b, 0);
    auto vm = event_point_iteration(g);
    for (const auto& t : event_points(vm)) {
        EXPECT_EQ(vm[conj].evaluate(t), std::min(vm[a].evaluate(t), vm[b].evaluate(t)));
        EXPECT_EQ(vm[disj].evaluate(t), std::max(vm[a].evaluate(t), vm[b].evaluate(t)));
    }
}

TEST(CompileFormula, EncodesSmallFormulas) {
    std::vector<std::string> fs{"(and x1 x2)", "(or x1 (not x2))", "(and (or x1 x2) (not x3))", "(or (and x1 (not x1)) x2)",
                                "(and x1 x2 x3)"};
    for (const auto& s : fs) {
        Formula f = parse_formula(s);
        int n = f.max_var();
        for (auto kind : {EncodingKind::Straight, EncodingKind::Reverse}) {
            auto r = compile_formula(f, n, kind);
            std::string why;
            EXPECT_TRUE(encoding_check(event_point_iteration(r.game)[r.state], formula_function(f), base_params(n, kind), &why)) << s << ": " << why;
        }
    }
}

TEST(CompileQbf, Examples) {
    auto sat = compile_qbf(parse_qbf("(exists (x1 x2) (or x1 x2))"));
    EXPECT_EQ(value_at(sat.game, "query", 0), ExtendedValue(Rational(33, 16)));
    EXPECT_EQ(sat.true_value, Rational(33, 16));
    EXPECT_EQ(sat.false_value, Rational(2));
    auto val = compile_qbf(parse_qbf("(forall (x1) x1)"));
    EXPECT_EQ(value_at(val.game, "query", 0), ExtendedValue(Rational(15, 8)));
    auto q = parse_qbf("(forall (x1) (exists (x2) (or (and x1 x2) (and (not x1) (not x2)))))");
    auto alt = compile_qbf(q);
    EXPECT_TRUE(brute_force_qbf(q));
    EXPECT_TRUE(decide(alt.game, "query", 0, decision_threshold(alt)));
    EXPECT_GT(alt.true_value, alt.false_value);
}

TEST(CompileQbf, SatAndValidityValues) {
    std::vector<std::pair<std::string, bool>> sat{{"(and x1 (not x1))", false}, {"(or x1 x2)", true}, {"(and x1 (not x2))", true},
                                                  {"(and (or x1 x2) (and (not x1) (not x2)))", false}};
    for (const auto& [s, expect] : sat) {
        Formula f = parse_formula(s);
        int n = int(f.vars().size());
        auto r = reduce_sat(f);
        EXPECT_EQ(value_at(r.game, "query", 0), ExtendedValue(expect ? 2 + Rational::pow2(-n - 2) : Rational(2))) << s;
    }
    std::vector<std::pair<std::string, bool>> taut{{"(or x1 (not x1))", true}, {"(or x1 x2)", false}, {"(or (and x1 x2) (not x1) (not x2))", true}};
    for (const auto& [s, expect] : taut) {
        Formula f = parse_formula(s);
        int n = int(f.vars().size());
        auto r = reduce_validity(f);
        EXPECT_EQ(value_at(r.game, "query", 0), ExtendedValue(expect ? Rational(2) : 2 - Rational::pow2(-n - 2))) << s;
    }
}

TEST(CompileQbf, StagesEncodeTheirSuffixes) {
    for (const char* s : {"(exists (x1) (forall (x2) (or x1 x2)))", "(forall (x1) (exists (x2) (and x1 x2)))",
                          "(exists (x1 x2) (forall (x3) (or (and x1 x3) x2)))"}) {
        Qbf q = parse_qbf(s);
        auto r = compile_qbf(q);
        auto vm = event_point_iteration(r.game);
        for (const auto& st : r.stages) {
            std::string why;
            EXPECT_TRUE(encoding_check(vm[st.state], stage_function(q, r, st), st.params, &why)) << s << ": " << why;
        }
        EXPECT_EQ(vm[r.query].evaluate(0), ExtendedValue(brute_force_qbf(q) ? r.true_value : r.false_value)) << s;
    }
}

TEST(CompileQbf, DecayingOuterModeBrackets) {
    Qbf q = parse_qbf("(exists (x1) (forall (x2) (or x1 x2)))");
    auto r = compile_qbf(q, OuterMode::Decaying);
    EXPECT_FALSE(r.exact);
    ExtendedValue v = value_at(r.game, "query", 0);
    EXPECT_EQ(decide(r.game, "query", 0, decision_threshold(r)), brute_force_qbf(q));
    EXPECT_TRUE(v >= ExtendedValue(r.false_value));
}

TEST(RescaleInteger, Examples) {
    Game g = gen_exp_family(3);
    Game r = rescale_integer(g, 3);
    EXPECT_EQ(r.horizon, Rational(8));
    for (const auto& e : r.edges()) EXPECT_TRUE(e.cost.is_integer());
    for (std::size_t e = 0; e < g.edges().size(); ++e)
        if (g.edges()[e].cost == Rational(1, 8)) {
            EXPECT_EQ(r.edges()[e].cost, Rational(1));
        }
    for (const auto& s : r.states()) EXPECT_TRUE(s.rate.is_zero() || s.rate == 1);
    EXPECT_EQ(rescale_integer(gen_exp_family(0), 0), gen_exp_family(0));
    EXPECT_THROW(rescale_integer(g, 2), std::invalid_argument);
}

TEST(RescaleInteger, ValueCorrespondence) {
    for (int i = 0; i <= 5; ++i) {
        Game g = gen_exp_family(i);
        auto a = event_point_iteration(g), b = event_point_iteration(rescale_integer(g, i));
        Rational f = Rational::pow2(i);
        for (std::size_t v = 0; v < g.size(); ++v)
            for (const auto& p : a[v].points()) ASSERT_EQ(b[v].evaluate(p.t * f), ExtendedValue(p.v * f));
    }
}

TEST(Degree3, Examples) {
    Game g = gen_exp_family(2);
    Game d = to_degree3(g);
    EXPECT_TRUE(d.find("vl1'"));
    EXPECT_FALSE(d.find("vl2'"));
    EXPECT_TRUE(d.find("vl0''"));
    EXPECT_FALSE(d.find("vl0'''"));
    std::vector<int> deg(d.size(), 0);
    for (const auto& e : d.edges()) ++deg[e.from], ++deg[e.to];
    for (int x : deg) EXPECT_LE(x, 3);
    auto a = event_point_iteration(g), b = event_point_iteration(d);
    for (std::size_t v = 0; v < g.size(); ++v) EXPECT_EQ(a[v], b[v]);

    Game lone;
    lone.add_state("g", Owner::Goal);
    EXPECT_EQ(to_degree3(lone), lone);
    Game star;
    star.add_state("g", Owner::Goal);
    star.add_state("s", Owner::Min, 1);
    for (int k = 0; k < 3; ++k) star.add_edge("s", "g", k);
    EXPECT_THROW(to_degree3(star), std::invalid_argument);
}

TEST(MakeUrgent, Examples) {
    Game g = gen_exp_family(2);
    EXPECT_EQ(make_urgent(g, {}), g);
    EXPECT_THROW(make_urgent(g, {"vl0"}), std::invalid_argument);
}

TEST(Promise, NpOutcomes) {
    for (const auto& [s, expect] : std::vector<std::pair<std::string, Rational>>{{"(or x1 x2)", Rational(65, 32)}, {"(and x1 (not x1))", 2}}) {
        Formula f = parse_formula(s);
        auto r = reduce_sat(f);
        auto p = promise_to_strategy(r.game, r.game.state(r.query).id, r.true_value, r.false_value);
        if (f.vars().size() == 2) {
            EXPECT_EQ(r.true_value, Rational(33, 16));
        }
        Rational v0 = value_at(p.game, r.game.state(r.query).id, 0).value();
        Rational vp = value_at(p.game, p.game.state(p.state).id, 0).value();
        EXPECT_EQ(vp == r.false_value, v0 == r.false_value);
        if (f.vars().size() == 2) {
            EXPECT_EQ(vp, expect);
        }
    }
    EXPECT_THROW(promise_to_strategy(gen_exp_family(0), "vr0", 1, 1), std::invalid_argument);
}

TEST(Formula, ParseAndPrint) {
    Formula f = parse_formula("(or (and x1 x2) (not x3))");
    EXPECT_EQ(f.str(), "(or (and x1 x2) (not x3))");
    EXPECT_EQ(f.gate_count(), 2u);
    EXPECT_EQ(f.max_var(), 3);
    EXPECT_THROW(parse_formula("(and x1)"), formula_error);
    EXPECT_THROW(parse_formula("(not (and x1 x2))"), formula_error);
    EXPECT_THROW(parse_formula("(xor x1 x2)"), formula_error);
    EXPECT_THROW(parse_formula("(and x1 x2"), formula_error);
    EXPECT_THROW(parse_formula("x0"), formula_error);
}

TEST(Formula, QbfAndDimacs) {
    Qbf q = parse_qbf("(forall (x1) (exists (x2 x3) (or x1 (and x2 x3))))");
    ASSERT_EQ(q.blocks.size(), 2u);
    EXPECT_EQ(q.blocks[1].vars, (std::vector<int>{2, 3}));
    EXPECT_TRUE(brute_force_qbf(q));
    EXPECT_TRUE(brute_force_qbf(parse_qbf("(exists (x1) x1)")));
    EXPECT_FALSE(brute_force_qbf(parse_qbf("(forall (x1) x1)")));
    EXPECT_EQ(parse_qbf("(exists (x1) (exists (x2) (or x1 x2)))").blocks.size(), 1u);
    EXPECT_THROW(parse_qbf("(exists (x1) (or x1 x2))"), formula_error);
    Formula d = parse_dimacs("c demo\np cnf 2 2\n1 -2 0\n2 0\n");
    EXPECT_EQ(d.str(), "(and (or x1 (not x2)) x2)");
    EXPECT_THROW(parse_dimacs("1 2 0\n"), formula_error);
}
