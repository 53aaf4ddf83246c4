// Copyright (c) SPTG Toolkit contributors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "oracles.hpp"

using namespace sptg;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<Game> generator_outputs() {
    std::vector<Game> gs;
    for (int i = 0; i <= 3; ++i) gs.push_back(gen_exp_family(i));
    gs.push_back(gen_variable_gadget(2, true, EncodingKind::Reverse, false).game);
    gs.push_back(reduce_sat(parse_formula("(or x1 (and x2 (not x1)))")).game);
    gs.push_back(compile_qbf(parse_qbf("(forall (x1) (exists (x2) (or x1 x2)))")).game);
    gs.push_back(rescale_integer(gen_exp_family(2), 2));
    gs.push_back(to_degree3(gen_exp_family(2)));
    gs.push_back(make_urgent(gen_exp_family(2), {"vl1"}));
    return gs;
}

} // namespace

TEST(GameJson, RoundTrip) {
    for (const auto& g : generator_outputs()) {
        std::string text = serialize_game(g);
        Game back = parse_game(text);
        EXPECT_EQ(back, g);
        EXPECT_EQ(serialize_game(back), text);
    }
}

TEST(GameJson, GoldenFixture) { EXPECT_EQ(parse_game(read_file(std::string(SPTG_TEST_DATA) + "/family2.json")), gen_exp_family(2)); }

TEST(GameJson, Rejections) {
    const std::string base = R"({"states":[{"id":"a","owner":"min","rate":"1"},{"id":"g","owner":"goal"}],"edges":[{"from":"a","to":"g","cost":"COST"}]})";
    auto with = [&](const std::string& c) { return std::regex_replace(base, std::regex("COST"), c); };
    EXPECT_NO_THROW(parse_game(with("3/6")));
    EXPECT_EQ(parse_game(with("3/6")).edges()[0].cost, Rational(1, 2));
    try {
        parse_game(with("-1"));
        FAIL();
    } catch (const parse_error& e) {
        EXPECT_NE(std::string(e.what()).find("negative cost"), std::string::npos);
    }
    EXPECT_THROW(parse_game(with("x")), parse_error);
    EXPECT_THROW(parse_game("{\"states\": ["), parse_error);
    EXPECT_THROW(parse_game(R"({"states":[{"id":"a","owner":"boss"}]})"), parse_error);
    EXPECT_THROW(parse_game(R"({"states":[{"id":"a","owner":"min"},{"id":"a","owner":"max"}]})"), parse_error);
    EXPECT_THROW(parse_game(R"({"states":[{"id":"a","owner":"min"}],"edges":[{"from":"a","to":"b","cost":"1"}]})"), parse_error);
}

TEST(ValueDocuments, JsonAndCsvAgree) {
    std::mt19937_64 rng(51);
    std::vector<Game> gs = generator_outputs();
    for (int k = 0; k < 10; ++k) gs.push_back(oracle::random_undirected(rng, 5));
    for (const auto& g : gs) {
        bool urgent = false;
        for (const auto& s : g.states()) urgent = urgent || s.urgent;
        ValueMap vm = urgent ? value_iteration(g, g.size()) : event_point_iteration(g);
        ValueDocument want = make_value_document(g, vm);
        ValueDocument from_json = parse_values(values_to_json(g, vm).dump());
        ValueDocument from_csv = parse_values_csv(values_to_csv(g, vm), g.horizon);
        EXPECT_EQ(from_json.values, want.values);
        EXPECT_EQ(from_csv.values, want.values);
        EXPECT_EQ(from_json.horizon, g.horizon);
    }
}

TEST(ValueDocuments, RejectsNonIncreasingTimes) {
    EXPECT_THROW(parse_values(R"({"values":{"a":[{"t":"1/2","v":"0"},{"t":"1/4","v":"0"}]}})"), parse_error);
    EXPECT_THROW(parse_values_csv("s,t\n"), parse_error);
}

TEST(Render, DeterministicAndExact) {
    Game g = gen_exp_family(3);
    auto vd = make_value_document(g, event_point_iteration(g));
    RenderOptions opt;
    std::string a = render_diagram(vd, opt), b = render_diagram(vd, opt);
    EXPECT_EQ(a, b);
    std::regex poly("points=\"([^\"]*)\"");
    std::vector<std::vector<std::pair<std::string, std::string>>> panels;
    for (auto it = std::sregex_iterator(a.begin(), a.end(), poly); it != std::sregex_iterator(); ++it) {
        std::istringstream s((*it)[1].str());
        std::string tok;
        panels.emplace_back();
        while (s >> tok) {
            auto c = tok.find(',');
            panels.back().push_back({tok.substr(0, c), tok.substr(c + 1)});
        }
    }
    ASSERT_EQ(panels.size(), g.size());
    for (std::size_t v = 0; v < g.size(); ++v) {
        const auto& pts = vd.at(g.state(v).id).points();
        ASSERT_EQ(panels[v].size(), pts.size());
        for (std::size_t k = 0; k < pts.size(); ++k) {
            EXPECT_EQ(panels[v][k].first, pts[k].t.to_decimal(12));
            EXPECT_EQ(panels[v][k].second, pts[k].v.to_decimal(12));
        }
    }
    // vl3 alternates between flat and falling pieces.
    EXPECT_EQ(vd.at("vl3").segment_count(), 8u);
}

TEST(Render, RelativeModeFlattensRateHalfLine) {
    ValueDocument vd;
    vd.order = {"w"};
    vd.values.emplace("w", PwlFunction::from_points({{0, 2}, {1, Rational(3, 2)}}));
    RenderOptions opt;
    opt.relative = Rational(1, 2);
    std::string svg = render_diagram(vd, opt);
    EXPECT_NE(svg.find("points=\"0.000000000000,2.000000000000 1.000000000000,2.000000000000\""), std::string::npos);
    opt.relative = -1;
    EXPECT_THROW(render_diagram(vd, opt), std::invalid_argument);
    opt.relative = 0;
    opt.states = {"nope"};
    EXPECT_THROW(render_diagram(vd, opt), std::out_of_range);
}

TEST(Render, InfiniteStatesAreFlagged) {
    ValueDocument vd;
    vd.order = {"z"};
    vd.values.emplace("z", PwlFunction::infinite(0, 1));
    std::string svg = render_diagram(vd, {});
    EXPECT_NE(svg.find("class=\"infinite\""), std::string::npos);
    EXPECT_EQ(svg.find("<polyline"), std::string::npos);
}

TEST(ReductionJson, ExpectedValuesAsStrings) {
    auto r = reduce_sat(parse_formula("(or x1 x2)"));
    json j = reduction_to_json(r);
    EXPECT_EQ(j["expected"]["true"], "33/16");
    EXPECT_EQ(j["expected"]["false"], "2");
    EXPECT_EQ(j["query"], "query");
    EXPECT_EQ(game_from_json(j), r.game);
}
