// Copyright (c) SPTG Toolkit contributors.
// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "sptg/sptg.hpp"

using namespace sptg;

namespace {

constexpr int kError = 2;

std::string read_input(const std::string& path) {
    std::stringstream s;
    if (path == "-") {
        s << std::cin.rdbuf();
        return s.str();
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    s << in.rdbuf();
    return s.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

// A game file, possibly a reduction document carrying a query and threshold.
struct LoadedGame {
    Game game;
    std::optional<std::string> query;
    std::optional<Rational> threshold;
};

LoadedGame load_game(const std::string& path) {
    std::string text = read_input(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(path + ": syntax error: " + e.what());
    }
    LoadedGame lg{game_from_json(j), std::nullopt, std::nullopt};
    if (j.contains("game")) {
        if (j.contains("query")) lg.query = j.at("query").get<std::string>();
        if (j.contains("threshold")) lg.threshold = Rational::parse(j.at("threshold").get<std::string>());
    }
    return lg;
}

bool has_urgent(const Game& g) {
    for (const auto& s : g.states())
        if (s.urgent) return true;
    return false;
}

// Event-point iteration unless the game has urgent states, which need value iteration.
ValueMap solve_default(const Game& g) {
    if (!has_urgent(g)) return event_point_iteration(g);
    if (is_acyclic(g)) return value_iteration(g, longest_path_length(g));
    return value_iteration_fixpoint(g, 64 * g.size() + 64);
}

Formula formula_input(const std::string& formula, const std::string& dimacs) {
    if (!formula.empty() && !dimacs.empty()) throw std::invalid_argument("give either --formula or --dimacs");
    if (!dimacs.empty()) return parse_dimacs(read_input(dimacs));
    if (formula.empty()) throw std::invalid_argument("a formula is required (--formula or --dimacs)");
    return parse_formula(formula);
}

std::vector<std::string> split_ids(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string id;
    while (std::getline(in, id, ','))
        if (!id.empty()) out.push_back(id);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact solver and reduction compiler for simple priced timed games"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Emit a game or reduction document");
    gen->require_subcommand(1);
    std::string out_path;
    int level = 0;
    auto* g_fam = gen->add_subcommand("exp-family", "Family with exponentially many event points");
    g_fam->add_option("-i,--level", level, "Number of levels")->required()->check(CLI::Range(0, 62));
    g_fam->add_option("-o,--output", out_path, "Output file (default stdout)");
    std::string formula, dimacs, qbf_text;
    auto* g_np = gen->add_subcommand("np", "Satisfiability reduction");
    g_np->add_option("-f,--formula", formula, "Formula, e.g. (or x1 (not x2))");
    g_np->add_option("--dimacs", dimacs, "DIMACS CNF file");
    g_np->add_option("-o,--output", out_path, "Output file (default stdout)");
    auto* g_conp = gen->add_subcommand("conp", "Validity reduction");
    g_conp->add_option("-f,--formula", formula, "Formula");
    g_conp->add_option("--dimacs", dimacs, "DIMACS CNF file");
    g_conp->add_option("-o,--output", out_path, "Output file (default stdout)");
    bool decaying = false;
    auto* g_qbf = gen->add_subcommand("tqbf", "Quantified formula reduction");
    g_qbf->add_option("-q,--qbf", qbf_text, "Quantified formula, e.g. (forall (x1) (exists (x2) (or x1 x2)))")->required();
    g_qbf->add_flag("--decaying", decaying, "Decaying outer extender (reported pair becomes bounds)");
    g_qbf->add_option("-o,--output", out_path, "Output file (default stdout)");
    std::string game_path;
    int exponent = 0;
    auto* g_res = gen->add_subcommand("rescale", "Integer-cost rescaling of a game");
    g_res->add_option("game", game_path, "Game file")->required();
    g_res->add_option("-e,--exponent", exponent, "Time unit 2^-e")->required()->check(CLI::Range(0, 62));
    g_res->add_option("-o,--output", out_path, "Output file (default stdout)");
    auto* g_deg = gen->add_subcommand("degree3", "Degree-3 transform of a game");
    g_deg->add_option("game", game_path, "Game file")->required();
    g_deg->add_option("-o,--output", out_path, "Output file (default stdout)");

    // solve
    std::string method = "epi", format = "json";
    std::size_t rounds = 0;
    auto* solve = app.add_subcommand("solve", "Compute all value functions");
    solve->add_option("game", game_path, "Game file ('-' for stdin)")->required();
    solve->add_option("-m,--method", method, "epi, vi or undirected")->check(CLI::IsMember({"epi", "vi", "undirected"}));
    solve->add_option("-k,--rounds", rounds, "Value-iteration rounds (default: longest path on DAGs, fixpoint otherwise)");
    solve->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    solve->add_option("-o,--output", out_path, "Output file (default stdout)");

    // value
    std::string state, time_text = "0", threshold_text, relative_text = "0", states_text;
    int precision = 12;
    auto* value = app.add_subcommand("value", "Value of one state at one time");
    value->add_option("game", game_path, "Game file")->required();
    value->add_option("-s,--state", state, "State id (default: the query of a reduction document)");
    value->add_option("-t,--time", time_text, "Time p/q");
    value->add_option("-p,--precision", precision, "Decimal digits")->check(CLI::Range(0, 60));

    // decide
    auto* dec = app.add_subcommand("decide", "Is val(state, time) >= threshold? Exit 0 if yes, 1 if no");
    dec->add_option("game", game_path, "Game file")->required();
    dec->add_option("-s,--state", state, "State id (default: the query of a reduction document)");
    dec->add_option("-t,--time", time_text, "Time p/q");
    dec->add_option("-c,--threshold", threshold_text, "Threshold p/q (default: a reduction document's threshold)");

    // render
    std::string values_path;
    int width = 640, panel_height = 200;
    auto* render = app.add_subcommand("render", "SVG value diagram from a value document");
    render->add_option("values", values_path, "Value document (.json or .csv)")->required();
    render->add_option("-r,--relative", relative_text, "Plot v + rho t (rho = 1/2 flattens rate-1/2 waiting lines)");
    render->add_option("--states", states_text, "Comma-separated state ids");
    render->add_option("-p,--precision", precision, "Decimal digits")->check(CLI::Range(0, 60));
    render->add_option("--width", width, "Image width")->check(CLI::Range(200, 10000));
    render->add_option("--panel-height", panel_height, "Panel height")->check(CLI::Range(60, 10000));
    std::string csv_horizon = "1";
    render->add_option("--horizon", csv_horizon, "Horizon for CSV input");
    render->add_option("-o,--output", out_path, "Output file (default stdout)");

    // stats
    auto* stats = app.add_subcommand("stats", "Event-point and segment counts");
    stats->add_option("game", game_path, "Game file")->required();

    // verify
    int closed_form = -1;
    auto* verify = app.add_subcommand("verify", "Cross-check solvers; exit 0 if all checks pass, 1 otherwise");
    verify->add_option("game", game_path, "Game file")->required();
    verify->add_option("--closed-form", closed_form, "Also compare against the family closed form of this level")->check(CLI::Range(0, 62));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kError;
    }

    try {
        if (gen->parsed()) {
            if (g_fam->parsed()) {
                write_output(out_path, serialize_game(gen_exp_family(level)));
            } else if (g_np->parsed() || g_conp->parsed()) {
                Formula f = formula_input(formula, dimacs);
                auto r = g_np->parsed() ? reduce_sat(f) : reduce_validity(f);
                write_output(out_path, reduction_to_json(r).dump(2) + "\n");
            } else if (g_qbf->parsed()) {
                auto r = compile_qbf(parse_qbf(qbf_text), decaying ? OuterMode::Decaying : OuterMode::Horizontal);
                write_output(out_path, reduction_to_json(r).dump(2) + "\n");
            } else if (g_res->parsed()) {
                write_output(out_path, serialize_game(rescale_integer(load_game(game_path).game, exponent)));
            } else if (g_deg->parsed()) {
                write_output(out_path, serialize_game(to_degree3(load_game(game_path).game)));
            }
            return 0;
        }
        if (solve->parsed()) {
            Game g = load_game(game_path).game;
            ValueMap vm;
            if (method == "epi") {
                vm = solve_default(g);
            } else if (method == "undirected") {
                vm = solve_undirected(g);
            } else if (rounds > 0) {
                vm = value_iteration(g, rounds);
            } else {
                vm = is_acyclic(g) ? value_iteration(g, longest_path_length(g)) : value_iteration_fixpoint(g, 64 * g.size() + 64);
            }
            write_output(out_path, format == "csv" ? values_to_csv(g, vm) : values_to_json(g, vm).dump(2) + "\n");
            return 0;
        }
        if (value->parsed() || dec->parsed()) {
            LoadedGame lg = load_game(game_path);
            if (state.empty()) {
                if (!lg.query) throw std::invalid_argument("--state is required for plain game documents");
                state = *lg.query;
            }
            Rational t = Rational::parse(time_text);
            if (t.sign() < 0 || t > lg.game.horizon) throw std::out_of_range("time outside [0, T]");
            std::size_t s = lg.game.index(state);
            ExtendedValue v = solve_default(lg.game)[s].evaluate(t);
            if (value->parsed()) {
                if (v.is_infinite()) std::cout << "inf\n";
                else std::cout << v.value().str() << " (" << v.value().to_decimal(precision) << ")\n";
                return 0;
            }
            Rational c;
            if (!threshold_text.empty()) c = Rational::parse(threshold_text);
            else if (lg.threshold) c = *lg.threshold;
            else throw std::invalid_argument("--threshold is required for plain game documents");
            bool yes = v >= ExtendedValue(c);
            std::cout << (yes ? "true" : "false") << "\n";
            return yes ? 0 : 1;
        }
        if (render->parsed()) {
            std::string text = read_input(values_path);
            bool csv = values_path.size() > 4 && values_path.substr(values_path.size() - 4) == ".csv";
            ValueDocument vd = csv ? parse_values_csv(text, Rational::parse(csv_horizon)) : parse_values(text);
            RenderOptions opt;
            opt.states = split_ids(states_text);
            opt.relative = Rational::parse(relative_text);
            opt.precision = precision;
            opt.width = width;
            opt.panel_height = panel_height;
            write_output(out_path, render_diagram(vd, opt));
            return 0;
        }
        if (stats->parsed()) {
            Game g = load_game(game_path).game;
            ValueMap vm = solve_default(g);
            std::cout << "states " << g.size() << "\nedges " << g.edges().size() << "\nevent_points " << event_points(vm).size()
                      << "\ntotal_segments " << total_segments(vm) << "\ninfinite_states " << infinite_states(g).size() << "\n";
            for (std::size_t v = 0; v < g.size(); ++v)
                std::cout << "segments " << g.state(v).id << " " << (vm[v].is_infinite() ? std::string("inf") : std::to_string(vm[v].segment_count()))
                          << "\n";
            return 0;
        }
        if (verify->parsed()) {
            Game g = load_game(game_path).game;
            bool ok = true;
            ValueMap vm = solve_default(g);
            if (is_acyclic(g)) {
                bool same = value_iteration(g, longest_path_length(g)) == vm;
                std::cout << "vi-vs-epi " << (same ? "ok" : "MISMATCH") << "\n";
                ok = ok && same;
            } else {
                std::size_t r = 0;
                bool same = value_iteration_fixpoint(g, 64 * g.size() + 64, &r) == vm;
                std::cout << "vi-fixpoint-vs-epi " << (same ? "ok" : "MISMATCH") << " (" << r << " rounds)\n";
                ok = ok && same;
            }
            if (closed_form >= 0) {
                bool same = vm == family_closed_form(closed_form);
                std::cout << "closed-form " << (same ? "ok" : "MISMATCH") << "\n";
                ok = ok && same;
            }
            return ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return 0;
}
