// Copyright (c) SPTG Toolkit contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sptg/game.hpp"
#include "sptg/reductions.hpp"

namespace sptg {

using json = nlohmann::ordered_json;

class parse_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline Rational rational_field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw parse_error(where + ": missing \"" + key + "\"");
    const json& x = j.at(key);
    try {
        if (x.is_string()) return Rational::parse(x.get<std::string>());
        if (x.is_number_integer()) return Rational(x.get<std::int64_t>());
    } catch (const std::invalid_argument& e) {
        throw parse_error(where + ": " + e.what());
    }
    throw parse_error(where + ": \"" + key + "\" must be a rational string like \"3/4\"");
}

inline std::string string_field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_string()) throw parse_error(where + ": missing string \"" + key + "\"");
    return j.at(key).get<std::string>();
}

} // namespace detail

// --- games -----------------------------------------------------------------

inline json game_to_json(const Game& g) {
    json j;
    j["horizon"] = g.horizon.str();
    j["states"] = json::array();
    for (const auto& s : g.states())
        j["states"].push_back({{"id", s.id}, {"owner", owner_name(s.owner)}, {"rate", s.rate.str()}, {"urgent", s.urgent}});
    j["edges"] = json::array();
    for (const auto& e : g.edges())
        j["edges"].push_back({{"from", g.state(e.from).id}, {"to", g.state(e.to).id}, {"cost", e.cost.str()}});
    return j;
}

inline std::string serialize_game(const Game& g) { return game_to_json(g).dump(2) + "\n"; }

// Accepts a game document or a reduction document holding one under "game".
inline Game game_from_json(const json& doc) {
    const json& j = doc.contains("game") ? doc.at("game") : doc;
    if (!j.is_object()) throw parse_error("game document must be an object");
    Game g;
    g.horizon = j.contains("horizon") ? detail::rational_field(j, "horizon", "horizon") : Rational(1);
    if (!j.contains("states") || !j.at("states").is_array()) throw parse_error("missing \"states\" array");
    std::size_t k = 0;
    for (const auto& s : j.at("states")) {
        std::string where = "states[" + std::to_string(k++) + "]";
        std::string id = detail::string_field(s, "id", where);
        Owner o;
        try {
            o = parse_owner(detail::string_field(s, "owner", where));
        } catch (const parse_error&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw parse_error(where + ": " + e.what());
        }
        Rational rate = s.contains("rate") ? detail::rational_field(s, "rate", where) : Rational(0);
        bool urgent = s.contains("urgent") && s.at("urgent").get<bool>();
        if (g.find(id)) throw parse_error(where + ": duplicate id '" + id + "'");
        g.add_state(id, o, rate, urgent);
    }
    k = 0;
    if (j.contains("edges")) {
        for (const auto& e : j.at("edges")) {
            std::string where = "edges[" + std::to_string(k++) + "]";
            std::string from = detail::string_field(e, "from", where), to = detail::string_field(e, "to", where);
            if (!g.find(from)) throw parse_error(where + ": unknown state '" + from + "'");
            if (!g.find(to)) throw parse_error(where + ": unknown state '" + to + "'");
            g.add_edge(from, to, detail::rational_field(e, "cost", where));
        }
    }
    auto report = validate(g);
    if (!report.empty()) {
        std::string msg = "invalid game:";
        for (const auto& r : report) msg += "\n  " + r;
        throw parse_error(msg);
    }
    return g;
}

inline Game parse_game(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("syntax error: ") + e.what());
    }
    return game_from_json(j);
}

// --- value documents ---------------------------------------------------------

inline json values_to_json(const Game& g, const ValueMap& vm) {
    json j;
    j["horizon"] = g.horizon.str();
    j["values"] = json::object();
    j["infinite"] = json::array();
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (vm[v].is_infinite()) {
            j["infinite"].push_back(g.state(v).id);
            continue;
        }
        json pts = json::array();
        for (const auto& p : vm[v].points()) pts.push_back({{"t", p.t.str()}, {"v", p.v.str()}});
        j["values"][g.state(v).id] = pts;
    }
    return j;
}

// A value document keyed by state id.
struct ValueDocument {
    Rational horizon = 1;
    std::vector<std::string> order;
    std::map<std::string, PwlFunction> values;

    [[nodiscard]] const PwlFunction& at(const std::string& id) const {
        auto it = values.find(id);
        if (it == values.end()) throw std::out_of_range("unknown state '" + id + "'");
        return it->second;
    }
    friend bool operator==(const ValueDocument&, const ValueDocument&) = default;
};

inline ValueDocument make_value_document(const Game& g, const ValueMap& vm) {
    ValueDocument d;
    d.horizon = g.horizon;
    for (std::size_t v = 0; v < g.size(); ++v) {
        d.order.push_back(g.state(v).id);
        d.values.emplace(g.state(v).id, vm[v]);
    }
    return d;
}

inline ValueDocument values_from_json(const json& j) {
    ValueDocument d;
    d.horizon = j.contains("horizon") ? detail::rational_field(j, "horizon", "horizon") : Rational(1);
    if (!j.contains("values")) throw parse_error("missing \"values\"");
    for (const auto& [id, pts] : j.at("values").items()) {
        std::vector<Point> ps;
        for (const auto& p : pts) ps.push_back({detail::rational_field(p, "t", id), detail::rational_field(p, "v", id)});
        try {
            d.values.emplace(id, PwlFunction::from_points(std::move(ps)));
        } catch (const std::invalid_argument& e) {
            throw parse_error(id + ": " + e.what());
        }
        d.order.push_back(id);
    }
    if (j.contains("infinite"))
        for (const auto& id : j.at("infinite")) {
            d.values.emplace(id.get<std::string>(), PwlFunction::infinite(0, d.horizon));
            d.order.push_back(id.get<std::string>());
        }
    return d;
}

inline ValueDocument parse_values(const std::string& text) {
    try {
        return values_from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw parse_error(std::string("syntax error: ") + e.what());
    }
}

// Rows "state,t,v"; an infinite state is a single row with empty t and v "inf".
inline std::string values_to_csv(const Game& g, const ValueMap& vm) {
    std::string s = "state,t,v\n";
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (vm[v].is_infinite()) {
            s += g.state(v).id + ",,inf\n";
            continue;
        }
        for (const auto& p : vm[v].points()) s += g.state(v).id + "," + p.t.str() + "," + p.v.str() + "\n";
    }
    return s;
}

inline ValueDocument parse_values_csv(const std::string& text, const Rational& horizon = 1) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    if (line != "state,t,v") throw parse_error("CSV header must be 'state,t,v'");
    std::map<std::string, std::vector<Point>> pts;
    std::set<std::string> inf;
    ValueDocument d;
    d.horizon = horizon;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto c1 = line.find(','), c2 = line.rfind(',');
        if (c1 == std::string::npos || c1 == c2) throw parse_error("malformed CSV row '" + line + "'");
        std::string id = line.substr(0, c1), t = line.substr(c1 + 1, c2 - c1 - 1), v = line.substr(c2 + 1);
        if (!pts.count(id) && !inf.count(id)) d.order.push_back(id);
        if (v == "inf") inf.insert(id);
        else pts[id].push_back({Rational::parse(t), Rational::parse(v)});
    }
    for (auto& [id, p] : pts) d.values.emplace(id, PwlFunction::from_points(std::move(p)));
    for (const auto& id : inf) d.values.emplace(id, PwlFunction::infinite(0, horizon));
    return d;
}

// --- reductions --------------------------------------------------------------

inline json params_to_json(const EncodingParams& p) {
    return {{"v", p.v.str()}, {"v_prime", p.vp.str()}, {"n", p.n}, {"kind", p.kind == EncodingKind::Straight ? "straight" : "reverse"}};
}

inline json reduction_to_json(const ReductionOutput& r) {
    json j;
    j["query"] = r.game.state(r.query).id;
    j["params"] = params_to_json(r.params);
    j["expected"] = {{"true", r.true_value.str()}, {"false", r.false_value.str()}, {"exact", r.exact}};
    j["threshold"] = decision_threshold(r).str();
    j["game"] = game_to_json(r.game);
    return j;
}

// --- rendering ---------------------------------------------------------------

struct RenderOptions {
    std::vector<std::string> states; // empty: all, in document order
    Rational relative = 0;           // plot v + relative * t, i.e. v minus the line -relative * t
    int width = 640;
    int panel_height = 200;
    int precision = 12;
};

// One panel per state; polyline vertices are written in data coordinates and
// mapped into the panel by a transform, so the numbers in the file are the
// breakpoints themselves.
inline std::string render_diagram(const ValueDocument& vd, const RenderOptions& opt) {
    if (opt.relative.sign() < 0) throw std::invalid_argument("relative slope must be nonnegative");
    std::vector<std::string> ids = opt.states.empty() ? vd.order : opt.states;
    for (const auto& id : ids) (void)vd.at(id);
    const int margin = 40, gap = 20;
    const int h = opt.panel_height;
    const int W = opt.width;
    const int H = int(ids.size()) * (h + gap) + gap;
    auto dec = [&](const Rational& r) { return r.to_decimal(opt.precision); };
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H
      << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    int y0 = gap;
    for (const auto& id : ids) {
        const PwlFunction& f = vd.at(id);
        s << "<g class=\"panel\" data-state=\"" << id << "\">\n";
        s << "<rect x=\"" << margin << "\" y=\"" << y0 << "\" width=\"" << W - 2 * margin << "\" height=\"" << h
          << "\" fill=\"none\" stroke=\"#999\"/>\n";
        s << "<text x=\"" << margin + 4 << "\" y=\"" << y0 + 14 << "\" font-family=\"monospace\" font-size=\"12\">" << id;
        if (opt.relative.sign() != 0) s << " (v + " << opt.relative.str() << " t)";
        s << "</text>\n";
        if (f.is_infinite()) {
            s << "<text class=\"infinite\" x=\"" << W / 2 << "\" y=\"" << y0 + h / 2
              << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"14\">+inf</text>\n";
        } else {
            std::vector<Point> rel;
            for (const auto& p : f.points()) rel.push_back({p.t, p.v + opt.relative * p.t});
            Rational vmin = rel[0].v, vmax = rel[0].v;
            for (const auto& p : rel) vmin = min(vmin, p.v), vmax = max(vmax, p.v);
            if (vmin == vmax) vmin -= 1, vmax += 1;
            Rational span_t = f.hi() - f.lo();
            if (span_t.sign() == 0) span_t = 1;
            Rational sx = Rational(W - 2 * margin) / span_t;
            Rational sy = Rational(h - 2 * 10) / (vmax - vmin);
            Rational tx = Rational(margin) - f.lo() * sx;
            Rational ty = Rational(y0 + h - 10) + vmin * sy;
            s << "<text x=\"" << margin - 4 << "\" y=\"" << y0 + h - 10 << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"9\">"
              << vmin.to_decimal(4) << "</text>\n";
            s << "<text x=\"" << margin - 4 << "\" y=\"" << y0 + 14 << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"9\">"
              << vmax.to_decimal(4) << "</text>\n";
            s << "<polyline class=\"value\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" vector-effect=\"non-scaling-stroke\" "
              << "transform=\"matrix(" << dec(sx) << " 0 0 " << dec(-sy) << " " << dec(tx) << " " << dec(ty) << ")\" points=\"";
            for (std::size_t k = 0; k < rel.size(); ++k) s << (k ? " " : "") << dec(rel[k].t) << "," << dec(rel[k].v);
            s << "\"/>\n";
        }
        s << "</g>\n";
        y0 += h + gap;
    }
    s << "</svg>\n";
    return s.str();
}

} // namespace sptg
