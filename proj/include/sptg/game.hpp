// Copyright (c) SPTG Toolkit contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "sptg/pwl.hpp"
#include "sptg/rational.hpp"

namespace sptg {

enum class Owner { Min, Max, Goal };

inline const char* owner_name(Owner o) {
    switch (o) {
    case Owner::Min: return "min";
    case Owner::Max: return "max";
    default: return "goal";
    }
}

inline Owner parse_owner(const std::string& s) {
    if (s == "min") return Owner::Min;
    if (s == "max") return Owner::Max;
    if (s == "goal") return Owner::Goal;
    throw std::invalid_argument("unknown owner '" + s + "'");
}

struct State {
    std::string id;
    Owner owner = Owner::Min;
    Rational rate;
    bool urgent = false;
    friend bool operator==(const State&, const State&) = default;
};

struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    Rational cost;
    friend bool operator==(const Edge&, const Edge&) = default;
};

// States are addressed by index; ids are unique names kept in an index.
class Game {
    std::vector<State> states_;
    std::vector<Edge> edges_;
    std::unordered_map<std::string, std::size_t> index_;

  public:
    Rational horizon = 1;

    std::size_t add_state(std::string id, Owner owner, Rational rate = 0, bool urgent = false) {
        if (index_.count(id)) throw std::invalid_argument("duplicate state id '" + id + "'");
        index_.emplace(id, states_.size());
        states_.push_back({std::move(id), owner, std::move(rate), urgent});
        return states_.size() - 1;
    }
    std::size_t add_edge(std::size_t from, std::size_t to, Rational cost) {
        if (from >= states_.size() || to >= states_.size()) throw std::out_of_range("edge endpoint out of range");
        edges_.push_back({from, to, std::move(cost)});
        return edges_.size() - 1;
    }
    std::size_t add_edge(const std::string& from, const std::string& to, Rational cost) {
        return add_edge(index(from), index(to), std::move(cost));
    }

    [[nodiscard]] std::size_t size() const { return states_.size(); }
    [[nodiscard]] const std::vector<State>& states() const { return states_; }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] const State& state(std::size_t i) const { return states_.at(i); }
    State& state_mut(std::size_t i) { return states_.at(i); }
    Edge& edge_mut(std::size_t i) { return edges_.at(i); }

    [[nodiscard]] std::optional<std::size_t> find(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    [[nodiscard]] std::size_t index(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw std::out_of_range("unknown state '" + id + "'");
        return it->second;
    }

    // Outgoing edge indices per state. Goal states have none by convention.
    [[nodiscard]] std::vector<std::vector<std::size_t>> out_edges() const {
        std::vector<std::vector<std::size_t>> out(states_.size());
        for (std::size_t e = 0; e < edges_.size(); ++e)
            if (states_[edges_[e].from].owner != Owner::Goal) out[edges_[e].from].push_back(e);
        return out;
    }

    [[nodiscard]] Rational max_rate() const {
        Rational m = 0;
        for (const auto& s : states_) m = max(m, s.rate);
        return m;
    }

    friend bool operator==(const Game& a, const Game& b) {
        return a.horizon == b.horizon && a.states_ == b.states_ && a.edges_ == b.edges_;
    }
};

inline std::vector<std::string> validate(const Game& g) {
    std::vector<std::string> report;
    if (g.horizon.sign() <= 0) report.push_back("horizon must be positive");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const State& s = g.state(i);
        if (!seen.insert(s.id).second) report.push_back("duplicate state id '" + s.id + "'");
        if (s.rate.sign() < 0) report.push_back("state '" + s.id + "': negative rate " + s.rate.str());
        if (s.owner == Owner::Goal && !s.rate.is_zero()) report.push_back("goal state '" + s.id + "': rate must be 0, got " + s.rate.str());
        if (s.owner == Owner::Goal && s.urgent) report.push_back("goal state '" + s.id + "' cannot be urgent");
    }
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const Edge& ed = g.edges()[e];
        if (ed.from >= g.size() || ed.to >= g.size()) {
            report.push_back("edge " + std::to_string(e) + ": endpoint out of range");
            continue;
        }
        if (ed.cost.sign() < 0)
            report.push_back("edge " + g.state(ed.from).id + "->" + g.state(ed.to).id + ": negative cost " + ed.cost.str());
    }
    return report;
}

inline void require_valid(const Game& g) {
    auto r = validate(g);
    if (r.empty()) return;
    std::string msg = "invalid game:";
    for (const auto& s : r) msg += "\n  " + s;
    throw std::invalid_argument(msg);
}

// Per-state value functions over [0, T], aligned with state indices.
using ValueMap = std::vector<PwlFunction>;

enum class Player { Min, Max };

// nullopt stands for the delay choice.
using Choice = std::optional<std::size_t>;

// Time-positional strategy: choices[k] applies on [w_k, w_{k+1}); the last
// table applies at T only.
struct Strategy {
    Player player = Player::Min;
    std::vector<Rational> change_points;
    std::vector<std::vector<Choice>> choices;

    [[nodiscard]] std::size_t interval_at(const Rational& t) const {
        if (t == change_points.back()) return change_points.size() - 1;
        auto it = std::upper_bound(change_points.begin(), change_points.end(), t);
        return std::size_t(it - change_points.begin()) - 1;
    }
};

inline bool owns(Player p, Owner o) { return (p == Player::Min && o == Owner::Min) || (p == Player::Max && o == Owner::Max); }

inline void check_strategy(const Game& g, const Strategy& s) {
    const auto& w = s.change_points;
    if (w.size() < 2 || !w.front().is_zero() || w.back() != g.horizon)
        throw std::invalid_argument("strategy change points must run from 0 to the horizon");
    for (std::size_t i = 1; i < w.size(); ++i)
        if (!(w[i - 1] < w[i])) throw std::invalid_argument("strategy change points must be strictly increasing");
    if (s.choices.size() != w.size()) throw std::invalid_argument("strategy needs one choice table per change point");
    std::vector<bool> has_out(g.size(), false);
    for (const auto& e : g.edges()) has_out[e.from] = true;
    for (std::size_t k = 0; k < s.choices.size(); ++k) {
        if (s.choices[k].size() != g.size()) throw std::invalid_argument("choice table size mismatch");
        for (std::size_t v = 0; v < g.size(); ++v) {
            if (!owns(s.player, g.state(v).owner) || !has_out[v]) continue;
            const Choice& c = s.choices[k][v];
            if (!c) {
                if (k + 1 == s.choices.size()) throw std::invalid_argument("delay chosen at the horizon for '" + g.state(v).id + "'");
                if (g.state(v).urgent) throw std::invalid_argument("delay chosen at urgent state '" + g.state(v).id + "'");
            } else if (*c >= g.edges().size() || g.edges()[*c].from != v) {
                throw std::invalid_argument("choice for '" + g.state(v).id + "' is not one of its edges");
            }
        }
    }
}

struct PlayStep {
    std::size_t state;
    Rational arrival;
    Rational delay;
    std::optional<std::size_t> edge;
};

struct Play {
    std::vector<PlayStep> steps;
    bool reached_goal = false;
    ExtendedValue outcome;
};

// Edges chosen at the arrival interval are taken with zero delay; a delay runs
// to the next change point. Revisiting a state at an unchanged time is an
// infinite play.
inline Play play(const Game& g, const Strategy& smin, const Strategy& smax, std::size_t s0, const Rational& t0) {
    if (t0.sign() < 0 || t0 > g.horizon) throw std::out_of_range("start time outside the horizon");
    if (s0 >= g.size()) throw std::out_of_range("unknown start state");
    check_strategy(g, smin);
    check_strategy(g, smax);
    Play p;
    Rational t = t0, total = 0;
    std::size_t s = s0;
    std::set<std::size_t> seen_now;
    while (true) {
        const State& st = g.state(s);
        if (st.owner == Owner::Goal) {
            p.steps.push_back({s, t, 0, std::nullopt});
            p.reached_goal = true;
            p.outcome = total;
            return p;
        }
        if (!seen_now.insert(s).second) {
            p.outcome = ExtendedValue::infinity();
            return p;
        }
        const Strategy& sg = st.owner == Owner::Min ? smin : smax;
        std::size_t k = sg.interval_at(t);
        const Choice& c = sg.choices[k][s];
        if (c) {
            const Edge& e = g.edges()[*c];
            p.steps.push_back({s, t, 0, *c});
            total += e.cost;
            s = e.to;
        } else {
            if (k + 1 == sg.change_points.size()) { // stuck at a state without edges
                p.outcome = ExtendedValue::infinity();
                return p;
            }
            Rational next = sg.change_points[k + 1];
            Rational d = next - t;
            p.steps.push_back({s, t, d, std::nullopt});
            total += st.rate * d;
            t = next;
            seen_now.clear();
        }
    }
}

inline ExtendedValue play_outcome(const Game& g, const Strategy& smin, const Strategy& smax, std::size_t s0, const Rational& t0) {
    return play(g, smin, smax, s0, t0).outcome;
}

struct Assignment {
    std::vector<int> bits; // bits[k-1] is the value of variable k
    [[nodiscard]] std::size_t n() const { return bits.size(); }
    [[nodiscard]] bool operator()(int var) const { return bits.at(std::size_t(var - 1)) != 0; }
};

struct AssignmentTimes {
    Rational start, middle, end;
};

inline AssignmentTimes assignment_times(const Assignment& a) {
    Rational ts = 0;
    for (std::size_t k = 0; k < a.bits.size(); ++k) {
        if (a.bits[k] != 0 && a.bits[k] != 1) throw std::invalid_argument("assignment bits must be 0 or 1");
        if (a.bits[k]) ts += Rational::pow2(-int(k) - 1);
    }
    int n = int(a.bits.size());
    return {ts, ts + Rational::pow2(-n - 1), ts + Rational::pow2(-n)};
}

// All 2^n assignments in time order.
inline std::vector<Assignment> all_assignments(int n) {
    std::vector<Assignment> out;
    for (std::uint64_t m = 0; m < (std::uint64_t(1) << n); ++m) {
        Assignment a;
        a.bits.resize(std::size_t(n));
        for (int k = 0; k < n; ++k) a.bits[std::size_t(k)] = int((m >> (n - 1 - k)) & 1);
        out.push_back(std::move(a));
    }
    return out;
}

} // namespace sptg
