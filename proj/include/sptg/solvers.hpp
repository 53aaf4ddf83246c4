// Copyright (c) SPTG Toolkit contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sptg/game.hpp"
#include "sptg/priced.hpp"
#include "sptg/pwl.hpp"

namespace sptg {

class progress_error : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------
// Graph helpers. Edges leaving goal states are ignored throughout.

inline std::optional<std::vector<std::size_t>> topological_order(const Game& g) {
    std::vector<std::size_t> indeg(g.size(), 0);
    auto out = g.out_edges();
    for (std::size_t v = 0; v < g.size(); ++v)
        for (auto e : out[v]) ++indeg[g.edges()[e].to];
    std::vector<std::size_t> order, stack;
    for (std::size_t v = 0; v < g.size(); ++v)
        if (indeg[v] == 0) stack.push_back(v);
    while (!stack.empty()) {
        std::size_t v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (auto e : out[v])
            if (--indeg[g.edges()[e].to] == 0) stack.push_back(g.edges()[e].to);
    }
    if (order.size() != g.size()) return std::nullopt;
    return order;
}

inline bool is_acyclic(const Game& g) { return topological_order(g).has_value(); }

// Longest path (in edges) starting at each state.
inline std::vector<std::size_t> heights(const Game& g) {
    auto order = topological_order(g);
    if (!order) throw std::invalid_argument("game graph is cyclic");
    auto out = g.out_edges();
    std::vector<std::size_t> h(g.size(), 0);
    for (auto it = order->rbegin(); it != order->rend(); ++it)
        for (auto e : out[*it]) h[*it] = std::max(h[*it], h[g.edges()[e].to] + 1);
    return h;
}

inline std::size_t longest_path_length(const Game& g) {
    auto h = heights(g);
    return h.empty() ? 0 : *std::max_element(h.begin(), h.end());
}

// ---------------------------------------------------------------------------
// Value iteration.

namespace detail {

inline PwlFunction vi_update(const Game& g, std::size_t v, const std::vector<std::size_t>& out, const ValueMap& prev) {
    const State& st = g.state(v);
    if (st.owner == Owner::Goal) return PwlFunction::constant(0, g.horizon, 0);
    std::vector<Segment> segs;
    bool any_inf = false, any_fin = false;
    for (auto e : out) {
        const Edge& ed = g.edges()[e];
        const PwlFunction& fu = prev[ed.to];
        if (fu.is_infinite()) {
            any_inf = true;
            continue;
        }
        any_fin = true;
        PwlFunction sh = shift(fu, ed.cost);
        auto a = to_segments(sh, Tag(2 * e));
        segs.insert(segs.end(), a.begin(), a.end());
        if (!st.urgent) {
            auto w = wait_extension(sh, st.rate, Tag(2 * e + 1));
            segs.insert(segs.end(), w.begin(), w.end());
        }
    }
    if (st.owner == Owner::Max && (any_inf || out.empty())) return PwlFunction::infinite(0, g.horizon);
    if (!any_fin) return PwlFunction::infinite(0, g.horizon);
    return envelope(segs, st.owner == Owner::Min ? Side::Lower : Side::Upper);
}

inline ValueMap vi_round(const Game& g, const std::vector<std::vector<std::size_t>>& out, const ValueMap& prev) {
    ValueMap next;
    next.reserve(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) next.push_back(vi_update(g, v, out[v], prev));
    return next;
}

inline ValueMap vi_initial(const Game& g) {
    ValueMap f;
    for (const auto& s : g.states())
        f.push_back(s.owner == Owner::Goal ? PwlFunction::constant(0, g.horizon, 0) : PwlFunction::infinite(0, g.horizon));
    return f;
}

} // namespace detail

// Values of the k-step bounded game; rounds are Jacobi updates.
inline ValueMap value_iteration(const Game& g, std::size_t k) {
    require_valid(g);
    auto out = g.out_edges();
    ValueMap f = detail::vi_initial(g);
    for (std::size_t r = 0; r < k; ++r) f = detail::vi_round(g, out, f);
    return f;
}

// Iterates until two consecutive rounds agree; throws if `cap` rounds pass.
inline ValueMap value_iteration_fixpoint(const Game& g, std::size_t cap, std::size_t* rounds = nullptr) {
    require_valid(g);
    auto out = g.out_edges();
    ValueMap f = detail::vi_initial(g);
    for (std::size_t r = 0; r < cap; ++r) {
        ValueMap next = detail::vi_round(g, out, f);
        if (next == f) {
            if (rounds) *rounds = r;
            return f;
        }
        f = std::move(next);
    }
    throw std::runtime_error("value iteration did not reach a fixpoint within " + std::to_string(cap) + " rounds");
}

// ---------------------------------------------------------------------------
// Event-point iteration.

// Walks event points backwards from T. Only the current time and one
// (value, rate) pair per state are retained.
class EventPointStepper {
    const Game& g_;
    PricedSolver ps_;
    Rational t_;
    TerminalMap f_;
    PricedSolution sol_;
    Rational last_t_;
    Rational d_;

  public:
    explicit EventPointStepper(const Game& g) : g_(g), ps_(g), t_(g.horizon), f_(g.size()) {
        require_valid(g);
        for (const auto& s : g.states())
            if (s.urgent) throw std::invalid_argument("event-point iteration does not support urgent state '" + s.id + "'");
        PricedSolution at_end = ps_.solve();
        for (std::size_t v = 0; v < g.size(); ++v)
            if (at_end[v]) f_[v] = LexPair{at_end[v]->value, g.state(v).rate};
    }

    [[nodiscard]] const Rational& time() const { return t_; }
    [[nodiscard]] bool done() const { return t_.sign() <= 0; }
    [[nodiscard]] ExtendedValue current(std::size_t v) const {
        if (!f_[v]) return ExtendedValue::infinity();
        return f_[v]->value;
    }
    // Pair (x, y) in force on [time_before - delay, time_before] for the last step.
    [[nodiscard]] const PricedSolution& last_solution() const { return sol_; }
    [[nodiscard]] const Rational& last_delay() const { return d_; }
    [[nodiscard]] const Rational& last_time() const { return last_t_; }

    void step() {
        if (done()) throw std::logic_error("event-point iteration already reached time 0");
        sol_ = ps_.solve(f_);
        Rational d = t_;
        for (const auto& e : g_.edges()) {
            Owner o = g_.state(e.from).owner;
            if (o == Owner::Goal || !sol_[e.from] || !sol_[e.to]) continue;
            const LexPair& a = *sol_[e.from];
            Rational x2 = sol_[e.to]->value + e.cost;
            const Rational& y2 = sol_[e.to]->slope;
            if (o == Owner::Min && y2 < a.slope && x2 > a.value) {
                Rational c = (x2 - a.value) / (a.slope - y2);
                if (c < d) d = std::move(c);
            } else if (o == Owner::Max && y2 > a.slope && x2 < a.value) {
                Rational c = (a.value - x2) / (y2 - a.slope);
                if (c < d) d = std::move(c);
            }
        }
        if (d.sign() <= 0) throw progress_error("event-point iteration computed a non-positive delay at t=" + t_.str());
        for (std::size_t v = 0; v < g_.size(); ++v) {
            if (!sol_[v]) continue;
            f_[v] = LexPair{sol_[v]->value + sol_[v]->slope * d, g_.state(v).rate};
        }
        last_t_ = t_;
        t_ -= d;
        d_ = std::move(d);
    }
};

inline ValueMap event_point_iteration(const Game& g) {
    EventPointStepper st(g);
    std::vector<std::vector<Point>> pts(g.size());
    for (std::size_t v = 0; v < g.size(); ++v)
        if (st.current(v).is_finite()) pts[v].push_back({st.time(), st.current(v).value()});
    std::vector<std::optional<Rational>> slope(g.size());
    while (!st.done()) {
        st.step();
        for (std::size_t v = 0; v < g.size(); ++v) {
            if (!st.current(v).is_finite()) continue;
            const auto& sol = st.last_solution()[v];
            Point p{st.time(), st.current(v).value()};
            if (sol && slope[v] && *slope[v] == sol->slope) pts[v].back() = std::move(p);
            else pts[v].push_back(std::move(p));
            slope[v] = sol ? std::optional<Rational>(sol->slope) : std::nullopt;
        }
    }
    ValueMap out;
    out.reserve(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (pts[v].empty()) {
            out.push_back(PwlFunction::infinite(0, g.horizon));
            continue;
        }
        std::reverse(pts[v].begin(), pts[v].end());
        out.push_back(PwlFunction::from_points(std::move(pts[v])));
    }
    return out;
}

inline ExtendedValue value_at(const Game& g, const std::string& s, const Rational& t) {
    std::size_t v = g.index(s);
    if (t.sign() < 0 || t > g.horizon) throw std::out_of_range("time outside [0, T]");
    return event_point_iteration(g)[v].evaluate(t);
}

inline bool decide(const Game& g, const std::string& s, const Rational& t, const Rational& c) {
    return value_at(g, s, t) >= ExtendedValue(c);
}

inline std::set<std::size_t> infinite_states(const Game& g) {
    require_valid(g);
    auto sol = solve_priced(g);
    std::set<std::size_t> out;
    for (std::size_t v = 0; v < g.size(); ++v)
        if (!sol[v]) out.insert(v);
    return out;
}

inline ExtendedValue solve_dag_streaming(const Game& g, std::size_t s, const Rational& t) {
    if (!is_acyclic(g)) throw std::invalid_argument("streaming solver requires an acyclic game");
    if (s >= g.size()) throw std::out_of_range("unknown state");
    if (t.sign() < 0 || t > g.horizon) throw std::out_of_range("time outside [0, T]");
    EventPointStepper st(g);
    while (true) {
        if (st.time() == t) return st.current(s);
        st.step();
        if (st.time() <= t) {
            const auto& p = st.last_solution()[s];
            if (!p) return ExtendedValue::infinity();
            return p->value + p->slope * (st.last_time() - t);
        }
    }
}

// ---------------------------------------------------------------------------
// Undirected games.

inline ValueMap solve_undirected(const Game& g) {
    require_valid(g);
    std::multiset<std::tuple<std::size_t, std::size_t, Rational>> es;
    for (const auto& e : g.edges())
        if (g.state(e.from).owner != Owner::Goal && g.state(e.to).owner != Owner::Goal) es.insert({e.from, e.to, e.cost});
    for (const auto& [a, b, c] : es) {
        if (es.count({a, b, c}) != es.count({b, a, c}))
            throw std::invalid_argument("asymmetric edge " + g.state(a).id + "->" + g.state(b).id);
    }
    std::set<std::size_t> inf = infinite_states(g);
    for (const auto& e : g.edges())
        if (g.state(e.from).owner == Owner::Max && g.state(e.to).owner == Owner::Max) inf.insert(e.from), inf.insert(e.to);

    // Minimizer + goal part: minimizer moves into maximizer states are dropped.
    Game h;
    h.horizon = g.horizon;
    for (const auto& s : g.states()) h.add_state(s.id, s.owner, s.rate, s.urgent);
    for (const auto& e : g.edges()) {
        if (g.state(e.from).owner != Owner::Min || inf.count(e.from) || inf.count(e.to)) continue;
        if (g.state(e.to).owner == Owner::Max) continue;
        h.add_edge(e.from, e.to, e.cost);
    }
    for (std::size_t v = 0; v < g.size(); ++v)
        if (g.state(v).owner == Owner::Max) h.state_mut(v).urgent = false;
    ValueMap vm = event_point_iteration(h);
    auto out = g.out_edges();
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (inf.count(v)) {
            vm[v] = PwlFunction::infinite(0, g.horizon);
            continue;
        }
        if (g.state(v).owner != Owner::Max) continue;
        vm[v] = detail::vi_update(g, v, out[v], vm);
    }
    return vm;
}

// ---------------------------------------------------------------------------
// Event points and strategies.

// Every breakpoint time of every finite value function, including 0 and T.
inline std::vector<Rational> breakpoint_times(const ValueMap& vm) {
    std::set<Rational> ts;
    for (const auto& f : vm) {
        if (f.is_infinite()) {
            ts.insert(f.lo());
            ts.insert(f.hi());
            continue;
        }
        for (const auto& p : f.points()) ts.insert(p.t);
    }
    return {ts.begin(), ts.end()};
}

// Times in [0, T) at which some value function starts a new segment.
inline std::vector<Rational> event_points(const ValueMap& vm) {
    std::set<Rational> ts;
    for (const auto& f : vm) {
        if (f.is_infinite()) continue;
        const auto& p = f.points();
        for (std::size_t i = 0; i + 1 < p.size(); ++i) ts.insert(p[i].t);
    }
    return {ts.begin(), ts.end()};
}

inline std::size_t total_segments(const ValueMap& vm) {
    std::size_t n = 0;
    for (const auto& f : vm) n += f.segment_count();
    return n;
}

struct StrategyPair {
    Strategy min;
    Strategy max;
};

namespace detail {

inline std::vector<Choice> choice_table(const Game& g, const ValueMap& vm, const std::vector<std::vector<std::size_t>>& out,
                                        const Rational& a, const std::optional<Rational>& b) {
    const std::size_t n = g.size();
    std::vector<ExtendedValue> va(n), vb(n);
    for (std::size_t v = 0; v < n; ++v) {
        va[v] = vm[v].evaluate(a);
        if (b) vb[v] = vm[v].evaluate(*b);
    }
    std::vector<bool> wait_ok(n, false);
    std::vector<std::vector<std::size_t>> tight(n);
    for (std::size_t v = 0; v < n; ++v) {
        const State& st = g.state(v);
        if (st.owner == Owner::Goal || va[v].is_infinite()) continue;
        if (b && !st.urgent && (vb[v].value() - va[v].value()) == -(st.rate * (*b - a))) wait_ok[v] = true;
        for (auto e : out[v]) {
            const Edge& ed = g.edges()[e];
            if (va[ed.to].is_infinite()) continue;
            if (va[ed.to].value() + ed.cost != va[v].value()) continue;
            if (b && vb[ed.to].value() + ed.cost != vb[v].value()) continue;
            tight[v].push_back(e);
        }
    }
    constexpr std::size_t kNone = SIZE_MAX;
    std::vector<std::size_t> rank(n, kNone);
    for (std::size_t v = 0; v < n; ++v)
        if (g.state(v).owner == Owner::Goal || wait_ok[v]) rank[v] = 0;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t v = 0; v < n; ++v)
            for (auto e : tight[v]) {
                std::size_t r = rank[g.edges()[e].to];
                if (r != kNone && r + 1 < rank[v]) rank[v] = r + 1, changed = true;
            }
    }
    std::vector<Choice> table(n);
    for (std::size_t v = 0; v < n; ++v) {
        const State& st = g.state(v);
        if (st.owner == Owner::Goal) continue;
        if (va[v].is_infinite()) {
            // Stay inside the infinite region.
            for (auto e : out[v])
                if (st.owner == Owner::Min || va[g.edges()[e].to].is_infinite()) {
                    table[v] = e;
                    break;
                }
            continue;
        }
        if (wait_ok[v]) continue;
        std::optional<std::size_t> pick;
        for (auto e : tight[v]) {
            std::size_t r = rank[g.edges()[e].to];
            if (r == kNone) continue;
            if (!pick || r < rank[g.edges()[*pick].to]) pick = e;
        }
        if (!pick) throw std::invalid_argument("inconsistent value map at state '" + st.id + "', time " + a.str());
        table[v] = pick;
    }
    return table;
}

inline Strategy compress(Player p, const Game& g, const std::vector<Rational>& w, const std::vector<std::vector<Choice>>& tables) {
    Strategy s;
    s.player = p;
    auto same = [&](const std::vector<Choice>& x, const std::vector<Choice>& y) {
        for (std::size_t v = 0; v < g.size(); ++v)
            if (owns(p, g.state(v).owner) && x[v] != y[v]) return false;
        return true;
    };
    for (std::size_t i = 0; i < w.size(); ++i) {
        bool last = i + 1 == w.size();
        if (!last && i > 0 && same(tables[i], s.choices.back())) continue;
        s.change_points.push_back(w[i]);
        s.choices.push_back(tables[i]);
    }
    return s;
}

} // namespace detail

// Strategies read off the value map: on each interval between consecutive
// breakpoint times a state delays when its value falls at its own rate, and
// otherwise takes an edge that realizes its value and leads closest to a goal
// or a delaying state.
inline StrategyPair extract_optimal_strategies(const Game& g, const ValueMap& vm) {
    if (vm.size() != g.size()) throw std::invalid_argument("value map size does not match the game");
    auto w = breakpoint_times(vm);
    if (w.front().sign() != 0 || w.back() != g.horizon) throw std::invalid_argument("value map does not span [0, T]");
    auto out = g.out_edges();
    std::vector<std::vector<Choice>> tables;
    for (std::size_t i = 0; i < w.size(); ++i) {
        std::optional<Rational> b;
        if (i + 1 < w.size()) b = w[i + 1];
        tables.push_back(detail::choice_table(g, vm, out, w[i], b));
    }
    return {detail::compress(Player::Min, g, w, tables), detail::compress(Player::Max, g, w, tables)};
}

// ---------------------------------------------------------------------------
// Encoding checks.

enum class EncodingKind { Straight, Reverse };

struct EncodingParams {
    Rational v = 2;
    Rational vp;
    int n = 0;
    EncodingKind kind = EncodingKind::Straight;
};

using BoolFunction = std::function<bool(const Assignment&)>;

// Checks the band, pinning and peak (straight) or trough (reverse) conditions
// against the relative value f(t) + t/2. `why` receives the first violation.
inline bool encoding_check(const PwlFunction& f, const BoolFunction& F, const EncodingParams& p, std::string* why = nullptr) {
    auto fail = [&](std::string m) {
        if (why) *why = std::move(m);
        return false;
    };
    if (f.is_infinite()) return fail("value is infinite");
    if (f.lo().sign() != 0 || f.hi() != 1) return fail("encodings live on [0, 1]");
    const Rational half(1, 2);
    const bool straight = p.kind == EncodingKind::Straight;
    const Rational lo = straight ? p.v : p.v - p.vp;
    const Rational hi = straight ? p.v + p.vp : p.v;
    const Rational far = straight ? p.v + p.vp : p.v - p.vp;
    for (const auto& pt : f.points()) {
        Rational r = pt.v + pt.t * half;
        if (r < lo || r > hi) return fail("band violated at t=" + pt.t.str() + " (relative value " + r.str() + ")");
    }
    const auto& pts = f.points();
    for (const auto& a : all_assignments(p.n)) {
        auto tm = assignment_times(a);
        std::vector<Rational> rel;
        rel.push_back(f.evaluate(tm.start).value() + tm.start * half);
        rel.push_back(f.evaluate(tm.end).value() + tm.end * half);
        auto it = std::upper_bound(pts.begin(), pts.end(), tm.start, [](const Rational& x, const Point& q) { return x < q.t; });
        for (; it != pts.end() && it->t < tm.end; ++it) rel.push_back(it->v + it->t * half);
        bool val = F(a);
        std::string label = "assignment starting at t=" + tm.start.str();
        if (val != straight) { // pinned interval
            for (const auto& r : rel)
                if (r != p.v) return fail(label + " should be pinned to the base line");
        } else {
            if (rel[0] != p.v || rel[1] != p.v) return fail(label + " is not pinned at its ends");
            if (std::find(rel.begin(), rel.end(), far) == rel.end()) return fail(label + " never reaches the far band edge");
        }
    }
    return true;
}

} // namespace sptg
