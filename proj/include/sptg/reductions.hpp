// Copyright (c) SPTG Toolkit contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sptg/formula.hpp"
#include "sptg/game.hpp"
#include "sptg/solvers.hpp"

namespace sptg {

class construction_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Exponential family.

namespace detail {

struct FamilyStates {
    std::vector<std::size_t> left, right; // indexed by level
};

// Level 0: goal on the left, maximizer (rate 1) on the right with an edge of
// cost `bottom` to the goal. Level k >= 1: minimizer (rate 1) on the left,
// maximizer (rate 0) on the right, each with an edge of cost level_cost(k)
// to the left state below and of cost 0 to the right state below.
template <class CostFn>
FamilyStates add_family(Game& g, int levels, CostFn level_cost, const Rational& bottom, const std::string& prefix) {
    FamilyStates f;
    f.left.push_back(g.add_state(prefix + "vl0", Owner::Goal));
    f.right.push_back(g.add_state(prefix + "vr0", Owner::Max, 1));
    g.add_edge(f.right[0], f.left[0], bottom);
    for (int k = 1; k <= levels; ++k) {
        std::size_t l = g.add_state(prefix + "vl" + std::to_string(k), Owner::Min, 1);
        std::size_t r = g.add_state(prefix + "vr" + std::to_string(k), Owner::Max, 0);
        Rational c = level_cost(k);
        for (std::size_t s : {l, r}) {
            g.add_edge(s, f.left[std::size_t(k - 1)], c);
            g.add_edge(s, f.right[std::size_t(k - 1)], 0);
        }
        f.left.push_back(l);
        f.right.push_back(r);
    }
    return f;
}

} // namespace detail

// States are ordered vl0, vr0, vl1, vr1, ...
inline Game gen_exp_family(int i) {
    if (i < 0) throw std::invalid_argument("family level must be nonnegative");
    Game g;
    detail::add_family(g, i, [](int k) { return Rational::pow2(-k); }, Rational(0), "");
    return g;
}

// Level k: 2^k segments of length 2^-k with slopes alternating; the left
// state starts at 1 - 2^-k with slope 0, the right state at 1 with slope -1.
inline ValueMap family_closed_form(int i) {
    if (i < 0) throw std::invalid_argument("family level must be nonnegative");
    ValueMap vm;
    for (int k = 0; k <= i; ++k) {
        Rational len = Rational::pow2(-k);
        for (int side = 0; side < 2; ++side) {
            std::vector<Point> pts;
            Rational t = 0, v = side == 0 ? 1 - len : Rational(1);
            pts.push_back({t, v});
            for (std::int64_t s = 0; s < (std::int64_t(1) << k); ++s) {
                bool falling = (s % 2 == 1) == (side == 0);
                t += len;
                if (falling) v -= len;
                pts.push_back({t, v});
            }
            vm.push_back(PwlFunction::from_points(std::move(pts)));
        }
    }
    return vm;
}

// ---------------------------------------------------------------------------
// Game transforms.

inline Game scale_currency(const Game& g, const Rational& factor) {
    if (factor.sign() <= 0) throw std::invalid_argument("currency factor must be positive");
    Game r = g;
    for (std::size_t v = 0; v < r.size(); ++v) r.state_mut(v).rate *= factor;
    for (std::size_t e = 0; e < r.edges().size(); ++e) r.edge_mut(e).cost *= factor;
    return r;
}

// Game over [0, 1] whose values are val(v, a + (b - a) t). Every state with a
// finite value at b gets a way out worth exactly that value at the end:
// maximizers through a direct goal edge, minimizers through a maximizer exit
// holding at the largest rate.
inline Game restrict_time(const Game& g, const Rational& a, const Rational& b) {
    if (a.sign() < 0 || !(a < b) || b > g.horizon) throw std::invalid_argument("degenerate restriction interval");
    ValueMap vm = event_point_iteration(g);
    Rational w = b - a;
    Game r;
    r.horizon = 1;
    for (const auto& s : g.states()) r.add_state(s.id, s.owner, s.rate * w, s.urgent);
    for (const auto& e : g.edges()) r.add_edge(e.from, e.to, e.cost);
    Rational top = g.max_rate() * w;
    for (std::size_t v = 0; v < g.size(); ++v) {
        const State& s = g.state(v);
        if (s.owner == Owner::Goal || vm[v].is_infinite()) continue;
        Rational end = vm[v].evaluate(b).value();
        std::size_t goal = r.add_state(s.id + "@end", Owner::Goal);
        if (s.owner == Owner::Max) {
            r.add_edge(v, goal, end);
        } else {
            std::size_t exit = r.add_state(s.id + "@exit", Owner::Max, top);
            r.add_edge(v, exit, 0);
            r.add_edge(exit, goal, end);
        }
    }
    return r;
}

// Time unit 2^-i: horizon and costs scale by 2^i, rates stay.
inline Game rescale_integer(const Game& g, int i) {
    if (i < 0) throw std::invalid_argument("rescale exponent must be nonnegative");
    Rational f = Rational::pow2(i);
    Game r = g;
    r.horizon *= f;
    for (std::size_t e = 0; e < r.edges().size(); ++e) {
        Rational c = r.edges()[e].cost * f;
        if (!c.is_integer()) throw std::invalid_argument("cost " + g.edges()[e].cost.str() + " is not a multiple of 2^-" + std::to_string(i));
        r.edge_mut(e).cost = c;
    }
    return r;
}

// Incoming edges of a state with in-degree k >= 2 are spread over a chain of
// k - 1 maximizer companions of rate 0 (ids s', s'', ...), each taking at most
// two edges. Out-degree must be at most 2.
inline Game to_degree3(const Game& g) {
    std::vector<std::size_t> out(g.size(), 0);
    std::vector<std::vector<std::size_t>> in(g.size());
    for (std::size_t e = 0; e < g.edges().size(); ++e) ++out[g.edges()[e].from], in[g.edges()[e].to].push_back(e);
    for (std::size_t v = 0; v < g.size(); ++v)
        if (out[v] > 2) throw std::invalid_argument("state '" + g.state(v).id + "' has out-degree above 2");
    Game r;
    r.horizon = g.horizon;
    for (const auto& s : g.states()) r.add_state(s.id, s.owner, s.rate, s.urgent);
    std::vector<std::size_t> target(g.edges().size());
    for (std::size_t v = 0; v < g.size(); ++v) {
        const auto& es = in[v];
        if (es.size() < 2) {
            for (auto e : es) target[e] = v;
            continue;
        }
        std::size_t below = v;
        std::string id = g.state(v).id;
        for (std::size_t k = 0; k + 1 < es.size(); ++k) {
            id += "'";
            while (g.find(id) || r.find(id)) id += "'";
            std::size_t c = r.add_state(id, Owner::Max, 0);
            r.add_edge(c, below, 0);
            target[es[k]] = c;
            below = c;
        }
        target[es.back()] = below;
    }
    for (std::size_t e = 0; e < g.edges().size(); ++e) r.add_edge(g.edges()[e].from, target[e], g.edges()[e].cost);
    return r;
}

inline Game make_urgent(const Game& g, const std::set<std::string>& ids) {
    Game r = g;
    for (const auto& id : ids) {
        std::size_t v = r.index(id);
        if (r.state(v).owner == Owner::Goal) throw std::invalid_argument("goal state '" + id + "' cannot be urgent");
        r.state_mut(v).urgent = true;
    }
    return r;
}

struct GadgetResult {
    Game game;
    std::size_t state = 0;
};

// Adds a minimizer v' (rate M+1) with a free edge to v and a goal edge of cost
// (c + c')/2; val(v', 0) = c' exactly when val(v, 0) = c'.
inline GadgetResult promise_to_strategy(const Game& g, const std::string& v, const Rational& c, const Rational& cp) {
    if (!(cp < c)) throw std::invalid_argument("promise needs c > c'");
    GadgetResult r{g, 0};
    std::size_t src = r.game.index(v);
    std::string base = v + "'";
    while (r.game.find(base)) base += "'";
    r.state = r.game.add_state(base, Owner::Min, g.max_rate() + 1);
    std::size_t goal = r.game.add_state(base + "@goal", Owner::Goal);
    r.game.add_edge(r.state, src, 0);
    r.game.add_edge(r.state, goal, (c + cp) / 2);
    return r;
}

// ---------------------------------------------------------------------------
// Boolean encodings.

// Variable gadget for x_i (or its negation): a family with i+1 levels and
// doubled level costs, an attachment state, a bounding state L with value
// 2 - t/2, and the output state s*. Encodes with v = 2, v' = 2^-i-2.
inline std::size_t add_variable_gadget(Game& g, int i, bool positive, EncodingKind kind, const std::string& prefix) {
    if (i < 1) throw std::invalid_argument("variable index must be at least 1");
    auto fam = detail::add_family(g, i + 1, [](int k) { return Rational::pow2(1 - k); }, 1 - Rational::pow2(-i - 1), prefix);
    std::size_t att = g.add_state(prefix + "att", Owner::Max, 0);
    if (positive) g.add_edge(att, fam.right.back(), Rational::pow2(-i - 1));
    else g.add_edge(att, fam.left.back(), Rational::pow2(-i));
    std::size_t goal = g.add_state(prefix + "goalL", Owner::Goal);
    std::size_t L = g.add_state(prefix + "L", Owner::Max, Rational(1, 2));
    g.add_edge(L, goal, Rational(3, 2));
    std::size_t s = kind == EncodingKind::Straight ? g.add_state(prefix + "s*", Owner::Max, 0) : g.add_state(prefix + "s*", Owner::Min, 1);
    g.add_edge(s, L, 0);
    g.add_edge(s, att, 0);
    return s;
}

// The same gadget obtained by restricting a standard family (i+1 levels plus
// the attachment) to [a, a + 1/2] and doubling the currency.
inline GadgetResult variable_gadget_via_restriction(int i, bool positive, EncodingKind kind, const Rational& a) {
    if (i < 1) throw std::invalid_argument("variable index must be at least 1");
    Game base;
    auto fam = detail::add_family(base, i + 1, [](int k) { return Rational::pow2(-k); }, Rational(0), "");
    std::size_t att = base.add_state("att", Owner::Max, 0);
    if (positive) base.add_edge(att, fam.right.back(), Rational::pow2(-i - 2));
    else base.add_edge(att, fam.left.back(), Rational::pow2(-i - 1));
    Game g = scale_currency(restrict_time(base, a, a + Rational(1, 2)), 2);
    std::size_t goal = g.add_state("goalL", Owner::Goal);
    std::size_t L = g.add_state("L", Owner::Max, Rational(1, 2));
    g.add_edge(L, goal, Rational(3, 2));
    std::size_t s = kind == EncodingKind::Straight ? g.add_state("s*", Owner::Max, 0) : g.add_state("s*", Owner::Min, 1);
    g.add_edge(s, L, 0);
    g.add_edge(s, att, 0);
    return {std::move(g), s};
}

inline BoolFunction literal_function(int i, bool positive) {
    return [i, positive](const Assignment& a) { return a(i) == positive; };
}

inline BoolFunction formula_function(const Formula& f) {
    return [f](const Assignment& a) { return f.eval([&](int v) { return a(v); }); };
}

inline EncodingParams base_params(int n, EncodingKind kind) { return {2, Rational::pow2(-n - 2), n, kind}; }

// With `verify`, the gadget is solved and checked; on failure the restriction
// pipeline is tried before giving up.
inline GadgetResult gen_variable_gadget(int i, bool positive, EncodingKind kind, bool verify = true) {
    GadgetResult r;
    r.state = add_variable_gadget(r.game, i, positive, kind, "");
    if (!verify) return r;
    auto params = base_params(i, kind);
    auto ok = [&](const GadgetResult& x) {
        return encoding_check(event_point_iteration(x.game)[x.state], literal_function(i, positive), params);
    };
    if (ok(r)) return r;
    auto alt = variable_gadget_via_restriction(i, positive, kind, Rational::pow2(-i - 2));
    if (ok(alt)) return alt;
    throw construction_error("variable gadget for x" + std::to_string(i) + " fails its encoding check");
}

namespace detail {

class FormulaBuilder {
    Game& g_;
    EncodingKind kind_;
    std::string prefix_;
    int counter_ = 0;

  public:
    FormulaBuilder(Game& g, EncodingKind kind, std::string prefix) : g_(g), kind_(kind), prefix_(std::move(prefix)) {}

    std::size_t build(const Formula& f) {
        if (f.op == Formula::Op::Lit) {
            std::string p = prefix_ + "lit" + std::to_string(counter_++) + (f.positive ? ".x" : ".nx") + std::to_string(f.var) + ".";
            return add_variable_gadget(g_, f.var, f.positive, kind_, p);
        }
        std::vector<std::size_t> kids;
        for (const auto& k : f.kids) kids.push_back(build(k));
        bool conj = f.op == Formula::Op::And;
        std::size_t s = g_.add_state(prefix_ + (conj ? "and" : "or") + std::to_string(counter_++), conj ? Owner::Min : Owner::Max,
                                     conj ? 1 : 0);
        for (auto k : kids) g_.add_edge(s, k, 0);
        return s;
    }
};

} // namespace detail

// Encodes F (n time variables) with v = 2, v' = 2^-n-2: literal gadgets per
// occurrence, minimizer AND / maximizer OR gates, wrapped as F AND (x_n OR
// NOT x_n) for straight and F OR (x_n AND NOT x_n) for reverse encodings.
inline std::size_t add_formula(Game& g, const Formula& f, int n, EncodingKind kind, const std::string& prefix) {
    if (f.max_var() > n) throw formula_error("formula mentions a variable above n");
    Formula wrapped;
    if (kind == EncodingKind::Straight)
        wrapped = Formula::conj({f, Formula::disj({Formula::lit(n), Formula::lit(n, false)})});
    else
        wrapped = Formula::disj({f, Formula::conj({Formula::lit(n), Formula::lit(n, false)})});
    return detail::FormulaBuilder(g, kind, prefix).build(wrapped);
}

inline GadgetResult compile_formula(const Formula& f, int n, EncodingKind kind) {
    GadgetResult r;
    r.state = add_formula(r.game, f, n, kind, "");
    return r;
}

// ---------------------------------------------------------------------------
// Quantified formulas.

enum class OuterMode { Horizontal, Decaying };

// An intermediate state encoding the suffix of the prefix starting at
// `first_block` over time variables 1..params.n.
struct ReductionStage {
    std::size_t state = 0;
    EncodingParams params;
    std::size_t first_block = 0;
};

struct ReductionOutput {
    Game game;
    std::size_t query = 0;
    EncodingParams params;      // of the state the query extends
    Rational true_value;        // value at time 0 when the formula holds
    Rational false_value;       // value at time 0 when it does not
    bool exact = true;          // false: true_value / false_value are bounds
    std::map<int, int> var_index; // formula variable -> time variable
    std::vector<ReductionStage> stages;
};

inline std::pair<Rational, Rational> decision_pair(const ReductionOutput& r) { return {r.true_value, r.false_value}; }
inline Rational decision_threshold(const ReductionOutput& r) { return (r.true_value + r.false_value) / 2; }

// Truth function of a stage over its time variables.
inline BoolFunction stage_function(const Qbf& q, const ReductionOutput& r, const ReductionStage& st) {
    Qbf suffix;
    suffix.blocks.assign(q.blocks.begin() + std::ptrdiff_t(st.first_block), q.blocks.end());
    suffix.matrix = q.matrix;
    std::map<int, int> fixed; // formula variable -> time variable
    for (std::size_t b = 0; b < st.first_block; ++b)
        for (int v : q.blocks[b].vars) fixed[v] = r.var_index.at(v);
    return [suffix, fixed](const Assignment& a) {
        std::map<int, bool> outer;
        for (const auto& [v, t] : fixed) outer[v] = a(t);
        return brute_force_qbf(suffix, outer);
    };
}

namespace detail {

inline Rational decay(const Rational& vp, int S) { return vp * Rational::pow2(S - 1) * Rational(2, 5); }

} // namespace detail

// Alternations are chained from the innermost block outwards. Each inner
// block j (first time variable S) gets a detector on the current encoding and
// two padding variables, a decaying extender, a limiter capping at the new
// base line, and an output state that flips the encoding kind. Two time
// variables are skipped at every alternation.
inline ReductionOutput compile_qbf(const Qbf& q, OuterMode mode = OuterMode::Horizontal) {
    q.check();
    ReductionOutput out;
    Game& g = out.game;
    const std::size_t m = q.blocks.size();
    std::vector<int> S;
    int cur = 0;
    for (std::size_t j = 0; j < m; ++j) {
        if (j > 0) cur += 2;
        S.push_back(cur + 1);
        for (int v : q.blocks[j].vars) out.var_index[v] = ++cur;
    }
    int N = cur;
    if (m > 1) N = std::max(N, S.back() + 1);
    Formula matrix = q.matrix.renamed(out.var_index);
    Rational vp = Rational::pow2(-N - 2), v = 2;
    EncodingKind kind = q.blocks.back().exists ? EncodingKind::Straight : EncodingKind::Reverse;
    std::size_t s = add_formula(g, matrix, N, kind, "m.");
    out.stages.push_back({s, {v, vp, N, kind}, m});
    if (m > 1) {
        std::size_t w = g.add_state("base", Owner::Max, 0);
        g.add_edge(w, s, vp);
        s = w;
        v += vp;
    }
    const Rational half(1, 2);
    for (std::size_t j = m - 1; j >= 1; --j) {
        int Sj = S[j];
        std::string p = "b" + std::to_string(j) + ".";
        bool ex = q.blocks[j].exists; // current encoding is straight iff ex
        std::size_t c = g.add_state(p + "det", ex ? Owner::Min : Owner::Max, ex ? 1 : 0);
        g.add_edge(c, s, 0);
        for (int pad : {Sj - 1, Sj - 2}) {
            std::size_t gad = add_variable_gadget(g, pad, ex, ex ? EncodingKind::Straight : EncodingKind::Reverse,
                                                  p + "pad" + std::to_string(pad) + ".");
            g.add_edge(c, gad, v - 2);
        }
        Rational dec = detail::decay(vp, Sj);
        std::size_t x = g.add_state(p + "ext", ex ? Owner::Max : Owner::Min, ex ? half - dec : half + dec);
        g.add_edge(x, c, 0);
        Rational vi = ex ? v + vp / 2 : v - vp / 2, vpi = vp / 2;
        std::size_t lim = g.add_state(p + "lim", ex ? Owner::Min : Owner::Max, ex ? 1 : 0);
        std::size_t aux = g.add_state(p + "aux", Owner::Max, half);
        std::size_t lg = g.add_state(p + "goal", Owner::Goal);
        g.add_edge(lim, x, 0);
        g.add_edge(lim, aux, 0);
        g.add_edge(aux, lg, vi - half);
        Formula chain = ex ? Formula::disj({Formula::lit(Sj + 1, false), Formula::lit(Sj, false), Formula::lit(Sj - 1),
                                            Formula::lit(Sj - 2, false)})
                           : Formula::conj({Formula::lit(Sj + 1), Formula::lit(Sj), Formula::lit(Sj - 1, false), Formula::lit(Sj - 2)});
        std::size_t r = add_formula(g, chain, Sj + 1, ex ? EncodingKind::Reverse : EncodingKind::Straight, p + "r.");
        std::size_t o = g.add_state(p + "out", ex ? Owner::Max : Owner::Min, ex ? 0 : 1);
        g.add_edge(o, lim, 0);
        g.add_edge(o, r, vi - 2);
        s = o;
        v = vi;
        vp = vpi;
        kind = ex ? EncodingKind::Reverse : EncodingKind::Straight;
        out.stages.push_back({s, {v, vp, Sj - 3, kind}, j});
    }
    bool ex = q.blocks[0].exists;
    Rational rate = half;
    Rational dec = 0;
    if (mode == OuterMode::Decaying) {
        dec = detail::decay(vp, 1);
        rate = ex ? half - dec : half + dec;
        out.exact = false;
    }
    out.query = g.add_state("query", ex ? Owner::Max : Owner::Min, rate);
    g.add_edge(out.query, s, 0);
    out.params = {v, vp, S.size() > 1 ? S[1] - 3 : N, kind};
    if (ex) {
        out.true_value = v + vp - dec;
        out.false_value = v;
    } else {
        out.true_value = v;
        out.false_value = v - vp + dec;
    }
    return out;
}

inline Qbf single_block(const Formula& f, bool exists) {
    Qbf q;
    auto vs = f.vars();
    q.blocks.push_back({exists, {vs.begin(), vs.end()}});
    q.matrix = f;
    return q;
}

// Satisfiability: query value 2 + 2^-n-2 iff satisfiable, else 2.
inline ReductionOutput reduce_sat(const Formula& f) { return compile_qbf(single_block(f, true)); }
// Validity: query value 2 iff a tautology, else 2 - 2^-n-2.
inline ReductionOutput reduce_validity(const Formula& f) { return compile_qbf(single_block(f, false)); }

} // namespace sptg
