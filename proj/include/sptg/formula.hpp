// Copyright (c) SPTG Toolkit contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sptg {

class formula_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Negation normal form: negations only on literals.
struct Formula {
    enum class Op { Lit, And, Or };
    Op op = Op::Lit;
    int var = 1;
    bool positive = true;
    std::vector<Formula> kids;

    static Formula lit(int v, bool pos = true) {
        if (v < 1) throw formula_error("variable indices start at 1");
        Formula f;
        f.var = v;
        f.positive = pos;
        return f;
    }
    static Formula gate(Op op, std::vector<Formula> kids) {
        if (op == Op::Lit) throw formula_error("gate needs AND or OR");
        if (kids.size() < 2) throw formula_error("gates need at least two children");
        Formula f;
        f.op = op;
        f.var = 0;
        f.kids = std::move(kids);
        return f;
    }
    static Formula conj(std::vector<Formula> kids) { return gate(Op::And, std::move(kids)); }
    static Formula disj(std::vector<Formula> kids) { return gate(Op::Or, std::move(kids)); }

    [[nodiscard]] bool eval(const std::function<bool(int)>& value) const {
        switch (op) {
        case Op::Lit: return value(var) == positive;
        case Op::And:
            for (const auto& k : kids)
                if (!k.eval(value)) return false;
            return true;
        default:
            for (const auto& k : kids)
                if (k.eval(value)) return true;
            return false;
        }
    }

    void collect_vars(std::set<int>& out) const {
        if (op == Op::Lit) out.insert(var);
        for (const auto& k : kids) k.collect_vars(out);
    }
    [[nodiscard]] std::set<int> vars() const {
        std::set<int> s;
        collect_vars(s);
        return s;
    }
    [[nodiscard]] int max_var() const {
        auto s = vars();
        return s.empty() ? 0 : *s.rbegin();
    }
    [[nodiscard]] std::size_t gate_count() const {
        std::size_t n = op == Op::Lit ? 0 : 1;
        for (const auto& k : kids) n += k.gate_count();
        return n;
    }

    [[nodiscard]] Formula renamed(const std::map<int, int>& m) const {
        if (op == Op::Lit) return lit(m.at(var), positive);
        Formula f = *this;
        for (auto& k : f.kids) k = k.renamed(m);
        return f;
    }

    [[nodiscard]] std::string str() const {
        if (op == Op::Lit) return positive ? "x" + std::to_string(var) : "(not x" + std::to_string(var) + ")";
        std::string s = op == Op::And ? "(and" : "(or";
        for (const auto& k : kids) s += " " + k.str();
        return s + ")";
    }

    friend bool operator==(const Formula&, const Formula&) = default;
};

struct QuantBlock {
    bool exists = true;
    std::vector<int> vars;
    friend bool operator==(const QuantBlock&, const QuantBlock&) = default;
};

struct Qbf {
    std::vector<QuantBlock> blocks;
    Formula matrix;

    void check() const {
        if (blocks.empty()) throw formula_error("quantifier prefix is empty");
        std::set<int> seen;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            if (blocks[i].vars.empty()) throw formula_error("empty quantifier block");
            if (i > 0 && blocks[i].exists == blocks[i - 1].exists) throw formula_error("quantifier blocks must alternate");
            for (int v : blocks[i].vars)
                if (!seen.insert(v).second) throw formula_error("variable x" + std::to_string(v) + " quantified twice");
        }
        for (int v : matrix.vars())
            if (!seen.count(v)) throw formula_error("free variable x" + std::to_string(v));
    }

    [[nodiscard]] std::string str() const {
        std::string pre, post;
        for (const auto& b : blocks) {
            pre += b.exists ? "(exists (" : "(forall (";
            for (std::size_t i = 0; i < b.vars.size(); ++i) pre += (i ? " x" : "x") + std::to_string(b.vars[i]);
            pre += ") ";
            post += ")";
        }
        return pre + matrix.str() + post;
    }
};

namespace detail {

inline bool qbf_rec(const Qbf& q, std::size_t block, std::size_t pos, std::map<int, bool>& asg) {
    if (block == q.blocks.size()) return q.matrix.eval([&](int v) { return asg.at(v); });
    const auto& b = q.blocks[block];
    if (pos == b.vars.size()) return qbf_rec(q, block + 1, 0, asg);
    bool any = false, all = true;
    for (bool val : {false, true}) {
        asg[b.vars[pos]] = val;
        bool r = qbf_rec(q, block, pos + 1, asg);
        any = any || r;
        all = all && r;
        if (b.exists ? any : !all) break;
    }
    asg.erase(b.vars[pos]);
    return b.exists ? any : all;
}

} // namespace detail

// Evaluates the quantified formula by enumerating assignments. Variables
// already fixed in `outer` are treated as free parameters.
inline bool brute_force_qbf(const Qbf& q, const std::map<int, bool>& outer = {}) {
    std::map<int, bool> asg = outer;
    return detail::qbf_rec(q, 0, 0, asg);
}

// --- parsing ---------------------------------------------------------------

namespace detail {

struct SExpr {
    std::string atom;
    std::vector<SExpr> list;
    bool is_list = false;
};

inline SExpr parse_sexpr(const std::string& s, std::size_t& i) {
    auto skip = [&] {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    };
    skip();
    if (i >= s.size()) throw formula_error("unexpected end of input");
    SExpr e;
    if (s[i] == '(') {
        e.is_list = true;
        ++i;
        while (true) {
            skip();
            if (i >= s.size()) throw formula_error("missing ')'");
            if (s[i] == ')') {
                ++i;
                break;
            }
            e.list.push_back(parse_sexpr(s, i));
        }
        return e;
    }
    if (s[i] == ')') throw formula_error("unexpected ')' at offset " + std::to_string(i));
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '(' && s[j] != ')') ++j;
    e.atom = s.substr(i, j - i);
    i = j;
    return e;
}

inline int parse_var(const std::string& a) {
    if (a.size() < 2 || a[0] != 'x' || !std::all_of(a.begin() + 1, a.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw formula_error("expected a variable like x3, got '" + a + "'");
    int v = std::stoi(a.substr(1));
    if (v < 1) throw formula_error("variable indices start at 1");
    return v;
}

inline Formula to_formula(const SExpr& e) {
    if (!e.is_list) return Formula::lit(parse_var(e.atom));
    if (e.list.empty() || e.list[0].is_list) throw formula_error("expected an operator");
    const std::string& op = e.list[0].atom;
    if (op == "not") {
        if (e.list.size() != 2 || e.list[1].is_list) throw formula_error("'not' applies to a single variable");
        return Formula::lit(parse_var(e.list[1].atom), false);
    }
    if (op != "and" && op != "or") throw formula_error("unknown operator '" + op + "'");
    std::vector<Formula> kids;
    for (std::size_t k = 1; k < e.list.size(); ++k) kids.push_back(to_formula(e.list[k]));
    return Formula::gate(op == "and" ? Formula::Op::And : Formula::Op::Or, std::move(kids));
}

inline void expect_end(const std::string& s, std::size_t i) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i != s.size()) throw formula_error("trailing input at offset " + std::to_string(i));
}

} // namespace detail

// Grammar: x3 | (not x3) | (and e e ...) | (or e e ...)
inline Formula parse_formula(const std::string& s) {
    std::size_t i = 0;
    auto e = detail::parse_sexpr(s, i);
    detail::expect_end(s, i);
    return detail::to_formula(e);
}

// Grammar: (forall (x1 x2) (exists (x3) body)); adjacent blocks of the same
// quantifier are merged.
inline Qbf parse_qbf(const std::string& s) {
    std::size_t i = 0;
    auto e = detail::parse_sexpr(s, i);
    detail::expect_end(s, i);
    Qbf q;
    const detail::SExpr* cur = &e;
    while (cur->is_list && cur->list.size() == 3 && !cur->list[0].is_list &&
           (cur->list[0].atom == "forall" || cur->list[0].atom == "exists")) {
        bool ex = cur->list[0].atom == "exists";
        if (!cur->list[1].is_list) throw formula_error("quantifier needs a variable list");
        std::vector<int> vs;
        for (const auto& a : cur->list[1].list) {
            if (a.is_list) throw formula_error("quantifier variable list must contain variables");
            vs.push_back(detail::parse_var(a.atom));
        }
        if (!q.blocks.empty() && q.blocks.back().exists == ex)
            q.blocks.back().vars.insert(q.blocks.back().vars.end(), vs.begin(), vs.end());
        else
            q.blocks.push_back({ex, vs});
        cur = &cur->list[2];
    }
    q.matrix = detail::to_formula(*cur);
    q.check();
    return q;
}

// DIMACS CNF as an NNF formula. Single-literal clauses stay literals and a
// single clause stays a disjunction.
inline Formula parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<int>> clauses;
    std::vector<int> cur;
    bool header = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "c") continue;
        if (tok == "p") {
            std::string fmt;
            ls >> fmt;
            if (fmt != "cnf") throw formula_error("only 'p cnf' is supported");
            header = true;
            continue;
        }
        std::istringstream ts(line);
        long long lit;
        while (ts >> lit) {
            if (lit == 0) {
                if (cur.empty()) throw formula_error("empty clause");
                clauses.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(int(lit));
            }
        }
    }
    if (!cur.empty()) clauses.push_back(cur);
    if (!header) throw formula_error("missing 'p cnf' header");
    if (clauses.empty()) throw formula_error("no clauses");
    std::vector<Formula> cs;
    for (const auto& c : clauses) {
        std::vector<Formula> ls;
        for (int l : c) ls.push_back(Formula::lit(l < 0 ? -l : l, l > 0));
        cs.push_back(ls.size() == 1 ? ls[0] : Formula::disj(ls));
    }
    return cs.size() == 1 ? cs[0] : Formula::conj(cs);
}

} // namespace sptg
