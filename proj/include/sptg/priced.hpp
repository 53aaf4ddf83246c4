// Copyright (c) SPTG Toolkit contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <compare>
#include <functional>
#include <optional>
#include <vector>

#include "sptg/game.hpp"

namespace sptg {

// (value, slope), compared lexicographically.
struct LexPair {
    Rational value;
    Rational slope;
    friend bool operator==(const LexPair&, const LexPair&) = default;
    friend std::strong_ordering operator<=>(const LexPair& a, const LexPair& b) {
        if (auto c = a.value <=> b.value; c != 0) return c;
        return a.slope <=> b.slope;
    }
};

// nullopt is +inf.
using PricedSolution = std::vector<std::optional<LexPair>>;
using TerminalMap = std::vector<std::optional<LexPair>>;

// Two-player Dijkstra over lexicographic pairs. Minimizer states are settled
// greedily; a maximizer state is settled once every successor is, with the
// largest option. Never-settled states are +inf.
class PricedSolver {
    const Game& g_;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> preds_; // (pred, edge)
    std::vector<std::size_t> outdeg_;

  public:
    explicit PricedSolver(const Game& g) : g_(g), preds_(g.size()), outdeg_(g.size(), 0) {
        for (std::size_t e = 0; e < g.edges().size(); ++e) {
            const Edge& ed = g.edges()[e];
            if (g.state(ed.from).owner == Owner::Goal) continue;
            preds_[ed.to].push_back({ed.from, e});
            ++outdeg_[ed.from];
        }
    }

    [[nodiscard]] PricedSolution solve(const TerminalMap& terminal = {}) const {
        const std::size_t n = g_.size();
        PricedSolution val(n);
        std::vector<char> done(n, 0);
        std::vector<std::size_t> pending = outdeg_;
        std::vector<std::optional<LexPair>> best(n);
        // Heap entries index into keys; ties break on the state index.
        std::vector<LexPair> keys;
        std::vector<std::pair<std::size_t, std::size_t>> pq; // (key, state)
        auto later = [&keys](const auto& a, const auto& b) {
            if (auto c = keys[a.first] <=> keys[b.first]; c != 0) return c > 0;
            return a.second > b.second;
        };
        auto push = [&](LexPair k, std::size_t v) {
            keys.push_back(std::move(k));
            pq.push_back({keys.size() - 1, v});
            std::push_heap(pq.begin(), pq.end(), later);
        };
        for (std::size_t v = 0; v < n; ++v) {
            Owner o = g_.state(v).owner;
            if (o == Owner::Goal) {
                push({0, 0}, v);
            } else if (v < terminal.size() && terminal[v]) {
                best[v] = terminal[v];
                if (o == Owner::Min || pending[v] == 0) push(*terminal[v], v);
            }
        }
        while (!pq.empty()) {
            std::pop_heap(pq.begin(), pq.end(), later);
            auto [k, u] = pq.back();
            pq.pop_back();
            if (done[u]) continue;
            done[u] = 1;
            val[u] = std::move(keys[k]);
            const LexPair& key = *val[u];
            for (const auto& [p, e] : preds_[u]) {
                if (done[p]) continue;
                LexPair cand{key.value + g_.edges()[e].cost, key.slope};
                if (g_.state(p).owner == Owner::Min) {
                    if (!best[p] || cand < *best[p]) {
                        best[p] = cand;
                        push(std::move(cand), p);
                    }
                } else {
                    if (!best[p] || *best[p] < cand) best[p] = std::move(cand);
                    if (--pending[p] == 0) push(*best[p], p);
                }
            }
        }
        return val;
    }
};

inline PricedSolution solve_priced(const Game& g, const TerminalMap& terminal = {}) { return PricedSolver(g).solve(terminal); }

} // namespace sptg
