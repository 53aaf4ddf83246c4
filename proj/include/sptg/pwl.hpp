// Copyright (c) SPTG Toolkit contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sptg/rational.hpp"

namespace sptg {

struct Point {
    Rational t;
    Rational v;
    friend bool operator==(const Point&, const Point&) = default;
};

using Tag = std::int64_t;

struct Segment {
    Point a; // left endpoint
    Point b; // right endpoint
    Tag tag = 0;

    [[nodiscard]] bool degenerate() const { return a.t == b.t; }
    [[nodiscard]] Rational at(const Rational& t) const {
        if (degenerate()) return a.v;
        return a.v + (b.v - a.v) * (t - a.t) / (b.t - a.t);
    }
};

class coverage_error : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

enum class Side { Lower, Upper };

namespace detail {
inline bool collinear(const Point& p, const Point& q, const Point& r) {
    return (q.v - p.v) * (r.t - q.t) == (r.v - q.v) * (q.t - p.t);
}
} // namespace detail

// Continuous piecewise-linear function on [lo, hi], or uniformly +inf there.
class PwlFunction {
    Rational lo_ = 0;
    Rational hi_ = 1;
    bool inf_ = false;
    std::vector<Point> pts_;

  public:
    PwlFunction() : pts_{{0, 0}, {1, 0}} {}

    static PwlFunction infinite(Rational lo, Rational hi) {
        PwlFunction f;
        f.lo_ = std::move(lo);
        f.hi_ = std::move(hi);
        f.inf_ = true;
        f.pts_.clear();
        return f;
    }
    static PwlFunction constant(const Rational& lo, const Rational& hi, const Rational& v) {
        if (lo == hi) return from_points({{lo, v}});
        return from_points({{lo, v}, {hi, v}});
    }
    // Times must be strictly increasing. Collinear interior points are dropped.
    static PwlFunction from_points(std::vector<Point> pts) {
        if (pts.empty()) throw std::invalid_argument("piecewise-linear function needs at least one point");
        for (std::size_t i = 1; i < pts.size(); ++i)
            if (!(pts[i - 1].t < pts[i].t)) throw std::invalid_argument("breakpoint times must be strictly increasing");
        PwlFunction f;
        f.lo_ = pts.front().t;
        f.hi_ = pts.back().t;
        f.pts_.clear();
        f.pts_.reserve(pts.size());
        for (auto& p : pts) {
            while (f.pts_.size() >= 2 && detail::collinear(f.pts_[f.pts_.size() - 2], f.pts_.back(), p)) f.pts_.pop_back();
            f.pts_.push_back(std::move(p));
        }
        return f;
    }

    [[nodiscard]] bool is_infinite() const { return inf_; }
    [[nodiscard]] const Rational& lo() const { return lo_; }
    [[nodiscard]] const Rational& hi() const { return hi_; }
    [[nodiscard]] const std::vector<Point>& points() const { return pts_; }
    [[nodiscard]] std::size_t segment_count() const { return pts_.size() < 2 ? 0 : pts_.size() - 1; }

    [[nodiscard]] ExtendedValue evaluate(const Rational& t) const {
        if (t < lo_ || t > hi_) throw std::out_of_range("time " + t.str() + " outside [" + lo_.str() + "," + hi_.str() + "]");
        if (inf_) return ExtendedValue::infinity();
        auto it = std::lower_bound(pts_.begin(), pts_.end(), t, [](const Point& p, const Rational& x) { return p.t < x; });
        if (it->t == t) return it->v;
        const Point& r = *it;
        const Point& l = *(it - 1);
        return l.v + (r.v - l.v) * (t - l.t) / (r.t - l.t);
    }

    // Slope of the piece starting at t (t < hi).
    [[nodiscard]] Rational slope_after(const Rational& t) const {
        if (inf_ || pts_.size() < 2) return 0;
        auto it = std::upper_bound(pts_.begin(), pts_.end(), t, [](const Rational& x, const Point& p) { return x < p.t; });
        if (it == pts_.end()) --it;
        if (it == pts_.begin()) ++it;
        const Point& r = *it;
        const Point& l = *(it - 1);
        return (r.v - l.v) / (r.t - l.t);
    }

    friend bool operator==(const PwlFunction& a, const PwlFunction& b) {
        if (a.lo_ != b.lo_ || a.hi_ != b.hi_ || a.inf_ != b.inf_) return false;
        return a.pts_ == b.pts_;
    }
};

inline ExtendedValue evaluate(const PwlFunction& f, const Rational& t) { return f.evaluate(t); }

inline bool equals(const PwlFunction& f, const PwlFunction& g) { return f == g; }

inline PwlFunction shift(const PwlFunction& f, const Rational& c) {
    if (c.sign() < 0) throw std::invalid_argument("shift by a negative amount");
    if (f.is_infinite()) return f;
    std::vector<Point> pts = f.points();
    for (auto& p : pts) p.v += c;
    return PwlFunction::from_points(std::move(pts));
}

// The pieces of f as tagged segments.
inline std::vector<Segment> to_segments(const PwlFunction& f, Tag tag) {
    std::vector<Segment> out;
    if (f.is_infinite()) return out;
    const auto& p = f.points();
    if (p.size() == 1) out.push_back({p[0], p[0], tag});
    for (std::size_t i = 1; i < p.size(); ++i) out.push_back({p[i - 1], p[i], tag});
    return out;
}

// For each breakpoint (x, y): the segment (lo, y + rate*(x-lo)) - (x, y).
inline std::vector<Segment> wait_extension(const PwlFunction& f, const Rational& rate, Tag tag = 0) {
    if (rate.sign() < 0) throw std::invalid_argument("negative rate");
    std::vector<Segment> out;
    if (f.is_infinite()) return out;
    for (const auto& p : f.points()) out.push_back({{f.lo(), p.v + rate * (p.t - f.lo())}, p, tag});
    return out;
}

// One maximal piece of an envelope, with the tag of the input it came from.
struct EnvelopePiece {
    Rational t0, v0, t1, v1;
    Tag tag = 0;
    [[nodiscard]] Rational at(const Rational& t) const { return v0 + (v1 - v0) * (t - t0) / (t1 - t0); }
};

namespace detail {

inline bool better(const Rational& a, const Rational& b, Side side) { return side == Side::Lower ? a < b : b < a; }

inline void push_piece(std::vector<EnvelopePiece>& out, EnvelopePiece p) {
    if (!out.empty()) {
        auto& last = out.back();
        if (last.tag == p.tag && last.t1 == p.t0 && last.v1 == p.v0 &&
            (last.v1 - last.v0) * (p.t1 - p.t0) == (p.v1 - p.v0) * (last.t1 - last.t0)) {
            last.t1 = std::move(p.t1);
            last.v1 = std::move(p.v1);
            return;
        }
    }
    out.push_back(std::move(p));
}

inline EnvelopePiece sub_piece(const EnvelopePiece& p, const Rational& a, const Rational& b) {
    return {a, a == p.t0 ? p.v0 : p.at(a), b, b == p.t1 ? p.v1 : p.at(b), p.tag};
}

// Pointwise merge of two sorted, internally disjoint piece lists. Linear in
// the number of pieces; crossings inside an elementary interval are split.
inline std::vector<EnvelopePiece> merge(const std::vector<EnvelopePiece>& A, const std::vector<EnvelopePiece>& B, Side side) {
    std::vector<EnvelopePiece> out;
    out.reserve(A.size() + B.size());
    std::size_t i = 0, j = 0;
    if (A.empty()) return B;
    if (B.empty()) return A;
    Rational t = min(A[0].t0, B[0].t0);
    while (i < A.size() || j < B.size()) {
        while (i < A.size() && A[i].t1 <= t) ++i;
        while (j < B.size() && B[j].t1 <= t) ++j;
        if (i == A.size() && j == B.size()) break;
        bool a_on = i < A.size() && A[i].t0 <= t;
        bool b_on = j < B.size() && B[j].t0 <= t;
        if (!a_on && !b_on) {
            if (i < A.size() && j < B.size()) t = min(A[i].t0, B[j].t0);
            else t = i < A.size() ? A[i].t0 : B[j].t0;
            continue;
        }
        Rational next;
        bool have = false;
        auto consider = [&](const Rational& x) {
            if (t < x && (!have || x < next)) {
                next = x;
                have = true;
            }
        };
        if (i < A.size()) consider(a_on ? A[i].t1 : A[i].t0);
        if (j < B.size()) consider(b_on ? B[j].t1 : B[j].t0);
        if (a_on && !b_on) {
            push_piece(out, sub_piece(A[i], t, next));
        } else if (b_on && !a_on) {
            push_piece(out, sub_piece(B[j], t, next));
        } else {
            EnvelopePiece pa = sub_piece(A[i], t, next), pb = sub_piece(B[j], t, next);
            int s0 = (pa.v0 - pb.v0).sign(), s1 = (pa.v1 - pb.v1).sign();
            if (side == Side::Upper) s0 = -s0, s1 = -s1;
            // s < 0: a strictly better at that end
            if (s0 == 0 && s1 == 0) {
                push_piece(out, pa.tag <= pb.tag ? std::move(pa) : std::move(pb));
            } else if (s0 <= 0 && s1 <= 0) {
                push_piece(out, std::move(pa));
            } else if (s0 >= 0 && s1 >= 0) {
                push_piece(out, std::move(pb));
            } else {
                Rational d0 = pa.v0 - pb.v0, d1 = pa.v1 - pb.v1;
                Rational tc = t + (next - t) * d0 / (d0 - d1);
                Rational vc = pa.at(tc);
                EnvelopePiece first = s0 < 0 ? pa : pb;
                EnvelopePiece second = s0 < 0 ? pb : pa;
                push_piece(out, {first.t0, first.v0, tc, vc, first.tag});
                push_piece(out, {tc, vc, second.t1, second.v1, second.tag});
            }
        }
        t = next;
    }
    return out;
}

inline std::vector<EnvelopePiece> envelope_rec(const std::vector<Segment>& segs, std::size_t lo, std::size_t hi, Side side) {
    if (hi - lo == 1) {
        const Segment& s = segs[lo];
        return {EnvelopePiece{s.a.t, s.a.v, s.b.t, s.b.v, s.tag}};
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return merge(envelope_rec(segs, lo, mid, side), envelope_rec(segs, mid, hi, side), side);
}

} // namespace detail

// Pointwise lower/upper envelope as maximal tagged pieces. Gaps between pieces
// are allowed here; point segments are ignored. On exact ties the smaller tag
// wins.
inline std::vector<EnvelopePiece> envelope_pieces(const std::vector<Segment>& segments, Side side) {
    std::vector<Segment> proper;
    proper.reserve(segments.size());
    for (const auto& s : segments) {
        if (s.b.t < s.a.t) throw std::invalid_argument("segment with t0 > t1");
        if (!s.degenerate()) proper.push_back(s);
    }
    if (proper.empty()) return {};
    return detail::envelope_rec(proper, 0, proper.size(), side);
}

// Envelope over the hull of the input time-projections. Throws coverage_error
// if part of the hull is not covered and std::domain_error if the result
// would be discontinuous.
inline PwlFunction envelope(const std::vector<Segment>& segments, Side side) {
    if (segments.empty()) throw std::invalid_argument("envelope of no segments");
    auto pieces = envelope_pieces(segments, side);
    Rational lo = segments[0].a.t, hi = segments[0].b.t;
    for (const auto& s : segments) {
        lo = min(lo, s.a.t);
        hi = max(hi, s.b.t);
    }
    if (pieces.empty()) {
        if (lo != hi) throw coverage_error("envelope inputs do not cover the domain");
        Rational best = segments[0].a.v;
        for (const auto& s : segments)
            if (detail::better(s.a.v, best, side)) best = s.a.v;
        return PwlFunction::from_points({{lo, best}});
    }
    if (pieces.front().t0 != lo || pieces.back().t1 != hi) throw coverage_error("envelope inputs do not cover the domain");
    std::vector<Point> pts;
    pts.reserve(pieces.size() + 1);
    pts.push_back({pieces[0].t0, pieces[0].v0});
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        if (k > 0) {
            if (pieces[k].t0 != pieces[k - 1].t1) throw coverage_error("envelope inputs leave a gap at " + pieces[k - 1].t1.str());
            if (pieces[k].v0 != pieces[k - 1].v1) throw std::domain_error("discontinuous envelope at " + pieces[k].t0.str());
        }
        pts.push_back({pieces[k].t1, pieces[k].v1});
    }
    PwlFunction f = PwlFunction::from_points(std::move(pts));
    for (const auto& s : segments) {
        if (!s.degenerate()) continue;
        if (detail::better(s.a.v, f.evaluate(s.a.t).value(), side))
            throw std::domain_error("point segment at " + s.a.t.str() + " would make the envelope discontinuous");
    }
    return f;
}

} // namespace sptg
