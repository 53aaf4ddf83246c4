// Copyright (c) SPTG Toolkit contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace sptg {

// Exact fraction in lowest terms. Values whose numerator and denominator fit
// in 64 bits live inline; everything else is held by a GMP rational.
class Rational {
    using i128 = __int128;
    using u128 = unsigned __int128;

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    std::unique_ptr<mpq_class> big_;

    static constexpr std::int64_t kMax = INT64_MAX;

    static std::uint64_t gcd64(std::uint64_t a, std::uint64_t b) {
        if (a == 0) return b;
        if (b == 0) return a;
        int shift = __builtin_ctzll(a | b);
        a >>= __builtin_ctzll(a);
        do {
            b >>= __builtin_ctzll(b);
            if (a > b) std::swap(a, b);
            b -= a;
        } while (b != 0);
        return a << shift;
    }

    static u128 gcd128(u128 a, u128 b) {
        if ((a >> 64) == 0 && (b >> 64) == 0) return gcd64(std::uint64_t(a), std::uint64_t(b));
        while (b != 0) {
            u128 r = a % b;
            a = b;
            b = r;
        }
        return a;
    }

    static mpz_class to_mpz(i128 v) {
        bool neg = v < 0;
        u128 u = neg ? u128(0) - u128(v) : u128(v);
        mpz_class z;
        std::uint64_t words[2] = {std::uint64_t(u), std::uint64_t(u >> 64)};
        mpz_import(z.get_mpz_t(), 2, -1, sizeof(std::uint64_t), 0, 0, words);
        if (neg) z = -z;
        return z;
    }

    void set_from(i128 n, i128 d) {
        if (d == 0) throw std::domain_error("division by zero");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        u128 un = n < 0 ? u128(0) - u128(n) : u128(n);
        if (un <= u128(kMax) && d <= i128(kMax)) {
            std::int64_t n64 = std::int64_t(n), d64 = std::int64_t(d);
            auto g64 = std::int64_t(gcd64(std::uint64_t(un), std::uint64_t(d64)));
            num_ = g64 > 1 ? n64 / g64 : n64;
            den_ = g64 > 1 ? d64 / g64 : d64;
            big_.reset();
            return;
        }
        if (d == 1) {
            if (n >= -i128(kMax) && n <= i128(kMax)) {
                num_ = std::int64_t(n);
                den_ = 1;
                big_.reset();
                return;
            }
        }
        u128 g = d == 1 ? 1 : gcd128(un, u128(d));
        if (g > 1) {
            n /= i128(g);
            d /= i128(g);
        }
        if (n >= -i128(kMax) && n <= i128(kMax) && d <= i128(kMax)) {
            num_ = std::int64_t(n);
            den_ = std::int64_t(d);
            big_.reset();
        } else {
            mpq_class q(to_mpz(n), to_mpz(d));
            q.canonicalize();
            set_from(std::move(q));
        }
    }

    // n/d already in lowest terms with d > 0.
    void set_reduced(i128 n, i128 d) {
        if (n >= -i128(kMax) && n <= i128(kMax) && d <= i128(kMax)) {
            num_ = std::int64_t(n);
            den_ = std::int64_t(d);
            big_.reset();
        } else {
            set_from(n, d);
        }
    }

    // n1/d1 + n2/d2 with both operands in lowest terms.
    void set_sum(std::int64_t n1, std::int64_t d1, std::int64_t n2, std::int64_t d2) {
        if (d1 == d2) {
            set_from(i128(n1) + n2, d1);
            return;
        }
        auto g = std::int64_t(gcd64(std::uint64_t(d1), std::uint64_t(d2)));
        if (g == 1) {
            set_reduced(i128(n1) * d2 + i128(n2) * d1, i128(d1) * d2);
            return;
        }
        i128 t = i128(n1) * (d2 / g) + i128(n2) * (d1 / g);
        u128 ut = t < 0 ? u128(0) - u128(t) : u128(t);
        auto g2 = std::int64_t(gcd128(ut, u128(g)));
        set_reduced(t / g2, i128(d1 / g) * (d2 / g2));
    }

    static std::uint64_t mag(std::int64_t x) { return x < 0 ? std::uint64_t(0) - std::uint64_t(x) : std::uint64_t(x); }

    void set_from(mpq_class q) {
        const mpz_class& n = q.get_num();
        const mpz_class& d = q.get_den();
        if (mpz_fits_slong_p(n.get_mpz_t()) && mpz_fits_slong_p(d.get_mpz_t()) &&
            mpz_cmp_si(n.get_mpz_t(), -kMax) >= 0) {
            num_ = n.get_si();
            den_ = d.get_si();
            big_.reset();
        } else {
            big_ = std::make_unique<mpq_class>(std::move(q));
            num_ = 0;
            den_ = 1;
        }
    }

    [[nodiscard]] bool small() const { return !big_; }

    static Rational from_mpq(mpq_class q) {
        Rational r;
        r.set_from(std::move(q));
        return r;
    }

  public:
    Rational() = default;
    Rational(std::int64_t n) : num_(n) { // NOLINT(google-explicit-constructor)
        if (n == INT64_MIN) set_from(i128(n), 1);
    }
    Rational(int n) : Rational(std::int64_t(n)) {} // NOLINT(google-explicit-constructor)
    Rational(std::int64_t n, std::int64_t d) { set_from(i128(n), i128(d)); }
    explicit Rational(const mpq_class& q) {
        mpq_class c(q);
        c.canonicalize();
        set_from(std::move(c));
    }

    Rational(const Rational& o) : num_(o.num_), den_(o.den_) {
        if (o.big_) big_ = std::make_unique<mpq_class>(*o.big_);
    }
    Rational(Rational&&) noexcept = default;
    Rational& operator=(const Rational& o) {
        if (this != &o) {
            num_ = o.num_;
            den_ = o.den_;
            big_ = o.big_ ? std::make_unique<mpq_class>(*o.big_) : nullptr;
        }
        return *this;
    }
    Rational& operator=(Rational&&) noexcept = default;

    // Accepts "p", "-p", "p/q" with decimal integers.
    static Rational parse(std::string_view s) {
        std::string str(s);
        auto slash = str.find('/');
        auto valid_int = [](const std::string& x) {
            std::size_t i = (!x.empty() && (x[0] == '-' || x[0] == '+')) ? 1 : 0;
            if (i >= x.size()) return false;
            for (; i < x.size(); ++i)
                if (x[i] < '0' || x[i] > '9') return false;
            return true;
        };
        auto strip_plus = [](std::string x) { return (!x.empty() && x[0] == '+') ? x.substr(1) : x; };
        if (slash == std::string::npos) {
            if (!valid_int(str)) throw std::invalid_argument("malformed rational: '" + str + "'");
            return from_mpq(mpq_class(mpz_class(strip_plus(str))));
        }
        std::string a = str.substr(0, slash), b = str.substr(slash + 1);
        if (!valid_int(a) || !valid_int(b) || b[0] == '-' || b[0] == '+')
            throw std::invalid_argument("malformed rational: '" + str + "'");
        mpz_class den(b);
        if (den == 0) throw std::invalid_argument("zero denominator: '" + str + "'");
        mpq_class q(mpz_class(strip_plus(a)), den);
        q.canonicalize();
        return from_mpq(std::move(q));
    }

    static Rational pow2(int k) {
        if (k >= 0 && k < 62) return Rational(std::int64_t(1) << k);
        if (k < 0 && k > -62) return Rational(1, std::int64_t(1) << -k);
        mpz_class z;
        mpz_ui_pow_ui(z.get_mpz_t(), 2, unsigned(k < 0 ? -k : k));
        return k < 0 ? from_mpq(mpq_class(mpz_class(1), z)) : from_mpq(mpq_class(z));
    }

    [[nodiscard]] mpq_class to_mpq() const {
        if (big_) return *big_;
        return mpq_class(mpz_class(static_cast<long>(num_)), mpz_class(static_cast<long>(den_)));
    }

    [[nodiscard]] mpz_class numerator() const { return big_ ? mpz_class(big_->get_num()) : mpz_class(static_cast<long>(num_)); }
    [[nodiscard]] mpz_class denominator() const { return big_ ? mpz_class(big_->get_den()) : mpz_class(static_cast<long>(den_)); }

    [[nodiscard]] int sign() const {
        if (big_) return sgn(*big_);
        return (num_ > 0) - (num_ < 0);
    }
    [[nodiscard]] bool is_zero() const { return small() && num_ == 0; }
    [[nodiscard]] bool is_integer() const { return small() ? den_ == 1 : big_->get_den() == 1; }

    [[nodiscard]] std::string str() const {
        if (small()) return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
        return big_->get_str();
    }

    [[nodiscard]] double to_double() const { return small() ? double(num_) / double(den_) : big_->get_d(); }

    // Round half away from zero to `digits` fractional decimal digits.
    [[nodiscard]] std::string to_decimal(int digits) const {
        mpq_class q = to_mpq();
        bool neg = sgn(q) < 0;
        if (neg) q = -q;
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, unsigned(digits));
        mpq_class scaled = q * scale + mpq_class(1, 2);
        mpz_class units = scaled.get_num() / scaled.get_den();
        std::string s = units.get_str();
        if (digits > 0) {
            if (s.size() <= std::size_t(digits)) s.insert(0, std::size_t(digits) + 1 - s.size(), '0');
            s.insert(s.size() - std::size_t(digits), ".");
        }
        if (neg && units != 0) s.insert(0, "-");
        return s;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        Rational r;
        if (a.small() && b.small()) {
            r.set_sum(a.num_, a.den_, b.num_, b.den_);
        } else {
            r.set_from(mpq_class(a.to_mpq() + b.to_mpq()));
        }
        return r;
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        Rational r;
        if (a.small() && b.small()) {
            if (b.num_ == INT64_MIN) r.set_from(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
            else r.set_sum(a.num_, a.den_, -b.num_, b.den_);
        } else {
            r.set_from(mpq_class(a.to_mpq() - b.to_mpq()));
        }
        return r;
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        Rational r;
        if (a.small() && b.small()) {
            std::int64_t g1 = std::int64_t(gcd64(mag(a.num_), std::uint64_t(b.den_)));
            std::int64_t g2 = std::int64_t(gcd64(mag(b.num_), std::uint64_t(a.den_)));
            r.set_reduced(i128(a.num_ / g1) * (b.num_ / g2), i128(a.den_ / g2) * (b.den_ / g1));
        } else {
            r.set_from(mpq_class(a.to_mpq() * b.to_mpq()));
        }
        return r;
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.sign() == 0) throw std::domain_error("division by zero");
        Rational r;
        if (a.small() && b.small()) r.set_from(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
        else r.set_from(mpq_class(a.to_mpq() / b.to_mpq()));
        return r;
    }
    Rational operator-() const {
        Rational r;
        if (small()) r.num_ = -num_, r.den_ = den_;
        else r.set_from(mpq_class(-*big_));
        return r;
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        if (a.small() != b.small()) return false; // canonical storage
        if (a.small()) return a.num_ == b.num_ && a.den_ == b.den_;
        return *a.big_ == *b.big_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        if (a.small() && b.small()) {
            if (a.den_ == b.den_) return a.num_ <=> b.num_;
            i128 l = i128(a.num_) * b.den_, r = i128(b.num_) * a.den_;
            return l <=> r;
        }
        int c = cmp(a.to_mpq(), b.to_mpq());
        return c <=> 0;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

// A rational or +infinity.
class ExtendedValue {
    bool inf_ = false;
    Rational v_;

  public:
    ExtendedValue() = default;
    ExtendedValue(Rational v) : v_(std::move(v)) {} // NOLINT(google-explicit-constructor)
    ExtendedValue(std::int64_t v) : v_(v) {}         // NOLINT(google-explicit-constructor)
    static ExtendedValue infinity() {
        ExtendedValue e;
        e.inf_ = true;
        return e;
    }
    [[nodiscard]] bool is_infinite() const { return inf_; }
    [[nodiscard]] bool is_finite() const { return !inf_; }
    [[nodiscard]] const Rational& value() const {
        if (inf_) throw std::logic_error("value() of +inf");
        return v_;
    }
    [[nodiscard]] std::string str() const { return inf_ ? "inf" : v_.str(); }

    friend ExtendedValue operator+(const ExtendedValue& a, const ExtendedValue& b) {
        if (a.inf_ || b.inf_) return infinity();
        return a.v_ + b.v_;
    }
    friend bool operator==(const ExtendedValue& a, const ExtendedValue& b) {
        if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
        return a.v_ == b.v_;
    }
    friend std::strong_ordering operator<=>(const ExtendedValue& a, const ExtendedValue& b) {
        if (a.inf_ || b.inf_) return int(a.inf_) <=> int(b.inf_);
        return a.v_ <=> b.v_;
    }
    friend std::ostream& operator<<(std::ostream& os, const ExtendedValue& e) { return os << e.str(); }
};

} // namespace sptg
