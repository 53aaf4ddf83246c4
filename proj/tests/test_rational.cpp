// Copyright (c) SPTG Toolkit contributors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <random>
#include <sstream>

#include "sptg/rational.hpp"

using sptg::ExtendedValue;
using sptg::Rational;
using Ref = boost::rational<boost::multiprecision::cpp_int>;

namespace {

std::string ref_str(const Ref& r) {
    std::ostringstream s;
    s << r.numerator();
    if (r.denominator() != 1) s << "/" << r.denominator();
    return s.str();
}

Ref to_ref(const Rational& r) {
    return Ref(boost::multiprecision::cpp_int(r.numerator().get_str()), boost::multiprecision::cpp_int(r.denominator().get_str()));
}

} // namespace

TEST(Rational, ParsesAndPrintsLowestTerms) {
    EXPECT_EQ(Rational::parse("4/6").str(), "2/3");
    EXPECT_EQ(Rational::parse("-10/4").str(), "-5/2");
    EXPECT_EQ(Rational::parse("7").str(), "7");
    EXPECT_EQ(Rational::parse("0/5").str(), "0");
    EXPECT_EQ(Rational::parse("+3/9").str(), "1/3");
    EXPECT_EQ(Rational::parse("123456789012345678901234567890/10").str(), "12345678901234567890123456789");
    EXPECT_THROW(Rational::parse("1/0"), std::invalid_argument);
    EXPECT_THROW(Rational::parse("1/-2"), std::invalid_argument);
    EXPECT_THROW(Rational::parse("0.5"), std::invalid_argument);
    EXPECT_THROW(Rational::parse(""), std::invalid_argument);
}

TEST(Rational, OverflowPromotesAndDemotes) {
    Rational big = Rational(std::int64_t(1) << 62);
    Rational sq = big * big;
    EXPECT_EQ(sq.str(), "21267647932558653966460912964485513216");
    Rational back = sq / big;
    EXPECT_EQ(back, big);
    EXPECT_EQ(back.str(), big.str());
    EXPECT_EQ(Rational::pow2(-100) * Rational::pow2(100), Rational(1));
    EXPECT_EQ(Rational(INT64_MIN).str(), "-9223372036854775808");
    EXPECT_EQ((-Rational(INT64_MIN)).str(), "9223372036854775808");
}

TEST(Rational, MatchesIndependentFractionArithmetic) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> small(-50, 50), den(1, 40);
    std::uniform_int_distribution<std::int64_t> wide(-(std::int64_t(1) << 61), std::int64_t(1) << 61);
    for (int it = 0; it < 4000; ++it) {
        bool w = it % 3 == 0;
        Rational a(w ? wide(rng) : small(rng), w ? (wide(rng) & ((std::int64_t(1) << 50) - 1)) + 1 : den(rng));
        Rational b(small(rng), den(rng));
        if (it % 5 == 0) b = a * a + Rational(1, 3);
        Ref ra = to_ref(a), rb = to_ref(b);
        EXPECT_EQ((a + b).str(), ref_str(ra + rb));
        EXPECT_EQ((a - b).str(), ref_str(ra - rb));
        EXPECT_EQ((a * b).str(), ref_str(ra * rb));
        if (b.sign() != 0) {
            EXPECT_EQ((a / b).str(), ref_str(ra / rb));
        }
        EXPECT_EQ(a < b, ra < rb);
        EXPECT_EQ(a == b, ra == rb);
    }
}

TEST(Rational, BoundaryOperandsMatchReference) {
    const std::int64_t M = INT64_MAX;
    std::vector<Rational> xs{Rational(M),     Rational(-M),    Rational(M, 2),  Rational(1, M),  Rational(M - 1, M),
                             Rational(INT64_MIN), Rational(3, 4), Rational(-5, 12), Rational(M, 3), Rational(7, M - 1),
                             Rational(0),     Rational(1, 6),  Rational(-1, 10)};
    for (const auto& a : xs)
        for (const auto& b : xs) {
            Ref ra = to_ref(a), rb = to_ref(b);
            EXPECT_EQ((a + b).str(), ref_str(ra + rb));
            EXPECT_EQ((a - b).str(), ref_str(ra - rb));
            EXPECT_EQ((a * b).str(), ref_str(ra * rb));
            EXPECT_EQ(a < b, ra < rb);
            EXPECT_EQ(a == b, ra == rb);
        }
}

TEST(Rational, DecimalRendering) {
    EXPECT_EQ(Rational(1, 3).to_decimal(4), "0.3333");
    EXPECT_EQ(Rational(2, 3).to_decimal(4), "0.6667");
    EXPECT_EQ(Rational(-1, 8).to_decimal(2), "-0.13");
    EXPECT_EQ(Rational(5).to_decimal(0), "5");
    EXPECT_EQ(Rational(-1, 1000).to_decimal(2), "0.00");
}

TEST(ExtendedValue, InfinityAbsorbsAndDominates) {
    ExtendedValue inf = ExtendedValue::infinity();
    EXPECT_TRUE((inf + ExtendedValue(3)).is_infinite());
    EXPECT_TRUE(ExtendedValue(Rational::pow2(200)) < inf);
    EXPECT_EQ(inf, ExtendedValue::infinity());
    EXPECT_EQ(ExtendedValue(Rational(1, 2)) + ExtendedValue(Rational(1, 2)), ExtendedValue(1));
    EXPECT_THROW((void)inf.value(), std::logic_error);
}
