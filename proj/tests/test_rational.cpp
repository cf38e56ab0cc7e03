#include "posauc/rational.hpp"

#include <gtest/gtest.h>

#include <random>

using posauc::Rational;
using namespace posauc;

TEST(Rational, ParsesFractionsDecimalsAndIntegers) {
    EXPECT_EQ(Rational::parse("2/5"), Rational(2, 5));
    EXPECT_EQ(Rational::parse("0.4"), Rational(2, 5));
    EXPECT_EQ(Rational::parse("-.5"), Rational(-1, 2));
    EXPECT_EQ(Rational::parse("6/4"), Rational(3, 2));
    EXPECT_EQ(Rational::parse(" 7 "), Rational(7));
    EXPECT_EQ("9/10"_q, Rational(9, 10));
}

TEST(Rational, LeadingZerosAreDecimal) {
    EXPECT_EQ(Rational::parse("0.25"), Rational(1, 4));
    EXPECT_EQ(Rational::parse("010/3"), Rational(10, 3));
    EXPECT_EQ(Rational::parse("3/010"), Rational(3, 10));
    EXPECT_EQ(Rational::parse("0.08"), Rational(2, 25));
    EXPECT_FALSE(Rational::try_parse("0x10").has_value());
}

TEST(Rational, RejectsMalformedInput) {
    for (const char* s : {"", "/", "1/0", "a", "1/-2", "1.2.3", "--1", "1e3", "."})
        EXPECT_FALSE(Rational::try_parse(s).has_value()) << s;
    EXPECT_THROW(Rational::parse("x"), std::invalid_argument);
}

TEST(Rational, CanonicalForm) {
    Rational r(-6, -8);
    EXPECT_EQ(r.num(), 3);
    EXPECT_EQ(r.den(), 4);
    EXPECT_EQ(Rational(4, -6).str(), "-2/3");
    EXPECT_EQ(Rational(7).str(), "7/1");
    EXPECT_EQ(Rational(0, 5).str(), "0/1");
    EXPECT_THROW(Rational(1, 0), std::exception);
}

TEST(Rational, DivisionByZeroThrows) { EXPECT_THROW(Rational(1) / Rational(0), std::domain_error); }

TEST(Rational, StrRoundTripsAndStaysReduced) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<long> d(-1000, 1000), e(1, 1000);
    for (int t = 0; t < 2000; ++t) {
        Rational x(d(rng), e(rng));
        EXPECT_EQ(Rational::parse(x.str()), x);
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), x.num().get_mpz_t(), x.den().get_mpz_t());
        EXPECT_TRUE(x.den() > 0);
        EXPECT_TRUE(x.is_zero() ? x.den() == 1 : g == 1);
    }
}

TEST(Rational, FieldAxiomsOnSamples) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long> d(-50, 50), e(1, 50);
    for (int t = 0; t < 500; ++t) {
        Rational a(d(rng), e(rng)), b(d(rng), e(rng)), c(d(rng), e(rng));
        EXPECT_EQ((a + b) * c, a * c + b * c);
        EXPECT_EQ(a - a, Rational(0));
        if (!b.is_zero()) {
            EXPECT_EQ(a / b * b, a);
        }
        EXPECT_EQ(a < b, a.to_double() < b.to_double() || (a < b && a.to_double() == b.to_double()));
    }
}

TEST(Rational, Ordering) {
    EXPECT_LT(Rational(2, 5), Rational(1, 2));
    EXPECT_GT(Rational(-1, 3), Rational(-1, 2));
    EXPECT_EQ(max(Rational(1, 3), Rational(1, 4)), Rational(1, 3));
    EXPECT_EQ(abs(Rational(-3, 7)), Rational(3, 7));
}
