#include "wachlab/apspec.hpp"
#include "wachlab/eisenstein.hpp"
#include "wachlab/errors.hpp"
#include "wachlab/selfcheck.hpp"
#include "wachlab/series.hpp"

#include <gtest/gtest.h>

using namespace wachlab;

namespace {

Series poly(const RingPtr& r, std::vector<long> c, long mx, long low = 0) {
    std::vector<mpz_class> z(c.begin(), c.end());
    return Series::from_integers(r, z, mx, low);
}

// Stored coefficients as signed integers in (-p^N/2, p^N/2].
std::vector<long> ints(const Series& s) {
    std::vector<long> out;
    const mpz_class& m = s.ring()->modulus();
    for (long i = s.low(); i < s.precision(); ++i) {
        mpz_class c = s.coeff(i).coeff(0);
        if (2 * c > m) c -= m;
        out.push_back(c.get_si());
    }
    return out;
}

} // namespace

TEST(Eisenstein, Valuations) {
    auto z5 = EisensteinRing::unramified(5, 10);
    EXPECT_TRUE(OLElem(z5, 15).valuation().is_exactly(1, 1));
    EXPECT_TRUE(OLElem(z5, 7).valuation().is_exactly(0, 1));
    EXPECT_TRUE(OLElem(z5, 0).valuation().lower_bound_only);

    auto r = parse_eisenstein(5, "x^2-5", 10);
    OLElem pi = OLElem::uniformizer(r);
    EXPECT_TRUE(pi.valuation().is_exactly(1, 2));
    OLElem sq = pi * pi;
    EXPECT_EQ(sq.coeff(0), 5);
    EXPECT_EQ(sq.coeff(1), 0);
    EXPECT_TRUE((pi * pi * pi).valuation().is_exactly(3, 2));
}

TEST(Eisenstein, RejectsNonEisenstein) {
    EXPECT_THROW(EisensteinRing::create(5, {mpz_class(25), mpz_class(0)}, 8), std::invalid_argument);
    EXPECT_THROW(EisensteinRing::create(5, {mpz_class(5), mpz_class(1)}, 8), std::invalid_argument);
    EXPECT_THROW(EisensteinRing::create(4, {mpz_class(-2)}, 8), std::invalid_argument);
}

TEST(Eisenstein, InverseAndDivision) {
    auto r = parse_eisenstein(3, "x^3+3*x-3", 8);
    OLElem u = OLElem(r, 2) + OLElem::uniformizer(r);
    EXPECT_EQ(u * u.inverse(), OLElem(r, 1));
    EXPECT_THROW(OLElem::uniformizer(r).inverse(), std::domain_error);
    EXPECT_EQ(OLElem(r, 6).divide_by_p(), OLElem(r->at_precision(7), 2));
}

TEST(Eisenstein, MixedRingsThrow) {
    auto a = EisensteinRing::unramified(3, 8);
    auto b = EisensteinRing::unramified(5, 8);
    EXPECT_THROW(OLElem(a, 1) + OLElem(b, 1), RingMismatch);
}

TEST(Series, Substitution) {
    auto r = EisensteinRing::unramified(3, 8);
    Series f = poly(r, {0, 0, 1}, 8);
    Series g = poly(r, {0, 1, 1}, 8);
    EXPECT_EQ(ints(substitute(f, g)), (std::vector<long>{0, 0, 1, 2, 1, 0, 0, 0}));
    Series h = poly(r, {4, -1, 7, 2, 0, 5}, 8);
    EXPECT_TRUE(congruent(substitute(h, Series::x(r, 8)), h, 8, 8));
    Series x = Series::x(r, 8);
    EXPECT_EQ(ints(substitute(x, phi_of_x(r, 8))), (std::vector<long>{0, 3, 3, 1, 0, 0, 0, 0}));
}

TEST(Series, Frobenius) {
    auto r = EisensteinRing::unramified(3, 8);
    Series x = Series::x(r, 6);
    Series fx = frobenius_phi(x);
    EXPECT_EQ(ints(fx.truncated(6)), (std::vector<long>{0, 3, 3, 1, 0, 0}));
    EXPECT_TRUE(congruent(frobenius_phi(Series::one(r, 6)), Series::one(r, 6), 6, 8));
    // mod 3 the image of X is X^3
    auto r1 = EisensteinRing::unramified(3, 1);
    EXPECT_EQ(ints(frobenius_phi(Series::x(r1, 6)).truncated(6)), (std::vector<long>{0, 0, 0, 1, 0, 0}));
}

TEST(Series, GammaAction) {
    auto r = EisensteinRing::unramified(3, 10);
    Series x = Series::x(r, 8);
    EXPECT_TRUE(congruent(gamma_act(x, 1), x, 8, 10));
    EXPECT_EQ(ints(gamma_act(x, 4)), (std::vector<long>{0, 4, 6, 4, 1, 0, 0, 0}));
    EXPECT_EQ(ints(gamma_act(x, -1)), (std::vector<long>{0, -1, 1, -1, 1, -1, 1, -1}));
}

TEST(Series, Psi) {
    // over O_L, psi gives up one X-digit per p-adic digit beyond the first
    auto r = EisensteinRing::unramified(5, 2);
    EXPECT_EQ(psi_output_precision(20, 0, 5, 2), 3);
    EXPECT_TRUE(congruent(psi(Series::one(r, 20)), Series::one(r, 3), 3, 2));
    EXPECT_TRUE(psi(poly(r, {1, 1}, 20)).is_zero());
    Series px = psi(Series::x(r, 20));
    EXPECT_EQ(ints(px).at(0), -1);
    for (long i = 1; i < px.precision(); ++i) EXPECT_TRUE(px.coeff(i).is_zero()) << i;
}

TEST(Series, PsiOfPhiIsIdentity) {
    auto r = EisensteinRing::unramified(3, 2);
    Series f = poly(r, {2, -1, 5, 0, 7, 11, 1, 3, 4, 0, 1, 2}, 12);
    Series back = psi(frobenius_phi(f));
    ASSERT_GT(back.precision(), 0);
    EXPECT_TRUE(congruent(back, f, back.precision(), 2));
}

TEST(Series, QSeries) {
    auto r = EisensteinRing::unramified(3, 8);
    EXPECT_EQ(ints(q_series(r, 1, 4)), (std::vector<long>{3, 3, 1, 0}));
    for (long p : {3L, 5L, 7L}) {
        auto rp = EisensteinRing::unramified(p, 6);
        for (long n = 1; n <= 3; ++n) EXPECT_EQ(q_series(rp, n, 2 * p).coeff(0), OLElem(rp, p));
        auto r1 = EisensteinRing::unramified(p, 1);
        Series q1 = q_series(r1, 1, 3 * p);
        for (long i = 0; i < 3 * p; ++i) EXPECT_EQ(q1.coeff(i).is_zero(), i != p - 1) << "p=" << p << " i=" << i;
    }
}

TEST(Series, LambdaRatioShape) {
    for (long p : {3L, 5L, 7L}) {
        auto r = EisensteinRing::unramified(p, 12);
        Series q = lambda_ratio_power(r, 2, p + 2, 2);
        // first power: (lambda_-/lambda_+)
        ASSERT_EQ(q.shift(), 1);
        EXPECT_EQ(q.coeff(0).coeff(0), p);
        for (long i = 1; i < p - 1; ++i) EXPECT_EQ(vp(q.coeff(i).coeff(0), p, 12) >= 1, true) << i;
        EXPECT_EQ(vp(q.coeff(p - 1).coeff(0), p, 12), 0);
    }
}

TEST(Series, ShiftedArithmetic) {
    auto r = EisensteinRing::unramified(5, 6);
    Series a = Series::from_integers(r, {mpz_class(1), mpz_class(2)}, 4, 0, 1);
    Series b = poly(r, {5, 10}, 4);
    Series s = a + b;
    EXPECT_EQ(s.shift(), 1);
    EXPECT_EQ(s.value_precision(), 5);
    EXPECT_THROW(a.require_integral("a"), CheckFailure);
    EXPECT_NO_THROW(poly(r, {5, 10}, 4).with_shift(1).normalized().require_integral("b"));
}

TEST(Series, InverseAndPower) {
    auto r = EisensteinRing::unramified(7, 8);
    Series f = poly(r, {1, 3, 0, 2}, 10);
    Series g = inverse(f, 0);
    EXPECT_TRUE(congruent(f * g, Series::one(r, 10), 10, 8));
    EXPECT_TRUE(congruent(power(f, 3), f * f * f, 10, 8));
}

TEST(Series, PrecisionContract) {
    auto r = EisensteinRing::unramified(5, 2);
    Series x = Series::x(r, 10);
    EXPECT_THROW(gamma_act(x, 6, 1), PrecisionError);
}

TEST(OperatorSuite, SmallRun) {
    for (const auto& res : operator_identity_suite(default_operator_configs(), 5, 42)) EXPECT_TRUE(res.passed) << res.name << ": " << res.detail;
}
