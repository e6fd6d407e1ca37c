#include "wachlab/apspec.hpp"
#include "wachlab/errors.hpp"
#include "wachlab/json_io.hpp"
#include "wachlab/modp.hpp"
#include "wachlab/wach.hpp"

#include <gtest/gtest.h>

using namespace wachlab;

namespace {

WachData build(long p, long k, long ap) {
    auto ring = EisensteinRing::unramified(p, 16);
    return build_wach(WachParams::defaults(OLElem(ring, ap), k));
}

std::vector<long> residues_of(const Series& s, long upto) {
    std::vector<long> out;
    for (long i = 0; i < upto; ++i) out.push_back(s.coeff(i).residue());
    return out;
}

} // namespace

// alpha_bar of a_p (lambda_-/lambda_+)^{k-1}, coefficients 0..k-2, from an
// independent exact-rational computation with fourteen q_n factors.
struct AlphaOracle {
    long p, k, ap;
    std::vector<long> alpha_bar;
};

class AlphaReduction : public ::testing::TestWithParam<AlphaOracle> {};

TEST_P(AlphaReduction, MatchesOracle) {
    const auto& o = GetParam();
    WachData d = build(o.p, o.k, o.ap);
    EXPECT_EQ(residues_of(d.alpha.normalized(), o.k - 1), o.alpha_bar);
    EXPECT_EQ(d.alpha.coeff(0), OLElem(d.alpha.ring(), o.ap));
}

INSTANTIATE_TEST_SUITE_P(Oracle, AlphaReduction,
                         ::testing::Values(AlphaOracle{3, 5, 3, {0, 0, 1, 0}},
                                           AlphaOracle{5, 9, 5, {0, 0, 0, 0, 3, 2, 4, 0}},
                                           AlphaOracle{5, 8, 15, {0, 0, 0, 0, 1, 2, 2}},
                                           AlphaOracle{7, 10, 14, {0, 0, 0, 0, 0, 0, 4, 5, 6}},
                                           AlphaOracle{5, 7, 5, {0, 0, 0, 0, 1, 0}}));

TEST(Wach, ParamsDefaults) {
    auto ring = EisensteinRing::unramified(7, 8);
    WachParams prm = WachParams::defaults(OLElem(ring, 14), 10);
    EXPECT_EQ(prm.mx, 24);
    EXPECT_EQ(prm.n_target, 2);
    ASSERT_EQ(prm.gamma_gens.size(), 2u);
    EXPECT_EQ(prm.gamma_gens[0], 8);
    EXPECT_EQ(prm.gamma_gens[1], 3);
    EXPECT_EQ(prm.working_precision(), 2 + 9 * (24 - 10 + 2));
    prm.k = 20;
    EXPECT_THROW(prm.validate(), OutOfScope);
}

TEST(Wach, PShape) {
    WachData d = build(3, 5, 3);
    const auto& P = d.P;
    EXPECT_TRUE(P(0, 0).is_zero());
    EXPECT_EQ(P(1, 1).coeff(0), OLElem(P(1, 1).ring(), 3));
    EXPECT_EQ(P(0, 1).coeff(0), OLElem(P(0, 1).ring(), -1));
    EXPECT_EQ(P(1, 0).coeff(0), OLElem(P(1, 0).ring(), 81));
    // det P = q^{k-1} which is X^{(p-1)(k-1)} mod p
    auto r1 = EisensteinRing::unramified(3, 1);
    Series det = (P(0, 0) * P(1, 1) - P(0, 1) * P(1, 0)).normalized().at_precision(1);
    for (long i = 0; i < det.precision(); ++i) EXPECT_EQ(det.coeff(i).is_zero(), i != 8) << i;
    (void)r1;
}

TEST(Wach, RelationsHold) {
    for (auto [p, k, a] : {std::tuple{3L, 5L, 3L}, {5L, 8L, 15L}, {5L, 7L, 10L}}) {
        WachData d = build(p, k, a);
        WachReport rep = verify_wach(d);
        EXPECT_TRUE(rep.ok()) << rep.first_failure();
    }
}

TEST(Wach, TrivialGammaIsIdentity) {
    auto ring = EisensteinRing::unramified(5, 16);
    WachParams prm = WachParams::defaults(OLElem(ring, 5), 8);
    prm.gamma_gens = {mpz_class(1), mpz_class(2)};
    WachData d = build_wach(prm);
    const SeriesMat& g = d.G[0];
    Series one = Series::one(g(0, 0).ring(), g(0, 0).precision());
    EXPECT_TRUE(congruent(g(0, 0), one, g(0, 0).precision(), d.precision));
    EXPECT_TRUE(g(0, 1).at_precision(d.precision).is_zero());
    EXPECT_TRUE(g(1, 0).at_precision(d.precision).is_zero());
    EXPECT_TRUE(congruent(g(1, 1), one, g(1, 1).precision(), d.precision));
}

TEST(Wach, GammaInitialAgreement) {
    WachData d = build(5, 9, 5);
    for (std::size_t i = 0; i < d.G.size(); ++i)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) EXPECT_TRUE(congruent(d.G[i](r, c), d.G_init[i](r, c), 8, d.precision));
}

TEST(Wach, FaultIsCaught) {
    WachData d = build(3, 5, 3);
    WachReport rep = verify_wach(inject_gamma_fault(d, 0, 5));
    EXPECT_FALSE(rep.ok());
    EXPECT_EQ(rep.first_failure().rfind("commutation", 0), 0u) << rep.first_failure();
}

TEST(Wach, UniqueUnderRefinement) {
    auto ring = EisensteinRing::unramified(3, 16);
    WachParams prm = WachParams::defaults(OLElem(ring, 6), 5);
    EXPECT_TRUE(uniqueness_under_refinement(prm, build_wach(prm)));
}

TEST(Wach, ContextReuse) {
    auto ring = EisensteinRing::unramified(5, 16);
    WachParams prm = WachParams::defaults(OLElem(ring, 5), 9);
    WachContext ctx(prm);
    for (long c = 1; c < 5; ++c) {
        OLElem ap(ring, 5 * c);
        WachData shared = build_wach(ctx, ap);
        prm.ap = ap;
        WachData fresh = build_wach(prm);
        EXPECT_TRUE(congruent(shared.G[1](0, 1), fresh.G[1](0, 1), prm.mx, 2));
        EXPECT_TRUE(congruent(shared.alpha, fresh.alpha, prm.k - 1, 2));
    }
}

TEST(Wach, JsonRoundTrip) {
    WachData d = build(3, 5, 3);
    WachData back = wach_from_json(wach_to_json(d));
    EXPECT_EQ(back.params.k, 5);
    EXPECT_TRUE(verify_wach(back).ok());
    EXPECT_TRUE(congruent(back.G[0](1, 0), d.G[0](1, 0), d.params.mx, d.precision));
}

TEST(Wach, RamifiedCoefficients) {
    auto ring = parse_eisenstein(5, "x^2-5", 24);
    OLElem ap = parse_ap(ring, "5 + 5*pi");
    WachData d = build_wach(WachParams::defaults(ap, 7));
    EXPECT_TRUE(verify_wach(d).ok()) << verify_wach(d).first_failure();
    ResWach w = reduce_wach(d);
    EXPECT_EQ(w.beta, FqElem(5, 1));
}
