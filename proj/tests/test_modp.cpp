#include "wachlab/errors.hpp"
#include "wachlab/json_io.hpp"
#include "wachlab/modp.hpp"
#include "wachlab/selfcheck.hpp"
#include "wachlab/wach.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace wachlab;

namespace {

const ResWach& reduced(long p, long k, long ap) {
    static std::map<std::tuple<long, long, long>, ResWach> cache;
    auto key = std::tuple{p, k, ap};
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto ring = EisensteinRing::unramified(p, 16);
        it = cache.emplace(key, reduce_wach(build_wach(WachParams::defaults(OLElem(ring, ap), k)))).first;
    }
    return it->second;
}

FqElem f(long p, long a) { return FqElem(p, mod_p(a, p)); }

} // namespace

TEST(FactorAlpha, Examples) {
    AlphaFactor a = factor_alpha_bar({0, 0, 0, 0, 1}, 5, 9);
    EXPECT_EQ(a.beta, f(5, 1));
    EXPECT_EQ(a.u, (std::vector<long>{1}));
    AlphaFactor b = factor_alpha_bar({0, 0, 0, 0, 2, 2}, 5, 9);
    EXPECT_EQ(b.beta, f(5, 2));
    EXPECT_EQ(b.u, (std::vector<long>{1, 1}));
    try {
        factor_alpha_bar({0, 0, 0, 1, 2}, 5, 9);
        FAIL() << "no exception";
    } catch (const CheckFailure& e) {
        EXPECT_EQ(e.check(), "alpha-shape");
    }
    try {
        factor_alpha_bar({0, 0, 0, 0, 2}, 5, 9, f(5, 3));
        FAIL() << "no exception";
    } catch (const CheckFailure& e) {
        EXPECT_EQ(e.check(), "beta-cross");
    }
}

TEST(ReduceWach, Shape) {
    const ResWach& w = reduced(3, 5, 3);
    EXPECT_EQ(w.beta, f(3, 1));
    ResMat P = w.Pbar(20);
    EXPECT_EQ(P(1, 0).valuation(), 8);
    EXPECT_EQ(P(1, 0).coeff(8), f(3, 1));
    for (const auto& G : w.Gbar) {
        EXPECT_EQ(G(0, 0).coeff(0), f(3, 1));
        EXPECT_EQ(G(1, 1).coeff(0), f(3, 1));
        EXPECT_TRUE(G(0, 1).coeff(0).is_zero());
        EXPECT_TRUE(G(1, 0).coeff(0).is_zero());
    }
}

TEST(ReduceWach, OutOfScopeWhenApIsAUnit) {
    auto ring = EisensteinRing::unramified(5, 16);
    EXPECT_THROW(reduce_wach(build_wach(WachParams::defaults(OLElem(ring, 2), 8))), std::exception);
}

TEST(ModElem, PhiSemilinear) {
    const ResWach& w = reduced(5, 9, 5);
    ModElem m{ResSeries::from_values(5, {1, 2, 0, 4}, 20), ResSeries::from_values(5, {3, 0, 1}, 20)};
    ResSeries s = ResSeries::from_values(5, {2, 1, 1, 3}, 20);
    ModElem lhs = apply_phi(w, m.times(s));
    ModElem rhs = apply_phi(w, m).times(frobenius_phi(s));
    EXPECT_TRUE(congruent(lhs, rhs, std::min(lhs.precision(), rhs.precision())));
}

TEST(ModElem, GammaCommutesWithPhi) {
    const ResWach& w = reduced(5, 9, 5);
    ModElem m{ResSeries::from_values(5, {1, 2, 0, 4}, 16), ResSeries::from_values(5, {3, 0, 1}, 16)};
    for (std::size_t g = 0; g < w.Gbar.size(); ++g) {
        ModElem a = apply_gamma(w, g, apply_phi(w, m));
        ModElem b = apply_phi(w, apply_gamma(w, g, m));
        long mx = std::min({a.precision(), b.precision(), w.mx});
        EXPECT_TRUE(congruent(a, b, mx)) << g;
    }
}

TEST(SolveZ, Examples) {
    // u = 1 and the phi^2 term pushed past the precision leaves z = 1
    ZSolution z0 = solve_z(ResSeries::one(7, 10), f(7, 3), 7, 14, 10);
    EXPECT_TRUE(congruent(z0.z, ResSeries::one(7, 10), 10));
    // k = p+3: z = 1 + u_1 X mod X^2
    ResSeries u = ResSeries::from_values(5, {1, 3, 2}, 30);
    ZSolution z = solve_z(u, f(5, 2), 5, 8, 30);
    EXPECT_EQ(z.z.coeff(0), f(5, 1));
    EXPECT_EQ(z.z.coeff(1), f(5, 3));
    // residual
    ResSeries lam2 = ResSeries::constant(5, f(5, 2).pow(2).inverse(), 200);
    ResSeries rhs = mul_truncated(u, frobenius_phi(z.z), 30) -
                    mul_truncated(lam2, frobenius_phi(frobenius_phi(z.z)), 30).mul_x_power(4);
    EXPECT_TRUE(congruent(z.z, rhs, 30));
}

TEST(SolveZ, StableUnderDoubling) {
    ResSeries u = ResSeries::from_values(7, {1, 4, 0, 6, 2}, 80);
    ZSolution a = solve_z(u.truncated(40), f(7, 3), 7, 11, 40);
    ZSolution b = solve_z(u, f(7, 3), 7, 11, 80);
    EXPECT_TRUE(congruent(a.z, b.z, 40));
}

TEST(DeltaLine, Character) {
    // p=5, k=9, a_p=5: lambda = 3 and V* contains omega^{-1} mu_3
    const ResWach& w = reduced(5, 9, 5);
    ZSolution z = solve_z(w.u_series(w.mx + 12), w.beta, 5, 9, w.mx + 12);
    CharWitness c = delta_line(w, z.z, w.beta);
    EXPECT_EQ(c.lambda, f(5, 3));
    EXPECT_EQ(c.omega_exp, 3);
    EXPECT_GE(c.checked_precision, 8);
    // e-coordinate of phi(delta) = lambda delta_e
    ModElem pd = apply_phi(w, c.witness);
    EXPECT_TRUE(congruent(pd.e, c.witness.e.scaled(c.lambda), std::min(pd.e.precision(), c.witness.e.precision())));
}

TEST(QMatrix, KEqualsPPlus2) {
    const ResWach& w = reduced(3, 5, 3);
    auto Q = build_Q_kp2(w, 12);
    EXPECT_TRUE(Q(0, 0).coeff(0).is_zero());
    EXPECT_EQ(Q(0, 1).coeff(0), f(3, -1));
    EXPECT_EQ(Q(1, 0).coeff(0), f(3, 1));
    EXPECT_EQ(Q(1, 1).coeff(0), w.beta);
    EXPECT_EQ(Q(0, 0).coeff(0) * Q(1, 1).coeff(0) - Q(0, 1).coeff(0) * Q(1, 0).coeff(0), f(3, 1));
}

TEST(Dwork, ConstantQ) {
    ResMat Q(ResSeries::constant(5, f(5, 0), 10), ResSeries::constant(5, f(5, -1), 10), ResSeries::constant(5, f(5, 1), 10),
             ResSeries::constant(5, f(5, 2), 10));
    ResMat M = dwork_trivialize(Q, 10);
    EXPECT_TRUE(congruent(M(0, 0), ResSeries::one(5, 10), 10));
    EXPECT_TRUE(M(0, 1).is_zero());
    EXPECT_TRUE(M(1, 0).is_zero());
    EXPECT_TRUE(congruent(M(1, 1), ResSeries::one(5, 10), 10));
}

TEST(Dwork, Relation) {
    const long mx = 15;
    ResMat Q(ResSeries::from_values(5, {0, 1, 2}, mx), ResSeries::from_values(5, {4, 0, 0, 1}, mx),
             ResSeries::from_values(5, {1, 3}, mx), ResSeries::from_values(5, {2, 2, 2, 2}, mx));
    ResMat M = dwork_trivialize(Q, mx);
    // Q phi(M) = M Q(0)
    ResMat phiM = M.map([&](const ResSeries& s) { return frobenius_phi(s).truncated(mx); });
    ResMat Q0 = Q.map([&](const ResSeries& s) { return ResSeries::constant(5, s.coeff(0), mx); });
    ResMat lhs = Q * phiM;
    ResMat rhs = M * Q0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_TRUE(congruent(lhs(i, j), rhs(i, j), mx)) << i << j;
    // M_1 = Q_1 Q_0^{-1}
    FqElem q1[2][2] = {{f(5, 1), f(5, 0)}, {f(5, 3), f(5, 2)}};
    FqElem q0inv[2][2] = {{f(5, 2), f(5, 1)}, {f(5, -1), f(5, 0)}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_EQ(M(i, j).coeff(1), q1[i][0] * q0inv[0][j] + q1[i][1] * q0inv[1][j]);
    // larger Mx extends without changing
    ResMat M2 = dwork_trivialize(Q.map([](const ResSeries& s) { return s; }), mx);
    EXPECT_TRUE(congruent(M2(0, 1), M(0, 1), mx));
}

TEST(Diagonalize, Examples) {
    auto d3 = diagonalize_const(f(3, 1), 3);
    EXPECT_TRUE(d3.double_root);
    EXPECT_EQ(d3.lambda, f(3, 2));
    auto d5 = diagonalize_const(f(5, 1), 5);
    EXPECT_FALSE(d5.lambda.in_prime_field());
    EXPECT_EQ(d5.lambda * d5.lambda_inv, f(5, 1));
    EXPECT_EQ(d5.lambda.frobenius(), d5.lambda_inv);
    auto d2 = diagonalize_const(f(7, 2), 7);
    EXPECT_TRUE(d2.double_root);
    EXPECT_EQ(d2.lambda, f(7, 1));
}

TEST(GammaScalar, EndToEnd) {
    const ResWach& w = reduced(3, 5, 3);
    const long mx = w.mx;
    ResMat M = dwork_trivialize(build_Q_kp2(w, mx), mx);
    GammaScalarReport rep = gamma_scalar_check(w, M, mx);
    ASSERT_EQ(rep.scalars.size(), w.gamma_gens.size());
    for (std::size_t g = 0; g < rep.scalars.size(); ++g) {
        long eps = mod_p(mpz_class(w.gamma_gens[g] % 3).get_si(), 3);
        EXPECT_EQ(rep.scalars[g], FqElem(3, eps).inverse());
    }
}

TEST(Cokernel, Examples) {
    EXPECT_EQ(psi_cokernel_membership(ResSeries(5, 0, 64)).verdict, CokernelVerdict::Trivial);
    // w = (psi - 1)(g)
    ResSeries g = ResSeries::from_values(5, {0, 2, 1, 0, 3}, 320).mul_x_power(-3);
    ResSeries w = psi(g) - g.truncated(64);
    EXPECT_EQ(psi_cokernel_membership(w.truncated(64)).verdict, CokernelVerdict::Trivial);
}

TEST(Extension, PFiveKEight) {
    const ResWach& w = reduced(5, 8, 15);
    PipelineResult pr = run_modp_pipeline(w, 2);
    ASSERT_TRUE(pr.extension.has_value());
    const ExtensionData& e = *pr.extension;
    EXPECT_EQ(e.mat_phi(0, 0).coeff(0), f(5, 1));
    EXPECT_EQ(e.mat_phi(1, 1).coeff(0), f(5, 1));
    EXPECT_TRUE(e.mat_phi(1, 0).is_zero());
    EXPECT_EQ(e.mat_phi(0, 1).valuation(), -1);
    EXPECT_EQ(e.mat_phi(0, 1).coeff(-1), f(5, 1));
    EXPECT_EQ(e.ramification, "peu");
    EXPECT_TRUE(e.nontrivial);
    for (const auto& c : pr.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(Pipeline, FaultFixtures) {
    const ResWach& w = reduced(5, 9, 5);
    try {
        run_modp_pipeline(perturb_alpha_bar(w, 2), 2);
        FAIL() << "no exception";
    } catch (const CheckFailure& e) {
        EXPECT_EQ(e.check(), "alpha-shape");
    }
    try {
        run_modp_pipeline(w, 2, w.beta + f(5, 1));
        FAIL() << "no exception";
    } catch (const CheckFailure& e) {
        EXPECT_EQ(e.check(), "delta-phi");
    }
}

TEST(Pipeline, WitnessJson) {
    const ResWach& w = reduced(3, 5, 3);
    std::string s = char_witness_to_json(run_modp_pipeline(w, 2).characters.at(0));
    EXPECT_NE(s.find("\"omega_exp\""), std::string::npos);
    EXPECT_NE(res_wach_to_json(w).find("\"Gbar\""), std::string::npos);
}

TEST(Pipeline, WrongLambdaAtDoubleRoot) {
    // beta = 1 at p = 3 has the double root 2, so the fixture must pick 1
    const ResWach& w = reduced(3, 5, 3);
    EXPECT_EQ(wrong_lambda(w), f(3, 1));
    try {
        run_modp_pipeline(w, 2, wrong_lambda(w));
        FAIL() << "no exception";
    } catch (const CheckFailure& e) {
        EXPECT_EQ(e.check(), "eigen-phi");
    }
}

TEST(Pipeline, FaultSuiteDetectsEverything) {
    for (const auto& o : fault_suite(7, 10, 2)) EXPECT_TRUE(o.detected()) << o.fixture << " observed '" << o.observed_check << "'";
}
