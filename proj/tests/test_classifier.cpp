#include "wachlab/apspec.hpp"
#include "wachlab/classifier.hpp"
#include "wachlab/errors.hpp"
#include "wachlab/json_io.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <random>

using namespace wachlab;

namespace {

OLElem ap_of(long p, const std::string& text, const std::string& e = "") { return parse_ap(parse_eisenstein(p, e), text); }

CharSymbol ch(long p, long a, long lam) { return CharSymbol(p, a, FqElem(p, mod_p(lam, p))); }

} // namespace

TEST(Characters, Algebra) {
    EXPECT_EQ(ch(5, 3, 3).to_string(), "omega^3*mu(3)");
    EXPECT_EQ(ch(5, 1, 1).to_string(), "omega");
    EXPECT_EQ(ch(5, 0, 1).to_string(), "1");
    EXPECT_EQ(ch(5, 7, 2), ch(5, 3, 2));
    EXPECT_EQ(ch(5, 3, 3) * ch(5, 1, 2), ch(5, 0, 1));
    EXPECT_EQ(ch(7, 2, 3).inverse(), ch(7, -2, 5));
}

TEST(Characters, CompletePairAndDualize) {
    // k = p+2: omega mu_l -> omega mu_{1/l}
    EXPECT_EQ(complete_pair(ch(5, 1, 2), 7), ch(5, 1, 3));
    // omega^{k-2} mu_l -> omega mu_{1/l}
    EXPECT_EQ(complete_pair(ch(7, 8, 4), 10), ch(7, 1, 2));
    EXPECT_EQ(complete_pair(ch(5, 7, 1), 8), ch(5, 0, 1));
    EXPECT_EQ(dualize(ch(5, -1, 3), 9), ch(5, 7, 3));
    EXPECT_EQ(dualize(ch(5, -1, 3), 7), ch(5, 1, 3));
    EXPECT_EQ(dualize(CharSymbol::trivial(7), 11), ch(7, 10, 1));
}

TEST(Rho, Canonicalize) {
    EXPECT_EQ(canonicalize_rho({3, ch(5, 1, 1)}), (RhoSymbol{1, CharSymbol::trivial(5)}));
    EXPECT_EQ(canonicalize_rho({2, ch(7, 1, 1)}), canonicalize_rho({2, ch(7, 1, -1)}));
    std::mt19937 rng(3);
    for (long p : {5L, 7L, 11L})
        for (int i = 0; i < 100; ++i) {
            RhoSymbol r{static_cast<long>(rng() % p), ch(p, static_cast<long>(rng() % (p - 1)), 1 + static_cast<long>(rng() % (p - 1)))};
            RhoSymbol c = canonicalize_rho(r);
            EXPECT_EQ(canonicalize_rho(c), c);
            for (const auto& o : rho_orbit(r)) EXPECT_EQ(canonicalize_rho(o), c);
        }
}

TEST(Classify, Examples) {
    ReductionResult a = classify(5, 7, ap_of(5, "pi", "x^2-5"));
    EXPECT_EQ(a.variant, Variant::Irreducible);
    EXPECT_EQ(a.ind_exponent, 2);

    ReductionResult b = classify(5, 9, ap_of(5, "5"));
    EXPECT_EQ(b.variant, Variant::SplitSum);
    EXPECT_EQ(b.characters, (std::vector<CharSymbol>{ch(5, 1, 2), ch(5, 3, 3)}));

    ReductionResult c = classify(3, 5, ap_of(3, "3"));
    EXPECT_EQ(c.variant, Variant::SplitSum);
    EXPECT_EQ(c.characters, (std::vector<CharSymbol>{ch(3, 1, 2), ch(3, 1, 2)}));

    ReductionResult d = classify(5, 8, ap_of(5, "15"));
    EXPECT_EQ(d.variant, Variant::NonSplit);
    EXPECT_EQ(d.ramification, "peu");
    EXPECT_TRUE(d.nontrivial);
    EXPECT_EQ(d.characters.at(0), ch(5, 6, 1));
    EXPECT_EQ(d.characters.at(1), ch(5, 1, 1));
    EXPECT_EQ(d.semisimplified().variant, Variant::SplitSum);

    ReductionResult e = classify(7, 10, ap_of(7, "2*p"));
    EXPECT_EQ(e.characters, (std::vector<CharSymbol>{ch(7, 1, 2), ch(7, 2, 4)}));
}

TEST(Classify, OutOfScope) {
    EXPECT_THROW(classify(5, 6, ap_of(5, "5")), OutOfScope);
    EXPECT_THROW(classify(5, 10, ap_of(5, "5")), OutOfScope);
    EXPECT_THROW(classify(5, 8, ap_of(5, "2")), OutOfScope);
    EXPECT_THROW(classify(5, 8, ap_of(5, "25")), OutOfScope);
    EXPECT_THROW(classify(5, 8, ap_of(5, "pi^3", "x^2-5")), OutOfScope);
}

TEST(Classify, DeterminantOnSplitSums) {
    for (long p : {3L, 5L, 7L, 11L, 13L})
        for (long k = p + 2; k <= 2 * p - 1; ++k)
            for (long c = 1; c < p; ++c) {
                ReductionResult r = classify(p, k, ap_of(p, std::to_string(c) + "*p"));
                ASSERT_EQ(r.characters.size(), 2u);
                EXPECT_EQ(r.characters[0] * r.characters[1], ch(p, k - 1, 1)) << p << " " << k << " " << c;
            }
}

TEST(Classify, KpTwoRootsAreConjugate) {
    for (long p : {5L, 7L, 11L})
        for (long c = 1; c < p; ++c) {
            ReductionResult r = classify(p, p + 2, ap_of(p, std::to_string(c) + "*p"));
            const FqElem& a = r.characters[0].lambda;
            const FqElem& b = r.characters[1].lambda;
            EXPECT_EQ(a * b, FqElem(p, 1));
            EXPECT_EQ(a * a - FqElem(p, c) * a + FqElem(p, 1), FqElem(p, 0));
            if (!a.in_prime_field()) EXPECT_EQ(a.frobenius(), b);
        }
}

TEST(ApSpec, Grammar) {
    auto z = parse_eisenstein(5, "");
    EXPECT_EQ(parse_ap(z, "15"), OLElem(z, 15));
    EXPECT_EQ(parse_ap(z, "3*p"), OLElem(z, 15));
    EXPECT_EQ(parse_ap(z, "3p"), OLElem(z, 15));
    EXPECT_EQ(parse_ap(z, "-(2 + p)^2"), OLElem(z, -49));
    auto r = parse_eisenstein(5, "x^2-5");
    OLElem pi = OLElem::uniformizer(r);
    EXPECT_EQ(parse_ap(r, "pi"), pi);
    EXPECT_EQ(parse_ap(r, "pi^2 + 2*pi"), OLElem(r, 5) + OLElem(r, 2) * pi);
    EXPECT_THROW(parse_ap(r, "pi +"), ParseError);
    EXPECT_THROW(parse_ap(r, "q"), ParseError);
    EXPECT_THROW(parse_eisenstein(5, "x^2-25"), ParseError);
    EXPECT_THROW(parse_eisenstein(5, "2x^2-5"), ParseError);
}

TEST(Json, Reduction) {
    ReductionResult r = classify(5, 9, ap_of(5, "5"));
    auto j = nlohmann::json::parse(reduction_to_json(r));
    EXPECT_EQ(j["variant"], "SplitSum");
    EXPECT_EQ(j["characters"].size(), 2u);
    EXPECT_EQ(j["characters"][1]["omega_exp"], 3);
    EXPECT_EQ(j["characters"][1]["lambda"]["value"], "3");
    EXPECT_EQ(j["parameters"]["k"], 9);
    ReductionResult f = classify(5, 7, ap_of(5, "5"));
    auto jf = nlohmann::json::parse(reduction_to_json(f));
    EXPECT_EQ(jf["characters"][0]["lambda"]["poly"], "x^2 + 4x + 1");
}

TEST(CrossValidate, Examples) {
    for (auto [p, k, a] : {std::tuple{3L, 5L, "3"}, {5L, 8L, "15"}, {7L, 10L, "14"}, {5L, 7L, "5"}}) {
        CrossReport rep = cross_validate(p, k, ap_of(p, a));
        EXPECT_TRUE(rep.match) << p << " " << k << " " << a << ": " << rep.diff;
    }
}

TEST(CrossValidate, RejectsForeignContext) {
    auto ap = ap_of(5, "5");
    WachContext ctx(pipeline_params(9, ap, {}));
    EXPECT_THROW(cross_validate(5, 8, ap, {}, &ctx), std::invalid_argument);
}
