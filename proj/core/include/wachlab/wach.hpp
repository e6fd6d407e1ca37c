#pragma once

#include "wachlab/eisenstein.hpp"
#include "wachlab/matrix.hpp"
#include "wachlab/series.hpp"

#include <gmpxx.h>

#include <string>
#include <vector>

namespace wachlab {

using SeriesMat = Mat2<Series>;

struct WachParams {
    RingPtr ring;
    long k = 0;
    OLElem ap;
    long mx = 0;
    int n_target = 2;
    // epsilon(gamma) of the chosen generators of Gamma
    std::vector<mpz_class> gamma_gens;

    // Mx = max(4(p-1), k+p), N = 2, generators 1+p and the least primitive root.
    static WachParams defaults(const OLElem& ap, long k);

    long prime() const { return ring->prime(); }
    // N + (k-1)(Mx - k + 2) p-adic digits.
    int working_precision() const;
    void validate() const;
};

/*
 * Everything in the construction that depends on (p, E, k, Mx, N, generators)
 * but not on a_p: the lambda products, the Gamma-matrices G^{(k-1)}, q^{k-1},
 * and the images of these under phi and gamma.  Building one context and
 * reusing it across many a_p is much cheaper than starting over.
 */
class WachContext {
public:
    explicit WachContext(const WachParams& shape);

    const WachParams& shape() const noexcept { return shape_; }
    const RingPtr& ring() const noexcept { return ring_; }
    int working_precision() const noexcept { return w_; }

    // lambda_- and lambda_+ modulo X^{k-1}; lambda_- carries a denominator p.
    const Series& lambda_minus() const noexcept { return lambda_minus_; }
    const Series& lambda_plus() const noexcept { return lambda_plus_; }
    // Number of q_n factors retained (n <= n_max).
    long factors_retained() const noexcept { return n_max_; }
    // (lambda_-/lambda_+)^{k-1} modulo X^{k-1}.
    const Series& ratio_power() const noexcept { return ratio_; }
    const Series& q_power() const noexcept { return q_pow_; }
    const Series& phi_x_power(long l) const { return phi_x_pow_.at(static_cast<std::size_t>(l)); }

    struct PerGenerator {
        mpz_class eps;
        SeriesMat g_init;      // at X-precision Mx, zero beyond X^{k-2}
        SeriesMat phi_g_init;  // phi(G^{(k-1)})
        Series gamma_q_pow;    // gamma(q^{k-1})
        Series gamma_ratio;    // gamma(ratio truncated to degree k-2)
    };
    std::size_t generator_count() const noexcept { return gens_.size(); }
    const PerGenerator& generator(std::size_t gen) const { return gens_.at(gen); }
    const SeriesMat& initial_gamma(std::size_t gen) const { return gens_.at(gen).g_init; }

private:
    WachParams shape_;
    RingPtr ring_;
    int w_ = 0;
    long n_max_ = 0;
    Series lambda_minus_;
    Series lambda_plus_;
    Series ratio_;
    Series q_pow_;
    std::vector<Series> phi_x_pow_;  // phi(X)^l for l < Mx
    std::vector<PerGenerator> gens_;
};

struct WachData {
    WachParams params;
    int precision = 0;          // certified p-adic precision of P and G
    Series alpha;               // degree <= k-2, known exactly modulo p^precision
    SeriesMat P;
    std::vector<SeriesMat> G;   // one per generator
    std::vector<SeriesMat> G_init;
    std::vector<long> inner_iterations;  // total Neumann iterations per generator
};

// (lambda_-/lambda_+)^{k-1} modulo X^mx with denominator shift <= budget.
Series lambda_ratio_power(RingPtr ring, long k, long mx, int budget = 2);
// Truncation to degree <= k-2 of a_p (lambda_-/lambda_+)^{k-1}, integrality asserted.
Series build_alpha(const WachContext& ctx, const OLElem& ap);
SeriesMat build_P(const WachContext& ctx, const Series& alpha);
// diag(g_+^{k-1}, g_-^{k-1}) modulo X^{k-1}.
SeriesMat initial_gamma_matrix(const WachContext& ctx, std::size_t gen);
// Successive approximation from G^{(k-1)} up to X^Mx.
SeriesMat solve_gamma_matrix(const WachContext& ctx, const OLElem& ap, std::size_t gen, long* iterations = nullptr);

WachData build_wach(const WachContext& ctx, const OLElem& ap);
WachData build_wach(const WachParams& params);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct WachReport {
    std::vector<CheckResult> checks;
    bool ok() const;
    // First failing check, or "".
    std::string first_failure() const;
};

// Commutation, cocycle (both orders), G = G^{(k-1)} mod X^{k-1}, alpha(0) = a_p,
// det G, fiber P(0), all at p-adic precision `np` (default: the data's N_target).
WachReport verify_wach(const WachData& data, int np = 0);

// Adds p^{N-1} to one coefficient of G_gen at the given degree (>= k-1).
WachData inject_gamma_fault(const WachData& data, std::size_t gen, long degree, int row = 0, int col = 1);

// Recomputes with Mx doubled and compares truncations modulo (p^N, X^Mx).
bool uniqueness_under_refinement(const WachParams& params, const WachData& data);

} // namespace wachlab
