#pragma once

#include "wachlab/eisenstein.hpp"
#include "wachlab/modp.hpp"
#include "wachlab/wach.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wachlab {

struct OperatorConfig {
    long p = 3;
    std::string eisenstein;  // "" for E = x - p
    int np = 6;
    long mx = 16;

    std::string label() const;
};

// Default configurations for the operator identity suite.
std::vector<OperatorConfig> default_operator_configs();

/*
 * Randomized padic-core identities on `instances` random inputs per
 * configuration: psi(phi(f)) = f, psi((1+X)^i phi(f)) = 0, phi gamma = gamma phi,
 * gamma_a gamma_b = gamma_ab, q_{n+1} = phi(q_n), X q_1 = phi(X), and
 * associativity of substitution.  One result per (configuration, identity).
 */
std::vector<CheckResult> operator_identity_suite(const std::vector<OperatorConfig>& configs, int instances,
                                                 std::uint64_t seed);

// Fault fixtures: each must be caught by the named check.
struct FaultOutcome {
    std::string fixture;
    std::string expected_check;
    std::string observed_check;  // "" when nothing fired
    bool detected() const { return !observed_check.empty() && observed_check == expected_check; }
};

// Least a in F_p^x that is not an eigenvalue of phi on the reduced module.
FqElem wrong_lambda(const ResWach& w);

// Perturbed G_gamma coefficient, perturbed alpha_bar (below X^{p-1}, at
// X^{p-1}, and above) and a wrong lambda, on the instance (p, k, c*p).
std::vector<FaultOutcome> fault_suite(long p, long k, long c);

} // namespace wachlab
