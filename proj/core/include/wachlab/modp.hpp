#pragma once

#include "wachlab/fq.hpp"
#include "wachlab/matrix.hpp"
#include "wachlab/res_series.hpp"
#include "wachlab/wach.hpp"

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace wachlab {

using ResMat = Mat2<ResSeries>;

// A polynomial over F_p, coefficients from degree 0, viewed as a series to precision mx.
ResSeries exact_series(long p, const std::vector<long>& coeffs, long mx);

/*
 * Reduction of the Wach data modulo the maximal ideal.  P is stored as the
 * exact polynomial data (X^{(p-1)(k-1)} and alpha_bar) after checking it
 * against the reduced matrix; Gbar is known modulo X^mx.
 */
struct ResWach {
    long p = 0;
    long k = 0;
    long mx = 0;
    FqElem beta;
    std::vector<long> alpha_bar;  // degree <= k-2
    std::vector<long> ubar;       // alpha_bar = beta * ubar * X^{p-1}
    std::vector<mpz_class> gamma_gens;
    std::vector<ResMat> Gbar;
    FqElem ap_over_p;             // residue of a_p/p

    // Pbar with exact entries delivered to precision mx.
    ResMat Pbar(long mx) const;
    ResSeries alpha_series(long mx) const { return exact_series(p, alpha_bar, mx); }
    ResSeries u_series(long mx) const { return exact_series(p, ubar, mx); }
};

struct AlphaFactor {
    FqElem beta;
    std::vector<long> u;
};

// alpha_bar = beta u X^{p-1} with u(0) = 1.  CheckFailure "alpha-shape" if
// the X-valuation is not p-1, "beta-cross" if beta differs from `expected`.
AlphaFactor factor_alpha_bar(const std::vector<long>& alpha_bar, long p, long k,
                             const std::optional<FqElem>& expected = std::nullopt);

ResWach reduce_wach(const WachData& data);

// Element A e + B f of the reduced module, with Laurent coordinates.
struct ModElem {
    ResSeries e;
    ResSeries f;

    long precision() const { return std::min(e.precision(), f.precision()); }
    ModElem scaled(const FqElem& c) const { return {e.scaled(c), f.scaled(c)}; }
    ModElem times(const ResSeries& s) const { return {e * s, f * s}; }
    friend ModElem operator+(const ModElem& a, const ModElem& b) { return {a.e + b.e, a.f + b.f}; }
    friend ModElem operator-(const ModElem& a, const ModElem& b) { return {a.e - b.e, a.f - b.f}; }
};

ModElem apply_phi(const ResWach& w, const ModElem& m);
ModElem apply_gamma(const ResWach& w, std::size_t gen, const ModElem& m);
// Both coordinates agree below X^mx.
bool congruent(const ModElem& a, const ModElem& b, long mx);

// Fixed point of z -> u phi(z) - X^{(p-1)(k-p-2)} phi^2(z) / lambda^2 in 1 + X F_q[[X]].
struct ZSolution {
    ResSeries z;
    int iterations = 0;
};
ZSolution solve_z(const ResSeries& u, const FqElem& lambda, long p, long k, long mx);

struct CharWitness {
    FqElem lambda;
    long omega_exp = 0;
    ModElem witness;
    long checked_precision = 0;
    std::vector<FqElem> gamma_scalars;  // one per generator
};

// The line spanned by delta = -(phi(z)/lambda) e/X^p + z f/X.  Checks
// "delta-phi" and "delta-gamma".
CharWitness delta_line(const ResWach& w, const ResSeries& z, const FqElem& lambda);

// Character of the quotient by the delta-line, measured on e/(z X^{k-2}).
CharWitness quotient_line(const ResWach& w, const ResSeries& z, const FqElem& lambda);

// Matrix of phi in the basis {e/X^p, f/X} for k = p+2.
Mat2<ResSeries> build_Q_kp2(const ResWach& w, long mx);

// M = Id + O(X) with M^{-1} Q phi(M) = Q(0), from the coefficient recurrence.
ResMat dwork_trivialize(const ResMat& Q, long mx);

struct ConstDiagonalization {
    FqElem lambda;
    FqElem lambda_inv;
    bool double_root = false;
    // Eigenvector (1, -lambda) of Q(0) for lambda.
    std::array<FqElem, 2> eigenvector;
};
ConstDiagonalization diagonalize_const(const FqElem& beta, long p);

struct GammaScalarReport {
    std::vector<FqElem> scalars;  // gamma acts by this scalar on the trivialized basis
    long omega_exp = 0;
    long checked_precision = 0;
};
// Matrix of each generator in the basis {e/X^p, f/X} M must be scalar.
GammaScalarReport gamma_scalar_check(const ResWach& w, const ResMat& M, long mx);

struct ExtensionData {
    ResMat mat_phi;
    std::vector<ResMat> mat_gamma;
    std::string ramification;  // "peu" or "tres"
    bool nontrivial = false;
    std::string cokernel_verdict;
    std::vector<std::string> window_verdicts;
    std::string line_model;
};

enum class CokernelVerdict { Trivial, Nontrivial, Inconclusive };
std::string to_string(CokernelVerdict v);

struct CokernelReport {
    CokernelVerdict verdict = CokernelVerdict::Inconclusive;
    long pole_bound = 0;
    std::vector<long> windows;
    std::vector<bool> in_image;  // per window
};

// Whether w lies in the image of psi - 1 on F_p((X)), decided on windows
// [X^{-B}, X^M) for M = 4, 8, ...; needs three consecutive agreeing verdicts.
CokernelReport psi_cokernel_membership(const ResSeries& w, int max_windows = 5);
// Class of -psi(x_entry) in F_p((X))/(psi - 1): nontrivial unless it lies in the image.
CokernelReport psi_cokernel_witness(const ResSeries& x_entry, int max_windows = 5);

ExtensionData extension_data(const ResWach& w, const ResSeries& z, const FqElem& lambda);

// Characters of the semisimplified reduction of V* found by the pipeline.
struct PipelineResult {
    std::vector<CharWitness> characters;  // sub first when there is a sub-line
    bool double_root = false;
    std::optional<ExtensionData> extension;
    std::vector<CheckResult> checks;
    long mx = 0;
    int np = 0;
};

// `lambda_override` replaces the eigenvalue read off alpha_bar (fault fixture).
PipelineResult run_modp_pipeline(const WachData& data);
PipelineResult run_modp_pipeline(const ResWach& w, int np, const std::optional<FqElem>& lambda_override = std::nullopt);

// Fault fixtures for the mod-p stage.
ResWach perturb_alpha_bar(const ResWach& w, long degree, long delta = 1);

} // namespace wachlab
