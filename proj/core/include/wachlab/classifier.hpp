#pragma once

#include "wachlab/eisenstein.hpp"
#include "wachlab/fq.hpp"
#include "wachlab/modp.hpp"
#include "wachlab/wach.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wachlab {

// omega^a mu_lambda, a taken modulo p-1.
struct CharSymbol {
    long p = 0;
    long omega_exp = 0;
    FqElem lambda;

    CharSymbol() = default;
    CharSymbol(long p, long omega_exp, FqElem lambda);
    static CharSymbol trivial(long p);

    CharSymbol operator*(const CharSymbol& o) const;
    CharSymbol inverse() const;
    CharSymbol twist(long omega_power) const;
    bool operator==(const CharSymbol& o) const;
    bool operator!=(const CharSymbol& o) const { return !(*this == o); }
    bool operator<(const CharSymbol& o) const;

    // "omega^3*mu(3)"; lambda outside F_p is written by minimal polynomial and root tag.
    std::string to_string() const;
};

std::string lambda_label(const FqElem& lambda);

// rho(r, chi) = ind(omega_2^{r+1}) (x) chi.
struct RhoSymbol {
    long r = 0;
    CharSymbol chi;

    bool operator==(const RhoSymbol& o) const { return r == o.r && chi == o.chi; }
    std::string to_string() const;
};

// The least element of {(r,chi), (r,chi mu_-1), (p-1-r, chi omega^r), (p-1-r, chi omega^r mu_-1)}.
RhoSymbol canonicalize_rho(const RhoSymbol& rho);
std::vector<RhoSymbol> rho_orbit(const RhoSymbol& rho);

enum class Variant { Irreducible, SplitSum, NonSplit };
enum class Provenance { Formula, Pipeline, Both };
std::string to_string(Variant v);
std::string to_string(Provenance v);

struct ReductionResult {
    long p = 0;
    long k = 0;
    std::string ap;
    std::string val;
    Variant variant = Variant::SplitSum;
    std::optional<RhoSymbol> rho;          // Irreducible
    long ind_exponent = 0;                 // h in ind(omega_2^h) as the theorem writes it
    std::vector<CharSymbol> characters;    // SplitSum: sorted; NonSplit: {sub, quotient}
    std::string ramification;              // NonSplit only
    bool nontrivial = false;               // NonSplit only
    Provenance provenance = Provenance::Formula;
    long mx = 0;
    int np = 0;

    // Semisimplification of a NonSplit result.
    ReductionResult semisimplified() const;
    std::string describe() const;
};

// The reduction predicted by the classification theorem.  OutOfScope for
// k outside [p+2, 2p-1] or val(a_p) outside (0, 1].
ReductionResult classify(long p, long k, const OLElem& ap);

CharSymbol complete_pair(const CharSymbol& sub, long k);
CharSymbol dualize(const CharSymbol& c, long k);

struct PipelineOptions {
    long mx = 0;       // 0: default max(4(p-1), k+p)
    int n_target = 2;
    std::vector<mpz_class> gamma_gens;  // empty: 1+p and the least primitive root
};

struct CrossReport {
    bool match = false;
    ReductionResult formula;
    ReductionResult pipeline;
    std::vector<CheckResult> checks;
    std::string diff;
};

// Runs the Wach construction and the mod-p pipeline, dualizes the measured
// characters and compares them with classify().  `ctx`, when given, must
// share p, E, k and the options with the request.
CrossReport cross_validate(long p, long k, const OLElem& ap, const PipelineOptions& opts = {},
                           const WachContext* ctx = nullptr);

// The V-side reduction from pipeline output (characters dualized).
ReductionResult pipeline_result(long p, long k, const OLElem& ap, const PipelineResult& pr);

WachParams pipeline_params(long k, const OLElem& ap, const PipelineOptions& opts);

} // namespace wachlab
