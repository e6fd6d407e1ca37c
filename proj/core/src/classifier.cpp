#include "wachlab/classifier.hpp"

#include "wachlab/errors.hpp"

#include <algorithm>
#include <sstream>

namespace wachlab {

namespace {

FqElem fp(long p, long a) { return FqElem(p, mod_p(a, p)); }

FqElem residue_of_ap_over_p(const OLElem& ap) { return fp(ap.ring()->prime(), ap.divide_by_p().residue()); }

std::string join_chars(const std::vector<CharSymbol>& cs, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < cs.size(); ++i) s += (i ? sep : "") + cs[i].to_string();
    return s;
}

} // namespace

// ------------------------------------------------------------- characters

CharSymbol::CharSymbol(long p_, long a, FqElem l) : p(p_), omega_exp(mod_p(a, p_ - 1)), lambda(std::move(l)) {
    if (lambda.is_zero()) throw std::invalid_argument("CharSymbol: lambda = 0");
}

CharSymbol CharSymbol::trivial(long p) { return CharSymbol(p, 0, fp(p, 1)); }

CharSymbol CharSymbol::operator*(const CharSymbol& o) const { return CharSymbol(p, omega_exp + o.omega_exp, lambda * o.lambda); }

CharSymbol CharSymbol::inverse() const { return CharSymbol(p, -omega_exp, lambda.inverse()); }

CharSymbol CharSymbol::twist(long w) const { return CharSymbol(p, omega_exp + w, lambda); }

bool CharSymbol::operator==(const CharSymbol& o) const {
    return p == o.p && omega_exp == o.omega_exp && lambda == o.lambda;
}

bool CharSymbol::operator<(const CharSymbol& o) const {
    if (omega_exp != o.omega_exp) return omega_exp < o.omega_exp;
    return lambda < o.lambda;
}

std::string lambda_label(const FqElem& lambda) {
    if (lambda.in_prime_field()) return std::to_string(lambda.a());
    return "root" + std::to_string(lambda.root_tag()) + "[" + polynomial_to_string(lambda.minimal_polynomial()) + "]";
}

std::string CharSymbol::to_string() const {
    std::string s;
    if (omega_exp != 0) s = "omega" + (omega_exp == 1 ? std::string() : "^" + std::to_string(omega_exp));
    if (!lambda.is_one()) s += (s.empty() ? "" : "*") + std::string("mu(") + lambda_label(lambda) + ")";
    return s.empty() ? "1" : s;
}

std::string RhoSymbol::to_string() const {
    std::string s = "rho(" + std::to_string(r) + ", " + chi.to_string() + ")";
    return s;
}

std::vector<RhoSymbol> rho_orbit(const RhoSymbol& rho) {
    const long p = rho.chi.p;
    const CharSymbol mu_m1(p, 0, fp(p, -1));
    const long s = p - 1 - rho.r;
    return {rho, {rho.r, rho.chi * mu_m1}, {s, rho.chi.twist(rho.r)}, {s, rho.chi.twist(rho.r) * mu_m1}};
}

RhoSymbol canonicalize_rho(const RhoSymbol& rho) {
    const long p = rho.chi.p;
    if (rho.r < 0 || rho.r > p - 1) throw std::invalid_argument("canonicalize_rho: r outside [0, p-1]");
    auto orbit = rho_orbit(rho);
    return *std::min_element(orbit.begin(), orbit.end(), [](const RhoSymbol& a, const RhoSymbol& b) {
        if (a.r != b.r) return a.r < b.r;
        return a.chi < b.chi;
    });
}

// --------------------------------------------------------------- results

std::string to_string(Variant v) {
    switch (v) {
    case Variant::Irreducible: return "Irreducible";
    case Variant::SplitSum: return "SplitSum";
    default: return "NonSplit";
    }
}

std::string to_string(Provenance v) {
    switch (v) {
    case Provenance::Formula: return "formula";
    case Provenance::Pipeline: return "pipeline";
    default: return "both";
    }
}

ReductionResult ReductionResult::semisimplified() const {
    if (variant != Variant::NonSplit) return *this;
    ReductionResult r = *this;
    r.variant = Variant::SplitSum;
    std::sort(r.characters.begin(), r.characters.end());
    r.ramification.clear();
    r.nontrivial = false;
    return r;
}

std::string ReductionResult::describe() const {
    std::ostringstream os;
    switch (variant) {
    case Variant::Irreducible:
        os << "ind(omega2^" << ind_exponent << ")";
        if (rho) os << " = " << rho->to_string();
        break;
    case Variant::SplitSum: os << join_chars(characters, " + "); break;
    case Variant::NonSplit:
        os << "0 -> " << characters.at(0).to_string() << " -> V -> " << characters.at(1).to_string() << " -> 0 ("
           << ramification << " ramifiee, " << (nontrivial ? "nontrivial" : "trivial") << ")";
        break;
    }
    return os.str();
}

CharSymbol complete_pair(const CharSymbol& sub, long k) { return sub.inverse().twist(k - 1); }

CharSymbol dualize(const CharSymbol& c, long k) { return c.twist(k - 1); }

ReductionResult classify(long p, long k, const OLElem& ap) {
    if (!ap.ring() || ap.ring()->prime() != p) throw std::invalid_argument("classify: a_p is not over Q_" + std::to_string(p));
    if (p < 3) throw OutOfScope("p = 2 has no weights in range");
    if (k < p + 2 || k > 2 * p - 1)
        throw OutOfScope("k = " + std::to_string(k) + " outside [p+2, 2p-1] = [" + std::to_string(p + 2) + ", " +
                         std::to_string(2 * p - 1) + "] (prior work covers other weights)");
    Valuation v = ap.valuation();
    ReductionResult res;
    res.p = p;
    res.k = k;
    res.ap = ap.to_string();
    res.val = v.to_string();
    res.provenance = Provenance::Formula;
    if (v.lower_bound_only) {
        if (v.compare(1, 1) > 0) throw OutOfScope("val(a_p) " + v.to_string() + " > 1 is outside this theorem (prior work)");
        throw PrecisionError("classify: a_p is zero to working precision " + v.to_string());
    }
    if (v.compare(0, 1) <= 0) throw OutOfScope("val(a_p) = 0: a_p must lie in the maximal ideal");
    if (v.compare(1, 1) > 0) throw OutOfScope("val(a_p) = " + v.to_string() + " > 1 is outside this theorem (prior work)");

    if (v.compare(1, 1) < 0) {
        // Newton slopes val(a_p) and k-1-val(a_p) differ, so Frobenius is semisimple.
        if (v.compare(k - 1, 2) == 0) throw CheckFailure("frobenius-semisimple", "equal Newton slopes");
        res.variant = Variant::Irreducible;
        res.ind_exponent = k - p;
        res.rho = canonicalize_rho({k - p - 1, CharSymbol::trivial(p)});
        return res;
    }

    const FqElem c = residue_of_ap_over_p(ap);
    if (c.is_zero()) throw CheckFailure("lambda-nonzero", "a_p/p reduces to 0 although val(a_p) = 1");
    if (k == p + 2) {
        auto roots = quadratic_roots(c, fp(p, 1));
        res.variant = Variant::SplitSum;
        res.characters = {CharSymbol(p, 1, roots[0]), CharSymbol(p, 1, roots[1])};
    } else {
        const FqElem lambda = c * fp(p, k - 1);
        if (lambda.is_zero()) throw CheckFailure("lambda-nonzero", "(a_p/p)(k-1) = 0 mod p");
        CharSymbol sub(p, k - 2, lambda);
        CharSymbol quo = complete_pair(sub, k);
        res.characters = {sub, quo};
        if (k == p + 3 && (lambda == fp(p, 1) || lambda == fp(p, -1))) {
            res.variant = Variant::NonSplit;
            res.ramification = "peu";
            res.nontrivial = true;
            return res;
        }
        res.variant = Variant::SplitSum;
    }
    std::sort(res.characters.begin(), res.characters.end());
    return res;
}

// --------------------------------------------------------- cross-validation

WachParams pipeline_params(long k, const OLElem& ap, const PipelineOptions& opts) {
    WachParams prm = WachParams::defaults(ap, k);
    if (opts.mx > 0) prm.mx = opts.mx;
    prm.n_target = opts.n_target;
    if (!opts.gamma_gens.empty()) prm.gamma_gens = opts.gamma_gens;
    return prm;
}

ReductionResult pipeline_result(long p, long k, const OLElem& ap, const PipelineResult& pr) {
    ReductionResult res;
    res.p = p;
    res.k = k;
    res.ap = ap.to_string();
    res.val = ap.valuation().to_string();
    res.provenance = Provenance::Pipeline;
    res.mx = pr.mx;
    res.np = pr.np;
    for (const auto& cw : pr.characters) res.characters.push_back(dualize(CharSymbol(p, cw.omega_exp, cw.lambda), k));
    if (pr.extension) {
        res.variant = Variant::NonSplit;
        res.ramification = pr.extension->ramification;
        res.nontrivial = pr.extension->nontrivial;
    } else {
        res.variant = Variant::SplitSum;
        std::sort(res.characters.begin(), res.characters.end());
    }
    return res;
}

CrossReport cross_validate(long p, long k, const OLElem& ap, const PipelineOptions& opts, const WachContext* ctx) {
    CrossReport rep;
    rep.formula = classify(p, k, ap);
    if (!ap.valuation().is_exactly(1, 1)) throw OutOfScope("cross_validate: the pipeline needs val(a_p) = 1");
    WachParams prm = pipeline_params(k, ap, opts);
    std::optional<WachContext> own;
    if (ctx) {
        const WachParams& s = ctx->shape();
        if (s.k != k || s.mx != prm.mx || s.n_target != prm.n_target || s.gamma_gens != prm.gamma_gens ||
            !s.ring->same_field(*ap.ring()))
            throw std::invalid_argument("cross_validate: context built for different parameters");
    } else {
        own.emplace(prm);
        ctx = &*own;
    }
    WachData data = build_wach(*ctx, ap);
    WachReport wr = verify_wach(data);
    rep.checks.insert(rep.checks.end(), wr.checks.begin(), wr.checks.end());
    if (!wr.ok()) {
        rep.diff = "Wach verification failed: " + wr.first_failure();
        return rep;
    }
    PipelineResult pr = run_modp_pipeline(data);
    rep.checks.insert(rep.checks.end(), pr.checks.begin(), pr.checks.end());
    rep.pipeline = pipeline_result(p, k, ap, pr);
    rep.formula.mx = rep.pipeline.mx;
    rep.formula.np = rep.pipeline.np;

    const auto& pc = rep.pipeline.characters;
    if (pc.size() == 2) {
        CharSymbol det = pc[0] * pc[1];
        bool ok = det == CharSymbol(p, k - 1, fp(p, 1));
        rep.checks.push_back({"determinant", ok, "char1 char2 = " + det.to_string()});
    }

    std::ostringstream diff;
    if (rep.formula.variant != rep.pipeline.variant)
        diff << "variant: formula " << to_string(rep.formula.variant) << ", pipeline " << to_string(rep.pipeline.variant) << "; ";
    if (rep.formula.characters != rep.pipeline.characters)
        diff << "characters: formula {" << join_chars(rep.formula.characters, ", ") << "}, pipeline {"
             << join_chars(rep.pipeline.characters, ", ") << "}; ";
    if (rep.formula.ramification != rep.pipeline.ramification)
        diff << "ramification: formula '" << rep.formula.ramification << "', pipeline '" << rep.pipeline.ramification << "'; ";
    if (rep.formula.nontrivial != rep.pipeline.nontrivial) diff << "nontrivial flag differs; ";
    rep.diff = diff.str();
    rep.match = rep.diff.empty() && std::all_of(rep.checks.begin(), rep.checks.end(), [](const CheckResult& c) { return c.passed; });
    if (rep.diff.empty() && !rep.match)
        for (const auto& c : rep.checks)
            if (!c.passed) {
                rep.diff = "check failed: " + c.name + " (" + c.detail + ")";
                break;
            }
    return rep;
}

} // namespace wachlab
