#include "wachlab/selfcheck.hpp"

#include "wachlab/apspec.hpp"
#include "wachlab/errors.hpp"
#include "wachlab/modp.hpp"
#include "wachlab/series.hpp"

#include <random>

namespace wachlab {

namespace {

Series random_series(const RingPtr& ring, long mx, std::mt19937_64& rng) {
    Series s(ring, 0, mx);
    const mpz_class& m = ring->modulus();
    for (long i = 0; i < mx; ++i)
        for (int j = 0; j < ring->degree(); ++j) {
            mpz_class x = mpz_class(static_cast<unsigned long>(rng() >> 1));
            x = (x << 62) + mpz_class(static_cast<unsigned long>(rng() >> 2));
            s.raw(i, j) = x % m;
        }
    return s;
}

mpz_class random_unit(long p, std::mt19937_64& rng) {
    for (;;) {
        long a = static_cast<long>(rng() % static_cast<std::uint64_t>(p * p * p * p)) + 1;
        if (a % p != 0) return a;
    }
}

bool agree(const Series& a, const Series& b) {
    long mx = std::min(a.precision(), b.precision());
    int np = std::min(a.value_precision(), b.value_precision());
    if (mx <= 0 || np <= 0) throw PrecisionError("no common precision left to compare");
    return congruent(a, b, mx, np);
}

struct Tally {
    explicit Tally(std::string n) : name(std::move(n)) {}
    std::string name;
    int failures = 0;
    int runs = 0;
    std::string first;
};

} // namespace

std::string OperatorConfig::label() const {
    return "p=" + std::to_string(p) + (eisenstein.empty() ? "" : ",E=" + eisenstein) + ",N=" + std::to_string(np) +
           ",Mx=" + std::to_string(mx);
}

std::vector<OperatorConfig> default_operator_configs() {
    return {{3, "", 6, 18}, {5, "", 5, 20}, {5, "x^2-5", 5, 16}, {7, "", 4, 21}, {3, "x^3+3*x-3", 4, 12}};
}

std::vector<CheckResult> operator_identity_suite(const std::vector<OperatorConfig>& configs, int instances,
                                                 std::uint64_t seed) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    for (const auto& cfg : configs) {
        RingPtr ring = parse_eisenstein(cfg.p, cfg.eisenstein, cfg.np);
        const long p = cfg.p;
        std::vector<Tally> t = {Tally("psi-phi"), Tally("psi-basis"), Tally("phi-gamma"), Tally("gamma-cocycle"),
                                Tally("substitute-assoc")};
        auto run = [&](Tally& tl, auto&& body) {
            ++tl.runs;
            try {
                if (!body()) {
                    ++tl.failures;
                    if (tl.first.empty()) tl.first = "identity violated";
                }
            } catch (const std::exception& e) {
                ++tl.failures;
                if (tl.first.empty()) tl.first = e.what();
            }
        };
        for (int n = 0; n < instances; ++n) {
            Series f = random_series(ring, cfg.mx, rng);
            run(t[0], [&] { return agree(psi(frobenius_phi(f)), f); });
            run(t[1], [&] {
                long i = 1 + static_cast<long>(rng() % static_cast<std::uint64_t>(p - 1));
                Series fs = frobenius_phi(f);
                Series b = power(Series::one(ring, fs.precision()) + Series::x(ring, fs.precision()), i);
                Series r = psi(b * fs);
                return agree(r, Series(ring, 0, r.precision()));
            });
            mpz_class a = random_unit(p, rng);
            mpz_class b = random_unit(p, rng);
            run(t[2], [&] { return agree(frobenius_phi(gamma_act(f, a)), gamma_act(frobenius_phi(f), a)); });
            run(t[3], [&] { return agree(gamma_act(gamma_act(f, b), a), gamma_act(f, a * b)); });
            run(t[4], [&] {
                Series g = random_series(ring, cfg.mx, rng).mul_x_power(1).truncated(cfg.mx);
                Series h = random_series(ring, cfg.mx, rng).mul_x_power(1).truncated(cfg.mx);
                g.set_coeff(1, OLElem(ring, 1));
                h.set_coeff(1, OLElem(ring, 1));
                return agree(substitute(substitute(f, g), h), substitute(f, substitute(g, h)));
            });
        }
        Tally q("q-series");
        for (long n = 1; n <= 3; ++n)
            run(q, [&] { return agree(q_series(ring, n + 1, cfg.mx), frobenius_phi(q_series(ring, n, cfg.mx), cfg.mx)); });
        run(q, [&] { return agree(q_series(ring, 1, cfg.mx).mul_x_power(1).truncated(cfg.mx), phi_of_x(ring, cfg.mx)); });
        t.push_back(q);
        for (const auto& tl : t)
            out.push_back({tl.name + "[" + cfg.label() + "]", tl.failures == 0,
                           std::to_string(tl.runs - tl.failures) + "/" + std::to_string(tl.runs) + " passed" +
                               (tl.first.empty() ? "" : "; first failure: " + tl.first)});
    }
    return out;
}

FqElem wrong_lambda(const ResWach& w) {
    const long p = w.p;
    for (long a = 1; a < p; ++a) {
        FqElem cand(p, a);
        bool eigen = w.k == p + 2 ? cand + cand.inverse() == w.beta : cand == w.beta;
        if (!eigen) return cand;
    }
    throw std::logic_error("wrong_lambda: every element of F_p^x is an eigenvalue");
}

std::vector<FaultOutcome> fault_suite(long p, long k, long c) {
    RingPtr ring = EisensteinRing::unramified(p, kParsePrecision);
    OLElem ap(ring, c * p);
    WachData data = build_wach(WachParams::defaults(ap, k));
    std::vector<FaultOutcome> out;
    auto observe = [](auto&& body) -> std::string {
        try {
            body();
        } catch (const CheckFailure& e) {
            return e.check();
        }
        return "";
    };

    {
        FaultOutcome f{"gamma-coefficient", "commutation", ""};
        WachData bad = inject_gamma_fault(data, 0, k, 0, 1);
        std::string first = verify_wach(bad).first_failure();
        f.observed_check = first.substr(0, first.find('['));
        out.push_back(f);
    }
    ResWach w = reduce_wach(data);
    out.push_back({"alpha-below-p-1", "alpha-shape",
                   observe([&] { run_modp_pipeline(perturb_alpha_bar(w, p - 2), data.precision); })});
    out.push_back({"alpha-leading", "beta-cross",
                   observe([&] { run_modp_pipeline(perturb_alpha_bar(w, p - 1), data.precision); })});
    const std::string tail_check = k == p + 2 ? "gamma-scalar" : "delta-gamma";
    if (k - 2 >= p)
        out.push_back({"alpha-tail", tail_check, observe([&] { run_modp_pipeline(perturb_alpha_bar(w, p), data.precision); })});
    const FqElem wrong = wrong_lambda(w);
    const std::string lambda_check = k == p + 2 ? "eigen-phi" : "delta-phi";
    out.push_back({"wrong-lambda", lambda_check, observe([&] { run_modp_pipeline(w, data.precision, wrong); })});
    return out;
}

} // namespace wachlab
