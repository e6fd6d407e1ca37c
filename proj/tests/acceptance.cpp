// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "wachlab/apspec.hpp"
#include "wachlab/classifier.hpp"
#include "wachlab/errors.hpp"
#include "wachlab/modp.hpp"
#include "wachlab/selfcheck.hpp"
#include "wachlab/wach.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

using namespace wachlab;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    int number;
    bool pass = true;
    std::string summary;
    std::vector<std::string> problems;

    void fail(const std::string& why) {
        pass = false;
        if (problems.size() < 10) problems.push_back(why);
    }
};

std::mutex io_mutex;

void report(const Verdict& v) {
    std::lock_guard<std::mutex> lock(io_mutex);
    std::printf("%s criterion %d: %s\n", v.pass ? "PASS" : "FAIL", v.number, v.summary.c_str());
    for (const auto& p : v.problems) std::printf("    %s\n", p.c_str());
    std::fflush(stdout);
}

std::string tag(long p, long k, const std::string& ap) {
    return "p=" + std::to_string(p) + " k=" + std::to_string(k) + " a_p=" + ap;
}

bool is_wach_check(const std::string& name) {
    static const std::set<std::string> names = {"fiber", "alpha-constant", "alpha-integrality", "commutation",
                                                "initial-agreement", "det", "cocycle"};
    return names.count(name.substr(0, name.find('['))) > 0;
}

struct GridStats {
    std::mutex m;
    int instances = 0;
    int matches = 0;
    int wach_checks = 0;
    int wach_failures = 0;
    int det_checked = 0;
    int det_failures = 0;
    double slowest = 0;
    std::string slowest_tag;
    std::vector<std::string> problems;
    std::vector<std::string> wach_problems;
    std::vector<std::string> det_problems;
};

void check_determinant(const ReductionResult& r, GridStats& s, const std::string& where) {
    if (r.variant != Variant::SplitSum || r.characters.size() != 2) return;
    bool ok = r.characters[0] * r.characters[1] == CharSymbol(r.p, r.k - 1, FqElem(r.p, 1));
    s.det_checked++;
    if (!ok) {
        s.det_failures++;
        s.det_problems.push_back(where + ": product " + (r.characters[0] * r.characters[1]).to_string());
    }
}

// Runs cross_validate on every a_p = c p for the listed (p, k), reusing one
// context per (p, k).  Work is spread over (p, k) groups.
void run_grid(const std::vector<std::pair<long, long>>& pk, GridStats& s, int jobs,
              const std::function<void(long, long, long, const CrossReport&)>& extra = {}) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= pk.size()) return;
            auto [p, k] = pk[i];
            RingPtr ring = parse_eisenstein(p, "");
            std::optional<WachContext> ctx;
            try {
                ctx.emplace(pipeline_params(k, OLElem(ring, p), {}));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(s.m);
                s.problems.push_back(tag(p, k, "*") + ": context failed: " + e.what());
                continue;
            }
            for (long c = 1; c < p; ++c) {
                const std::string ap_text = std::to_string(c) + "*p";
                const auto t0 = Clock::now();
                CrossReport rep;
                std::string error;
                try {
                    rep = cross_validate(p, k, parse_ap(ring, ap_text), {}, &*ctx);
                } catch (const std::exception& e) {
                    error = e.what();
                }
                const double dt = seconds_since(t0);
                std::lock_guard<std::mutex> lock(s.m);
                s.instances++;
                if (dt > s.slowest) {
                    s.slowest = dt;
                    s.slowest_tag = tag(p, k, ap_text);
                }
                if (!error.empty()) {
                    s.problems.push_back(tag(p, k, ap_text) + ": " + error);
                    continue;
                }
                if (rep.match) s.matches++;
                else s.problems.push_back(tag(p, k, ap_text) + ": " + rep.diff);
                for (const auto& ck : rep.checks) {
                    if (!is_wach_check(ck.name)) continue;
                    s.wach_checks++;
                    if (!ck.passed) {
                        s.wach_failures++;
                        s.wach_problems.push_back(tag(p, k, ap_text) + ": " + ck.name + " " + ck.detail);
                    }
                }
                check_determinant(rep.formula, s, tag(p, k, ap_text) + " (formula)");
                check_determinant(rep.pipeline, s, tag(p, k, ap_text) + " (pipeline)");
                if (extra) extra(p, k, c, rep);
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

void fill(Verdict& v, const std::vector<std::string>& problems) {
    for (const auto& p : problems) v.fail(p);
}

} // namespace

int main(int argc, char** argv) {
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--jobs") jobs = std::max(1, std::atoi(argv[i + 1]));
    const std::vector<long> primes = {3, 5, 7, 11, 13};
    bool all_pass = true;
    auto finish = [&](const Verdict& v) {
        report(v);
        all_pass = all_pass && v.pass;
    };

    // 1 and 6: k in [p+3, 2p-1]
    GridStats g1;
    {
        std::vector<std::pair<long, long>> pk;
        for (long p : primes)
            for (long k = p + 3; k <= 2 * p - 1; ++k) pk.push_back({p, k});
        // heaviest first for better load balance
        std::sort(pk.begin(), pk.end(), [](auto a, auto b) { return a.first * a.second > b.first * b.second; });
        const auto t0 = Clock::now();
        run_grid(pk, g1, jobs);
        const double total = seconds_since(t0);
        Verdict v{1};
        fill(v, g1.problems);
        if (g1.instances != 232) v.fail("expected 232 instances, ran " + std::to_string(g1.instances));
        if (g1.slowest >= 60) v.fail("slowest instance " + g1.slowest_tag + " took " + std::to_string(g1.slowest) + " s");
        if (total >= 1800) v.fail("grid took " + std::to_string(total) + " s");
        std::ostringstream os;
        os << g1.matches << "/" << g1.instances << " instances match (k in [p+3, 2p-1]); grid " << total
           << " s, slowest " << g1.slowest << " s (" << g1.slowest_tag << ")";
        v.summary = os.str();
        finish(v);
    }

    // 2: k = p+2
    GridStats g2;
    {
        std::vector<std::pair<long, long>> pk;
        for (long p : primes) pk.push_back({p, p + 2});
        int field_ext = 0, double_roots = 0;
        std::mutex m;
        run_grid(pk, g2, jobs, [&](long, long, long, const CrossReport& rep) {
            std::lock_guard<std::mutex> lock(m);
            const auto& ch = rep.pipeline.characters;
            if (ch.size() == 2 && !ch[0].lambda.in_prime_field()) field_ext++;
            if (ch.size() == 2 && ch[0] == ch[1]) double_roots++;
        });
        Verdict v{2};
        fill(v, g2.problems);
        if (g2.instances != 34) v.fail("expected 34 instances, ran " + std::to_string(g2.instances));
        if (field_ext == 0) v.fail("no F_{p^2} case exercised");
        if (double_roots == 0) v.fail("no double-root case exercised");
        std::ostringstream os;
        os << g2.matches << "/" << g2.instances << " instances match (k = p+2), " << field_ext << " over F_{p^2}, "
           << double_roots << " double roots";
        v.summary = os.str();
        finish(v);
    }

    // 3: extension class
    {
        Verdict v{3};
        int ok = 0;
        struct Case {
            long p, k, c, lambda;
        };
        const std::vector<Case> cases = {{5, 8, 3, 1}, {5, 8, 2, -1}, {7, 10, 4, 1}, {7, 10, 3, -1}};
        double slowest = 0;
        for (const auto& cs : cases) {
            const std::string t = tag(cs.p, cs.k, std::to_string(cs.c) + "*p");
            const auto t0 = Clock::now();
            try {
                RingPtr ring = parse_eisenstein(cs.p, "");
                OLElem ap = parse_ap(ring, std::to_string(cs.c) + "*p");
                CrossReport rep = cross_validate(cs.p, cs.k, ap);
                WachData d = build_wach(pipeline_params(cs.k, ap, {}));
                PipelineResult pr = run_modp_pipeline(d);
                slowest = std::max(slowest, seconds_since(t0));
                const FqElem lam(cs.p, mod_p(cs.lambda, cs.p));
                bool good = rep.match;
                if (!rep.match) v.fail(t + ": " + rep.diff);
                if (!pr.extension) {
                    v.fail(t + ": no extension data");
                    continue;
                }
                const ExtensionData& e = *pr.extension;
                auto need = [&](bool cond, const std::string& what) {
                    if (!cond) {
                        good = false;
                        v.fail(t + ": " + what);
                    }
                };
                need(e.mat_phi(0, 0).is_zero() == false && e.mat_phi(0, 0).valuation() == 0 && e.mat_phi(0, 0).coeff(0) == lam,
                     "mat_phi(0,0) != lambda");
                need(e.mat_phi(1, 1).valuation() == 0 && e.mat_phi(1, 1).coeff(0) == lam, "mat_phi(1,1) != lambda");
                need(e.mat_phi(1, 0).is_zero(), "mat_phi not upper triangular");
                for (long i = 1; i < e.mat_phi(0, 0).precision(); ++i)
                    need(e.mat_phi(0, 0).coeff(i).is_zero() && e.mat_phi(1, 1).coeff(i).is_zero(), "mat_phi diagonal not constant");
                need(!e.mat_phi(0, 1).is_zero() && e.mat_phi(0, 1).valuation() == -1, "mat_phi off-diagonal not of order X^-1");
                for (const auto& g : e.mat_gamma) {
                    need(g(1, 0).is_zero(), "mat_gamma not upper triangular");
                    need(g(0, 1).valuation() >= 2, "mat_gamma off-diagonal below X^2");
                }
                need(e.ramification == "peu", "ramification " + e.ramification);
                need(e.nontrivial, "extension reported trivial");
                need(e.cokernel_verdict == "nontrivial", "cokernel verdict " + e.cokernel_verdict);
                int agreeing = 0;
                for (const auto& w : e.window_verdicts) agreeing = w.ends_with(":not-image") ? agreeing + 1 : 0;
                need(agreeing >= 2, "verdict not stable over consecutive windows");
                if (good) ok++;
            } catch (const std::exception& ex) {
                v.fail(t + ": " + ex.what());
            }
        }
        if (slowest >= 120) v.fail("slowest instance took " + std::to_string(slowest) + " s");
        std::ostringstream os;
        os << ok << "/" << cases.size() << " extension instances (p=5,7; k=p+3; lambda=+-1) non-split, peu ramifiee, "
           << "nontrivial; slowest " << slowest << " s";
        v.summary = os.str();
        finish(v);
    }

    // 4: irreducible branch
    {
        Verdict v{4};
        int ok = 0, total = 0;
        for (long p : {5L, 7L, 11L}) {
            RingPtr ring = parse_eisenstein(p, "x^2-" + std::to_string(p));
            OLElem pi = parse_ap(ring, "pi");
            for (long k = p + 2; k <= 2 * p - 1; ++k) {
                ++total;
                const auto t0 = Clock::now();
                try {
                    ReductionResult r = classify(p, k, pi);
                    bool good = r.variant == Variant::Irreducible && r.ind_exponent == k - p && r.val == "1/2";
                    if (seconds_since(t0) >= 1) good = false;
                    if (good) ok++;
                    else v.fail(tag(p, k, "pi") + ": " + r.describe());
                } catch (const std::exception& e) {
                    v.fail(tag(p, k, "pi") + ": " + e.what());
                }
            }
        }
        v.summary = std::to_string(ok) + "/" + std::to_string(total) + " instances give ind(omega2^(k-p)) for a_p = pi, E = x^2 - p";
        finish(v);
    }

    // 5: operator identities
    {
        Verdict v{5};
        const auto t0 = Clock::now();
        auto results = operator_identity_suite(default_operator_configs(), 100, 20240601);
        const double dt = seconds_since(t0);
        int failed = 0;
        for (const auto& r : results)
            if (!r.passed) {
                failed++;
                v.fail(r.name + ": " + r.detail);
            }
        if (dt >= 60) v.fail("suite took " + std::to_string(dt) + " s");
        std::ostringstream os;
        os << results.size() - failed << "/" << results.size() << " identity groups clean over "
           << default_operator_configs().size() << " configurations x 100 instances; " << dt << " s";
        v.summary = os.str();
        finish(v);
    }

    // 6: Wach relations on the grid of criterion 1 plus uniqueness samples
    {
        Verdict v{6};
        fill(v, g1.wach_problems);
        if (g1.wach_checks == 0) v.fail("no Wach checks recorded");
        int unique_ok = 0;
        const std::vector<std::tuple<long, long, long>> samples = {{5, 8, 3}, {7, 11, 2}, {11, 15, 5}};
        for (auto [p, k, c] : samples) {
            try {
                RingPtr ring = parse_eisenstein(p, "");
                WachParams prm = pipeline_params(k, OLElem(ring, c * p), {});
                if (uniqueness_under_refinement(prm, build_wach(prm))) unique_ok++;
                else v.fail(tag(p, k, std::to_string(c) + "*p") + ": truncation changed under Mx doubling");
            } catch (const std::exception& e) {
                v.fail(tag(p, k, std::to_string(c) + "*p") + ": " + e.what());
            }
        }
        std::ostringstream os;
        os << g1.wach_checks - g1.wach_failures << "/" << g1.wach_checks << " Wach relation checks pass on "
           << g1.instances << " instances; uniqueness " << unique_ok << "/" << samples.size();
        v.summary = os.str();
        finish(v);
    }

    // 7: determinant
    {
        Verdict v{7};
        int checked = g1.det_checked + g2.det_checked;
        int failures = g1.det_failures + g2.det_failures;
        fill(v, g1.det_problems);
        fill(v, g2.det_problems);
        if (checked == 0) v.fail("no split outputs checked");
        v.summary = std::to_string(checked - failures) + "/" + std::to_string(checked) +
                    " split outputs satisfy char1 char2 = omega^(k-1)";
        finish(v);
    }

    // 8: fault sensitivity
    {
        Verdict v{8};
        int detected = 0, total = 0;
        for (auto [p, k, c] : std::vector<std::tuple<long, long, long>>{{5, 9, 1}, {3, 5, 1}, {7, 10, 2}, {5, 7, 1}}) {
            try {
                for (const auto& f : fault_suite(p, k, c)) {
                    ++total;
                    if (f.detected()) detected++;
                    else
                        v.fail(tag(p, k, std::to_string(c) + "*p") + ": fixture " + f.fixture + " expected " + f.expected_check +
                               ", observed " + (f.observed_check.empty() ? "silent pass" : f.observed_check));
                }
            } catch (const std::exception& e) {
                v.fail(tag(p, k, std::to_string(c) + "*p") + ": " + e.what());
            }
        }
        v.summary = std::to_string(detected) + "/" + std::to_string(total) + " fault fixtures caught by the named check";
        finish(v);
    }
    return all_pass ? 0 : 1;
}
