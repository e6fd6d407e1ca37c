#include "wachlab/apspec.hpp"
#include "wachlab/classifier.hpp"
#include "wachlab/errors.hpp"
#include "wachlab/json_io.hpp"
#include "wachlab/modp.hpp"
#include "wachlab/selfcheck.hpp"
#include "wachlab/wach.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

using namespace wachlab;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kFailure = 1, kOutOfScope = 2, kParse = 3 };

struct Common {
    long mx = 0;
    int n_target = 2;
    std::vector<std::string> gens;
    std::string eisenstein;
    std::string output;
    std::string format = "json";
    std::string fixtures;  // directory for Wach/ResWach/witness JSON
};

PipelineOptions options_from(const Common& c) {
    PipelineOptions o;
    o.mx = c.mx;
    o.n_target = c.n_target;
    for (const auto& g : c.gens) o.gamma_gens.emplace_back(g);
    return o;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot open " + path);
        }
    }
    std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

// "5", "5,7,11", "5..7" or a mix such as "3,5..7".
std::vector<long> parse_range(const std::string& text) {
    std::vector<long> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        auto dots = part.find("..");
        try {
            if (dots == std::string::npos) {
                out.push_back(std::stol(part));
            } else {
                long a = std::stol(part.substr(0, dots));
                long b = std::stol(part.substr(dots + 2));
                for (long x = a; x <= b; ++x) out.push_back(x);
            }
        } catch (const std::logic_error&) {
            throw ParseError("bad range \"" + text + "\"");
        }
    }
    return out;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        auto b = part.find_first_not_of(' ');
        if (b == std::string::npos) continue;
        out.push_back(part.substr(b, part.find_last_not_of(' ') - b + 1));
    }
    return out;
}

// Runs cross_validate, doubling Mx once when the precision runs out.
CrossReport validate_with_retry(long p, long k, const OLElem& ap, PipelineOptions opts, const WachContext* ctx) {
    try {
        return cross_validate(p, k, ap, opts, ctx);
    } catch (const PrecisionError&) {
        opts.mx = 2 * pipeline_params(k, ap, opts).mx;
        return cross_validate(p, k, ap, opts, nullptr);
    }
}

std::string text_of(const ReductionResult& r) {
    std::ostringstream os;
    os << "p=" << r.p << " k=" << r.k << " a_p=" << r.ap << " val=" << r.val << ": " << to_string(r.variant) << " "
       << r.describe() << " [" << to_string(r.provenance) << "]";
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text << "\n";
}

void write_fixtures(const std::string& dir, long k, const OLElem& ap, const PipelineOptions& opts) {
    std::filesystem::create_directories(dir);
    WachData d = build_wach(pipeline_params(k, ap, opts));
    ResWach w = reduce_wach(d);
    PipelineResult pr = run_modp_pipeline(d);
    write_text(std::filesystem::path(dir) / "wach.json", wach_to_json(d, 1));
    write_text(std::filesystem::path(dir) / "res_wach.json", res_wach_to_json(w, 1));
    for (std::size_t i = 0; i < pr.characters.size(); ++i)
        write_text(std::filesystem::path(dir) / ("witness" + std::to_string(i) + ".json"),
                   char_witness_to_json(pr.characters[i], 1));
}

int cmd_reduce(long p, long k, const std::string& ap_text, bool validate, const Common& c) {
    RingPtr ring;
    OLElem ap;
    try {
        ring = parse_eisenstein(p, c.eisenstein);
        ap = parse_ap(ring, ap_text);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    }
    Output out(c.output);
    try {
        ReductionResult formula = classify(p, k, ap);
        formula.ap = ap_text;
        if (!validate || !ap.valuation().is_exactly(1, 1)) {
            if (c.format == "text") out.os() << text_of(formula) << "\n";
            else out.os() << reduction_to_json(formula, 2) << "\n";
            return kOk;
        }
        CrossReport rep = validate_with_retry(p, k, ap, options_from(c), nullptr);
        if (!c.fixtures.empty()) write_fixtures(c.fixtures, k, ap, options_from(c));
        rep.formula.ap = rep.pipeline.ap = ap_text;
        ReductionResult shown = rep.formula;
        if (rep.match) shown.provenance = Provenance::Both;
        if (c.format == "text") {
            out.os() << text_of(shown) << "\n";
            if (!rep.match) out.os() << "MISMATCH: " << rep.diff << "\n";
        } else {
            json j = json::parse(reduction_to_json(shown));
            j["validation"] = json::parse(cross_report_to_json(rep));
            out.os() << j.dump(2) << "\n";
        }
        return rep.match ? kOk : kFailure;
    } catch (const OutOfScope& e) {
        std::cerr << "out of scope: " << e.what() << "\n";
        return kOutOfScope;
    } catch (const CheckFailure& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return kFailure;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kFailure;
    }
}

struct Row {
    long p = 0;
    long k = 0;
    std::string ap;
    std::vector<std::string> cells;
    bool mismatch = false;
};

std::string csv_cell(std::string s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

std::string lambda_poly(const ReductionResult& r) {
    if (r.variant == Variant::Irreducible || r.characters.empty()) return "";
    if (r.k == r.p + 2) {
        // (x - lambda)(x - lambda^-1)
        const FqElem& a = r.characters[0].lambda;
        const FqElem& b = r.characters[1].lambda;
        FqElem s = a + b;
        FqElem t = a * b;
        return polynomial_to_string({t.a(), mod_p(-s.a(), r.p), 1});
    }
    const CharSymbol& sub = r.variant == Variant::NonSplit ? r.characters[0] : [&]() -> const CharSymbol& {
        for (const auto& ch : r.characters)
            if (ch.omega_exp == mod_p(r.k - 2, r.p - 1)) return ch;
        return r.characters[0];
    }();
    return polynomial_to_string(sub.lambda.minimal_polynomial());
}

void fill_row(Row& row, const RingPtr& ring, bool validate, const Common& c, const WachContext* ctx) {
    std::string val, variant, ch1, ch2, lpoly, ram, match;
    try {
        OLElem ap = parse_ap(ring, row.ap);
        val = ap.valuation().to_string();
        ReductionResult r = classify(row.p, row.k, ap);
        variant = r.variant == Variant::Irreducible ? "ind(omega2^" + std::to_string(r.ind_exponent) + ")" : to_string(r.variant);
        if (r.variant != Variant::Irreducible) {
            ch1 = r.characters.at(0).to_string();
            ch2 = r.characters.at(1).to_string();
        } else if (r.rho) {
            ch1 = r.rho->to_string();
        }
        lpoly = lambda_poly(r);
        ram = r.ramification;
        if (validate) {
            if (ap.valuation().is_exactly(1, 1)) {
                CrossReport rep = validate_with_retry(row.p, row.k, ap, options_from(c), ctx);
                match = rep.match ? "yes" : "no";
                row.mismatch = !rep.match;
                if (!rep.match) std::cerr << "p=" << row.p << " k=" << row.k << " ap=" << row.ap << ": " << rep.diff << "\n";
            } else {
                match = "n/a";
            }
        }
    } catch (const OutOfScope& e) {
        variant = "out-of-scope";
        ch1 = e.what();
    } catch (const std::exception& e) {
        variant = "error";
        ch1 = e.what();
        match = validate ? "no" : "";
        row.mismatch = true;
    }
    row.cells = {std::to_string(row.p), std::to_string(row.k), row.ap, val, variant, ch1, ch2, lpoly, ram, match};
}

int cmd_table(const std::string& ps, const std::string& ks, const std::string& aps, bool all_c, bool validate, int jobs,
              const Common& c) {
    std::vector<long> primes;
    std::vector<long> weights;
    std::vector<std::string> ap_list;
    try {
        primes = parse_range(ps);
        weights = parse_range(ks);
        ap_list = split_list(aps);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    }
    std::map<long, RingPtr> rings;
    std::vector<std::vector<Row>> groups;  // one group per (p, k)
    try {
        for (long p : primes) {
            rings[p] = parse_eisenstein(p, c.eisenstein);
            for (long k : weights) {
                if (k < p + 2 || k > 2 * p - 1) continue;
                std::vector<Row> g;
                std::vector<std::string> list = ap_list;
                if (all_c) {
                    list.clear();
                    for (long cc = 1; cc < p; ++cc) list.push_back(std::to_string(cc) + "*p");
                }
                for (const auto& a : list) g.push_back({p, k, a, {}, false});
                if (!g.empty()) groups.push_back(std::move(g));
            }
        }
        for (auto& g : groups)
            for (auto& r : g) parse_ap(rings[r.p], r.ap);
    } catch (const std::invalid_argument& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= groups.size()) return;
            auto& g = groups[i];
            std::optional<WachContext> ctx;
            if (validate) {
                try {
                    OLElem ap = parse_ap(rings[g[0].p], g[0].ap);
                    ctx.emplace(pipeline_params(g[0].k, ap, options_from(c)));
                } catch (const std::exception&) {
                    ctx.reset();
                }
            }
            for (auto& r : g) fill_row(r, rings[r.p], validate, c, ctx ? &*ctx : nullptr);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::max(1, jobs); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    Output out(c.output);
    out.os() << "p,k,ap,val,variant,char1,char2,lambda_poly,ramification,match\n";
    bool any_mismatch = false;
    for (const auto& g : groups)
        for (const auto& r : g) {
            for (std::size_t i = 0; i < r.cells.size(); ++i) out.os() << (i ? "," : "") << csv_cell(r.cells[i]);
            out.os() << "\n";
            any_mismatch = any_mismatch || r.mismatch;
        }
    return any_mismatch ? kFailure : kOk;
}

int cmd_verify(bool quick, std::uint64_t seed, const std::string& inject, const std::string& instance, const Common& c) {
    json report = json::object();
    json checks = json::array();
    bool ok = true;
    auto add = [&](const std::string& name, bool passed, const std::string& detail) {
        checks.push_back({{"name", name}, {"passed", passed}, {"detail", detail}});
        ok = ok && passed;
    };

    auto configs = default_operator_configs();
    if (quick) configs.resize(2);
    for (const auto& r : operator_identity_suite(configs, quick ? 10 : 100, seed)) add("padic:" + r.name, r.passed, r.detail);

    struct Inst {
        long p, k;
        std::string ap;
    };
    std::vector<Inst> instances = {{3, 5, "3"}, {5, 8, "15"}, {5, 9, "5"}, {7, 10, "14"}, {5, 7, "10"}};
    if (quick) instances.resize(3);
    if (!instance.empty()) {
        auto parts = split_list(instance);
        if (parts.size() != 3) {
            std::cerr << "parse error: --instance expects p,k,ap\n";
            return kParse;
        }
        try {
            instances.push_back({std::stol(parts[0]), std::stol(parts[1]), parts[2]});
        } catch (const std::logic_error&) {
            std::cerr << "parse error: bad --instance\n";
            return kParse;
        }
    }

    for (const auto& in : instances) {
        const std::string tag = "[p=" + std::to_string(in.p) + ",k=" + std::to_string(in.k) + ",ap=" + in.ap + "]";
        try {
            RingPtr ring = parse_eisenstein(in.p, c.eisenstein);
            OLElem ap = parse_ap(ring, in.ap);
            WachData d = build_wach(pipeline_params(in.k, ap, options_from(c)));
            if (inject == "gamma") d = inject_gamma_fault(d, 0, in.k, 0, 1);
            for (const auto& r : verify_wach(d).checks) add("wach:" + r.name + tag, r.passed, r.detail);
            ResWach w = reduce_wach(d);
            if (inject == "alpha") w = perturb_alpha_bar(w, in.p - 1);
            std::optional<FqElem> lam;
            if (inject == "lambda") lam = wrong_lambda(w);
            PipelineResult pr = run_modp_pipeline(w, d.precision, lam);
            for (const auto& r : pr.checks) add("modp:" + r.name + tag, r.passed, r.detail);
            CrossReport cr = cross_validate(in.p, in.k, ap, options_from(c));
            add("classify:cross-validate" + tag, cr.match, cr.match ? "formula and pipeline agree" : cr.diff);
        } catch (const CheckFailure& e) {
            add("modp:" + e.check() + tag, false, e.what());
        } catch (const std::exception& e) {
            add("error" + tag, false, e.what());
        }
    }
    if (inject.empty() || inject == "none") {
        for (const auto& f : fault_suite(5, 9, 1))
            add("fault:" + f.fixture, f.detected(), "expected " + f.expected_check + ", observed " +
                                                          (f.observed_check.empty() ? "nothing" : f.observed_check));
    }
    report["ok"] = ok;
    report["seed"] = seed;
    report["quick"] = quick;
    report["checks"] = checks;
    Output out(c.output);
    out.os() << report.dump(2) << "\n";
    return ok ? kOk : kFailure;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--mx", c.mx, "X-adic precision (default max(4(p-1), k+p))");
    sub->add_option("--n", c.n_target, "target p-adic precision N")->check(CLI::PositiveNumber);
    sub->add_option("--gens", c.gens, "epsilon values of the Gamma generators");
    sub->add_option("--eisenstein", c.eisenstein, "Eisenstein polynomial in x, e.g. \"x^2-5\"");
    sub->add_option("-o,--output", c.output, "output file (default stdout)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wachlab: mod p reduction of crystalline representations V_{k,a_p}"};
    app.require_subcommand(1);
    Common common;

    long p = 0, k = 0;
    std::string ap;
    bool validate = false;
    auto* reduce = app.add_subcommand("reduce", "classify one (p, k, a_p)");
    reduce->add_option("--p", p, "prime")->required();
    reduce->add_option("--k", k, "weight")->required();
    reduce->add_option("--ap", ap, "a_p: integer, c*p, pi or a polynomial in pi")->required();
    reduce->add_flag("--validate", validate, "also run the Wach/mod p pipeline and compare");
    reduce->add_option("--format", common.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    reduce->add_option("--fixtures", common.fixtures, "with --validate, write Wach, ResWach and witness JSON here");
    add_common(reduce, common);

    std::string ps, ks, aps;
    bool all_c = false;
    int jobs = 1;
    auto* table = app.add_subcommand("table", "classification table over a grid");
    table->add_option("--p", ps, "primes, e.g. 5 or 5,7 or 5..13")->required();
    table->add_option("--k", ks, "weights, e.g. 7..9 (intersected with [p+2, 2p-1])")->required();
    table->add_option("--ap", aps, "comma-separated a_p values");
    table->add_flag("--all-c", all_c, "use a_p = c*p for c = 1..p-1");
    table->add_flag("--validate", validate, "fill the match column from the pipeline");
    table->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    add_common(table, common);

    bool quick = false;
    std::uint64_t seed = 1;
    std::string inject, instance;
    auto* verify = app.add_subcommand("verify", "invariant and relation suite");
    verify->add_flag("--quick", quick, "small subset");
    verify->add_option("--seed", seed, "seed for the randomized identities");
    verify->add_option("--inject", inject, "fault to inject: gamma, alpha or lambda")
        ->check(CLI::IsMember({"none", "gamma", "alpha", "lambda"}));
    verify->add_option("--instance", instance, "extra instance p,k,ap");
    add_common(verify, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kParse;
    }

    try {
        if (*reduce) return cmd_reduce(p, k, ap, validate, common);
        if (*table) {
            if (aps.empty() && !all_c) {
                std::cerr << "parse error: give --ap or --all-c\n";
                return kParse;
            }
            return cmd_table(ps, ks, aps, all_c, validate, jobs, common);
        }
        if (*verify) return cmd_verify(quick, seed, inject, instance, common);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
