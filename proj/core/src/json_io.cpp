#include "wachlab/json_io.hpp"

#include <json.hpp>

namespace wachlab {

using nlohmann::json;

namespace {

std::string dump(const json& j, int indent) { return j.dump(indent); }

json ol_coeffs(const OLElem& x) {
    if (x.coeffs().size() == 1) return x.coeffs()[0].get_str();
    json a = json::array();
    for (const auto& c : x.coeffs()) a.push_back(c.get_str());
    return a;
}

std::vector<mpz_class> ol_from(const json& j) {
    if (j.is_string()) return {mpz_class(j.get<std::string>())};
    std::vector<mpz_class> out;
    for (const auto& c : j) out.emplace_back(c.get<std::string>());
    return out;
}

json series_json(const Series& s) {
    json coeffs = json::array();
    for (long i = s.low(); i < s.precision(); ++i) coeffs.push_back(ol_coeffs(s.coeff(i)));
    return {{"low", s.low()}, {"shift", s.shift()}, {"Mx", s.precision()}, {"coeffs", coeffs}};
}

Series series_from(const RingPtr& ring, const json& j) {
    const long low = j.at("low").get<long>();
    const long mx = j.at("Mx").get<long>();
    Series s(ring, low, mx, j.at("shift").get<int>());
    const auto& cs = j.at("coeffs");
    if (static_cast<long>(cs.size()) != mx - low) throw std::invalid_argument("series JSON: coefficient count differs from Mx - low");
    for (long i = low; i < mx; ++i) s.set_coeff(i, OLElem(ring, ol_from(cs[static_cast<std::size_t>(i - low)])));
    return s;
}

json res_json(const ResSeries& s) {
    json coeffs = json::array();
    for (long i = s.low(); i < s.precision(); ++i) coeffs.push_back(s.coeff(i).to_string());
    return {{"low", s.low()}, {"Mx", s.precision()}, {"coeffs", coeffs}};
}

FqElem fq_from(long p, const std::string& text) {
    // "a", "t", "b*t", "a+t", "a+b*t"
    auto tpos = text.find('t');
    if (tpos == std::string::npos) return FqElem(p, std::stol(text));
    long a = 0, b = 1;
    std::string head = text.substr(0, tpos);
    auto plus = head.find('+');
    std::string bpart = head;
    if (plus != std::string::npos) {
        a = std::stol(head.substr(0, plus));
        bpart = head.substr(plus + 1);
    }
    if (!bpart.empty()) b = std::stol(bpart.substr(0, bpart.find('*')));
    return FqElem(p, a, b);
}

template <class T, class F>
json mat_json(const Mat2<T>& m, F&& f) {
    return json::array({json::array({f(m(0, 0)), f(m(0, 1))}), json::array({f(m(1, 0)), f(m(1, 1))})});
}

json char_json(const CharSymbol& c) {
    return {{"omega_exp", c.omega_exp},
            {"lambda", {{"poly", polynomial_to_string(c.lambda.minimal_polynomial())},
                        {"root_tag", c.lambda.root_tag()},
                        {"value", c.lambda.to_string()}}},
            {"symbol", c.to_string()}};
}

json reduction_json(const ReductionResult& r) {
    json j;
    j["variant"] = to_string(r.variant);
    j["display"] = r.describe();
    json chars = json::array();
    for (const auto& c : r.characters) chars.push_back(char_json(c));
    j["characters"] = chars;
    if (r.variant == Variant::Irreducible) {
        j["ind_exponent"] = r.ind_exponent;
        if (r.rho) j["rho"] = {{"r", r.rho->r}, {"chi", char_json(r.rho->chi)}};
    }
    if (r.variant == Variant::NonSplit) {
        j["ramification"] = r.ramification;
        j["nontrivial"] = r.nontrivial;
    }
    j["provenance"] = to_string(r.provenance);
    j["parameters"] = {{"p", r.p}, {"k", r.k}, {"ap", r.ap}, {"val", r.val}};
    if (r.mx > 0) j["precisions"] = {{"Mx", r.mx}, {"N", r.np}};
    return j;
}

json checks_json(const std::vector<CheckResult>& cs) {
    json a = json::array();
    for (const auto& c : cs) a.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return a;
}

} // namespace

std::string series_to_json(const Series& s, int indent) { return dump(series_json(s), indent); }

Series series_from_json(const RingPtr& ring, const std::string& text) { return series_from(ring, json::parse(text)); }

std::string res_series_to_json(const ResSeries& s, int indent) { return dump(res_json(s), indent); }

ResSeries res_series_from_json(long p, const std::string& text) {
    json j = json::parse(text);
    const long low = j.at("low").get<long>();
    ResSeries s(p, low, j.at("Mx").get<long>());
    long i = low;
    for (const auto& c : j.at("coeffs")) s.set_coeff(i++, fq_from(p, c.get<std::string>()));
    return s;
}

std::string wach_to_json(const WachData& d, int indent) {
    const WachParams& prm = d.params;
    json params = {{"p", prm.prime()},
                   {"E", prm.ring->polynomial_string()},
                   {"E_lower", [&] {
                        json a = json::array();
                        for (const auto& c : prm.ring->eisenstein()) a.push_back(c.get_str());
                        return a;
                    }()},
                   {"k", prm.k},
                   {"ap", ol_coeffs(prm.ap)},
                   {"Mx", prm.mx},
                   {"N_target", prm.n_target},
                   {"gamma_gens", [&] {
                        json a = json::array();
                        for (const auto& g : prm.gamma_gens) a.push_back(g.get_str());
                        return a;
                    }()}};
    json G = json::array();
    for (std::size_t i = 0; i < d.G.size(); ++i)
        G.push_back({{"eps", prm.gamma_gens[i].get_str()},
                     {"matrix", mat_json(d.G[i], series_json)},
                     {"initial", mat_json(d.G_init.at(i), series_json)}});
    json j = {{"params", params},
              {"precision", d.precision},
              {"alpha", series_json(d.alpha)},
              {"P", mat_json(d.P, series_json)},
              {"G", G}};
    return dump(j, indent);
}

WachData wach_from_json(const std::string& text) {
    json j = json::parse(text);
    const json& prm = j.at("params");
    std::vector<mpz_class> lower;
    for (const auto& c : prm.at("E_lower")) lower.emplace_back(c.get<std::string>());
    const int precision = j.at("precision").get<int>();
    RingPtr ring = EisensteinRing::create(prm.at("p").get<long>(), lower, precision);
    WachData d;
    d.params.ring = ring;
    d.params.k = prm.at("k").get<long>();
    d.params.ap = OLElem(ring, ol_from(prm.at("ap")));
    d.params.mx = prm.at("Mx").get<long>();
    d.params.n_target = prm.at("N_target").get<int>();
    for (const auto& g : prm.at("gamma_gens")) d.params.gamma_gens.emplace_back(g.get<std::string>());
    d.precision = precision;
    d.alpha = series_from(ring, j.at("alpha"));
    auto mat = [&](const json& m) {
        return SeriesMat(series_from(ring, m[0][0]), series_from(ring, m[0][1]), series_from(ring, m[1][0]),
                         series_from(ring, m[1][1]));
    };
    d.P = mat(j.at("P"));
    for (const auto& g : j.at("G")) {
        d.G.push_back(mat(g.at("matrix")));
        d.G_init.push_back(mat(g.at("initial")));
    }
    return d;
}

std::string res_wach_to_json(const ResWach& w, int indent) {
    json G = json::array();
    for (std::size_t i = 0; i < w.Gbar.size(); ++i)
        G.push_back({{"eps", w.gamma_gens[i].get_str()}, {"matrix", mat_json(w.Gbar[i], res_json)}});
    json j = {{"p", w.p},
              {"k", w.k},
              {"Mx", w.mx},
              {"beta", w.beta.to_string()},
              {"alpha_bar", w.alpha_bar},
              {"u", w.ubar},
              {"Pbar", mat_json(w.Pbar(w.mx), res_json)},
              {"Gbar", G}};
    return dump(j, indent);
}

std::string char_witness_to_json(const CharWitness& c, int indent) {
    json scalars = json::array();
    for (const auto& s : c.gamma_scalars) scalars.push_back(s.to_string());
    json j = {{"lambda", c.lambda.to_string()},
              {"omega_exp", c.omega_exp},
              {"checked_precision", c.checked_precision},
              {"gamma_scalars", scalars},
              {"witness", {{"e", res_json(c.witness.e)}, {"f", res_json(c.witness.f)}}}};
    return dump(j, indent);
}

std::string reduction_to_json(const ReductionResult& r, int indent) { return dump(reduction_json(r), indent); }

std::string cross_report_to_json(const CrossReport& r, int indent) {
    json j = {{"match", r.match},
              {"formula", reduction_json(r.formula)},
              {"pipeline", reduction_json(r.pipeline)},
              {"checks", checks_json(r.checks)},
              {"diff", r.diff}};
    return dump(j, indent);
}

std::string wach_report_to_json(const WachReport& r, int indent) {
    return dump(json{{"ok", r.ok()}, {"checks", checks_json(r.checks)}}, indent);
}

} // namespace wachlab
