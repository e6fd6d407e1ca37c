#include "wachlab/wach.hpp"

#include "wachlab/errors.hpp"
#include "wachlab/fq.hpp"

#include <algorithm>
#include <sstream>

namespace wachlab {

namespace {

constexpr int kGuardDigits = 16;

Series zero_series(const RingPtr& ring, long mx) { return Series(ring, 0, mx); }

Series constant_series(const RingPtr& ring, long c, long mx) { return Series::constant(ring, OLElem(ring, c), mx); }

// Copy of f (coefficients below `degree`) re-windowed to precision mx.
Series polynomial_part(const Series& f, long degree, long mx) {
    Series r(f.ring(), 0, mx, f.shift());
    for (long i = std::max<long>(f.low(), 0); i < std::min(degree, f.precision()); ++i)
        for (int j = 0; j < f.ring()->degree(); ++j) r.raw(i, j) = f.raw(i, j);
    return r;
}

// q/p, stored as q with shift 1.
Series q_over_p(const RingPtr& ring, long mx) {
    const long p = ring->prime();
    std::vector<mpz_class> qc(static_cast<std::size_t>(p));
    for (long j = 0; j < p; ++j)
        mpz_bin_uiui(qc[static_cast<std::size_t>(j)].get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(j + 1));
    return Series::from_integers(ring, qc, mx, 0, 1);
}

// (1+X)^{p^n} - 1
Series frobenius_power_of_x(const RingPtr& ring, long n, long mx) {
    const long p = ring->prime();
    std::vector<mpz_class> c(static_cast<std::size_t>(mx));
    mpz_class m = pow_p(p, n);
    if (mx > 0) c[0] = 0;
    mpz_class b = 1;
    for (long j = 1; j < mx; ++j) {
        b *= (m - (j - 1));
        mpz_divexact_ui(b.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(j));
        c[static_cast<std::size_t>(j)] = b;
    }
    return Series::from_integers(ring, c, mx);
}

struct LambdaProducts {
    Series minus;
    Series plus;
    long n_max = 0;
};

/*
 * lambda_- = prod_{n >= 0} phi^{2n}(q/p) by doubling:
 * Pi_{2m} = Pi_m * phi^{2m}(Pi_m), so 2^j factors cost j substitutions.
 */
LambdaProducts lambda_products(const RingPtr& ring, long mx) {
    const long p = ring->prime();
    const int np = ring->precision();
    long n_required = std::max<long>(np + 1, ceil_log((mx + p - 2) / (p - 1), p) + 1);
    Series prod = q_over_p(ring, mx);
    long m = 1;  // factors in prod
    while (2 * m < n_required) {
        Series y = frobenius_power_of_x(ring, 2 * m, mx);
        prod = (prod * substitute(prod, y)).normalized();
        if (prod.precision() > mx) prod = prod.truncated(mx);
        m *= 2;
    }
    const long n_max = 2 * m;
    // The first omitted factor q_{n_max+1}/p must be 1 modulo (p^Np, X^mx);
    // later factors are its images under phi and stay 1.
    RingPtr check_ring = ring->at_precision(np + 1);
    Series tail = q_series(check_ring, n_max + 1, mx);
    tail.raw(0) -= p;
    if (tail.content_valuation() < np + 1)
        throw CheckFailure("lambda-tail", "factor q_" + std::to_string(n_max + 1) + "/p differs from 1 modulo p^" +
                                              std::to_string(np));
    LambdaProducts out;
    out.minus = prod;
    out.plus = frobenius_phi(prod, mx).require_integral("lambda_plus");
    out.n_max = n_max;
    return out;
}

Series ratio_from(const LambdaProducts& lp, long k, int budget) {
    Series r = (lp.minus * inverse(lp.plus, 0)).normalized();
    r = power(r, k - 1).normalized();
    if (r.shift() > budget)
        throw CheckFailure("ratio-budget", "denominator p^" + std::to_string(r.shift()) + " exceeds budget p^" +
                                               std::to_string(budget));
    return r;
}

// g = lambda / gamma(lambda), integral.
Series gamma_ratio_of(const Series& lambda, const mpz_class& eps) {
    Series gl = gamma_act(lambda, eps);
    Series g = (lambda * inverse(gl, 2)).normalized();
    return g.require_integral("g_pm");
}

Series at_value_precision(const Series& s, int w, const char* what) {
    if (s.value_precision() < w)
        throw PrecisionError(std::string(what) + ": value known to p^" + std::to_string(s.value_precision()) +
                             ", need p^" + std::to_string(w));
    return s.at_precision(w + s.shift());
}

OLElem exact_in(const RingPtr& ring, const OLElem& x) { return OLElem(ring, x.coeffs()); }

SeriesMat scale_left(const Mat2<OLElem>& h, const SeriesMat& m) {
    SeriesMat r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = m(0, j).scaled(h(i, 0)) + m(1, j).scaled(h(i, 1));
    return r;
}

SeriesMat scale_right(const SeriesMat& m, const Mat2<OLElem>& h) {
    SeriesMat r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = m(i, 0).scaled(h(0, j)) + m(i, 1).scaled(h(1, j));
    return r;
}

SeriesMat mat_mul(const SeriesMat& a, const SeriesMat& b, long mx) {
    SeriesMat r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r(i, j) = mul_truncated(a(i, 0), b(0, j), mx) + mul_truncated(a(i, 1), b(1, j), mx);
    return r;
}

SeriesMat mat_truncated(const SeriesMat& a, long mx) { return a.map([mx](const Series& s) { return s.truncated(mx); }); }

int mat_precision(const SeriesMat& a) {
    int np = a.m[0].ring()->precision();
    for (const auto& s : a.m) np = std::min(np, s.value_precision());
    return np;
}

SeriesMat mat_at_precision(const SeriesMat& a, int np) {
    return a.map([np](const Series& s) { return s.at_precision(np); });
}

// Lowest X-degree below mx where a matrix has an entry not divisible by p^np,
// with the p-adic valuation found there; {mx, np} if none.
std::pair<long, long> first_nonzero(const SeriesMat& d, long mx, int np) {
    for (long i = 0; i < mx; ++i) {
        long best = np;
        for (const auto& s : d.m) {
            if (i < s.low() || i >= s.precision()) continue;
            for (int j = 0; j < s.ring()->degree(); ++j) best = std::min(best, vp(s.raw(i, j), s.prime(), np + s.shift()) - s.shift());
        }
        if (best < np) return {i, best};
    }
    return {mx, np};
}

std::string fail_where(std::pair<long, long> w, int np) {
    return "first fails at X^" + std::to_string(w.first) + " (p-adic valuation " + std::to_string(w.second) +
           " < " + std::to_string(np) + ")";
}

SeriesMat gamma_mat(const SeriesMat& m, const mpz_class& eps, long mx) {
    return m.map([&](const Series& s) {
        Series r = gamma_act(s, eps);
        return r.precision() > mx ? r.truncated(mx) : r;
    });
}

SeriesMat phi_mat(const SeriesMat& m, long mx) {
    return m.map([mx](const Series& s) { return frobenius_phi(s, mx); });
}

} // namespace

// ------------------------------------------------------------------ params

WachParams WachParams::defaults(const OLElem& ap, long k) {
    WachParams w;
    w.ring = ap.ring();
    w.k = k;
    w.ap = ap;
    const long p = ap.ring()->prime();
    w.mx = std::max(4 * (p - 1), k + p);
    w.n_target = 2;
    w.gamma_gens = {mpz_class(1 + p), mpz_class(primitive_root(p))};
    return w;
}

int WachParams::working_precision() const { return static_cast<int>(n_target + (k - 1) * (mx - k + 2)); }

void WachParams::validate() const {
    if (!ring) throw std::invalid_argument("WachParams: missing ring");
    const long p = ring->prime();
    if (k < p + 2 || k > 2 * p - 1)
        throw OutOfScope("k = " + std::to_string(k) + " outside [p+2, 2p-1] = [" + std::to_string(p + 2) + ", " +
                         std::to_string(2 * p - 1) + "]");
    if (!ap.ring() || !ap.ring()->same_field(*ring)) throw RingMismatch("WachParams: a_p lives in a different ring");
    if (!ap.valuation().is_exactly(1, 1))
        throw OutOfScope("the Wach construction here needs val(a_p) = 1, got " + ap.valuation().to_string());
    if (mx < k) throw std::invalid_argument("WachParams: Mx must be at least k");
    if (n_target < 1) throw std::invalid_argument("WachParams: N_target must be >= 1");
    if (gamma_gens.empty()) throw std::invalid_argument("WachParams: no Gamma generators");
    for (const auto& g : gamma_gens)
        if (mpz_divisible_ui_p(g.get_mpz_t(), static_cast<unsigned long>(p)))
            throw std::invalid_argument("WachParams: generator " + g.get_str() + " is not a p-adic unit");
}

// ----------------------------------------------------------------- context

WachContext::WachContext(const WachParams& shape) : shape_(shape) {
    const long k = shape.k;
    const long mx = shape.mx;
    const long p = shape.prime();
    if (k < p + 2 || k > 2 * p - 1)
        throw OutOfScope("k = " + std::to_string(k) + " outside [p+2, 2p-1]");
    if (mx < k) throw std::invalid_argument("WachContext: Mx must be at least k");
    w_ = shape.working_precision();
    ring_ = shape.ring->at_precision(w_);
    RingPtr high = shape.ring->at_precision(w_ + kGuardDigits + static_cast<int>(k));

    LambdaProducts lp = lambda_products(high, k - 1);
    n_max_ = lp.n_max;
    lambda_minus_ = lp.minus;
    lambda_plus_ = lp.plus;
    ratio_ = at_value_precision(ratio_from(lp, k, 2), w_ + 1, "ratio");

    q_pow_ = power(q_series(ring_, 1, mx), k - 1).at_precision(w_);

    phi_x_pow_.reserve(static_cast<std::size_t>(mx));
    Series phix = phi_of_x(ring_, mx);
    Series acc = Series::one(ring_, mx);
    for (long l = 0; l < mx; ++l) {
        phi_x_pow_.push_back(acc);
        acc = mul_truncated(acc, phix, mx);
    }

    Series ratio_poly = polynomial_part(ratio_, k - 1, mx);
    for (const auto& eps : shape.gamma_gens) {
        PerGenerator g;
        g.eps = eps;
        Series gp = at_value_precision(power(gamma_ratio_of(lp.plus, eps), k - 1), w_, "g_plus");
        Series gm = at_value_precision(power(gamma_ratio_of(lp.minus, eps), k - 1), w_, "g_minus");
        g.g_init = SeriesMat(polynomial_part(gp, k - 1, mx), zero_series(ring_, mx), zero_series(ring_, mx),
                             polynomial_part(gm, k - 1, mx));
        g.phi_g_init = phi_mat(g.g_init, mx);
        g.gamma_q_pow = gamma_act(q_pow_, eps).truncated(mx);
        g.gamma_ratio = gamma_act(ratio_poly, eps).truncated(mx);
        gens_.push_back(std::move(g));
    }
}

// --------------------------------------------------------------- operations

Series lambda_ratio_power(RingPtr ring, long k, long mx, int budget) {
    LambdaProducts lp = lambda_products(ring, mx);
    return ratio_from(lp, k, budget);
}

Series build_alpha(const WachContext& ctx, const OLElem& ap) {
    const long k = ctx.shape().k;
    const int w = ctx.working_precision();
    RingPtr r1 = ctx.ring()->at_precision(w + 1);
    Series poly = polynomial_part(ctx.ratio_power(), k - 1, k - 1);
    Series alpha = poly.scaled(exact_in(r1, ap)).normalized();
    if (alpha.shift() != 0)
        throw CheckFailure("alpha-integrality", "coefficients of a_p (lambda_-/lambda_+)^{k-1} below X^" +
                                                    std::to_string(k - 1) + " are not p-integral");
    alpha = alpha.at_precision(w);
    if (!(alpha.coeff(0) == exact_in(ctx.ring(), ap)))
        throw CheckFailure("alpha-constant", "alpha(0) = " + alpha.coeff(0).to_string() + " differs from a_p");
    return alpha;
}

SeriesMat build_P(const WachContext& ctx, const Series& alpha) {
    const long mx = ctx.shape().mx;
    const RingPtr& ring = ctx.ring();
    return SeriesMat(zero_series(ring, mx), constant_series(ring, -1, mx), ctx.q_power(),
                     polynomial_part(alpha, ctx.shape().k - 1, mx));
}

SeriesMat initial_gamma_matrix(const WachContext& ctx, std::size_t gen) {
    return mat_truncated(ctx.initial_gamma(gen), ctx.shape().k - 1);
}

namespace {

// Solves H P0 - p^l P0 H = -S0 by H <- (-S0 + p^l P0 H) adj(P0) / p^{k-1}.
Mat2<OLElem> solve_step(const Mat2<OLElem>& s0, const OLElem& ap, long k, long l, long* iterations) {
    const RingPtr& ring = s0.m[0].ring();
    const long p = ring->prime();
    const int w = ring->precision();
    const int w_out = w - static_cast<int>(k - 1);
    if (w_out < 1)
        throw PrecisionError("solve_gamma_matrix: p-adic precision exhausted at X^" + std::to_string(l));
    RingPtr out_ring = ring->at_precision(w_out);
    const OLElem a = exact_in(ring, ap);
    const OLElem zero(ring);
    const OLElem pk1(ring, pow_p(p, k - 1));
    const OLElem pl(ring, pow_p(p, std::min<long>(l, w)));
    const Mat2<OLElem> p0(zero, OLElem(ring, -1), pk1, a);
    const Mat2<OLElem> adj(a, OLElem(ring, 1), -pk1, zero);
    const Mat2<OLElem> neg_s0(-s0.m[0], -s0.m[1], -s0.m[2], -s0.m[3]);
    const mpz_class divisor = pow_p(p, k - 1);

    Mat2<OLElem> h(zero, zero, zero, zero);
    const OLElem zo{out_ring};
    Mat2<OLElem> h_out(zo, zo, zo, zo);
    const long cap = 4L * w + 64;
    for (long it = 0; it < cap; ++it) {
        Mat2<OLElem> ph = p0 * h;
        Mat2<OLElem> lhs(neg_s0.m[0] + pl * ph.m[0], neg_s0.m[1] + pl * ph.m[1], neg_s0.m[2] + pl * ph.m[2],
                         neg_s0.m[3] + pl * ph.m[3]);
        Mat2<OLElem> d = lhs * adj;
        Mat2<OLElem> next;
        for (int e = 0; e < 4; ++e) {
            std::vector<mpz_class> c = d.m[static_cast<std::size_t>(e)].coeffs();
            for (auto& x : c) {
                if (!mpz_divisible_p(x.get_mpz_t(), divisor.get_mpz_t()))
                    throw CheckFailure("divisibility", "degree " + std::to_string(l) +
                                                           " update is not divisible by p^" + std::to_string(k - 1));
                mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), divisor.get_mpz_t());
            }
            next.m[static_cast<std::size_t>(e)] = OLElem(out_ring, std::move(c));
        }
        if (iterations) ++*iterations;
        bool same = true;
        for (int e = 0; e < 4; ++e)
            if (!(next.m[static_cast<std::size_t>(e)] == h_out.m[static_cast<std::size_t>(e)])) same = false;
        if (same && it > 0) return h_out;
        h_out = next;
        for (int e = 0; e < 4; ++e) h.m[static_cast<std::size_t>(e)] = OLElem(ring, h_out.m[static_cast<std::size_t>(e)].coeffs());
    }
    throw CheckFailure("contraction", "inner iteration at degree " + std::to_string(l) + " did not stabilize within " +
                                          std::to_string(cap) + " steps");
}

void check_newton_slopes(const OLElem& ap, long k) {
    // x^2 - a_p x + p^{k-1}: slopes {val(a_p), k-1-val(a_p)} must differ by at least 2
    // for p^l Ad(P0) to contract when l >= k-1.
    Valuation v = ap.valuation();
    if (!v.is_exactly(1, 1) || k - 2 <= 1)
        throw CheckFailure("newton-slopes", "expected slopes {1, k-2} with k-2 > 1, got val(a_p) = " + v.to_string());
}

} // namespace

SeriesMat solve_gamma_matrix(const WachContext& ctx, const OLElem& ap, std::size_t gen, long* iterations) {
    const long k = ctx.shape().k;
    const long mx = ctx.shape().mx;
    check_newton_slopes(ap, k);
    const auto& g = ctx.generator(gen);
    Series alpha = build_alpha(ctx, ap);
    SeriesMat P = build_P(ctx, alpha);
    RingPtr r1 = ctx.ring()->at_precision(ctx.working_precision() + 1);
    Series gamma_alpha = g.gamma_ratio.scaled(exact_in(r1, ap)).normalized().require_integral("gamma(alpha)");
    const RingPtr& ring = ctx.ring();
    SeriesMat gP(zero_series(ring, mx), constant_series(ring, -1, mx), g.gamma_q_pow, gamma_alpha.at_precision(ctx.working_precision()));

    SeriesMat G = g.g_init;
    SeriesMat delta = mat_mul(G, gP, mx) - mat_mul(P, g.phi_g_init, mx);
    {
        auto w = first_nonzero(mat_truncated(delta, k - 1), k - 1, mat_precision(delta));
        if (w.first < k - 1)
            throw CheckFailure("initial-defect", "G^{(k-1)} gamma(P) - P phi(G^{(k-1)}) " +
                                                     fail_where(w, mat_precision(delta)));
    }
    for (long l = k - 1; l < mx; ++l) {
        Mat2<OLElem> s0;
        for (int e = 0; e < 4; ++e) s0.m[static_cast<std::size_t>(e)] = delta.m[static_cast<std::size_t>(e)].coeff(l);
        const int w = s0.m[0].ring()->precision();
        for (auto& x : s0.m)
            if (x.ring()->precision() != w) x = x.at_precision(std::min(w, x.ring()->precision()));
        Mat2<OLElem> h = solve_step(s0, ap, k, l, iterations);
        SeriesMat hx;
        for (int e = 0; e < 4; ++e)
            hx.m[static_cast<std::size_t>(e)] = Series::monomial(h.m[0].ring(), l, h.m[static_cast<std::size_t>(e)], mx);
        G = G + hx;
        SeriesMat t1 = mat_truncated(scale_left(h, gP), mx - l);
        for (auto& s : t1.m) s = s.mul_x_power(l);
        SeriesMat ph = scale_right(P, h);
        const Series& fx = ctx.phi_x_power(l);
        SeriesMat t2 = ph.map([&](const Series& s) { return mul_truncated(s, fx, mx); });
        delta = delta + t1 - t2;
        int dp = mat_precision(delta);
        auto where = first_nonzero(mat_truncated(delta, l + 1), l + 1, dp);
        if (where.first <= l)
            throw CheckFailure("defect-invariant", "defect not divisible by X^" + std::to_string(l + 1) + ": " +
                                                       fail_where(where, dp));
    }
    int final_precision = mat_precision(G);
    if (final_precision < ctx.shape().n_target)
        throw PrecisionError("solve_gamma_matrix: final precision p^" + std::to_string(final_precision) +
                             " below target p^" + std::to_string(ctx.shape().n_target));
    return G;
}

WachData build_wach(const WachContext& ctx, const OLElem& ap) {
    WachParams params = ctx.shape();
    params.ap = ap;
    params.validate();
    WachData d;
    d.params = params;
    Series alpha = build_alpha(ctx, ap);
    SeriesMat P = build_P(ctx, alpha);
    int prec = ctx.working_precision();
    for (std::size_t gen = 0; gen < ctx.generator_count(); ++gen) {
        long its = 0;
        SeriesMat G = solve_gamma_matrix(ctx, ap, gen, &its);
        prec = std::min(prec, mat_precision(G));
        d.G.push_back(std::move(G));
        d.G_init.push_back(ctx.initial_gamma(gen));
        d.inner_iterations.push_back(its);
    }
    d.precision = prec;
    d.alpha = alpha.at_precision(prec);
    d.P = mat_at_precision(P, prec);
    for (auto& G : d.G) G = mat_at_precision(G, prec);
    for (auto& G : d.G_init) G = mat_at_precision(G, prec);
    return d;
}

WachData build_wach(const WachParams& params) {
    params.validate();
    WachContext ctx(params);
    return build_wach(ctx, params.ap);
}

// -------------------------------------------------------------- verification

bool WachReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string WachReport::first_failure() const {
    for (const auto& c : checks)
        if (!c.passed) return c.name;
    return "";
}

WachReport verify_wach(const WachData& data, int np) {
    const WachParams& prm = data.params;
    if (np <= 0) np = prm.n_target;
    if (np > data.precision)
        throw PrecisionError("verify_wach: data certified to p^" + std::to_string(data.precision) + ", asked p^" +
                             std::to_string(np));
    if (data.G.size() != prm.gamma_gens.size() || data.G_init.size() != data.G.size())
        throw std::invalid_argument("verify_wach: one G and one G_init per generator expected");
    const long k = prm.k;
    const long mx = prm.mx;
    const long p = prm.prime();
    RingPtr ring = prm.ring->at_precision(np);
    WachReport rep;
    auto add = [&rep](std::string name, bool ok, std::string detail) {
        rep.checks.push_back({std::move(name), ok, std::move(detail)});
    };

    SeriesMat P = mat_at_precision(data.P, np);
    std::vector<SeriesMat> G;
    for (const auto& g : data.G) G.push_back(mat_at_precision(g, np));

    // (iii) fiber at X = 0
    {
        OLElem ap = exact_in(ring, prm.ap);
        bool ok = P(0, 0).coeff(0).is_zero() && P(0, 1).coeff(0) == OLElem(ring, -1) &&
                  P(1, 0).coeff(0) == OLElem(ring, pow_p(p, k - 1)) && P(1, 1).coeff(0) == ap;
        add("fiber", ok, ok ? "P(0) = [[0,-1],[p^(k-1), a_p]]" : "P(0) differs from [[0,-1],[p^(k-1), a_p]]");
        bool a0 = data.alpha.at_precision(np).coeff(0) == ap;
        add("alpha-constant", a0, a0 ? "alpha(0) = a_p" : "alpha(0) differs from a_p");
        bool integral = data.alpha.shift() == 0;
        add("alpha-integrality", integral, integral ? "alpha has p-integral coefficients" : "alpha has a denominator");
    }

    std::vector<SeriesMat> gP;
    for (std::size_t i = 0; i < G.size(); ++i) {
        const mpz_class& eps = prm.gamma_gens[i];
        gP.push_back(gamma_mat(P, eps, mx));
        SeriesMat lhs = mat_mul(P, phi_mat(G[i], mx), mx);
        SeriesMat rhs = mat_mul(G[i], gP[i], mx);
        auto w = first_nonzero(lhs - rhs, mx, np);
        add("commutation[" + eps.get_str() + "]", w.first >= mx,
            w.first >= mx ? "P phi(G) = G gamma(P) mod (p^" + std::to_string(np) + ", X^" + std::to_string(mx) + ")"
                          : fail_where(w, np));

        auto wi = first_nonzero(mat_truncated(G[i], k - 1) - mat_truncated(mat_at_precision(data.G_init[i], np), k - 1),
                                k - 1, np);
        add("initial-agreement[" + eps.get_str() + "]", wi.first >= k - 1,
            wi.first >= k - 1 ? "G = G^(k-1) mod X^(k-1)" : fail_where(wi, np));

        Series detg = mul_truncated(G[i](0, 0), G[i](1, 1), k - 1) - mul_truncated(G[i](0, 1), G[i](1, 0), k - 1);
        const SeriesMat& gi = data.G_init[i];
        Series expect = mul_truncated(gi(0, 0).at_precision(np), gi(1, 1).at_precision(np), k - 1);
        bool dok = congruent(detg, expect, k - 1, np);
        add("det[" + eps.get_str() + "]", dok, dok ? "det G = (g+ g-)^(k-1) mod X^(k-1)" : "det G mismatch");
    }

    for (std::size_t i = 0; i < G.size(); ++i)
        for (std::size_t j = i + 1; j < G.size(); ++j) {
            const mpz_class& a = prm.gamma_gens[i];
            const mpz_class& b = prm.gamma_gens[j];
            SeriesMat ab = mat_mul(G[i], gamma_mat(G[j], a, mx), mx);
            SeriesMat ba = mat_mul(G[j], gamma_mat(G[i], b, mx), mx);
            auto w = first_nonzero(ab - ba, mx, np);
            add("cocycle[" + a.get_str() + "," + b.get_str() + "]", w.first >= mx,
                w.first >= mx ? "G_g g(G_h) = G_h h(G_g)" : fail_where(w, np));
        }
    return rep;
}

WachData inject_gamma_fault(const WachData& data, std::size_t gen, long degree, int row, int col) {
    if (degree < data.params.k - 1 || degree >= data.params.mx)
        throw std::invalid_argument("inject_gamma_fault: degree must lie in [k-1, Mx)");
    WachData d = data;
    const int n = data.params.n_target;
    Series& s = d.G.at(gen)(row, col);
    OLElem bump(s.ring(), pow_p(data.params.prime(), n - 1));
    s.set_coeff(degree, s.coeff(degree) + bump);
    return d;
}

bool uniqueness_under_refinement(const WachParams& params, const WachData& data) {
    WachParams twice = params;
    twice.mx = 2 * params.mx;
    WachData fine = build_wach(twice);
    const int np = params.n_target;
    for (std::size_t i = 0; i < data.G.size(); ++i)
        for (int e = 0; e < 4; ++e) {
            Series a = data.G[i].m[static_cast<std::size_t>(e)].at_precision(np);
            Series b = fine.G[i].m[static_cast<std::size_t>(e)].truncated(params.mx).at_precision(np);
            if (!congruent(a, b, params.mx, np)) return false;
        }
    return true;
}

} // namespace wachlab
