#include "wachlab/series.hpp"

#include "wachlab/errors.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wachlab {

namespace {

void reduce_mod(mpz_class& x, const mpz_class& m) {
    mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
}

void require_same_field(const RingPtr& a, const RingPtr& b, const char* where) {
    if (!a || !b) throw RingMismatch(std::string(where) + ": uninitialized series");
    if (a != b && !a->same_field(*b))
        throw RingMismatch(std::string(where) + ": series over different rings");
}

// Binomial coefficients binom(m, j) for 0 <= j < count, exact.
std::vector<mpz_class> binomials(const mpz_class& m, long count) {
    std::vector<mpz_class> out(static_cast<std::size_t>(std::max<long>(count, 0)));
    if (count <= 0) return out;
    out[0] = 1;
    for (long j = 1; j < count; ++j) {
        mpz_class t = out[static_cast<std::size_t>(j - 1)] * (m - (j - 1));
        mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(j));
        out[static_cast<std::size_t>(j)] = std::move(t);
    }
    return out;
}

// X-valuation of (g mod p^t) for t = 1..np, each capped at g's precision.
std::vector<long> valuation_profile(const Series& g, int np) {
    std::vector<long> d(static_cast<std::size_t>(np) + 1, g.precision());
    const int e = g.ring()->degree();
    for (long i = std::max<long>(g.low(), 0); i < g.precision(); ++i) {
        long v = np;
        for (int j = 0; j < e; ++j) v = std::min(v, vp(g.raw(i, j), g.prime(), np));
        // coefficient nonzero modulo p^t for every t > v
        for (long t = v + 1; t <= np; ++t)
            if (d[static_cast<std::size_t>(t)] == g.precision()) d[static_cast<std::size_t>(t)] = i;
    }
    return d;
}

// Lower bound for the X-valuation of g^m modulo p^np.
long power_valuation_bound(const std::vector<long>& d, long m, int np) {
    const long d1 = d[1];
    const long dn = d[static_cast<std::size_t>(np)];
    double gain = 0;
    for (int t = 1; t < np; ++t)
        gain = std::max(gain, static_cast<double>(d1 - d[static_cast<std::size_t>(t) + 1]) / t);
    long loss = static_cast<long>(gain * (np - 1));
    loss = std::min(loss, m * (d1 - dn));
    return std::max(m * d1 - loss, m * dn);
}

} // namespace

long ceil_log(long x, long base) {
    long r = 0;
    long v = 1;
    while (v < x) {
        v *= base;
        ++r;
    }
    return r;
}

// ------------------------------------------------------------------ Series

Series::Series(RingPtr ring, long low, long mx, int shift)
    : ring_(std::move(ring)), low_(low), mx_(std::max(mx, low)), shift_(shift) {
    if (!ring_) throw std::invalid_argument("Series: null ring");
    if (shift_ < 0) throw std::invalid_argument("Series: negative shift");
    data_.resize(static_cast<std::size_t>((mx_ - low_) * ring_->degree()));
}

Series Series::from_integers(RingPtr ring, const std::vector<mpz_class>& coeffs, long mx, long low, int shift) {
    Series s(std::move(ring), low, mx, shift);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        long exp = low + static_cast<long>(i);
        if (exp >= s.mx_) break;
        s.raw(exp) = coeffs[i];
        reduce_mod(s.raw(exp), s.ring_->modulus());
    }
    return s;
}

Series Series::monomial(RingPtr ring, long exponent, const OLElem& coeff, long mx) {
    Series s(ring, std::min(exponent, 0L), mx);
    if (exponent < mx) s.set_coeff(exponent, coeff);
    return s;
}

Series Series::constant(RingPtr ring, const OLElem& c, long mx) { return monomial(std::move(ring), 0, c, mx); }

Series Series::one(RingPtr ring, long mx) {
    OLElem c(ring, 1);
    return constant(std::move(ring), c, mx);
}

Series Series::x(RingPtr ring, long mx) {
    OLElem c(ring, 1);
    return monomial(std::move(ring), 1, c, mx);
}

std::size_t Series::index(long i, int j) const {
    return static_cast<std::size_t>((i - low_) * ring_->degree() + j);
}

const mpz_class& Series::raw(long i, int j) const {
    if (i < low_ || i >= mx_) throw std::out_of_range("Series::raw: exponent outside stored window");
    return data_[index(i, j)];
}

mpz_class& Series::raw(long i, int j) {
    if (i < low_ || i >= mx_) throw std::out_of_range("Series::raw: exponent outside stored window");
    return data_[index(i, j)];
}

OLElem Series::coeff(long i) const {
    if (i >= mx_) throw PrecisionError("Series::coeff: X^" + std::to_string(i) + " beyond precision X^" + std::to_string(mx_));
    if (i < low_) return OLElem(ring_);
    const int e = ring_->degree();
    std::vector<mpz_class> c(data_.begin() + static_cast<std::ptrdiff_t>(index(i, 0)),
                             data_.begin() + static_cast<std::ptrdiff_t>(index(i, 0) + static_cast<std::size_t>(e)));
    return OLElem(ring_, std::move(c));
}

void Series::set_coeff(long i, const OLElem& c) {
    if (!c.ring()->same_field(*ring_)) throw RingMismatch("Series::set_coeff: coefficient from a different ring");
    if (i >= mx_) return;
    if (i < low_) {
        Series wider(ring_, i, mx_, shift_);
        for (long k = low_; k < mx_; ++k)
            for (int j = 0; j < ring_->degree(); ++j) wider.raw(k, j) = raw(k, j);
        *this = std::move(wider);
    }
    for (int j = 0; j < ring_->degree(); ++j) {
        raw(i, j) = c.coeff(j);
        reduce_mod(raw(i, j), ring_->modulus());
    }
}

long Series::valuation() const {
    const int e = ring_->degree();
    for (long i = low_; i < mx_; ++i)
        for (int j = 0; j < e; ++j)
            if (data_[index(i, j)] != 0) return i;
    return mx_;
}

long Series::content_valuation() const {
    long v = ring_->precision();
    for (const auto& c : data_) {
        if (c == 0) continue;
        v = std::min(v, vp(c, ring_->prime(), v));
        if (v == 0) break;
    }
    return v;
}

void Series::reduce_all() {
    for (auto& c : data_) reduce_mod(c, ring_->modulus());
}

Series Series::truncated(long mx) const {
    if (mx >= mx_) return *this;
    Series r(ring_, std::min(low_, mx), mx, shift_);
    for (long i = r.low_; i < r.mx_; ++i)
        for (int j = 0; j < ring_->degree(); ++j) r.raw(i, j) = raw(i, j);
    return r;
}

Series Series::at_precision(int np) const {
    if (np == ring_->precision()) return *this;
    if (np > ring_->precision())
        throw PrecisionError("Series::at_precision: cannot raise precision from " + std::to_string(ring_->precision()) +
                             " to " + std::to_string(np));
    Series r(*this);
    r.ring_ = ring_->at_precision(np);
    r.reduce_all();
    return r;
}

Series Series::with_shift(int shift) const {
    if (shift < shift_) throw std::invalid_argument("Series::with_shift: cannot lower the shift this way");
    if (shift == shift_) return *this;
    const int d = shift - shift_;
    Series r(*this);
    r.ring_ = ring_->at_precision(ring_->precision() + d);
    r.shift_ = shift;
    mpz_class f = pow_p(ring_->prime(), d);
    for (auto& c : r.data_) c *= f;
    return r;
}

Series Series::normalized() const {
    long s = std::min<long>({static_cast<long>(shift_), content_valuation(), static_cast<long>(ring_->precision()) - 1});
    if (s <= 0) return *this;
    Series r(*this);
    r.ring_ = ring_->at_precision(ring_->precision() - static_cast<int>(s));
    r.shift_ = shift_ - static_cast<int>(s);
    mpz_class f = pow_p(ring_->prime(), s);
    for (auto& c : r.data_) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), f.get_mpz_t());
    return r;
}

Series Series::require_integral(const std::string& what) const {
    Series n = normalized();
    if (n.shift_ != 0)
        throw CheckFailure("integrality", what + ": denominator p^" + std::to_string(n.shift_) + " remains");
    return n;
}

namespace {

// Bring a and b to the same shift and ring precision, without losing value precision.
void align(Series& a, Series& b, const char* where) {
    require_same_field(a.ring(), b.ring(), where);
    int s = std::max(a.shift(), b.shift());
    a = a.with_shift(s);
    b = b.with_shift(s);
    int np = std::min(a.ring()->precision(), b.ring()->precision());
    a = a.at_precision(np);
    b = b.at_precision(np);
}

} // namespace

Series& Series::operator+=(const Series& other) {
    Series b = other;
    align(*this, b, "Series::+");
    long lo = std::min(low_, b.low_);
    long mx = std::min(mx_, b.mx_);
    Series r(ring_, std::min(lo, mx), mx, shift_);
    const int e = ring_->degree();
    for (long i = r.low_; i < r.mx_; ++i)
        for (int j = 0; j < e; ++j) {
            mpz_class& c = r.raw(i, j);
            if (i >= low_) c += raw(i, j);
            if (i >= b.low_) c += b.raw(i, j);
            if (c >= ring_->modulus()) c -= ring_->modulus();
        }
    *this = std::move(r);
    return *this;
}

Series Series::operator-() const {
    Series r(*this);
    for (auto& c : r.data_) {
        c = -c;
        reduce_mod(c, ring_->modulus());
    }
    return r;
}

Series& Series::operator-=(const Series& b) { return *this += -b; }

Series Series::scaled(const OLElem& c) const {
    require_same_field(ring_, c.ring(), "Series::scaled");
    Series r = *this;
    RingPtr ring = ring_->precision() <= c.ring()->precision() ? ring_ : c.ring();
    r = r.at_precision(ring->precision());
    const int e = ring->degree();
    OLElem cc = c.ring()->precision() == ring->precision() ? c : c.at_precision(ring->precision());
    for (long i = r.low_; i < r.mx_; ++i) {
        OLElem v = r.coeff(i) * cc;
        for (int j = 0; j < e; ++j) r.raw(i, j) = v.coeff(j);
    }
    return r;
}

Series Series::scaled(const mpz_class& c) const {
    Series r(*this);
    for (auto& x : r.data_) {
        x *= c;
        reduce_mod(x, ring_->modulus());
    }
    return r;
}

Series Series::mul_x_power(long n) const {
    Series r(*this);
    r.low_ += n;
    r.mx_ += n;
    return r;
}

std::vector<OLElem> Series::coefficients() const {
    std::vector<OLElem> out;
    for (long i = low_; i < mx_; ++i) out.push_back(coeff(i));
    return out;
}

std::string Series::to_string() const {
    std::ostringstream os;
    bool first = true;
    if (shift_ > 0) os << "p^-" << shift_ << " * (";
    for (long i = low_; i < mx_; ++i) {
        OLElem c = coeff(i);
        if (c.is_zero()) continue;
        if (!first) os << " + ";
        os << "(" << c.to_string() << ")";
        if (i != 0) os << "*X^" << i;
        first = false;
    }
    if (first) os << "0";
    os << " + O(X^" << mx_ << ")";
    if (shift_ > 0) os << ")";
    return os.str();
}

// ------------------------------------------------------------ multiplication

namespace {

// Raw product on the window [low, mx) modulo ring->modulus().
Series raw_product(const Series& a, const Series& b, RingPtr ring, long mx, int shift) {
    const long low = a.low() + b.low();
    Series r(ring, std::min(low, mx), mx, shift);
    const int e = ring->degree();
    const long va = a.valuation();
    const long vb = b.valuation();
    if (e == 1) {
        mpz_class acc;
        for (long n = std::max(low, va + vb); n < mx; ++n) {
            acc = 0;
            long ilo = std::max(va, n - (b.precision() - 1));
            long ihi = std::min(a.precision() - 1, n - vb);
            for (long i = ilo; i <= ihi; ++i)
                mpz_addmul(acc.get_mpz_t(), a.raw(i).get_mpz_t(), b.raw(n - i).get_mpz_t());
            reduce_mod(acc, ring->modulus());
            r.raw(n) = acc;
        }
        return r;
    }
    std::vector<mpz_class> acc(static_cast<std::size_t>(2 * e - 1));
    for (long n = std::max(low, va + vb); n < mx; ++n) {
        for (auto& c : acc) c = 0;
        long ilo = std::max(va, n - (b.precision() - 1));
        long ihi = std::min(a.precision() - 1, n - vb);
        for (long i = ilo; i <= ihi; ++i)
            for (int s = 0; s < e; ++s)
                for (int t = 0; t < e; ++t)
                    mpz_addmul(acc[static_cast<std::size_t>(s + t)].get_mpz_t(), a.raw(i, s).get_mpz_t(),
                               b.raw(n - i, t).get_mpz_t());
        std::vector<mpz_class> c = acc;
        ring->reduce(c);
        for (int j = 0; j < e; ++j) r.raw(n, j) = c[static_cast<std::size_t>(j)];
    }
    return r;
}

} // namespace

Series operator*(const Series& a, const Series& b) {
    require_same_field(a.ring(), b.ring(), "Series::*");
    const long va = a.valuation();
    const long vb = b.valuation();
    const long mx = std::min(a.precision() + vb, b.precision() + va);
    // stored product known modulo p^min(Na + v_p(B), Nb + v_p(A))
    const long np = std::min(a.ring()->precision() + b.content_valuation(), b.ring()->precision() + a.content_valuation());
    RingPtr ring = a.ring()->precision() == np ? a.ring() : a.ring()->at_precision(static_cast<int>(np));
    return raw_product(a, b, ring, mx, a.shift() + b.shift());
}

Series mul_truncated(const Series& a, const Series& b, long mx) {
    require_same_field(a.ring(), b.ring(), "mul_truncated");
    const long bound = std::min(a.precision() + b.valuation(), b.precision() + a.valuation());
    if (mx > bound)
        throw PrecisionError("mul_truncated: requested X^" + std::to_string(mx) + " beyond propagated X^" +
                             std::to_string(bound));
    RingPtr ring = a.ring()->precision() <= b.ring()->precision() ? a.ring() : b.ring();
    return raw_product(a.at_precision(ring->precision()), b.at_precision(ring->precision()), ring, mx,
                       a.shift() + b.shift());
}

bool congruent(const Series& a, const Series& b, long mx, int np) {
    Series d = a - b;
    if (d.precision() < mx)
        throw PrecisionError("congruent: operands known only modulo X^" + std::to_string(d.precision()) +
                             ", comparison requested modulo X^" + std::to_string(mx));
    if (d.value_precision() < np)
        throw PrecisionError("congruent: operands known only modulo p^" + std::to_string(d.value_precision()) +
                             ", comparison requested modulo p^" + std::to_string(np));
    const long need = np + d.shift();
    for (long i = d.low(); i < mx; ++i)
        for (int j = 0; j < d.ring()->degree(); ++j)
            if (vp(d.raw(i, j), d.prime(), need) < need) return false;
    return true;
}

Series inverse(const Series& f, int budget) {
    if (f.low() < 0 && f.valuation() < 0)
        throw std::invalid_argument("inverse: Laurent input with a pole");
    const long p = f.prime();
    const int s = f.shift();
    const int n_in = f.ring()->precision();
    const int e = f.ring()->degree();
    const long mx = f.precision();
    if (mx <= 0) return Series(f.ring(), 0, 0);
    OLElem f0 = f.coeff(0);
    if (f0.valuation().compare(s, 1) != 0 || f0.valuation().lower_bound_only)
        throw std::domain_error("inverse: constant term is not a unit");

    const long len = mx;
    const int h = n_in + budget + s * static_cast<int>(len) + 1;
    RingPtr work = f.ring()->at_precision(h);
    mpz_class ps = pow_p(p, s);
    // u = F_0 / p^s, a unit
    std::vector<mpz_class> u_c(static_cast<std::size_t>(e));
    for (int j = 0; j < e; ++j) mpz_divexact(u_c[static_cast<std::size_t>(j)].get_mpz_t(), f.raw(0, j).get_mpz_t(), ps.get_mpz_t());
    OLElem u_inv = OLElem(work, u_c).inverse();

    std::vector<OLElem> fc;
    fc.reserve(static_cast<std::size_t>(len));
    for (long i = 0; i < len; ++i) {
        std::vector<mpz_class> c(static_cast<std::size_t>(e));
        for (int j = 0; j < e; ++j) c[static_cast<std::size_t>(j)] = f.raw(i, j);
        fc.emplace_back(work, std::move(c));
    }
    std::vector<OLElem> g;
    g.reserve(static_cast<std::size_t>(len));
    g.push_back(OLElem(work, pow_p(p, budget)) * u_inv);
    for (long n = 1; n < len; ++n) {
        OLElem acc(work);
        for (long i = 1; i <= n; ++i) acc += fc[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(n - i)];
        std::vector<mpz_class> c = acc.coeffs();
        for (auto& x : c) {
            if (!mpz_divisible_p(x.get_mpz_t(), ps.get_mpz_t()))
                throw CheckFailure("inverse-budget", "inverse: denominator exceeds p^" + std::to_string(budget) +
                                                         " at X^" + std::to_string(n));
            mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), ps.get_mpz_t());
        }
        g.push_back(-(OLElem(work, std::move(c)) * u_inv));
    }
    const int n_out = n_in - s - budget;
    if (n_out < 1)
        throw PrecisionError("inverse: no p-adic precision left (input " + std::to_string(n_in) + ", shift " +
                             std::to_string(s) + ", budget " + std::to_string(budget) + ")");
    RingPtr out_ring = f.ring()->at_precision(n_out);
    Series r(out_ring, 0, mx, budget);
    for (long n = 0; n < len; ++n)
        for (int j = 0; j < e; ++j) {
            r.raw(n, j) = g[static_cast<std::size_t>(n)].coeff(j);
            reduce_mod(r.raw(n, j), out_ring->modulus());
        }
    return r.normalized();
}

Series power(const Series& f, long n) {
    if (n < 0) throw std::invalid_argument("power: negative exponent");
    Series result = Series::one(f.ring(), f.precision() + std::max<long>(0, (n - 1)) * f.valuation());
    Series base = f;
    bool first = true;
    while (n > 0) {
        if (n & 1) {
            result = first ? base : (result * base).normalized();
            first = false;
        }
        n >>= 1;
        if (n > 0) base = (base * base).normalized();
    }
    return result;
}

// ------------------------------------------------------------- substitution

namespace {

Series substitute_power_series(const Series& f, const Series& g) {
    const int np = std::min(f.ring()->precision(), g.ring()->precision());
    std::vector<long> d = valuation_profile(g, np);
    if (d[static_cast<std::size_t>(np)] < 1)
        throw std::invalid_argument("substitute: inner series has nonzero constant term");
    const long bound = power_valuation_bound(d, f.precision(), np);
    bool constant = true;
    for (long i = std::max<long>(f.low(), 1); i < f.precision() && constant; ++i)
        for (int j = 0; j < f.ring()->degree(); ++j)
            if (f.raw(i, j) != 0) constant = false;
    // a perturbation of g moves every term g^i with i >= 1
    const long mx = constant ? bound : std::min(g.precision(), bound);
    RingPtr ring = f.ring()->precision() == np ? f.ring() : f.ring()->at_precision(np);
    Series ff = f.at_precision(np);
    Series gg = g.at_precision(np);
    if (gg.low() > 0) gg = gg + Series(ring, 0, gg.precision());
    const long vg = d[static_cast<std::size_t>(np)];
    long top = f.precision() - 1;
    if (vg > 0) top = std::min(top, (mx - 1) / vg);
    Series acc(ring, 0, mx, f.shift());
    for (long i = top; i >= 0; --i) {
        if (i < top) acc = mul_truncated(acc, gg, mx);
        if (i >= ff.low())
            for (int j = 0; j < ring->degree(); ++j) {
                acc.raw(0, j) += ff.raw(i, j);
                if (acc.raw(0, j) >= ring->modulus()) acc.raw(0, j) -= ring->modulus();
            }
    }
    return acc;
}

} // namespace

Series substitute(const Series& f, const Series& g) {
    require_same_field(f.ring(), g.ring(), "substitute");
    if (g.shift() != 0) throw std::invalid_argument("substitute: inner series must be integral");
    if (g.valuation() < 1) throw std::invalid_argument("substitute: inner series has nonzero constant term");
    if (f.valuation() >= 0 || f.low() >= 0) {
        Series ff = f;
        if (f.low() < 0) {
            ff = Series(f.ring(), 0, f.precision(), f.shift());
            for (long i = 0; i < f.precision(); ++i)
                for (int j = 0; j < f.ring()->degree(); ++j) ff.raw(i, j) = f.raw(i, j);
        }
        return substitute_power_series(ff, g);
    }
    // Laurent f: f(g) = (g/X)^L X^L f~(g) with f~ = X^{-L} f, g/X a unit.
    const long lo = f.valuation();
    OLElem g1 = g.coeff(1);
    if (g.valuation() != 1 || !g1.valuation().is_exactly(0, 1))
        throw std::invalid_argument("substitute: Laurent input requires an inner series that is a unit times X");
    Series ftil = f.mul_x_power(-lo);
    Series head = substitute_power_series(ftil, g);
    Series hinv = inverse(g.mul_x_power(-1), 0);
    Series scale = power(hinv, -lo);
    return (head * scale).mul_x_power(lo);
}

Series phi_of_x(RingPtr ring, long mx) {
    const long p = ring->prime();
    std::vector<mpz_class> c(static_cast<std::size_t>(p) + 1);
    mpz_class b = 1;
    for (long j = 1; j <= p; ++j) {
        b = b * (p - j + 1) / j;
        c[static_cast<std::size_t>(j)] = b;
    }
    return Series::from_integers(std::move(ring), c, mx);
}

Series frobenius_phi(const Series& f, long cap) {
    const int np = f.ring()->precision();
    // phi(X) modulo p^t has X-valuation p for t = 1 and 1 beyond.
    std::vector<long> d(static_cast<std::size_t>(np) + 1, 1);
    d[1] = f.prime();
    long bound = f.low() >= 0 ? power_valuation_bound(d, f.precision(), np) : f.precision();
    Series g = phi_of_x(f.ring(), std::max<long>(std::min(bound, cap), 2));
    Series r = substitute(f, g);
    return r.precision() > cap ? r.truncated(cap) : r;
}

Series frobenius_phi(const Series& f) { return frobenius_phi(f, std::numeric_limits<long>::max()); }

long gamma_guard_required(const RingPtr& ring, long mx) {
    return ring->precision() + ceil_log(std::max<long>(mx, 1), ring->prime());
}

Series gamma_of_x(RingPtr ring, const mpz_class& a, long guard, long mx) {
    mpz_class modg = pow_p(ring->prime(), guard);
    mpz_class lift = a % modg;
    if (lift < 0) lift += modg;
    if (lift % ring->prime() == 0) throw std::invalid_argument("gamma_of_x: exponent is not a p-adic unit");
    std::vector<mpz_class> b = binomials(lift, mx);
    if (!b.empty()) b[0] = 0;
    return Series::from_integers(std::move(ring), b, mx);
}

namespace {

long gamma_inner_precision(const Series& f) {
    return f.low() >= 0 ? std::max<long>(f.precision(), 2) : f.precision() - f.low() + 1;
}

} // namespace

Series gamma_act(const Series& f, const mpz_class& a, long guard) {
    const long mx = gamma_inner_precision(f);
    const long need = gamma_guard_required(f.ring(), mx);
    if (guard < need)
        throw PrecisionError("gamma_act: guard p^" + std::to_string(guard) + " below required p^" + std::to_string(need));
    Series g = gamma_of_x(f.ring(), a, guard, mx);
    return substitute(f, g);
}

Series gamma_act(const Series& f, const mpz_class& a) {
    return gamma_act(f, a, gamma_guard_required(f.ring(), gamma_inner_precision(f)));
}

// ----------------------------------------------------------------------- psi

long psi_output_precision(long mx, long low, long p, int np) {
    long window_rule = (mx - (p - 1) - std::abs(low));
    window_rule = window_rule >= 0 ? window_rule / p : -1;
    long padic_rule = mx / p - (np - 1);
    return std::min(window_rule, padic_rule);
}

Series psi(const Series& f) {
    if (f.low() < 0 && f.valuation() < 0)
        throw std::invalid_argument("psi: Laurent input over O_L is not supported");
    const long p = f.prime();
    const long mx = f.precision();
    const long out = psi_output_precision(mx, std::max<long>(f.low(), 0), p, f.ring()->precision());
    if (out <= 0)
        throw PrecisionError("psi: output precision would be " + std::to_string(out) + " (input X^" +
                             std::to_string(mx) + ")");
    const RingPtr& ring = f.ring();
    const int e = ring->degree();
    // psi(X^m) = sum_t binom(m, pt) (-1)^{m-pt} (1+X)^t
    const long tmax = (mx - 1) / p;
    std::vector<std::vector<mpz_class>> bt(static_cast<std::size_t>(tmax) + 1, std::vector<mpz_class>(static_cast<std::size_t>(e)));
    for (long m = std::max<long>(f.low(), 0); m < mx; ++m) {
        mpz_class bin = 1; // binom(m, 0)
        for (long t = 0; p * t <= m; ++t) {
            if (t > 0) mpz_bin_uiui(bin.get_mpz_t(), static_cast<unsigned long>(m), static_cast<unsigned long>(p * t));
            bool neg = ((m - p * t) & 1) != 0;
            for (int j = 0; j < e; ++j) {
                if (neg)
                    mpz_submul(bt[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)].get_mpz_t(), bin.get_mpz_t(), f.raw(m, j).get_mpz_t());
                else
                    mpz_addmul(bt[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)].get_mpz_t(), bin.get_mpz_t(), f.raw(m, j).get_mpz_t());
            }
        }
    }
    Series r(ring, 0, out, f.shift());
    mpz_class b;
    for (long t = 0; t <= tmax; ++t)
        for (long i = 0; i < out && i <= t; ++i) {
            mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(t), static_cast<unsigned long>(i));
            for (int j = 0; j < e; ++j)
                mpz_addmul(r.raw(i, j).get_mpz_t(), b.get_mpz_t(), bt[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)].get_mpz_t());
        }
    for (long i = 0; i < out; ++i)
        for (int j = 0; j < e; ++j) reduce_mod(r.raw(i, j), ring->modulus());
    return r;
}

// --------------------------------------------------------------------- q_n

Series q_series(RingPtr ring, long n, long mx) {
    if (n < 1) throw std::invalid_argument("q_series: n must be >= 1");
    const long p = ring->prime();
    std::vector<mpz_class> qc(static_cast<std::size_t>(p));
    for (long j = 0; j < p; ++j) mpz_bin_uiui(qc[static_cast<std::size_t>(j)].get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(j + 1));
    if (n == 1) return Series::from_integers(ring, qc, mx);
    // q_n = q(Y) with Y = (1+X)^{p^{n-1}} - 1
    std::vector<mpz_class> yc = binomials(pow_p(p, n - 1), mx);
    if (!yc.empty()) yc[0] = 0;
    Series y = Series::from_integers(ring, yc, mx);
    Series acc = Series::from_integers(ring, {qc[static_cast<std::size_t>(p - 1)]}, mx);
    for (long j = p - 2; j >= 0; --j) {
        acc = mul_truncated(acc, y, mx);
        acc.raw(0) += qc[static_cast<std::size_t>(j)];
        reduce_mod(acc.raw(0), ring->modulus());
    }
    return acc;
}

} // namespace wachlab
