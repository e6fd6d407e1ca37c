#include "wachlab/res_series.hpp"

#include "wachlab/eisenstein.hpp"
#include "wachlab/errors.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace wachlab {

namespace {

void require_same_prime(long p, long q, const char* where) {
    if (p != q) throw RingMismatch(std::string(where) + ": series over different primes");
}

// binom(a, b) mod p for 0 <= a, b < p.
long small_binomial(long a, long b, long p) {
    if (b < 0 || b > a) return 0;
    long num = 1, den = 1;
    for (long i = 0; i < b; ++i) {
        num = num * ((a - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    return num * inv_mod(den, p) % p;
}

// Lucas: binom(a, n) mod p from base-p digits; a given as digits, lowest first.
long lucas(const std::vector<long>& a_digits, long n, long p) {
    long r = 1;
    std::size_t i = 0;
    while (n > 0) {
        long ai = i < a_digits.size() ? a_digits[i] : 0;
        r = r * small_binomial(ai, n % p, p) % p;
        if (r == 0) return 0;
        n /= p;
        ++i;
    }
    return r;
}

} // namespace

ResSeries::ResSeries(long p, long low, long mx) : p_(p), low_(low), mx_(std::max(mx, low)) {
    c_.assign(static_cast<std::size_t>(mx_ - low_), FqElem(p, 0));
}

ResSeries ResSeries::from_values(long p, const std::vector<long>& coeffs, long mx, long low) {
    ResSeries s(p, low, mx);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        long exp = low + static_cast<long>(i);
        if (exp >= s.mx_) break;
        s.c_[i] = FqElem(p, coeffs[i]);
    }
    return s;
}

ResSeries ResSeries::monomial(long p, long exponent, const FqElem& c, long mx) {
    ResSeries s(p, std::min(exponent, 0L), mx);
    if (exponent < mx) s.set_coeff(exponent, c);
    return s;
}

ResSeries ResSeries::constant(long p, const FqElem& c, long mx) { return monomial(p, 0, c, mx); }
ResSeries ResSeries::one(long p, long mx) { return constant(p, FqElem(p, 1), mx); }
ResSeries ResSeries::x(long p, long mx) { return monomial(p, 1, FqElem(p, 1), mx); }

FqElem ResSeries::coeff(long i) const {
    if (i >= mx_)
        throw PrecisionError("ResSeries::coeff: X^" + std::to_string(i) + " beyond precision X^" + std::to_string(mx_));
    if (i < low_) return FqElem(p_, 0);
    return c_[static_cast<std::size_t>(i - low_)];
}

void ResSeries::set_coeff(long i, const FqElem& c) {
    if (i >= mx_) return;
    if (i < low_) {
        std::vector<FqElem> wider(static_cast<std::size_t>(low_ - i), FqElem(p_, 0));
        c_.insert(c_.begin(), wider.begin(), wider.end());
        low_ = i;
    }
    c_[static_cast<std::size_t>(i - low_)] = c;
}

void ResSeries::add_to_coeff(long i, const FqElem& c) {
    if (i >= mx_) return;
    if (i < low_) set_coeff(i, FqElem(p_, 0));
    c_[static_cast<std::size_t>(i - low_)] += c;
}

long ResSeries::valuation() const {
    for (std::size_t i = 0; i < c_.size(); ++i)
        if (!c_[i].is_zero()) return low_ + static_cast<long>(i);
    return mx_;
}

bool ResSeries::in_prime_field() const {
    return std::all_of(c_.begin(), c_.end(), [](const FqElem& c) { return c.in_prime_field(); });
}

ResSeries ResSeries::truncated(long mx) const {
    if (mx >= mx_) return *this;
    ResSeries r(p_, std::min(low_, mx), mx);
    for (long i = std::max(r.low_, low_); i < mx; ++i) r.c_[static_cast<std::size_t>(i - r.low_)] = coeff(i);
    return r;
}

ResSeries ResSeries::mul_x_power(long n) const {
    ResSeries r(*this);
    r.low_ += n;
    r.mx_ += n;
    return r;
}

ResSeries ResSeries::scaled(const FqElem& c) const {
    ResSeries r(*this);
    for (auto& x : r.c_) x *= c;
    return r;
}

ResSeries& ResSeries::operator+=(const ResSeries& b) {
    require_same_prime(p_, b.p_, "ResSeries::+");
    long mx = std::min(mx_, b.mx_);
    ResSeries r(p_, std::min({low_, b.low_, mx}), mx);
    for (long i = r.low_; i < mx; ++i) r.c_[static_cast<std::size_t>(i - r.low_)] = coeff(i) + b.coeff(i);
    *this = std::move(r);
    return *this;
}

ResSeries& ResSeries::operator-=(const ResSeries& b) { return *this += -b; }

ResSeries ResSeries::operator-() const {
    ResSeries r(*this);
    for (auto& x : r.c_) x = -x;
    return r;
}

ResSeries mul_truncated(const ResSeries& a, const ResSeries& b, long mx) {
    require_same_prime(a.prime(), b.prime(), "ResSeries::*");
    const long va = a.valuation();
    const long vb = b.valuation();
    const long bound = std::min(a.precision() + vb, b.precision() + va);
    if (mx > bound)
        throw PrecisionError("ResSeries: requested X^" + std::to_string(mx) + " beyond propagated X^" +
                             std::to_string(bound));
    const long low = a.low() + b.low();
    ResSeries r(a.prime(), std::min(low, mx), mx);
    for (long n = std::max(low, va + vb); n < mx; ++n) {
        FqElem acc(a.prime(), 0);
        long ilo = std::max(va, n - (b.precision() - 1));
        long ihi = std::min(a.precision() - 1, n - vb);
        for (long i = ilo; i <= ihi; ++i) {
            const FqElem ai = a.coeff(i);
            if (ai.is_zero()) continue;
            acc += ai * b.coeff(n - i);
        }
        r.set_coeff(n, acc);
    }
    return r;
}

ResSeries operator*(const ResSeries& a, const ResSeries& b) {
    const long mx = std::min(a.precision() + b.valuation(), b.precision() + a.valuation());
    return mul_truncated(a, b, mx);
}

bool congruent(const ResSeries& a, const ResSeries& b, long mx) {
    if (a.precision() < mx || b.precision() < mx)
        throw PrecisionError("congruent: operands known modulo X^" + std::to_string(std::min(a.precision(), b.precision())) +
                             ", comparison requested modulo X^" + std::to_string(mx));
    for (long i = std::min(a.low(), b.low()); i < mx; ++i)
        if (a.coeff(i) != b.coeff(i)) return false;
    return true;
}

std::string ResSeries::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (long i = low_; i < mx_; ++i) {
        const FqElem& c = c_[static_cast<std::size_t>(i - low_)];
        if (c.is_zero()) continue;
        if (!first) os << " + ";
        bool paren = !c.in_prime_field();
        if (i == 0 || !c.is_one()) {
            os << (paren ? "(" : "") << c << (paren ? ")" : "");
            if (i != 0) os << "*";
        }
        if (i != 0) os << "X^" << i;
        first = false;
    }
    if (first) os << "0";
    os << " + O(X^" << mx_ << ")";
    return os.str();
}

ResSeries inverse(const ResSeries& f) {
    const long v = f.valuation();
    if (v >= f.precision()) throw std::domain_error("inverse: series is zero to working precision");
    const long len = f.precision() - v;
    const long p = f.prime();
    FqElem inv0 = f.coeff(v).inverse();
    std::vector<FqElem> u(static_cast<std::size_t>(len));
    std::vector<FqElem> g(static_cast<std::size_t>(len), FqElem(p, 0));
    for (long i = 0; i < len; ++i) u[static_cast<std::size_t>(i)] = f.coeff(v + i);
    g[0] = inv0;
    for (long n = 1; n < len; ++n) {
        FqElem acc(p, 0);
        for (long i = 1; i <= n; ++i) acc += u[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(n - i)];
        g[static_cast<std::size_t>(n)] = -(acc * inv0);
    }
    ResSeries r(p, -v, len - v);
    for (long n = 0; n < len; ++n) r.set_coeff(n - v, g[static_cast<std::size_t>(n)]);
    return r;
}

ResSeries power(const ResSeries& f, long n) {
    if (n < 0) return power(inverse(f), -n);
    const long v = f.valuation();
    ResSeries result = ResSeries::one(f.prime(), f.precision() + std::max<long>(0, n - 1) * v);
    ResSeries base = f;
    bool first = true;
    while (n > 0) {
        if (n & 1) {
            result = first ? base : result * base;
            first = false;
        }
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return result;
}

namespace {

ResSeries substitute_power_series(const ResSeries& f, const ResSeries& g) {
    const long vg = g.valuation();
    if (vg < 1) throw std::invalid_argument("substitute: inner series has nonzero constant term");
    bool constant = true;
    for (long i = std::max<long>(f.low(), 1); i < f.precision() && constant; ++i)
        if (!f.coeff(i).is_zero()) constant = false;
    const long bound = vg < g.precision() ? f.precision() * vg : f.precision() * g.precision();
    const long mx = constant ? bound : std::min(g.precision(), bound);
    long top = std::min(f.precision() - 1, (mx - 1) / std::max<long>(vg, 1));
    ResSeries acc(f.prime(), 0, mx);
    for (long i = top; i >= 0; --i) {
        if (i < top) acc = mul_truncated(acc, g, mx);
        acc.add_to_coeff(0, f.coeff(i));
    }
    return acc;
}

} // namespace

ResSeries substitute(const ResSeries& f, const ResSeries& g) {
    require_same_prime(f.prime(), g.prime(), "substitute");
    if (g.valuation() < 1) throw std::invalid_argument("substitute: inner series has nonzero constant term");
    const long lo = f.valuation();
    if (lo >= 0 || lo >= f.precision()) {
        ResSeries ff = f;
        if (ff.low() < 0) {
            ResSeries t(f.prime(), 0, f.precision());
            for (long i = 0; i < f.precision(); ++i) t.set_coeff(i, f.coeff(i));
            ff = t;
        }
        return substitute_power_series(ff, g);
    }
    if (g.valuation() != 1)
        throw std::invalid_argument("substitute: Laurent input requires an inner series that is a unit times X");
    ResSeries ftil = f.mul_x_power(-lo);
    ResSeries head = substitute_power_series(ftil, g);
    ResSeries scale = power(inverse(g.mul_x_power(-1)), -lo);
    return (head * scale).mul_x_power(lo);
}

ResSeries frobenius_phi(const ResSeries& f) {
    const long p = f.prime();
    ResSeries r(p, f.low() * p, f.precision() * p);
    for (long i = f.low(); i < f.precision(); ++i) {
        FqElem c = f.coeff(i);
        if (!c.is_zero()) r.set_coeff(i * p, c);
    }
    return r;
}

ResSeries gamma_of_x(long p, const mpz_class& a, long mx) {
    if (mpz_divisible_ui_p(a.get_mpz_t(), static_cast<unsigned long>(p)))
        throw std::invalid_argument("gamma_of_x: exponent is not a p-adic unit");
    // Only the base-p digits below p^L with p^L >= mx matter (Lucas).
    long L = 1;
    for (long v = p; v < mx; v *= p) ++L;
    mpz_class m = pow_p(p, L);
    mpz_class lift = a % m;
    if (lift < 0) lift += m;
    std::vector<long> digits;
    for (long i = 0; i < L; ++i) {
        mpz_class q = lift % p;
        digits.push_back(q.get_si());
        lift /= p;
    }
    ResSeries r(p, 0, mx);
    for (long n = 1; n < mx; ++n) r.set_coeff(n, FqElem(p, lucas(digits, n, p)));
    return r;
}

ResSeries gamma_act(const ResSeries& f, const mpz_class& a) {
    const long lo = std::min<long>(f.valuation(), 0);
    ResSeries g = gamma_of_x(f.prime(), a, f.precision() - lo + 1);
    return substitute(f, g);
}

long psi_output_precision(long mx, long low, long p) {
    long r = mx - (p - 1) - std::abs(low);
    return r >= 0 ? r / p : -1;
}

ResSeries psi(const ResSeries& f) {
    const long p = f.prime();
    const long out = psi_output_precision(f.precision(), std::min<long>(f.low(), 0), p);
    if (out <= 0)
        throw PrecisionError("psi: output precision would be " + std::to_string(out) + " (input X^" +
                             std::to_string(f.precision()) + ", low " + std::to_string(f.low()) + ")");
    auto floor_div = [p](long m) { return m >= 0 ? m / p : -((-m + p - 1) / p); };
    ResSeries r(p, std::min(floor_div(f.low()), out), out);
    for (long m = f.low(); m < f.precision(); ++m) {
        FqElem c = f.coeff(m);
        if (c.is_zero()) continue;
        long q = floor_div(m);
        long rem = m - p * q;
        if (q >= out) continue;
        r.add_to_coeff(q, (rem & 1) ? -c : c);
    }
    return r;
}

} // namespace wachlab
