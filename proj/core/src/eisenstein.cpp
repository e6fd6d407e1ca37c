#include "wachlab/eisenstein.hpp"

#include "wachlab/errors.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace wachlab {

namespace {

bool is_prime(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

void reduce_mod(mpz_class& x, const mpz_class& m) {
    mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
}

} // namespace

mpz_class pow_p(long p, long n) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(n));
    return r;
}

long vp(const mpz_class& x, long p, long cap) {
    if (x == 0) return cap;
    mpz_class t = x;
    long v = 0;
    while (v < cap && mpz_divisible_ui_p(t.get_mpz_t(), static_cast<unsigned long>(p))) {
        mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(p));
        ++v;
    }
    return v;
}

EisensteinRing::EisensteinRing(long p, std::vector<mpz_class> lower, int precision)
    : p_(p), lower_(std::move(lower)), precision_(precision), modulus_(pow_p(p, precision)) {}

RingPtr EisensteinRing::create(long p, std::vector<mpz_class> lower, int precision) {
    if (!is_prime(p) || p < 3)
        throw std::invalid_argument("EisensteinRing: p must be an odd prime, got " + std::to_string(p));
    if (lower.empty())
        throw std::invalid_argument("EisensteinRing: E must have degree >= 1");
    if (precision < 1)
        throw std::invalid_argument("EisensteinRing: precision must be >= 1");
    for (const auto& c : lower)
        if (!mpz_divisible_ui_p(c.get_mpz_t(), static_cast<unsigned long>(p)))
            throw std::invalid_argument("EisensteinRing: E is not Eisenstein (coefficient not divisible by p)");
    if (vp(lower[0], p, 2) != 1)
        throw std::invalid_argument("EisensteinRing: E is not Eisenstein (constant term must have valuation 1)");
    return RingPtr(new EisensteinRing(p, std::move(lower), precision));
}

RingPtr EisensteinRing::unramified(long p, int precision) {
    return create(p, {mpz_class(-p)}, precision);
}

RingPtr EisensteinRing::at_precision(int precision) const {
    if (precision < 1)
        throw PrecisionError("EisensteinRing: requested precision " + std::to_string(precision) + " < 1");
    return RingPtr(new EisensteinRing(p_, lower_, precision));
}

bool EisensteinRing::same_field(const EisensteinRing& other) const {
    return p_ == other.p_ && lower_ == other.lower_;
}

bool EisensteinRing::operator==(const EisensteinRing& other) const {
    return same_field(other) && precision_ == other.precision_;
}

std::string EisensteinRing::polynomial_string() const {
    std::ostringstream os;
    int e = degree();
    os << "x";
    if (e > 1) os << "^" << e;
    for (int i = e - 1; i >= 0; --i) {
        const mpz_class& c = lower_[static_cast<std::size_t>(i)];
        if (c == 0) continue;
        os << (c < 0 ? " - " : " + ");
        mpz_class a = abs(c);
        if (i == 0 || a != 1) os << a;
        if (i >= 1) os << "x";
        if (i >= 2) os << "^" << i;
    }
    return os.str();
}

void EisensteinRing::reduce(std::vector<mpz_class>& poly) const {
    const int e = degree();
    // pi^e = -sum c_i pi^i
    for (int j = static_cast<int>(poly.size()) - 1; j >= e; --j) {
        mpz_class t = poly[static_cast<std::size_t>(j)];
        if (t == 0) continue;
        reduce_mod(t, modulus_);
        for (int i = 0; i < e; ++i)
            poly[static_cast<std::size_t>(j - e + i)] -= t * lower_[static_cast<std::size_t>(i)];
    }
    poly.resize(static_cast<std::size_t>(e));
    for (auto& c : poly) reduce_mod(c, modulus_);
}

void require_same_ring(const RingPtr& a, const RingPtr& b, const char* where) {
    if (!a || !b) throw RingMismatch(std::string(where) + ": uninitialized ring");
    if (a != b && !(*a == *b))
        throw RingMismatch(std::string(where) + ": operands in different rings");
}

// ---------------------------------------------------------------- Valuation

int Valuation::compare(long num, long den) const {
    // pi_units/e vs num/den
    long lhs = pi_units * den;
    long rhs = num * e;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

std::string Valuation::to_string() const {
    long g = std::gcd(pi_units, static_cast<long>(e));
    if (g == 0) g = 1;
    std::ostringstream os;
    if (lower_bound_only) os << ">=";
    os << pi_units / g;
    if (e / g != 1) os << "/" << e / g;
    return os.str();
}

// ------------------------------------------------------------------ OLElem

OLElem::OLElem(RingPtr ring) : ring_(std::move(ring)), c_(static_cast<std::size_t>(ring_->degree())) {}

OLElem::OLElem(RingPtr ring, long value) : OLElem(std::move(ring), mpz_class(value)) {}

OLElem::OLElem(RingPtr ring, const mpz_class& value) : OLElem(std::move(ring)) {
    c_[0] = value;
    reduce_mod(c_[0], ring_->modulus());
}

OLElem::OLElem(RingPtr ring, std::vector<mpz_class> coeffs) : ring_(std::move(ring)), c_(std::move(coeffs)) {
    if (c_.size() > static_cast<std::size_t>(ring_->degree())) {
        ring_->reduce(c_);
    } else {
        c_.resize(static_cast<std::size_t>(ring_->degree()));
        for (auto& c : c_) reduce_mod(c, ring_->modulus());
    }
}

OLElem OLElem::uniformizer(RingPtr ring) {
    std::vector<mpz_class> c(2);
    c[1] = 1;
    return OLElem(std::move(ring), std::move(c));
}

bool OLElem::is_zero() const {
    for (const auto& c : c_)
        if (c != 0) return false;
    return true;
}

Valuation OLElem::valuation() const {
    const int e = ring_->degree();
    const long np = ring_->precision();
    Valuation v;
    v.e = e;
    long best = e * np;
    bool found = false;
    for (int i = 0; i < e; ++i) {
        const mpz_class& c = c_[static_cast<std::size_t>(i)];
        if (c == 0) continue;
        long cand = e * vp(c, ring_->prime(), np) + i;
        if (!found || cand < best) best = cand;
        found = true;
    }
    v.pi_units = best;
    v.lower_bound_only = !found;
    return v;
}

OLElem OLElem::operator-() const {
    OLElem r(*this);
    for (auto& c : r.c_) {
        c = -c;
        reduce_mod(c, ring_->modulus());
    }
    return r;
}

OLElem& OLElem::operator+=(const OLElem& b) {
    require_same_ring(ring_, b.ring_, "OLElem::+");
    for (std::size_t i = 0; i < c_.size(); ++i) {
        c_[i] += b.c_[i];
        if (c_[i] >= ring_->modulus()) c_[i] -= ring_->modulus();
    }
    return *this;
}

OLElem& OLElem::operator-=(const OLElem& b) {
    require_same_ring(ring_, b.ring_, "OLElem::-");
    for (std::size_t i = 0; i < c_.size(); ++i) {
        c_[i] -= b.c_[i];
        if (c_[i] < 0) c_[i] += ring_->modulus();
    }
    return *this;
}

OLElem& OLElem::operator*=(const OLElem& b) {
    require_same_ring(ring_, b.ring_, "OLElem::*");
    const std::size_t e = c_.size();
    if (e == 1) {
        c_[0] *= b.c_[0];
        reduce_mod(c_[0], ring_->modulus());
        return *this;
    }
    std::vector<mpz_class> prod(2 * e - 1);
    for (std::size_t i = 0; i < e; ++i)
        for (std::size_t j = 0; j < e; ++j)
            prod[i + j] += c_[i] * b.c_[j];
    ring_->reduce(prod);
    c_ = std::move(prod);
    return *this;
}

OLElem OLElem::inverse() const {
    const long p = ring_->prime();
    if (!valuation().is_exactly(0, 1))
        throw std::domain_error("OLElem::inverse: element " + to_string() + " is not a unit");
    // Newton iteration x <- x (2 - a x) from an inverse of c_0 mod p; each
    // step doubles the number of correct pi-adic digits.
    mpz_class c0 = c_[0] % p;
    if (c0 < 0) c0 += p;
    mpz_class inv0;
    mpz_class pm(p);
    mpz_invert(inv0.get_mpz_t(), c0.get_mpz_t(), pm.get_mpz_t());
    OLElem x(ring_, inv0);
    OLElem two(ring_, 2);
    long target = static_cast<long>(ring_->degree()) * ring_->precision();
    for (long correct = 1; correct < 2 * target + 2; correct *= 2)
        x = x * (two - (*this) * x);
    return x;
}

OLElem OLElem::divide_by_p() const {
    const long p = ring_->prime();
    std::vector<mpz_class> out(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (!mpz_divisible_ui_p(c_[i].get_mpz_t(), static_cast<unsigned long>(p)))
            throw std::domain_error("OLElem::divide_by_p: " + to_string() + " is not divisible by p");
        mpz_divexact_ui(out[i].get_mpz_t(), c_[i].get_mpz_t(), static_cast<unsigned long>(p));
    }
    if (ring_->precision() < 2)
        throw PrecisionError("OLElem::divide_by_p: no precision left");
    return OLElem(ring_->at_precision(ring_->precision() - 1), std::move(out));
}

long OLElem::residue() const {
    mpz_class r = c_[0] % ring_->prime();
    if (r < 0) r += ring_->prime();
    return r.get_si();
}

OLElem OLElem::at_precision(int precision) const {
    if (precision > ring_->precision())
        throw PrecisionError("OLElem::at_precision: cannot raise precision");
    return OLElem(ring_->at_precision(precision), c_);
}

bool OLElem::operator==(const OLElem& b) const {
    require_same_ring(ring_, b.ring_, "OLElem::==");
    return c_ == b.c_;
}

std::string OLElem::to_string() const {
    if (c_.size() == 1) return c_[0].get_str();
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        if (!first) os << " + ";
        os << c_[i];
        if (i >= 1) os << "*pi";
        if (i >= 2) os << "^" << i;
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const OLElem& x) { return os << x.to_string(); }

} // namespace wachlab
