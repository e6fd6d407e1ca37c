#include "wachlab/fq.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace wachlab {

long mod_p(long a, long p) {
    long r = a % p;
    return r < 0 ? r + p : r;
}

long inv_mod(long a, long p) {
    long t = 0, nt = 1, r = p, nr = mod_p(a, p);
    if (nr == 0) throw std::domain_error("inv_mod: zero has no inverse");
    while (nr != 0) {
        long q = r / nr;
        long tmp = t - q * nt;
        t = nt;
        nt = tmp;
        tmp = r - q * nr;
        r = nr;
        nr = tmp;
    }
    return mod_p(t, p);
}

namespace {

long powmod(long a, long n, long p) {
    long r = 1;
    a = mod_p(a, p);
    while (n > 0) {
        if (n & 1) r = static_cast<long>((static_cast<__int128>(r) * a) % p);
        a = static_cast<long>((static_cast<__int128>(a) * a) % p);
        n >>= 1;
    }
    return r;
}

long mulmod(long a, long b, long p) { return static_cast<long>((static_cast<__int128>(a) * b) % p); }

} // namespace

bool is_square_mod(long a, long p) {
    a = mod_p(a, p);
    return a == 0 || powmod(a, (p - 1) / 2, p) == 1;
}

long least_nonresidue(long p) {
    for (long n = 2; n < p; ++n)
        if (!is_square_mod(n, p)) return n;
    throw std::invalid_argument("least_nonresidue: no non-residue for p = " + std::to_string(p));
}

long sqrt_mod(long a, long p) {
    a = mod_p(a, p);
    for (long x = 0; x < p; ++x)
        if (mulmod(x, x, p) == a) return x;
    throw std::domain_error("sqrt_mod: not a square");
}

long primitive_root(long p) {
    std::vector<long> factors;
    long m = p - 1;
    for (long d = 2; d * d <= m; ++d)
        if (m % d == 0) {
            factors.push_back(d);
            while (m % d == 0) m /= d;
        }
    if (m > 1) factors.push_back(m);
    for (long g = 2; g < p; ++g) {
        bool ok = true;
        for (long q : factors)
            if (powmod(g, (p - 1) / q, p) == 1) {
                ok = false;
                break;
            }
        if (ok) return g;
    }
    if (p == 3) return 2;
    throw std::invalid_argument("primitive_root: none found");
}

long discrete_log(long g, long h, long p) {
    h = mod_p(h, p);
    long x = 1;
    for (long m = 0; m < p; ++m) {
        if (x == h) return m;
        x = mulmod(x, g, p);
    }
    throw std::domain_error("discrete_log: " + std::to_string(h) + " not a power of " + std::to_string(g));
}

// ------------------------------------------------------------------ FqElem

FqElem::FqElem(long p, long a) : p_(p), a_(mod_p(a, p)) {}

FqElem::FqElem(long p, long a, long b) : p_(p), n_(least_nonresidue(p)), a_(mod_p(a, p)), b_(mod_p(b, p)) {}

void FqElem::check(const FqElem& o) const {
    if (p_ != o.p_) throw std::invalid_argument("FqElem: operands over different primes");
}

FqElem FqElem::operator-() const {
    FqElem r(*this);
    r.a_ = mod_p(-a_, p_);
    r.b_ = mod_p(-b_, p_);
    return r;
}

FqElem& FqElem::operator+=(const FqElem& o) {
    check(o);
    a_ = mod_p(a_ + o.a_, p_);
    b_ = mod_p(b_ + o.b_, p_);
    if (n_ == 0) n_ = o.n_;
    return *this;
}

FqElem& FqElem::operator-=(const FqElem& o) {
    check(o);
    a_ = mod_p(a_ - o.a_, p_);
    b_ = mod_p(b_ - o.b_, p_);
    if (n_ == 0) n_ = o.n_;
    return *this;
}

FqElem& FqElem::operator*=(const FqElem& o) {
    check(o);
    if (n_ == 0) n_ = o.n_;
    if (b_ == 0 && o.b_ == 0) {
        a_ = mulmod(a_, o.a_, p_);
        return *this;
    }
    // (a + bt)(c + dt) = ac + n bd + (ad + bc) t
    long na = mod_p(mulmod(a_, o.a_, p_) + mulmod(n_, mulmod(b_, o.b_, p_), p_), p_);
    long nb = mod_p(mulmod(a_, o.b_, p_) + mulmod(b_, o.a_, p_), p_);
    a_ = na;
    b_ = nb;
    return *this;
}

FqElem FqElem::inverse() const {
    if (is_zero()) throw std::domain_error("FqElem::inverse: zero");
    if (b_ == 0) {
        FqElem r(*this);
        r.a_ = inv_mod(a_, p_);
        return r;
    }
    // 1/(a + bt) = (a - bt)/(a^2 - n b^2)
    long norm = mod_p(mulmod(a_, a_, p_) - mulmod(n_, mulmod(b_, b_, p_), p_), p_);
    long ni = inv_mod(norm, p_);
    FqElem r(*this);
    r.a_ = mulmod(a_, ni, p_);
    r.b_ = mod_p(-mulmod(b_, ni, p_), p_);
    return r;
}

FqElem FqElem::pow(long n) const {
    if (n < 0) return inverse().pow(-n);
    FqElem r(p_, 1);
    r.n_ = n_;
    FqElem base(*this);
    while (n > 0) {
        if (n & 1) r *= base;
        base *= base;
        n >>= 1;
    }
    return r;
}

FqElem FqElem::frobenius() const {
    FqElem r(*this);
    r.b_ = mod_p(-b_, p_);
    return r;
}

bool FqElem::operator<(const FqElem& o) const noexcept {
    if (b_ != o.b_) return b_ < o.b_;
    return a_ < o.a_;
}

std::vector<long> FqElem::minimal_polynomial() const {
    if (b_ == 0) return {mod_p(-a_, p_), 1};
    // (x - y)(x - y^p) = x^2 - 2a x + (a^2 - n b^2)
    long trace = mod_p(2 * a_, p_);
    long norm = mod_p(mulmod(a_, a_, p_) - mulmod(n_, mulmod(b_, b_, p_), p_), p_);
    return {norm, mod_p(-trace, p_), 1};
}

int FqElem::root_tag() const {
    if (b_ == 0) return 0;
    return frobenius() < *this ? 1 : 0;
}

std::string FqElem::to_string() const {
    std::ostringstream os;
    if (b_ == 0) {
        os << a_;
    } else {
        if (a_ != 0) os << a_ << "+";
        if (b_ != 1) os << b_ << "*";
        os << "t";
    }
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const FqElem& x) { return os << x.to_string(); }

std::string polynomial_to_string(const std::vector<long>& coeffs) {
    std::ostringstream os;
    bool first = true;
    for (long i = static_cast<long>(coeffs.size()) - 1; i >= 0; --i) {
        long c = coeffs[static_cast<std::size_t>(i)];
        if (c == 0) continue;
        if (!first) os << " + ";
        if (c != 1 || i == 0) os << c;
        if (i >= 1) os << "x";
        if (i >= 2) os << "^" << i;
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

std::array<FqElem, 2> quadratic_roots(const FqElem& s, const FqElem& t) {
    const long p = s.prime();
    if (!s.in_prime_field() || !t.in_prime_field())
        throw std::invalid_argument("quadratic_roots: coefficients must lie in F_p");
    long disc = mod_p(mulmod(s.a(), s.a(), p) - 4 * t.a(), p);
    long half = inv_mod(2, p);
    std::array<FqElem, 2> r;
    if (is_square_mod(disc, p)) {
        long d = sqrt_mod(disc, p);
        r = {FqElem(p, mulmod(s.a() + d, half, p), 0), FqElem(p, mulmod(mod_p(s.a() - d, p), half, p), 0)};
    } else {
        long n = least_nonresidue(p);
        // disc = n * c^2 with c = sqrt(disc / n)
        long c = sqrt_mod(mulmod(disc, inv_mod(n, p), p), p);
        r = {FqElem(p, mulmod(s.a(), half, p), mulmod(c, half, p)),
             FqElem(p, mulmod(s.a(), half, p), mod_p(-mulmod(c, half, p), p))};
    }
    std::sort(r.begin(), r.end());
    return r;
}

} // namespace wachlab
