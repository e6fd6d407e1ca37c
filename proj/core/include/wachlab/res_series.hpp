#pragma once

#include "wachlab/fq.hpp"

#include <gmpxx.h>

#include <string>
#include <vector>

namespace wachlab {

/*
 * Truncated Laurent series over F_p or F_{p^2}: sum_{i >= low} c_i X^i + O(X^Mx).
 * Coefficients at exponents [low, Mx) are stored; everything below `low`
 * is zero.
 */
class ResSeries {
public:
    ResSeries() = default;
    ResSeries(long p, long low, long mx);

    static ResSeries from_values(long p, const std::vector<long>& coeffs, long mx, long low = 0);
    static ResSeries monomial(long p, long exponent, const FqElem& c, long mx);
    static ResSeries constant(long p, const FqElem& c, long mx);
    static ResSeries one(long p, long mx);
    static ResSeries x(long p, long mx);

    long prime() const noexcept { return p_; }
    long low() const noexcept { return low_; }
    long precision() const noexcept { return mx_; }

    FqElem coeff(long i) const;
    void set_coeff(long i, const FqElem& c);
    void add_to_coeff(long i, const FqElem& c);

    // Smallest exponent with nonzero coefficient, or Mx.
    long valuation() const;
    bool is_zero() const { return valuation() >= mx_; }
    bool in_prime_field() const;

    ResSeries truncated(long mx) const;
    ResSeries mul_x_power(long n) const;
    ResSeries scaled(const FqElem& c) const;

    ResSeries& operator+=(const ResSeries& b);
    ResSeries& operator-=(const ResSeries& b);
    ResSeries operator-() const;
    friend ResSeries operator+(ResSeries a, const ResSeries& b) { return a += b; }
    friend ResSeries operator-(ResSeries a, const ResSeries& b) { return a -= b; }
    friend ResSeries operator*(const ResSeries& a, const ResSeries& b);

    std::string to_string() const;

private:
    long p_ = 0;
    long low_ = 0;
    long mx_ = 0;
    std::vector<FqElem> c_;
};

ResSeries mul_truncated(const ResSeries& a, const ResSeries& b, long mx);
// Coefficients agree below X^mx; PrecisionError if either side is shorter.
bool congruent(const ResSeries& a, const ResSeries& b, long mx);

// 1/f for f with a nonzero leading coefficient; f = X^v u gives precision Mx - 2v.
ResSeries inverse(const ResSeries& f);
ResSeries power(const ResSeries& f, long n);

// f(g), g of X-valuation >= 1; Laurent f requires g to be a unit times X.
ResSeries substitute(const ResSeries& f, const ResSeries& g);

// f(X^p); exact, precision p*Mx.
ResSeries frobenius_phi(const ResSeries& f);

// (1+X)^a - 1 over F_p, for any p-adic integer a given by an integer lift.
ResSeries gamma_of_x(long p, const mpz_class& a, long mx);
ResSeries gamma_act(const ResSeries& f, const mpz_class& a);

// psi(X^{pq+r}) = (-1)^r X^q for 0 <= r < p.
ResSeries psi(const ResSeries& f);
long psi_output_precision(long mx, long low, long p);

} // namespace wachlab
