#pragma once

#include "wachlab/eisenstein.hpp"

#include <gmpxx.h>

#include <string>
#include <vector>

namespace wachlab {

/*
 * Truncated Laurent series over O_L.
 *
 * The value is p^{-shift} * sum_{i >= low} c_i X^i + O(X^Mx), where the
 * stored coefficients c_i are O_L elements modulo p^Np (Np = ring
 * precision).  Every coefficient from `low` up to Mx-1 is stored, so the
 * value is known modulo (p^{Np-shift}, X^Mx).
 *
 * Binary operations accept operands whose rings differ only in precision
 * and work at the smaller one; operands over different fields throw
 * RingMismatch.
 */
class Series {
public:
    Series() = default;
    // The zero series with the given exponent window.
    Series(RingPtr ring, long low, long mx, int shift = 0);

    static Series from_integers(RingPtr ring, const std::vector<mpz_class>& coeffs, long mx, long low = 0, int shift = 0);
    static Series monomial(RingPtr ring, long exponent, const OLElem& coeff, long mx);
    static Series constant(RingPtr ring, const OLElem& c, long mx);
    static Series one(RingPtr ring, long mx);
    static Series x(RingPtr ring, long mx);

    const RingPtr& ring() const noexcept { return ring_; }
    long prime() const noexcept { return ring_->prime(); }
    long low() const noexcept { return low_; }
    long precision() const noexcept { return mx_; }
    int shift() const noexcept { return shift_; }
    // Absolute p-adic precision of the value.
    int value_precision() const noexcept { return ring_->precision() - shift_; }
    long length() const noexcept { return mx_ - low_; }

    // Stored (unshifted) coefficient; 0 below `low`, throws at or above Mx.
    OLElem coeff(long i) const;
    void set_coeff(long i, const OLElem& c);
    const mpz_class& raw(long i, int j = 0) const;
    mpz_class& raw(long i, int j = 0);

    // Smallest exponent with a nonzero stored coefficient, or Mx.
    long valuation() const;
    bool is_zero() const { return valuation() >= mx_; }
    // min over stored coefficients of their p-adic valuation (capped at Np).
    long content_valuation() const;

    Series truncated(long mx) const;
    Series at_precision(int np) const;
    Series with_shift(int shift) const;
    // Largest reduction of the shift that keeps coefficients integral.
    Series normalized() const;
    // Integral series (shift 0), or CheckFailure `integrality`.
    Series require_integral(const std::string& what) const;

    Series& operator+=(const Series& b);
    Series& operator-=(const Series& b);
    Series operator-() const;
    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator*(const Series& a, const Series& b);
    Series scaled(const OLElem& c) const;
    Series scaled(const mpz_class& c) const;
    Series mul_x_power(long n) const;

    // Value as a polynomial in X: stored coefficients of exponents [low, Mx).
    std::vector<OLElem> coefficients() const;

    std::string to_string() const;

private:
    std::size_t index(long i, int j) const;
    void reduce_all();

    RingPtr ring_;
    long low_ = 0;
    long mx_ = 0;
    int shift_ = 0;
    std::vector<mpz_class> data_;
};

// Multiplication truncated at X^mx (mx may be smaller than the propagated bound).
Series mul_truncated(const Series& a, const Series& b, long mx);

// Values agree modulo (p^np, X^mx).
bool congruent(const Series& a, const Series& b, long mx, int np);

// 1/f for f with unit constant term; the result carries shift <= budget.
Series inverse(const Series& f, int budget);

Series power(const Series& f, long n);

// f(g) for g with positive X-valuation and shift 0; f must have low >= 0.
Series substitute(const Series& f, const Series& g);

// phi(X) = (1+X)^p - 1 to X-precision mx.
Series phi_of_x(RingPtr ring, long mx);
Series frobenius_phi(const Series& f);
// As above, delivering at most X-precision `cap`.
Series frobenius_phi(const Series& f, long cap);

// (1+X)^a - 1 where a is known modulo p^guard.
Series gamma_of_x(RingPtr ring, const mpz_class& a, long guard, long mx);
long gamma_guard_required(const RingPtr& ring, long mx);
// gamma_a acting on f; a is an exact integer (a unit mod p).
Series gamma_act(const Series& f, const mpz_class& a);
// As above with a known only modulo p^guard; PrecisionError if the guard
// is short of Np + ceil(log_p Mx).
Series gamma_act(const Series& f, const mpz_class& a, long guard);

// psi(f), the x_0 of f = sum (1+X)^i phi(x_i).
Series psi(const Series& f);
long psi_output_precision(long mx, long low, long p, int np);

// q_n = phi^{n-1}(phi(X)/X).
Series q_series(RingPtr ring, long n, long mx);

long ceil_log(long x, long base);

} // namespace wachlab
