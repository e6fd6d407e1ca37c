#pragma once

#include <gmpxx.h>

#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace wachlab {

class EisensteinRing;
using RingPtr = std::shared_ptr<const EisensteinRing>;

/*
 * O_L = Z_p[pi]/E(pi) for a monic Eisenstein polynomial
 * E(x) = x^e + c_{e-1} x^{e-1} + ... + c_0, with elements stored as
 * e coefficients modulo p^Np.  Since p^Np O_L is exactly the set of
 * elements whose coefficients are all divisible by p^Np, the coefficient
 * reduction is the ring reduction.
 *
 * Instances are immutable and shared between elements.
 */
class EisensteinRing {
public:
    // `lower` holds c_0..c_{e-1}.  Throws std::invalid_argument unless p is
    // an odd prime and E is Eisenstein.
    static RingPtr create(long p, std::vector<mpz_class> lower, int precision);
    // e = 1, E(x) = x - p.
    static RingPtr unramified(long p, int precision);

    long prime() const noexcept { return p_; }
    int degree() const noexcept { return static_cast<int>(lower_.size()); }
    int precision() const noexcept { return precision_; }
    const mpz_class& modulus() const noexcept { return modulus_; }
    const std::vector<mpz_class>& eisenstein() const noexcept { return lower_; }

    RingPtr at_precision(int precision) const;

    // Same p, same E; precision may differ.
    bool same_field(const EisensteinRing& other) const;
    bool operator==(const EisensteinRing& other) const;

    // "x^2 - 5" style rendering of E.
    std::string polynomial_string() const;

    // Reduces a polynomial in pi of degree < 2e-1 modulo E and p^Np, in place;
    // the result has exactly e entries.
    void reduce(std::vector<mpz_class>& poly) const;

private:
    EisensteinRing(long p, std::vector<mpz_class> lower, int precision);

    long p_;
    std::vector<mpz_class> lower_;
    int precision_;
    mpz_class modulus_;
};

void require_same_ring(const RingPtr& a, const RingPtr& b, const char* where);

// p-adic valuation of an integer (v_p(0) is reported as `cap`).
long vp(const mpz_class& x, long p, long cap);

mpz_class pow_p(long p, long n);

/*
 * Valuation normalized so that val(p) = 1, stored as pi_units / e.
 * `lower_bound_only` is set when the element is zero to working precision;
 * then pi_units is the precision e*Np.
 */
struct Valuation {
    long pi_units = 0;
    int e = 1;
    bool lower_bound_only = false;

    // Comparisons of the rational value pi_units/e.
    int compare(long num, long den) const;
    bool is_exactly(long num, long den) const { return !lower_bound_only && compare(num, den) == 0; }
    std::string to_string() const;
};

class OLElem {
public:
    OLElem() = default;
    explicit OLElem(RingPtr ring);
    OLElem(RingPtr ring, long value);
    OLElem(RingPtr ring, const mpz_class& value);
    OLElem(RingPtr ring, std::vector<mpz_class> coeffs);

    static OLElem uniformizer(RingPtr ring);

    const RingPtr& ring() const noexcept { return ring_; }
    const std::vector<mpz_class>& coeffs() const noexcept { return c_; }
    const mpz_class& coeff(int i) const { return c_[static_cast<std::size_t>(i)]; }

    bool is_zero() const;
    Valuation valuation() const;

    OLElem operator-() const;
    OLElem& operator+=(const OLElem& b);
    OLElem& operator-=(const OLElem& b);
    OLElem& operator*=(const OLElem& b);
    friend OLElem operator+(OLElem a, const OLElem& b) { return a += b; }
    friend OLElem operator-(OLElem a, const OLElem& b) { return a -= b; }
    friend OLElem operator*(OLElem a, const OLElem& b) { return a *= b; }

    // Throws std::domain_error for a non-unit.
    OLElem inverse() const;

    // Exact division by p; throws std::domain_error unless every
    // coefficient is divisible by p.  The result lives one digit lower.
    OLElem divide_by_p() const;

    // Residue modulo pi, as an integer in [0, p).
    long residue() const;

    OLElem at_precision(int precision) const;

    bool operator==(const OLElem& b) const;
    bool operator!=(const OLElem& b) const { return !(*this == b); }

    std::string to_string() const;

private:
    RingPtr ring_;
    std::vector<mpz_class> c_;
};

std::ostream& operator<<(std::ostream& os, const OLElem& x);

} // namespace wachlab
