#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace wachlab {

long least_nonresidue(long p);
long mod_p(long a, long p);
long inv_mod(long a, long p);
bool is_square_mod(long a, long p);
long sqrt_mod(long a, long p);
long primitive_root(long p);
// Smallest m >= 0 with g^m = h (mod p); throws if none.
long discrete_log(long g, long h, long p);

/*
 * Element a + b*t of F_p or F_{p^2} = F_p[t]/(t^2 - n), n the least
 * quadratic non-residue mod p.  Elements with b = 0 lie in F_p and
 * interoperate with any element over the same p.
 */
class FqElem {
public:
    FqElem() = default;
    FqElem(long p, long a);
    FqElem(long p, long a, long b);

    long prime() const noexcept { return p_; }
    long a() const noexcept { return a_; }
    long b() const noexcept { return b_; }
    long nonresidue() const noexcept { return n_; }

    bool is_zero() const noexcept { return a_ == 0 && b_ == 0; }
    bool is_one() const noexcept { return a_ == 1 && b_ == 0; }
    bool in_prime_field() const noexcept { return b_ == 0; }

    FqElem operator-() const;
    FqElem& operator+=(const FqElem& o);
    FqElem& operator-=(const FqElem& o);
    FqElem& operator*=(const FqElem& o);
    friend FqElem operator+(FqElem x, const FqElem& y) { return x += y; }
    friend FqElem operator-(FqElem x, const FqElem& y) { return x -= y; }
    friend FqElem operator*(FqElem x, const FqElem& y) { return x *= y; }
    friend FqElem operator/(const FqElem& x, const FqElem& y) { return x * y.inverse(); }

    FqElem inverse() const;
    FqElem pow(long n) const;
    // x -> x^p
    FqElem frobenius() const;

    bool operator==(const FqElem& o) const noexcept { return p_ == o.p_ && a_ == o.a_ && b_ == o.b_; }
    bool operator!=(const FqElem& o) const noexcept { return !(*this == o); }
    // Fixed total order: prime-field elements first, then by (b, a).
    bool operator<(const FqElem& o) const noexcept;

    // Monic minimal polynomial over F_p, coefficients from degree 0 upwards.
    std::vector<long> minimal_polynomial() const;
    // Index of this element among the roots of its minimal polynomial in
    // the fixed order above (0 or 1).
    int root_tag() const;

    std::string to_string() const;

private:
    void check(const FqElem& o) const;

    long p_ = 0;
    long n_ = 0;
    long a_ = 0;
    long b_ = 0;
};

std::ostream& operator<<(std::ostream& os, const FqElem& x);

std::string polynomial_to_string(const std::vector<long>& coeffs);

// Roots of x^2 - s x + t over F_{p^2}, sorted; equal entries for a double root.
std::array<FqElem, 2> quadratic_roots(const FqElem& s, const FqElem& t);

} // namespace wachlab
