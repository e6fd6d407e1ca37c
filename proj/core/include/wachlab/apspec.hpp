#pragma once

#include "wachlab/eisenstein.hpp"

#include <stdexcept>
#include <string>

namespace wachlab {

class ParseError : public std::invalid_argument {
public:
    explicit ParseError(const std::string& what) : std::invalid_argument(what) {}
};

// Precision used for parsed a_p values; integer representatives are kept
// exactly as long as they are below p^kParsePrecision.
constexpr int kParsePrecision = 64;

// A monic Eisenstein polynomial in x such as "x^2-5" or "x^3 + 3*x - 3".
// An empty string means E(x) = x - p.
RingPtr parse_eisenstein(long p, const std::string& text, int precision = kParsePrecision);

// An integer literal, "c*p", "pi", or a polynomial in pi (p may appear as a
// constant).  Products and powers of these are accepted as well.
OLElem parse_ap(const RingPtr& ring, const std::string& text);

} // namespace wachlab
