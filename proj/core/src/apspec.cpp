#include "wachlab/apspec.hpp"

#include <cctype>

namespace wachlab {

namespace {

using Poly = std::vector<mpz_class>;

Poly trim(Poly a) {
    while (a.size() > 1 && a.back() == 0) a.pop_back();
    return a;
}

Poly add(const Poly& a, const Poly& b, int sign) {
    Poly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += sign * b[i];
    return trim(r);
}

Poly mul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return trim(r);
}

/*
 * expr   := ['+'|'-'] term (('+'|'-') term)*
 * term   := power ('*'? power)*
 * power  := atom ('^' integer)?
 * atom   := integer | variable | 'p' | '(' expr ')'
 */
class PolyParser {
public:
    PolyParser(std::string text, std::string var, long p) : s_(std::move(text)), var_(std::move(var)), p_(p) {}

    Poly parse() {
        Poly r = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected '" + s_.substr(i_, 1) + "'");
        return r;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("cannot parse \"" + s_ + "\" at position " + std::to_string(i_) + ": " + msg);
    }

    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }

    bool accept(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }

    bool at_word(const std::string& w) const {
        if (s_.compare(i_, w.size(), w) != 0) return false;
        std::size_t end = i_ + w.size();
        return end >= s_.size() || !std::isalnum(static_cast<unsigned char>(s_[end]));
    }

    mpz_class integer() {
        skip();
        std::size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (start == i_) fail("expected an integer");
        return mpz_class(s_.substr(start, i_ - start));
    }

    Poly expr() {
        int sign = 1;
        if (accept('-')) sign = -1;
        else accept('+');
        Poly r = add(Poly{0}, term(), sign);
        for (;;) {
            if (accept('+')) r = add(r, term(), 1);
            else if (accept('-')) r = add(r, term(), -1);
            else return r;
        }
    }

    bool starts_atom() {
        skip();
        if (i_ >= s_.size()) return false;
        char c = s_[i_];
        return std::isdigit(static_cast<unsigned char>(c)) || c == '(' || at_word(var_) || at_word("p");
    }

    Poly term() {
        Poly r = power();
        for (;;) {
            if (accept('*')) r = mul(r, power());
            else if (starts_atom()) r = mul(r, power());
            else return r;
        }
    }

    Poly power() {
        Poly base = atom();
        if (!accept('^')) return base;
        mpz_class e = integer();
        if (e > 4096) fail("exponent too large");
        Poly r{1};
        for (long i = 0; i < e.get_si(); ++i) r = mul(r, base);
        return r;
    }

    Poly atom() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end of input");
        if (accept('(')) {
            Poly r = expr();
            if (!accept(')')) fail("expected ')'");
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(s_[i_]))) return Poly{integer()};
        if (at_word(var_)) {
            i_ += var_.size();
            return Poly{0, 1};
        }
        if (at_word("p")) {
            ++i_;
            return Poly{mpz_class(p_)};
        }
        fail("expected a number, '" + var_ + "' or 'p'");
    }

    std::string s_;
    std::string var_;
    long p_;
    std::size_t i_ = 0;
};

} // namespace

RingPtr parse_eisenstein(long p, const std::string& text, int precision) {
    bool blank = text.find_first_not_of(" \t") == std::string::npos;
    if (blank) return EisensteinRing::unramified(p, precision);
    Poly e = PolyParser(text, "x", p).parse();
    if (e.size() < 2 || e.back() != 1) throw ParseError("Eisenstein polynomial \"" + text + "\" must be monic of degree >= 1");
    Poly lower(e.begin(), e.end() - 1);
    try {
        return EisensteinRing::create(p, lower, precision);
    } catch (const std::invalid_argument& ex) {
        throw ParseError(ex.what());
    }
}

OLElem parse_ap(const RingPtr& ring, const std::string& text) {
    Poly a = PolyParser(text, "pi", ring->prime()).parse();
    const OLElem pi = OLElem::uniformizer(ring);
    OLElem acc(ring);
    for (std::size_t i = a.size(); i-- > 0;) acc = acc * pi + OLElem(ring, a[i]);
    return acc;
}

} // namespace wachlab
