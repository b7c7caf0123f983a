#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace rksort {

using BigInt = mpz_class;

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Exact rational. Invariant: lowest terms, denominator > 0. All arithmetic
// and comparisons are exact; there is no rounding anywhere in this type.
class ExactReal {
public:
    ExactReal() : q_(0) {}
    ExactReal(long num, long den) { init(BigInt(num), BigInt(den)); }
    ExactReal(BigInt num, BigInt den) { init(std::move(num), std::move(den)); }
    explicit ExactReal(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

    // Accepts "p/q", plain integers, and finite decimals ("-3.25").
    // Anything else (including exponent notation) is a ParseError.
    static ExactReal parse(std::string_view text) {
        if (text.empty()) throw ParseError("empty value");
        std::size_t slash = text.find('/');
        if (slash != std::string_view::npos) {
            std::string_view num = text.substr(0, slash);
            std::string_view den = text.substr(slash + 1);
            return ExactReal(parse_integer(num, true), parse_integer(den, false));
        }
        std::size_t dot = text.find('.');
        if (dot == std::string_view::npos)
            return ExactReal(parse_integer(text, true), BigInt(1));
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        if (whole.empty() || frac.empty())
            throw ParseError("malformed decimal '" + std::string(text) + "'");
        bool neg = whole.front() == '-';
        BigInt w = parse_integer(whole, true);
        BigInt f = parse_integer(frac, false);
        BigInt den = 1;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(frac.size()));
        BigInt num = abs(w) * den + f;
        if (neg) num = -num;
        return ExactReal(num, den);
    }

    BigInt numerator() const { return q_.get_num(); }
    BigInt denominator() const { return q_.get_den(); }
    const mpq_class& raw() const { return q_; }

    bool in_unit_interval() const { return q_ > 0 && q_ < 1; }

    std::string to_string() const {
        if (q_.get_den() == 1) return q_.get_num().get_str();
        return q_.get_num().get_str() + "/" + q_.get_den().get_str();
    }

    friend ExactReal operator+(const ExactReal& a, const ExactReal& b) { return ExactReal(mpq_class(a.q_ + b.q_)); }
    friend ExactReal operator-(const ExactReal& a, const ExactReal& b) { return ExactReal(mpq_class(a.q_ - b.q_)); }
    friend ExactReal operator*(const ExactReal& a, const ExactReal& b) { return ExactReal(mpq_class(a.q_ * b.q_)); }
    friend ExactReal operator/(const ExactReal& a, const ExactReal& b) {
        if (b.q_ == 0) throw std::domain_error("division by zero");
        return ExactReal(mpq_class(a.q_ / b.q_));
    }

    friend bool operator==(const ExactReal& a, const ExactReal& b) { return mpq_equal(a.q_.get_mpq_t(), b.q_.get_mpq_t()) != 0; }
    friend bool operator!=(const ExactReal& a, const ExactReal& b) { return !(a == b); }
    friend bool operator<(const ExactReal& a, const ExactReal& b) { return mpq_cmp(a.q_.get_mpq_t(), b.q_.get_mpq_t()) < 0; }
    friend bool operator>(const ExactReal& a, const ExactReal& b) { return b < a; }
    friend bool operator<=(const ExactReal& a, const ExactReal& b) { return !(b < a); }
    friend bool operator>=(const ExactReal& a, const ExactReal& b) { return !(a < b); }

    friend bool operator<(const ExactReal& a, long v) { return a.q_ < v; }
    friend bool operator>(const ExactReal& a, long v) { return a.q_ > v; }

private:
    void init(BigInt num, BigInt den) {
        if (den == 0) throw ParseError("zero denominator");
        q_ = mpq_class(std::move(num), std::move(den));
        q_.canonicalize();
    }

    static BigInt parse_integer(std::string_view text, bool allow_sign) {
        if (text.empty()) throw ParseError("empty number");
        std::size_t start = 0;
        if (allow_sign && (text[0] == '+' || text[0] == '-')) start = 1;
        if (start == text.size()) throw ParseError("sign without digits");
        for (std::size_t i = start; i < text.size(); ++i)
            if (text[i] < '0' || text[i] > '9')
                throw ParseError("invalid number '" + std::string(text) + "'");
        // mpz_set_str accepts '-' but not '+'.
        std::string digits(text.substr(text[0] == '+' ? 1 : 0));
        return BigInt(digits, 10);
    }

    mpq_class q_;
};

inline ExactReal abs(const ExactReal& r) {
    return r < ExactReal(0, 1) ? ExactReal(0, 1) - r : r;
}

}  // namespace rksort
