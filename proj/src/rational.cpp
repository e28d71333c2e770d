// rational.cpp: overflow-checked exact arithmetic

#include "cqf/rational.hpp"

#include <cctype>
#include <limits>
#include <numeric>

#include "cqf/error.hpp"

namespace cqf {

namespace {

using wide = __int128;

wide gcd_wide(wide a, wide b)
{
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        wide t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Rational make_reduced(wide num, wide den)
{
    if (den == 0) throw DomainError("rational division by zero");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (wide g = gcd_wide(num, den); g > 1) {
        num /= g;
        den /= g;
    }
    constexpr wide lo = std::numeric_limits<std::int64_t>::min() + 1;
    constexpr wide hi = std::numeric_limits<std::int64_t>::max();
    if (num < lo || num > hi || den > hi) {
        throw CapacityError("exact coefficient overflow (64-bit rational)");
    }
    return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

} // namespace

Rational::Rational(std::int64_t num, std::int64_t den)
{
    if (den == 0) throw DomainError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    std::int64_t g = std::gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    num_ = num;
    den_ = den;
}

Rational Rational::from_decimal(std::string_view text)
{
    wide num = 0;
    wide den = 1;
    std::size_t pos = 0;
    bool neg = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
        neg = text[pos] == '-';
        ++pos;
    }
    bool any_digit = false;
    bool after_point = false;
    constexpr wide limit = wide(1) << 100;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            any_digit = true;
            num = num * 10 + (c - '0');
            if (after_point) den *= 10;
            if (num > limit || den > limit) throw CapacityError("decimal literal too long: " + std::string(text));
        } else if (c == '.' && !after_point) {
            after_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) throw DomainError("malformed decimal literal: " + std::string(text));
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        bool eneg = false;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
            eneg = text[pos] == '-';
            ++pos;
        }
        int exp = 0;
        bool any_exp = false;
        for (; pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])); ++pos) {
            exp = exp * 10 + (text[pos] - '0');
            any_exp = true;
            if (exp > 30) throw CapacityError("decimal exponent too large: " + std::string(text));
        }
        if (!any_exp) throw DomainError("malformed exponent in literal: " + std::string(text));
        for (int k = 0; k < exp; ++k) {
            if (eneg) den *= 10; else num *= 10;
            if (num > limit || den > limit) throw CapacityError("decimal literal out of range: " + std::string(text));
        }
    }
    if (pos != text.size()) throw DomainError("malformed decimal literal: " + std::string(text));
    return make_reduced(neg ? -num : num, den);
}

std::string Rational::str() const
{
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b)
{
    if (a.den_ == 1 && b.den_ == 1) return make_reduced(wide(a.num_) + b.num_, 1);
    return make_reduced(wide(a.num_) * b.den_ + wide(b.num_) * a.den_, wide(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b)
{
    return a + (-b);
}

Rational operator*(const Rational& a, const Rational& b)
{
    return make_reduced(wide(a.num_) * b.num_, wide(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b)
{
    if (b.num_ == 0) throw DomainError("rational division by zero");
    return make_reduced(wide(a.num_) * b.den_, wide(a.den_) * b.num_);
}

Rational Rational::operator-() const
{
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b)
{
    return wide(a.num_) * b.den_ <=> wide(b.num_) * a.den_;
}

} // namespace cqf
