// rational.hpp: exact rational and Gaussian-rational coefficients

#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

namespace cqf {

/// Exact rational number with 64-bit numerator/denominator. Always reduced,
/// denominator positive. Arithmetic that would overflow throws CapacityError.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num) : num_(num), den_(1) {}
    Rational(std::int64_t num, std::int64_t den);

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }

    bool is_zero() const noexcept { return num_ == 0; }
    bool is_one() const noexcept { return num_ == 1 && den_ == 1; }
    bool is_integer() const noexcept { return den_ == 1; }
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// Exact conversion of a decimal literal such as "0.0125" or "4e6".
    static Rational from_decimal(std::string_view text);

    std::string str() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const;

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// Gaussian rational re + i*im.
class Coeff {
public:
    constexpr Coeff() = default;
    Coeff(Rational re) : re_(re) {}
    Coeff(std::int64_t re) : re_(re) {}
    Coeff(Rational re, Rational im) : re_(re), im_(im) {}

    static Coeff i() { return Coeff(Rational(0), Rational(1)); }

    const Rational& re() const noexcept { return re_; }
    const Rational& im() const noexcept { return im_; }

    bool is_zero() const noexcept { return re_.is_zero() && im_.is_zero(); }
    bool is_one() const noexcept { return re_.is_one() && im_.is_zero(); }
    bool is_real() const noexcept { return im_.is_zero(); }

    Coeff conj() const { return Coeff(re_, -im_); }
    std::complex<double> to_complex() const { return {re_.to_double(), im_.to_double()}; }

    friend Coeff operator+(const Coeff& a, const Coeff& b) { return {a.re_ + b.re_, a.im_ + b.im_}; }
    friend Coeff operator-(const Coeff& a, const Coeff& b) { return {a.re_ - b.re_, a.im_ - b.im_}; }
    friend Coeff operator*(const Coeff& a, const Coeff& b)
    {
        return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
    }
    Coeff operator-() const { return {-re_, -im_}; }
    Coeff& operator+=(const Coeff& o) { return *this = *this + o; }
    Coeff& operator*=(const Coeff& o) { return *this = *this * o; }

    friend bool operator==(const Coeff&, const Coeff&) = default;
    friend std::strong_ordering operator<=>(const Coeff& a, const Coeff& b)
    {
        if (auto c = a.re_ <=> b.re_; c != 0) return c;
        return a.im_ <=> b.im_;
    }

private:
    Rational re_{};
    Rational im_{};
};

} // namespace cqf
