#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "potus/errors.hpp"

namespace potus {

/// Exact rational arithmetic for score algebra. Scores and weights stay
/// rational until the final 2-decimal rounding, so golden values compare
/// bit-exactly instead of within a float epsilon.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den) {
        if (den_ == 0)
            throw Error("Rational: zero denominator");
        normalize();
    }

    [[nodiscard]] constexpr std::int64_t num() const { return num_; }
    [[nodiscard]] constexpr std::int64_t den() const { return den_; }

    [[nodiscard]] constexpr Rational operator+(const Rational& o) const {
        return {num_ * o.den_ + o.num_ * den_, den_ * o.den_};
    }
    [[nodiscard]] constexpr Rational operator-(const Rational& o) const {
        return {num_ * o.den_ - o.num_ * den_, den_ * o.den_};
    }
    [[nodiscard]] constexpr Rational operator*(const Rational& o) const {
        return {num_ * o.num_, den_ * o.den_};
    }
    [[nodiscard]] constexpr Rational operator/(const Rational& o) const {
        if (o.num_ == 0)
            throw Error("Rational: division by zero");
        return {num_ * o.den_, den_ * o.num_};
    }

    constexpr bool operator==(const Rational& o) const {
        return num_ == o.num_ && den_ == o.den_;
    }
    constexpr bool operator<(const Rational& o) const {
        return num_ * o.den_ < o.num_ * den_;
    }
    constexpr bool operator<=(const Rational& o) const { return *this == o || *this < o; }
    constexpr bool operator>(const Rational& o) const { return o < *this; }
    constexpr bool operator>=(const Rational& o) const { return o <= *this; }

    [[nodiscard]] constexpr Rational abs() const { return num_ < 0 ? Rational(-num_, den_) : *this; }

    [[nodiscard]] double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// Round to the nearest multiple of 1/100, halves away from zero.
    /// Returns the value in hundredths ("cents"): 25/6 -> 417.
    [[nodiscard]] constexpr std::int64_t round_cents() const {
        const std::int64_t n = num_ * 100;
        if (n >= 0)
            return (2 * n + den_) / (2 * den_);
        return -((2 * -n + den_) / (2 * den_));
    }

    /// Parses "3", "0.25", or "1/3". Decimal text converts exactly.
    static Rational parse(const std::string& text);

    [[nodiscard]] std::string str() const;

private:
    constexpr void normalize() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// "4.17" from 417. Used everywhere a 2-decimal score is printed.
std::string format_cents(std::int64_t cents);

} // namespace potus
