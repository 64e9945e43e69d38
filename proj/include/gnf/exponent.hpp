#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gnf {

// Common denominator of every exponent of q and x.
inline constexpr int kLattice = 4;

class Exponent {
public:
    constexpr Exponent() = default;

    static constexpr Exponent units(std::int64_t u) {
        Exponent e;
        e.units_ = u;
        return e;
    }
    static constexpr Exponent integer(std::int64_t n) { return units(n * kLattice); }

    static Exponent ratio(std::int64_t p, std::int64_t q) {
        if (q == 0) throw std::invalid_argument("exponent with zero denominator");
        if (q < 0) { p = -p; q = -q; }
        std::int64_t g = std::gcd(p, q);
        p /= g;
        q /= g;
        if (kLattice % q != 0)
            throw std::domain_error("exponent " + std::to_string(p) + "/" + std::to_string(q) +
                                    " is off the lattice");
        return units(p * (kLattice / q));
    }

    // Accepts "n" or "p/q".
    static Exponent parse(const std::string& s) {
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return integer(std::stoll(s));
            return ratio(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("cannot parse exponent '" + s + "'");
        }
    }

    constexpr std::int64_t units() const { return units_; }
    std::int64_t numerator() const { return units_ / std::gcd(units_, std::int64_t{kLattice}); }
    std::int64_t denominator() const { return kLattice / std::gcd(units_, std::int64_t{kLattice}); }
    constexpr bool is_integer() const { return units_ % kLattice == 0; }
    constexpr bool is_zero() const { return units_ == 0; }
    std::int64_t to_integer() const {
        if (!is_integer()) throw std::domain_error("exponent " + str() + " is not an integer");
        return units_ / kLattice;
    }
    double to_double() const { return static_cast<double>(units_) / kLattice; }

    std::string str() const {
        if (denominator() == 1) return std::to_string(numerator());
        return std::to_string(numerator()) + "/" + std::to_string(denominator());
    }

    constexpr Exponent operator-() const { return units(-units_); }
    constexpr Exponent operator+(Exponent o) const { return units(units_ + o.units_); }
    constexpr Exponent operator-(Exponent o) const { return units(units_ - o.units_); }
    constexpr Exponent operator*(std::int64_t k) const { return units(units_ * k); }
    Exponent& operator+=(Exponent o) { units_ += o.units_; return *this; }
    Exponent& operator-=(Exponent o) { units_ -= o.units_; return *this; }

    // Product of two lattice values; throws when the result leaves the lattice.
    Exponent times(Exponent o) const {
        std::int64_t p = units_ * o.units_;
        if (p % kLattice != 0) throw std::domain_error("exponent product leaves the lattice");
        return units(p / kLattice);
    }
    // Half of this value, if representable.
    Exponent half() const {
        if (units_ % 2 != 0) throw std::domain_error("half of " + str() + " leaves the lattice");
        return units(units_ / 2);
    }

    constexpr auto operator<=>(const Exponent&) const = default;

private:
    std::int64_t units_ = 0;
};

// Spin values j, m are multiples of 1/2 and are carried as twice their value.
inline Exponent half_int(std::int64_t twice) { return Exponent::ratio(twice, 2); }

}  // namespace gnf
