#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gnf/exponent.hpp"

namespace gnf {

// Monomial x^{x/D} q^{q/D}, exponents stored in lattice units.
struct Mono {
    std::int64_t x = 0;
    std::int64_t q = 0;
    auto operator<=>(const Mono&) const = default;
    Mono operator+(Mono o) const { return {x + o.x, q + o.q}; }
    Mono operator-(Mono o) const { return {x - o.x, q - o.q}; }
};

struct Term {
    Mono m;
    mpq_class c;
};

// Laurent polynomial in x^{1/D}, q^{1/D} with rational coefficients.
// Terms are kept sorted by monomial with no zero coefficients.
class Laurent {
public:
    Laurent() = default;
    explicit Laurent(const mpq_class& c) {
        if (c != 0) t_.push_back({Mono{}, c});
    }
    static Laurent monomial(Mono m, const mpq_class& c = 1) {
        Laurent r;
        if (c != 0) r.t_.push_back({m, c});
        return r;
    }
    static Laurent q_power(Exponent e) { return monomial({0, e.units()}); }
    static Laurent x_power(Exponent e) { return monomial({e.units(), 0}); }
    static Laurent from_terms(std::vector<Term> terms) {
        Laurent r;
        r.t_ = std::move(terms);
        r.normalize();
        return r;
    }

    bool is_zero() const { return t_.empty(); }
    std::size_t size() const { return t_.size(); }
    const std::vector<Term>& terms() const { return t_; }
    bool is_monomial() const { return t_.size() == 1; }
    bool is_one() const { return t_.size() == 1 && t_[0].m == Mono{} && t_[0].c == 1; }

    bool operator==(const Laurent& o) const {
        if (t_.size() != o.t_.size()) return false;
        for (std::size_t i = 0; i < t_.size(); ++i)
            if (t_[i].m != o.t_[i].m || t_[i].c != o.t_[i].c) return false;
        return true;
    }

    Laurent operator-() const {
        Laurent r = *this;
        for (auto& t : r.t_) t.c = -t.c;
        return r;
    }

    Laurent operator+(const Laurent& o) const { return merge(o, false); }
    Laurent operator-(const Laurent& o) const { return merge(o, true); }
    Laurent& operator+=(const Laurent& o) { return *this = merge(o, false); }
    Laurent& operator-=(const Laurent& o) { return *this = merge(o, true); }

    Laurent operator*(const Laurent& o) const {
        if (is_zero() || o.is_zero()) return {};
        if (o.t_.size() == 1) return times_term(o.t_[0]);
        if (t_.size() == 1) return o.times_term(t_[0]);
        std::vector<Term> prods;
        prods.reserve(t_.size() * o.t_.size());
        for (const auto& a : t_)
            for (const auto& b : o.t_) prods.push_back({a.m + b.m, a.c * b.c});
        return from_terms(std::move(prods));
    }
    Laurent& operator*=(const Laurent& o) { return *this = *this * o; }

    Laurent scaled(const mpq_class& c) const {
        if (c == 0) return {};
        Laurent r = *this;
        for (auto& t : r.t_) t.c *= c;
        return r;
    }
    Laurent shifted(Mono m) const {
        Laurent r = *this;
        for (auto& t : r.t_) t.m = t.m + m;
        return r;
    }
    Laurent times_term(const Term& u) const {
        Laurent r = *this;
        for (auto& t : r.t_) {
            t.m = t.m + u.m;
            t.c *= u.c;
        }
        return r;
    }

    // Applies an injective monomial relabeling; the order is restored afterwards.
    Laurent relabeled(const std::function<Mono(Mono)>& f) const {
        std::vector<Term> v = t_;
        for (auto& t : v) t.m = f(t.m);
        return from_terms(std::move(v));
    }

    std::int64_t min_x() const { return t_.front().m.x; }
    std::int64_t max_x() const { return t_.back().m.x; }
    bool x_free() const { return t_.empty() || (min_x() == 0 && max_x() == 0); }

    // Sum of the terms whose x exponent equals xe, with x removed.
    Laurent x_slice(std::int64_t xe) const {
        Laurent r;
        for (const auto& t : t_)
            if (t.m.x == xe) r.t_.push_back({Mono{0, t.m.q}, t.c});
        return r;
    }

    const mpq_class& leading_coefficient() const { return t_.back().c; }

    double eval(double Qv, double Xv) const {
        double s = 0;
        for (const auto& t : t_)
            s += t.c.get_d() * std::pow(Qv, static_cast<double>(t.m.q)) *
                 std::pow(Xv, static_cast<double>(t.m.x));
        return s;
    }

    auto compare(const Laurent& o) const {
        std::size_t n = std::min(t_.size(), o.t_.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (auto c = t_[i].m <=> o.t_[i].m; c != 0) return c;
            int cc = cmp(t_[i].c, o.t_[i].c);
            if (cc != 0) return cc < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        return t_.size() <=> o.t_.size();
    }

private:
    void normalize() {
        std::sort(t_.begin(), t_.end(), [](const Term& a, const Term& b) { return a.m < b.m; });
        std::size_t w = 0;
        for (std::size_t i = 0; i < t_.size();) {
            std::size_t k = i + 1;
            mpq_class c = std::move(t_[i].c);
            while (k < t_.size() && t_[k].m == t_[i].m) c += t_[k++].c;
            if (c != 0) {
                t_[w].m = t_[i].m;
                t_[w].c = std::move(c);
                ++w;
            }
            i = k;
        }
        t_.resize(w);
    }

    Laurent merge(const Laurent& o, bool subtract) const {
        Laurent r;
        r.t_.reserve(t_.size() + o.t_.size());
        std::size_t i = 0, k = 0;
        while (i < t_.size() || k < o.t_.size()) {
            if (k == o.t_.size() || (i < t_.size() && t_[i].m < o.t_[k].m)) {
                r.t_.push_back(t_[i++]);
            } else if (i == t_.size() || o.t_[k].m < t_[i].m) {
                r.t_.push_back({o.t_[k].m, subtract ? mpq_class(-o.t_[k].c) : o.t_[k].c});
                ++k;
            } else {
                mpq_class c = subtract ? mpq_class(t_[i].c - o.t_[k].c) : mpq_class(t_[i].c + o.t_[k].c);
                if (c != 0) r.t_.push_back({t_[i].m, std::move(c)});
                ++i;
                ++k;
            }
        }
        return r;
    }

    std::vector<Term> t_;
};

}  // namespace gnf
