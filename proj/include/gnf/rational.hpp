#pragma once

#include <complex>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gnf/atoms.hpp"

namespace gnf {

namespace detail {

// Cheap necessary condition for Phi_d(Y) | n: n vanishes at a point where Y is a primitive
// d-th root of unity.  The exact division remains the authority.
inline bool may_divide(const Laurent& n, const Atom& at) {
    using C = std::complex<double>;
    const double pi = 3.14159265358979323846;
    C zeta = std::polar(1.0, 2 * pi / static_cast<double>(at.d));
    C logq, logx;
    if (at.a == 0) {
        logq = std::log(zeta);  // Q = zeta, b = 1
        logx = C(0.0213, 0);
    } else {
        logq = C(0.0137, 0);
        logx = (std::log(zeta) - static_cast<double>(at.b) * logq) / static_cast<double>(at.a);
    }
    C val = 0;
    double scale = 0;
    for (const auto& t : n.terms()) {
        C mono = std::exp(static_cast<double>(t.m.x) * logx + static_cast<double>(t.m.q) * logq);
        double c = t.c.get_d();
        val += c * mono;
        scale += std::abs(c) * std::abs(mono);
    }
    return std::abs(val) <= 1e-8 * scale;
}

}  // namespace detail

enum class LimitPoint { zero, infinity };

class RationalFunction {
public:
    RationalFunction() = default;
    explicit RationalFunction(Laurent num) : num_(std::move(num)) {}
    explicit RationalFunction(const mpq_class& c) : num_(c) {}

    // num / (unit-free product of atoms), reduced.
    static RationalFunction fraction(Laurent num, AtomPowers den) {
        RationalFunction r;
        r.num_ = std::move(num);
        r.den_ = std::move(den);
        r.reduce();
        return r;
    }
    // 1 / (Y - 1) or 1 / (Y + 1).
    static RationalFunction inverse_binomial(Mono y, int sign) {
        auto f = binomial_atoms(y, sign);
        return fraction(invert_unit(f.unit), std::move(f.atoms));
    }
    static RationalFunction binomial(Mono y, int sign) {
        return RationalFunction(Laurent::monomial(y) + Laurent(mpq_class(sign)));
    }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return den_.empty() && num_.is_one(); }
    const Laurent& num() const { return num_; }
    const AtomPowers& den() const { return den_; }
    Laurent den_poly() const { return atoms_product(den_); }
    bool is_polynomial() const { return den_.empty(); }
    bool x_free() const {
        if (!num_.x_free()) return false;
        for (const auto& [at, e] : den_)
            if (at.a != 0) return false;
        return true;
    }

    bool operator==(const RationalFunction& o) const { return den_ == o.den_ && num_ == o.num_; }

    RationalFunction operator-() const {
        RationalFunction r = *this;
        r.num_ = -r.num_;
        return r;
    }

    RationalFunction operator*(const RationalFunction& o) const {
        if (is_zero() || o.is_zero()) return {};
        Laurent a = num_, b = o.num_;
        AtomPowers da = den_, db = o.den_;
        cancel(a, db);
        cancel(b, da);
        RationalFunction r;
        r.num_ = a * b;
        r.den_ = std::move(da);
        for (const auto& [at, e] : db) add_atom(r.den_, at, e);
        return r;
    }
    RationalFunction& operator*=(const RationalFunction& o) { return *this = *this * o; }

    RationalFunction operator+(const RationalFunction& o) const { return sum(std::vector<const RationalFunction*>{this, &o}); }
    RationalFunction operator-(const RationalFunction& o) const {
        RationalFunction n = -o;
        return sum(std::vector<const RationalFunction*>{this, &n});
    }
    RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
    RationalFunction& operator-=(const RationalFunction& o) { return *this = *this - o; }

    RationalFunction scaled(const mpq_class& c) const {
        RationalFunction r = *this;
        r.num_ = r.num_.scaled(c);
        if (r.num_.is_zero()) r.den_.clear();
        return r;
    }

    // Sum over a common denominator with a single final reduction.
    static RationalFunction sum(const std::vector<const RationalFunction*>& parts) {
        AtomPowers lcm;
        for (const auto* p : parts) {
            if (p->is_zero()) continue;
            for (const auto& [at, e] : p->den_) {
                auto it = std::find_if(lcm.begin(), lcm.end(), [&](const auto& q) { return q.first == at; });
                if (it == lcm.end()) add_atom(lcm, at, e);
                else it->second = std::max(it->second, e);
            }
        }
        Laurent total;
        for (const auto* p : parts) {
            if (p->is_zero()) continue;
            AtomPowers missing;
            for (const auto& [at, e] : lcm) {
                int have = 0;
                for (const auto& [bt, f] : p->den_)
                    if (bt == at) have = f;
                if (e > have) missing.push_back({at, e - have});
            }
            total += missing.empty() ? p->num_ : p->num_ * atoms_product(missing);
        }
        return fraction(std::move(total), std::move(lcm));
    }
    static RationalFunction sum(const std::vector<RationalFunction>& parts) {
        std::vector<const RationalFunction*> ptrs;
        ptrs.reserve(parts.size());
        for (const auto& p : parts) ptrs.push_back(&p);
        return sum(ptrs);
    }

    // Defined when the numerator is itself a unit times a product of atoms.
    RationalFunction inverse() const {
        if (is_zero()) throw std::domain_error("inverse of zero");
        auto f = factor_into_atoms(num_);
        if (!f)
            throw std::domain_error("numerator does not factor over the denominator atoms; inverse unsupported");
        return fraction(invert_unit(f->unit) * den_poly(), std::move(f->atoms));
    }

    // x -> x q^m.
    RationalFunction shift_x(Exponent m) const {
        if (m.is_zero() || is_zero()) return *this;
        const std::int64_t mu = m.units();
        auto relabel = [mu](Mono v) {
            if ((mu * v.x) % kLattice != 0)
                throw std::domain_error("x -> x q^m leaves the exponent lattice");
            return Mono{v.x, v.q + mu * v.x / kLattice};
        };
        RationalFunction r;
        r.num_ = num_.relabeled(relabel);
        std::map<std::pair<std::int64_t, std::int64_t>, AtomPowers> awkward;
        for (const auto& [at, e] : den_) {
            std::int64_t b = at.b + mu * at.a / kLattice;
            if ((mu * at.a) % kLattice == 0 && std::gcd(at.a, b < 0 ? -b : b) == 1) {
                add_atom(r.den_, Atom{at.d, at.a, b}, e);
            } else {
                awkward[{at.a, at.b}].push_back({at, e});
            }
        }
        for (const auto& [dir, group] : awkward) {
            Laurent p = atoms_product(group).relabeled(relabel);
            auto f = factor_into_atoms(p);
            if (!f) throw std::logic_error("shifted atom group failed to refactor");
            r.num_ *= invert_unit(f->unit);
            for (const auto& [at, e] : f->atoms) add_atom(r.den_, at, e);
        }
        return r;
    }

    // Value at x -> 0 or x -> infinity; nullopt when divergent.
    std::optional<RationalFunction> limit_x(LimitPoint pt) const {
        if (is_zero()) return RationalFunction{};
        bool at_zero = pt == LimitPoint::zero;
        std::int64_t alpha = at_zero ? num_.min_x() : num_.max_x();
        Laurent lead = num_.x_slice(alpha);
        std::int64_t beta = 0;
        Laurent unit(1);
        AtomPowers qden;
        for (const auto& [at, e] : den_) {
            if (at.a == 0) {
                add_atom(qden, at, e);
                continue;
            }
            if (at_zero) {
                if (at.d == 1 && e % 2 == 1) unit = -unit;
            } else {
                std::int64_t deg = totient(at.d);
                beta += at.a * deg * e;
                unit = unit.shifted(Mono{0, at.b * deg * e});
            }
        }
        if (at_zero ? alpha < beta : alpha > beta) return std::nullopt;
        if (alpha != beta) return RationalFunction{};
        return fraction(lead * invert_unit(unit), std::move(qden));
    }

    double eval(double q0, double x0) const {
        double Qv = std::pow(q0, 1.0 / kLattice), Xv = std::pow(x0, 1.0 / kLattice);
        double den = 1;
        for (const auto& [at, e] : den_) den *= std::pow(atom_poly(at).eval(Qv, Xv), e);
        if (den == 0) throw std::domain_error("pole at the evaluation point");
        return num_.eval(Qv, Xv) / den;
    }

    auto compare(const RationalFunction& o) const {
        if (den_ != o.den_) return den_ < o.den_ ? std::strong_ordering::less : std::strong_ordering::greater;
        return num_.compare(o.num_);
    }

    static Laurent invert_unit(const Laurent& u) {
        if (!u.is_monomial()) throw std::logic_error("unit is not a monomial");
        const Term& t = u.terms()[0];
        return Laurent::monomial(Mono{-t.m.x, -t.m.q}, 1 / t.c);
    }

private:
    static void cancel(Laurent& n, AtomPowers& den) {
        if (n.is_zero()) {
            den.clear();
            return;
        }
        for (auto it = den.begin(); it != den.end();) {
            while (it->second > 0 && !n.is_monomial() && detail::may_divide(n, it->first)) {
                auto quo = divide_by_atom(n, it->first);
                if (!quo) break;
                n = std::move(*quo);
                --it->second;
            }
            if (it->second == 0) it = den.erase(it);
            else ++it;
        }
    }
    void reduce() { cancel(num_, den_); }

    Laurent num_;
    AtomPowers den_;
};

}  // namespace gnf
