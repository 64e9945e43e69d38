#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gnf/rational.hpp"

namespace gnf {

// Square root of a q-integer [n], of an x-bracket <c> = (x q^c - x^-1 q^-c)/(q - q^-1),
// or of q - q^-1 itself.
struct Radical {
    enum class Kind : int { qdiff = 0, qint = 1, xbracket = 2 };
    Kind kind = Kind::qint;
    std::int64_t param = 0;  // n for qint, c in lattice units for xbracket

    auto operator<=>(const Radical&) const = default;

    static Radical qint(std::int64_t n) { return {Kind::qint, n}; }
    static Radical xbracket(Exponent c) { return {Kind::xbracket, c.units()}; }
    static Radical qdiff() { return {Kind::qdiff, 0}; }

    std::string str() const {
        switch (kind) {
            case Kind::qdiff: return "QDiff";
            case Kind::qint: return "QInt(" + std::to_string(param) + ")";
            case Kind::xbracket: return "XBracket(" + Exponent::units(param).str() + ")";
        }
        return {};
    }
};

inline Laurent q_poly(std::int64_t exponent_units, const mpq_class& c = 1) {
    return Laurent::monomial(Mono{0, exponent_units}, c);
}

// [n] as a Laurent polynomial in q.
inline Laurent qnum_poly(std::int64_t n) {
    if (n < 0) return -qnum_poly(-n);
    Laurent r;
    for (std::int64_t k = 0; k < n; ++k) r += q_poly((n - 1 - 2 * k) * kLattice);
    return r;
}

inline Laurent qdiff_poly() { return q_poly(kLattice) - q_poly(-kLattice); }

inline RationalFunction inverse_qdiff() {
    // 1/(q - q^-1) = q / (q^2 - 1)
    return RationalFunction(q_poly(kLattice)) *
           RationalFunction::inverse_binomial(Mono{0, 2 * kLattice}, -1);
}

// x^s q^a - x^-s q^-a
inline Laurent xbinomial(Exponent s, Exponent a) {
    return Laurent::monomial(Mono{s.units(), a.units()}) - Laurent::monomial(Mono{-s.units(), -a.units()});
}

// 1 / (x^s q^a - x^-s q^-a)
inline RationalFunction inverse_xbinomial(Exponent s, Exponent a) {
    // = x^s q^a / (x^{2s} q^{2a} - 1)
    return RationalFunction(Laurent::monomial(Mono{s.units(), a.units()})) *
           RationalFunction::inverse_binomial(Mono{2 * s.units(), 2 * a.units()}, -1);
}

inline RationalFunction radicand(const Radical& r) {
    switch (r.kind) {
        case Radical::Kind::qdiff: return RationalFunction(qdiff_poly());
        case Radical::Kind::qint: return RationalFunction(qnum_poly(r.param));
        case Radical::Kind::xbracket:
            return RationalFunction(xbinomial(Exponent::integer(1), Exponent::units(r.param))) * inverse_qdiff();
    }
    throw std::logic_error("unknown radical");
}

// zeta^phase times the product of the radicals (a squarefree sorted list);
// zeta = exp(i pi / 4), phase in 0..3 with signs folded into the coefficient.
struct RadKey {
    int phase = 0;
    std::vector<Radical> rads;
    auto operator<=>(const RadKey&) const = default;
};

class Scalar {
public:
    using TermT = std::pair<RadKey, RationalFunction>;

    Scalar() = default;
    Scalar(long c) : Scalar(RationalFunction(mpq_class(c))) {}  // NOLINT
    explicit Scalar(const mpq_class& c) : Scalar(RationalFunction(c)) {}
    explicit Scalar(Laurent p) : Scalar(RationalFunction(std::move(p))) {}
    explicit Scalar(RationalFunction r) {
        if (!r.is_zero()) terms_.push_back({RadKey{}, std::move(r)});
    }
    Scalar(RadKey key, RationalFunction r) {
        if (!r.is_zero()) terms_.push_back({std::move(key), std::move(r)});
    }

    static Scalar q_pow(Exponent e) { return Scalar(q_poly(e.units())); }
    static Scalar x_pow(Exponent e) { return Scalar(Laurent::x_power(e)); }
    static Scalar zeta(int k) {
        k = ((k % 8) + 8) % 8;
        long sign = 1;
        if (k >= 4) { k -= 4; sign = -1; }
        return Scalar(RadKey{k, {}}, RationalFunction(mpq_class(sign)));
    }
    // (-1)^e for e on the lattice, i.e. zeta^{4e}
    static Scalar minus_one_pow(Exponent e) {
        std::int64_t u = e.units() * 4;  // 4e in lattice units
        if (u % kLattice != 0) throw std::domain_error("(-1)^e needs e in Z/4");
        return zeta(static_cast<int>(((u / kLattice) % 8 + 8) % 8));
    }
    static Scalar sqrt_of(const Radical& r) {
        if (r.kind == Radical::Kind::qint) {
            if (r.param < 0) throw std::domain_error("sqrt of a negative q-integer index");
            if (r.param == 0) return {};
            if (r.param == 1) return Scalar(1);
        }
        return Scalar(RadKey{0, {r}}, RationalFunction(mpq_class(1)));
    }
    static Scalar sqrt_qint(std::int64_t n) { return sqrt_of(Radical::qint(n)); }

    bool is_zero() const { return terms_.empty(); }
    const std::vector<TermT>& terms() const { return terms_; }
    bool is_rational() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == RadKey{}); }
    RationalFunction rational_part() const {
        for (const auto& [k, r] : terms_)
            if (k == RadKey{}) return r;
        return {};
    }
    bool operator==(const Scalar& o) const { return terms_ == o.terms_; }
    bool is_one() const { return terms_.size() == 1 && terms_[0].first == RadKey{} && terms_[0].second.is_one(); }

    Scalar operator-() const {
        Scalar r = *this;
        for (auto& t : r.terms_) t.second = -t.second;
        return r;
    }
    Scalar operator+(const Scalar& o) const { return sum(std::vector<const Scalar*>{this, &o}); }
    Scalar operator-(const Scalar& o) const {
        Scalar n = -o;
        return sum(std::vector<const Scalar*>{this, &n});
    }
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }

    Scalar operator*(const Scalar& o) const {
        if (is_zero() || o.is_zero()) return {};
        std::map<RadKey, std::vector<RationalFunction>> acc;
        for (const auto& [ka, ra] : terms_)
            for (const auto& [kb, rb] : o.terms_) {
                auto [key, extra] = multiply_keys(ka, kb);
                acc[key].push_back(extra ? ra * rb * *extra : ra * rb);
            }
        return from_accumulator(acc);
    }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    Scalar operator*(const RationalFunction& r) const {
        if (r.is_zero()) return {};
        Scalar s = *this;
        for (auto& t : s.terms_) t.second *= r;
        return s;
    }

    static Scalar sum(const std::vector<const Scalar*>& parts) {
        std::map<RadKey, std::vector<const RationalFunction*>> acc;
        for (const auto* p : parts)
            for (const auto& [k, r] : p->terms_) acc[k].push_back(&r);
        Scalar s;
        for (auto& [k, v] : acc) {
            RationalFunction r = v.size() == 1 ? *v[0] : RationalFunction::sum(v);
            if (!r.is_zero()) s.terms_.push_back({k, std::move(r)});
        }
        return s;
    }
    static Scalar sum(const std::vector<Scalar>& parts) {
        std::vector<const Scalar*> ptrs;
        for (const auto& p : parts) ptrs.push_back(&p);
        return sum(ptrs);
    }

    // Only single-term scalars are invertible here.
    Scalar inverse() const {
        if (is_zero()) throw std::domain_error("inverse of zero");
        if (terms_.size() != 1)
            throw std::domain_error("inverse of a multi-term radical sum is unsupported");
        const auto& [key, r] = terms_[0];
        RationalFunction c = r;
        for (const auto& rad : key.rads) c *= radicand(rad);
        RadKey k2{0, key.rads};
        Scalar s(k2, c.inverse());
        return key.phase == 0 ? s : s * zeta(8 - key.phase);
    }

    Scalar shift_x(Exponent m) const {
        if (m.is_zero()) return *this;
        Scalar s;
        for (const auto& [k, r] : terms_) {
            RadKey k2 = k;
            for (auto& rad : k2.rads)
                if (rad.kind == Radical::Kind::xbracket) rad.param += m.units();
            std::sort(k2.rads.begin(), k2.rads.end());
            s.terms_.push_back({std::move(k2), r.shift_x(m)});
        }
        std::sort(s.terms_.begin(), s.terms_.end(),
                  [](const TermT& a, const TermT& b) { return a.first < b.first; });
        return s;
    }

    // Termwise limit; an XBracket radical is replaced by its leading behaviour
    // sqrt(<c>) ~ i x^{-1/2} q^{-c/2} sqrt(q-q^-1)/(q-q^-1) at 0 and x^{1/2} q^{c/2} sqrt(q-q^-1)/(q-q^-1) at infinity.
    std::optional<Scalar> limit_x(LimitPoint pt) const {
        Scalar out;
        for (const auto& [k, r] : terms_) {
            Scalar factor(RadKey{k.phase, {}}, r);
            for (const auto& rad : k.rads) {
                if (rad.kind != Radical::Kind::xbracket) {
                    factor *= sqrt_of(rad);
                    continue;
                }
                Exponent c = Exponent::units(rad.param);
                bool zero = pt == LimitPoint::zero;
                if (c.units() % 2 != 0) throw std::domain_error("limit of sqrt<c> leaves the lattice");
                Scalar lead = Scalar(Laurent::monomial(Mono{(zero ? -1 : 1) * kLattice / 2,
                                                            (zero ? -1 : 1) * c.units() / 2}));
                lead = lead * sqrt_of(Radical::qdiff()) * inverse_qdiff();
                if (zero) lead *= zeta(2);
                factor *= lead;
            }
            Scalar lim;
            for (const auto& [k2, r2] : factor.terms_) {
                auto l = r2.limit_x(pt);
                if (!l) return std::nullopt;
                lim += Scalar(k2, *l);
            }
            out += lim;
        }
        return out;
    }

    std::complex<double> eval_complex(double q0, double x0) const {
        std::complex<double> s = 0;
        const std::complex<double> z = std::polar(1.0, 3.14159265358979323846 / 4);
        for (const auto& [k, r] : terms_) {
            std::complex<double> v = r.eval(q0, x0) * std::pow(z, k.phase);
            for (const auto& rad : k.rads) v *= std::sqrt(std::complex<double>(radicand(rad).eval(q0, x0), 0.0));
            s += v;
        }
        return s;
    }

    double eval(double q0, double x0) const {
        if (q0 <= 0 || q0 == 1 || x0 <= 0) throw std::domain_error("numeric evaluation needs q0 > 0, q0 != 1, x0 > 0");
        double s = 0;
        for (const auto& [k, r] : terms_) {
            if (k.phase != 0) throw std::domain_error("value carries a complex phase");
            double v = r.eval(q0, x0);
            for (const auto& rad : k.rads) {
                double a = radicand(rad).eval(q0, x0);
                if (a < 0) throw std::domain_error("negative radicand " + rad.str());
                v *= std::sqrt(a);
            }
            s += v;
        }
        return s;
    }


private:
    static std::pair<RadKey, std::optional<RationalFunction>> multiply_keys(const RadKey& a, const RadKey& b) {
        RadKey k;
        std::optional<RationalFunction> extra;
        int ph = a.phase + b.phase;
        if (ph >= 4) {
            ph -= 4;
            extra = RationalFunction(mpq_class(-1));
        }
        k.phase = ph;
        std::size_t i = 0, j = 0;
        while (i < a.rads.size() || j < b.rads.size()) {
            if (j == b.rads.size() || (i < a.rads.size() && a.rads[i] < b.rads[j])) {
                k.rads.push_back(a.rads[i++]);
            } else if (i == a.rads.size() || b.rads[j] < a.rads[i]) {
                k.rads.push_back(b.rads[j++]);
            } else {
                RationalFunction rr = radicand(a.rads[i]);
                extra = extra ? *extra * rr : rr;
                ++i;
                ++j;
            }
        }
        return {std::move(k), std::move(extra)};
    }

    static Scalar from_accumulator(std::map<RadKey, std::vector<RationalFunction>>& acc) {
        Scalar s;
        for (auto& [k, v] : acc) {
            RationalFunction r = v.size() == 1 ? std::move(v[0]) : RationalFunction::sum(v);
            if (!r.is_zero()) s.terms_.push_back({k, std::move(r)});
        }
        return s;
    }

    std::vector<TermT> terms_;
};

inline Scalar operator*(long c, const Scalar& s) { return Scalar(c) * s; }

// q-special functions.
inline Scalar qnum(std::int64_t n) { return Scalar(qnum_poly(n)); }

inline Scalar qfact(std::int64_t n) {
    if (n < 0) throw std::domain_error("q-factorial of a negative integer");
    Laurent r(1);
    for (std::int64_t i = 2; i <= n; ++i) r *= qnum_poly(i);
    return Scalar(r);
}

inline Scalar qbinom(std::int64_t n, std::int64_t k) {
    if (n < 0) throw std::domain_error("q-binomial with negative n");
    if (k < 0 || k > n) return {};
    // Pascal's rule: [n,k] = q^{-k}[n-1,k] + q^{n-k}[n-1,k-1]
    std::vector<Laurent> row{Laurent(1)};
    for (std::int64_t m = 1; m <= n; ++m) {
        std::vector<Laurent> next(static_cast<std::size_t>(m + 1));
        for (std::int64_t i = 0; i <= m; ++i) {
            Laurent v;
            if (i <= m - 1) v += row[static_cast<std::size_t>(i)].shifted(Mono{0, -i * kLattice});
            if (i >= 1) v += row[static_cast<std::size_t>(i - 1)].shifted(Mono{0, (m - i) * kLattice});
            next[static_cast<std::size_t>(i)] = std::move(v);
        }
        row = std::move(next);
    }
    return Scalar(row[static_cast<std::size_t>(k)]);
}

// 1/[n]! as an exact rational function.
inline RationalFunction inverse_qfact(std::int64_t n) {
    if (n < 0) throw std::domain_error("q-factorial of a negative integer");
    AtomPowers den;
    Laurent unit(1);
    // [i] = q^{1-i} (q^{2i} - 1)/(q^2 - 1)
    for (std::int64_t i = 2; i <= n; ++i) {
        auto top = binomial_atoms(Mono{0, 2 * i * kLattice}, -1);
        auto bot = binomial_atoms(Mono{0, 2 * kLattice}, -1);
        for (const auto& [at, e] : top.atoms) add_atom(den, at, e);
        for (const auto& [at, e] : bot.atoms) add_atom(den, at, -e);
        unit = unit.shifted(Mono{0, (1 - i) * kLattice});
    }
    return RationalFunction::fraction(RationalFunction::invert_unit(unit), std::move(den));
}

}  // namespace gnf
