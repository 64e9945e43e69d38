#pragma once

// q-3j and q-6j symbols, the continued spin j(x) with x = q^{2j(x)+1}, and the dictionary
// relating M(x), R(x) and F(x) to them.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "gnf/twist.hpp"

namespace gnf {

// a J + c, where J = j(x) and c is a lattice number.
struct Affine {
    int a = 0;
    Exponent c;

    static Affine fixed(Exponent c) { return {0, c}; }
    static Affine spin(Spin s) { return {0, s.j()}; }
    static Affine jx(Exponent offset = Exponent()) { return {1, offset}; }

    bool finite() const { return a == 0; }
    Affine operator+(Affine o) const { return {a + o.a, c + o.c}; }
    Affine operator-(Affine o) const { return {a - o.a, c - o.c}; }
    Affine operator-() const { return {-a, -c}; }
    Affine operator+(Exponent e) const { return {a, c + e}; }
    Affine operator-(Exponent e) const { return {a, c - e}; }
    Affine operator*(int k) const { return {a * k, c * k}; }
    bool operator==(const Affine&) const = default;

    std::string str() const {
        if (a == 0) return c.str();
        std::string s = a == 1 ? "J" : std::to_string(a) + "J";
        if (c.is_zero()) return s;
        return c.units() > 0 ? s + "+" + c.str() : s + c.str();
    }
};

namespace detail {

// 1/[n] for n >= 1
inline RationalFunction inverse_qnum(std::int64_t n) {
    // [n] = q^{1-n}(q^{2n} - 1)/(q^2 - 1)
    return RationalFunction(q_poly((n - 1) * kLattice)) * RationalFunction(q_poly(2 * kLattice) - Laurent(1)) *
           RationalFunction::inverse_binomial(Mono{0, 2 * n * kLattice}, -1);
}

inline Scalar power_of(const RationalFunction& base, const RationalFunction& inv, std::int64_t n) {
    RationalFunction r(mpq_class(1));
    for (std::int64_t i = 0; i < std::abs(n); ++i) r *= n > 0 ? base : inv;
    return Scalar(r);
}

}  // namespace detail

// One product of continued quantities:
//   coeff * (-1)^sign * q^{q2 J^2 + q1 J} * prod [aJ+c]!^{h/2}.
// coeff may depend on x; offset_j shifts it together with J.
class ContinuedTerm {
public:
    using FactKey = std::pair<int, std::int64_t>;  // (a, c in lattice units)

    ContinuedTerm() = default;
    explicit ContinuedTerm(Scalar c) : coeff_(std::move(c)) {}

    const Scalar& coeff() const { return coeff_; }
    const std::map<FactKey, int>& factorials() const { return facts_; }

    ContinuedTerm& times(const Scalar& s) {
        coeff_ *= s;
        return *this;
    }
    ContinuedTerm& sign(Affine e) {
        sign_ = sign_ + e;
        return *this;
    }
    // q^{u v}
    ContinuedTerm& q_product(Affine u, Affine v) {
        q2_ += static_cast<std::int64_t>(u.a) * v.a;
        q1_ += v.c * u.a + u.c * v.a;
        coeff_ *= Scalar::q_pow(u.c.times(v.c));
        return *this;
    }
    ContinuedTerm& q_pow(Affine e) { return q_product(e, Affine::fixed(Exponent::integer(1))); }
    // [arg]!^{halves/2}
    ContinuedTerm& fact(Affine arg, int halves) {
        auto& h = facts_[{arg.a, arg.c.units()}];
        h += halves;
        if (h == 0) facts_.erase({arg.a, arg.c.units()});
        return *this;
    }
    // [arg]^{halves/2}
    ContinuedTerm& bracket(Affine arg, int halves) {
        fact(arg, halves);
        return fact(arg - Exponent::integer(1), -halves);
    }

    ContinuedTerm operator*(const ContinuedTerm& o) const {
        ContinuedTerm r = *this;
        r.coeff_ *= o.coeff_;
        r.sign_ = r.sign_ + o.sign_;
        r.q2_ += o.q2_;
        r.q1_ += o.q1_;
        for (const auto& [k, h] : o.facts_) r.fact(Affine{k.first, Exponent::units(k.second)}, h);
        return r;
    }
    ContinuedTerm inverse() const {
        ContinuedTerm r;
        r.coeff_ = coeff_.inverse();
        r.sign_ = -sign_;
        r.q2_ = -q2_;
        r.q1_ = -q1_;
        for (const auto& [k, h] : facts_) r.facts_[k] = -h;
        return r;
    }

    // J -> J + s, which is x -> x q^{2s}.
    ContinuedTerm offset_j(Exponent s) const {
        ContinuedTerm r;
        r.coeff_ = coeff_.shift_x(s * 2);
        r.sign_ = {sign_.a, sign_.c + s * sign_.a};
        r.q2_ = q2_;
        r.q1_ = q1_ + s * (2 * q2_);
        r.coeff_ *= Scalar::q_pow(s.times(s) * q2_ + q1_.times(s));
        for (const auto& [k, h] : facts_) r.facts_[{k.first, (Exponent::units(k.second) + s * k.first).units()}] = h;
        return r;
    }

    // True if no factorial depends on J.
    bool j_free_factorials() const {
        for (const auto& [k, h] : facts_)
            if (k.first != 0) return false;
        return true;
    }

    Scalar evaluate() const {
        if (coeff_.is_zero()) return {};
        if (q2_ != 0) throw std::domain_error("continued expression keeps a q^{J^2} factor");
        if (sign_.a % 4 != 0) throw std::domain_error("continued expression keeps a (-1)^{" + sign_.str() + "} factor");
        Scalar v = coeff_ * Scalar::minus_one_pow(sign_.c);
        // q^{q1 J} = (x q^-1)^{q1/2}
        Exponent h = q1_.half();
        v *= Scalar(Laurent::monomial(Mono{h.units(), -h.units()}));
        std::map<int, std::vector<std::pair<Exponent, int>>> groups;
        for (const auto& [k, hv] : facts_) groups[k.first].push_back({Exponent::units(k.second), hv});
        for (const auto& [a, entries] : groups) v *= evaluate_group(a, entries);
        return v;
    }

private:
    static Scalar evaluate_group(int a, const std::vector<std::pair<Exponent, int>>& entries) {
        std::map<std::int64_t, int> count;  // bracket offset (lattice units) -> power in halves
        if (a == 0) {
            for (const auto& [c, h] : entries) {
                if (!c.is_integer() || c.units() < 0)
                    throw std::domain_error("factorial of " + c.str() + " in a finite symbol");
                for (std::int64_t i = 1; i <= c.to_integer(); ++i) count[i * kLattice] += h;
            }
        } else {
            if (a < 0) throw std::domain_error("factorial of a negative multiple of J");
            int total = 0;
            Exponent c0 = entries.front().first;
            for (const auto& [c, h] : entries) {
                total += h;
                c0 = std::min(c0, c);
            }
            if (total != 0) throw std::domain_error("irreducible continued factorial");
            for (const auto& [c, h] : entries) {
                Exponent d = c - c0;
                if (!d.is_integer()) throw std::domain_error("continued factorials differ by a non-integer");
                for (std::int64_t i = 1; i <= d.to_integer(); ++i) count[(c0 + Exponent::integer(i)).units()] += h;
            }
        }
        Scalar v(1L);
        for (const auto& [k, h] : count) {
            if (h == 0) continue;
            const int whole = h >= 0 ? h / 2 : -((-h + 1) / 2);
            const bool odd = (h % 2) != 0;
            Exponent ke = Exponent::units(k);
            if (a == 0) {
                std::int64_t n = ke.to_integer();
                v *= detail::power_of(RationalFunction(qnum_poly(n)), detail::inverse_qnum(n), whole);
                if (odd) v *= Scalar::sqrt_qint(n);
            } else {
                // [aJ + k] = (x^{a/2} q^{k - a/2} - x^{-a/2} q^{a/2 - k}) / (q - q^-1)
                Exponent s = Exponent::ratio(a, 2), t = ke - s;
                RationalFunction base = RationalFunction(xbinomial(s, t)) * inverse_qdiff();
                RationalFunction inv = inverse_xbinomial(s, t) * RationalFunction(qdiff_poly());
                v *= detail::power_of(base, inv, whole);
                if (odd) {
                    if (a != 2) throw std::domain_error("square root of [" + std::to_string(a) + "J+k] is not supported");
                    v *= Scalar::sqrt_of(Radical::xbracket(ke - Exponent::integer(1)));
                }
            }
        }
        return v;
    }

    Scalar coeff_{1L};
    Affine sign_;
    std::int64_t q2_ = 0;
    Exponent q1_;
    std::map<FactKey, int> facts_;
};

using ContinuedSum = std::vector<ContinuedTerm>;

inline Scalar evaluate(const ContinuedSum& s) {
    std::vector<Scalar> parts;
    for (const auto& t : s) parts.push_back(t.evaluate());
    return Scalar::sum(parts);
}

inline ContinuedSum operator*(const ContinuedTerm& t, const ContinuedSum& s) {
    ContinuedSum r;
    for (const auto& u : s) r.push_back(t * u);
    return r;
}

// A factorial argument is admissible if it grows with J or is a nonnegative integer.
inline bool admissible(Affine e) {
    if (e.a > 0) return true;
    return e.a == 0 && e.c.is_integer() && e.c.units() >= 0;
}

inline bool triangle(Affine a, Affine b, Affine c) {
    return admissible(a + b - c) && admissible(a - b + c) && admissible(b + c - a);
}

// Delta(a,b,c) = (-1)^{a+b-c} sqrt([a+b-c]![a-b+c]![-a+b+c]!/[a+b+c+1]!); signed or not.
inline ContinuedTerm delta(Affine a, Affine b, Affine c, bool with_sign = true) {
    ContinuedTerm t;
    if (with_sign) t.sign(a + b - c);
    t.fact(a + b - c, 1).fact(a - b + c, 1).fact(b + c - a, 1).fact(a + b + c + Exponent::integer(1), -1);
    return t;
}

namespace detail {

inline int twice(Exponent e) { return static_cast<int>(2 * e.units() / kLattice); }

inline bool valid_m(Spin j, Exponent m) {
    int t = twice(m);
    return std::abs(t) <= j.twice && (j.twice - t) % 2 == 0;
}

}  // namespace detail

// Van der Waerden sum for the q-3j (Clebsch-Gordan) coefficient.
inline Scalar three_j(Spin j1, Spin j2, Spin j3, Exponent m1, Exponent m2, Exponent m3) {
    if (m1 + m2 != m3) return {};
    if (!detail::valid_m(j1, m1) || !detail::valid_m(j2, m2) || !detail::valid_m(j3, m3)) return {};
    Affine a = Affine::spin(j1), b = Affine::spin(j2), c = Affine::spin(j3);
    if (!triangle(a, b, c)) return {};

    using Key = std::array<int, 6>;
    thread_local std::map<Key, Scalar> cache;
    Key key{j1.twice, j2.twice, j3.twice, detail::twice(m1), detail::twice(m2), detail::twice(m3)};
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    const Exponent J1 = j1.j(), J2 = j2.j(), J3 = j3.j();
    ContinuedTerm pre = delta(a, b, c);
    pre.times(Scalar::q_pow(-(J1 + J2 - J3).times(J1 + J2 + J3 + Exponent::integer(1)).half() + J1.times(m2) -
                            J2.times(m1)));
    pre.bracket(c * 2 + Exponent::integer(1), 1);
    for (Affine f : {Affine::fixed(J1 + m1), Affine::fixed(J1 - m1), Affine::fixed(J2 + m2), Affine::fixed(J2 - m2),
                     Affine::fixed(J3 + m3), Affine::fixed(J3 - m3)})
        pre.fact(f, 1);
    ContinuedSum sum;
    for (int p = 0;; ++p) {
        Exponent P = Exponent::integer(p);
        std::array<Exponent, 6> args{P, J1 + J2 - J3 - P, J2 - m2 - P, J1 + m1 - P, J3 - J1 + m2 + P, J3 - J2 - m1 + P};
        if (args[1].units() < 0 || args[2].units() < 0 || args[3].units() < 0) break;
        if (args[4].units() < 0 || args[5].units() < 0) continue;
        ContinuedTerm t = pre;
        t.sign(Affine::fixed(P)).times(Scalar::q_pow(P.times(J1 + J2 + J3 + Exponent::integer(1))));
        for (auto e : args) t.fact(Affine::fixed(e), -2);
        sum.push_back(t);
    }
    Scalar v = evaluate(sum);
    cache.emplace(key, v);
    return v;
}

// Racah W-coefficient with triads (a,b,e), (a,c,f), (c,d,e), (d,b,f) and unsigned Delta; the
// arguments may grow with J, in which case the summation variable is z = nJ + t.
inline ContinuedSum racah_w(Affine a, Affine b, Affine e, Affine d, Affine c, Affine f) {
    if (!triangle(a, b, e) || !triangle(a, c, f) || !triangle(c, d, e) || !triangle(d, b, f)) return {};
    ContinuedTerm pre = delta(a, b, e, false) * delta(a, c, f, false) * delta(c, d, e, false) * delta(d, b, f, false);
    std::array<Affine, 4> lower{a + b + e, a + c + f, b + d + f, d + c + e};
    std::array<Affine, 3> upper{a + b + c + d, a + d + e + f, b + c + e + f};
    int n = lower[0].a;
    for (const auto& l : lower) n = std::max(n, l.a);
    std::optional<Exponent> lo, hi;
    for (const auto& l : lower)
        if (l.a == n && (!lo || l.c > *lo)) lo = l.c;
    for (const auto& u : upper) {
        if (u.a < n) throw std::domain_error("Racah sum bound decreases with J");
        if (u.a == n && (!hi || u.c < *hi)) hi = u.c;
    }
    if (!hi) throw std::domain_error("Racah sum is unbounded");
    ContinuedSum sum;
    for (Exponent t = *lo; t <= *hi; t += Exponent::integer(1)) {
        Affine z{n, t};
        ContinuedTerm term = pre;
        term.sign(z).fact(z + Exponent::integer(1), 2);
        for (const auto& l : lower) term.fact(z - l, -2);
        for (const auto& u : upper) term.fact(u - z, -2);
        sum.push_back(term);
    }
    return sum;
}

// {j1 j2 j12; j3 j j23} in closed form, valid for continued arguments.
inline ContinuedSum six_j_racah(Affine j1, Affine j2, Affine j12, Affine j3, Affine j, Affine j23) {
    ContinuedTerm pre;
    pre.sign(j1 + j2 + j3 + j);
    pre.bracket(j12 * 2 + Exponent::integer(1), 1).bracket(j23 * 2 + Exponent::integer(1), 1);
    return pre * racah_w(j1, j2, j12, j3, j, j23);
}

// {j1 j2 j12; j3 j j23} from the recoupling identity: the overlap of |(j1 j2)j12, j3; j, j>
// with |j1, (j2 j3)j23; j, j>, summed over the internal magnetic numbers.
inline Scalar six_j(Spin j1, Spin j2, Spin j12, Spin j3, Spin j, Spin j23) {
    auto A = [](Spin s) { return Affine::spin(s); };
    if (!triangle(A(j1), A(j2), A(j12)) || !triangle(A(j12), A(j3), A(j)) || !triangle(A(j2), A(j3), A(j23)) ||
        !triangle(A(j1), A(j23), A(j)))
        return {};
    const Exponent mj = j.j();
    std::vector<Scalar> parts;
    for (int a = 0; a < j1.dim(); ++a)
        for (int b = 0; b < j2.dim(); ++b) {
            Exponent m1 = j1.m(a), m2 = j2.m(b), m3 = mj - m1 - m2;
            if (!detail::valid_m(j3, m3)) continue;
            Scalar l = three_j(j12, j3, j, m1 + m2, m3, mj) * three_j(j1, j2, j12, m1, m2, m1 + m2);
            if (l.is_zero()) continue;
            Scalar r = three_j(j1, j23, j, m1, m2 + m3, mj) * three_j(j2, j3, j23, m2, m3, m2 + m3);
            if (!r.is_zero()) parts.push_back(l * r);
        }
    return Scalar::sum(parts);
}

// [M^{(j)}(x)]_{sigma m} in closed form.
inline Scalar m_element(Spin j, Exponent sigma, Exponent m) {
    if (!detail::valid_m(j, sigma) || !detail::valid_m(j, m)) throw std::invalid_argument("magnetic number out of range");
    const Exponent J = j.j();
    ContinuedTerm pre;
    pre.sign(Affine::fixed(sigma - m));
    for (Exponent e : {J + sigma, J - sigma, J + m, J - m}) pre.fact(Affine::fixed(e), 1);
    RationalFunction den(mpq_class(1));
    for (std::int64_t r = 1; r <= (J + sigma).to_integer(); ++r)
        den *= RationalFunction::inverse_binomial(Mono{2 * kLattice, 2 * r * kLattice}, -1);
    // 1/(1 - y) = -1/(y - 1)
    if ((J + sigma).to_integer() % 2) den = -den;
    pre.times(Scalar(den) * Scalar::q_pow(sigma.times(sigma - m)) * Scalar::x_pow(sigma - m));
    ContinuedSum sum;
    for (int p = 0;; ++p) {
        Exponent P = Exponent::integer(p);
        std::array<Exponent, 4> args{P, sigma - m + P, J - sigma - P, J + m - P};
        if (args[2].units() < 0 || args[3].units() < 0) break;
        if (args[1].units() < 0) continue;
        ContinuedTerm t = pre;
        t.times(Scalar::q_pow(sigma * (2 * p)) * Scalar::x_pow(Exponent::integer(2 * p)));
        for (auto e : args) t.fact(Affine::fixed(e), -2);
        sum.push_back(t);
    }
    return evaluate(sum);
}

// N_xi(m) = (-1)^{-m/2} q^{m/2}
inline Scalar norm_xi(Exponent m) { return Scalar::minus_one_pow(-m.half()) * Scalar::q_pow(m.half()); }

// N_psi^{(j1)}(x, sigma) as a continued term in J = j(x).
inline ContinuedTerm norm_psi_term(Spin j1, Exponent sigma) {
    const Exponent J1 = j1.j();
    ContinuedTerm t;
    t.sign(Affine::fixed(-J1 - sigma.half()));
    t.fact(Affine::fixed(J1 + sigma), 1).fact(Affine::fixed(J1 - sigma), 1);
    RationalFunction den(mpq_class(1));
    for (std::int64_t r = 1; r <= (J1 + sigma).to_integer(); ++r)
        den *= RationalFunction::inverse_binomial(Mono{2 * kLattice, 2 * r * kLattice}, -1);
    if ((J1 + sigma).to_integer() % 2) den = -den;
    Scalar c = Scalar(den) * Scalar::x_pow(J1) * Scalar::q_pow(J1.times(sigma));
    for (int i = 0; i < j1.twice; ++i) c *= Scalar::sqrt_of(Radical::qdiff());
    t.times(c);
    // divided by Delta(j1, J, J+sigma) sqrt([2J + 2 sigma + 1])
    ContinuedTerm d = delta(Affine::spin(j1), Affine::jx(), Affine::jx(sigma));
    d.bracket(Affine::jx(sigma) * 2 + Exponent::integer(1), 1);
    return t * d.inverse();
}

inline Scalar norm_psi(Spin j1, Exponent sigma) { return norm_psi_term(j1, sigma).evaluate(); }

// lim_{m2 -> inf} of the 3j symbol (j1 J J+sigma; m1 m2 m1+m2), J = j(x).
inline ContinuedSum limit_three_j_terms(Spin j1, Exponent m1, Exponent sigma) {
    const Exponent J1 = j1.j(), one = Exponent::integer(1);
    const Affine j2 = Affine::jx(), j3 = Affine::jx(sigma);
    ContinuedTerm pre = delta(Affine::spin(j1), j2, j3);
    pre.bracket(j3 * 2 + one, 1);
    pre.fact(Affine::fixed(J1 + m1), 1).fact(Affine::fixed(J1 - m1), 1);
    Scalar c(1L);
    for (int i = 0; i < j1.twice; ++i) c *= Scalar::sqrt_of(Radical::qdiff());
    pre.times(c.inverse());
    pre.sign(Affine::fixed(J1 + (m1 - sigma).half()));
    // q^{-C(j2) + C(j3) - j1 (j2 + j3 + 1) - m1/2 - (j2 + j3) m1}
    pre.q_product(-j2, j2 + one).q_product(j3, j3 + one);
    pre.q_product(j2 + j3 + one, Affine::fixed(-J1));
    pre.times(Scalar::q_pow(-m1.half()));
    pre.q_product(j2 + j3, Affine::fixed(-m1));
    ContinuedSum sum;
    for (int p = 0;; ++p) {
        Exponent P = Exponent::integer(p);
        std::array<Exponent, 4> args{P, J1 - sigma - P, J1 + m1 - P, sigma - m1 + P};
        if (args[1].units() < 0 || args[2].units() < 0) break;
        if (args[3].units() < 0) continue;
        ContinuedTerm t = pre;
        t.q_product(j2 + j3 + one, Affine::fixed(P * 2));
        for (auto e : args) t.fact(Affine::fixed(e), -2);
        sum.push_back(t);
    }
    return sum;
}

inline Scalar limit_three_j(Spin j1, Exponent m1, Exponent sigma) {
    return evaluate(limit_three_j_terms(j1, m1, sigma));
}

// Right-hand side of M = (N_psi / N_xi) lim 3j, term by term so the continued factorials cancel.
inline Scalar m_from_three_j(Spin j1, Exponent sigma, Exponent m1) {
    ContinuedTerm n = norm_psi_term(j1, sigma);
    n.times(norm_xi(m1).inverse());
    return evaluate(n * limit_three_j_terms(j1, m1, sigma));
}

// <s1' s2'| R(x) |s1 s2> from the 6j symbol.
inline Scalar r_from_6j(Spin j1, Spin j2, Exponent s1p, Exponent s2p, Exponent s1, Exponent s2) {
    if (s1p + s2p != s1 + s2) return {};
    const Exponent one = Exponent::integer(1);
    const Affine J = Affine::jx(), K = Affine::jx(s1 + s2);
    ContinuedTerm pre;
    pre.sign(Affine::fixed(s1p - s1));
    // q^{C(J) + C(K) - C(J + s1') - C(J + s2)}
    auto C = [&](Affine a, int sgn) { pre.q_product(a * sgn, a + one); };
    C(J, 1);
    C(K, 1);
    C(Affine::jx(s1p), -1);
    C(Affine::jx(s2), -1);
    ContinuedTerm num = norm_psi_term(j1, s1p) * norm_psi_term(j2, s2p).offset_j(s1p);
    ContinuedTerm den = norm_psi_term(j1, s1).offset_j(s2) * norm_psi_term(j2, s2);
    ContinuedTerm t = pre * num * den.inverse();
    return evaluate(t * six_j_racah(Affine::spin(j2), K, Affine::jx(s1p), Affine::spin(j1), J, Affine::jx(s2)));
}

// <s1 s2| F(x) |s1' s2'> from 3j and 6j symbols.
inline Scalar f_from_3j6j(Spin j1, Spin j2, Exponent s1, Exponent s2, Exponent s1p, Exponent s2p) {
    if (s1 + s2 != s1p + s2p) return {};
    std::vector<Scalar> parts;
    for (int t = j1.twice + j2.twice; t >= std::abs(j1.twice - j2.twice); t -= 2) {
        Spin j12{t};
        if (!detail::valid_m(j12, s1 + s2)) continue;
        Scalar cg = three_j(j1, j2, j12, s1, s2, s1 + s2);
        if (cg.is_zero()) continue;
        ContinuedTerm ratio = norm_psi_term(j12, s1 + s2) *
                              (norm_psi_term(j1, s1p).offset_j(s2p) * norm_psi_term(j2, s2p)).inverse();
        ratio.times(cg);
        parts.push_back(evaluate(ratio * six_j_racah(Affine::spin(j1), Affine::spin(j2), Affine::spin(j12), Affine::jx(),
                                                     Affine::jx(s1 + s2), Affine::jx(s2p))));
    }
    return Scalar::sum(parts);
}

// Dense operator on (j1, j2) with entries f(row m's, col m's).
inline GradedOperator two_leg_operator(Spin j1, Spin j2,
                                       const std::function<Scalar(Exponent, Exponent, Exponent, Exponent)>& f) {
    TensorSpace s({j1, j2});
    GradedOperator op(s);
    for (std::size_t r = 0; r < s.size(); ++r)
        for (std::size_t c = 0; c < s.size(); ++c) {
            auto a = s.ms(r), b = s.ms(c);
            op.set(r, c, f(a[0], a[1], b[0], b[1]));
        }
    return op;
}

inline GradedOperator m_matrix(Spin j) {
    TensorSpace s({j});
    GradedOperator op(s);
    for (int a = 0; a < j.dim(); ++a)
        for (int b = 0; b < j.dim(); ++b) op.set(a, b, m_element(j, j.m(a), j.m(b)));
    return op;
}

inline VerificationReport verify_m_element(Spin j, FieldMode mode = FieldMode::exact()) {
    return timed_check("M_ELEMENT", {j}, mode,
                       [&](VerificationReport& rep) { compare_operators(rep, "Mj1 = M(x)", m_matrix(j), boundary_m(j)); });
}

inline VerificationReport verify_m_three_j(Spin j, FieldMode mode = FieldMode::exact()) {
    return timed_check("M_THREE_J", {j}, mode, [&](VerificationReport& rep) {
        TensorSpace s({j});
        GradedOperator op(s);
        for (int a = 0; a < j.dim(); ++a)
            for (int b = 0; b < j.dim(); ++b) op.set(a, b, m_from_three_j(j, j.m(a), j.m(b)));
        compare_operators(rep, "N_psi/N_xi lim 3j = M(x)", op, boundary_m(j));
    });
}

inline VerificationReport verify_r_dictionary(Spin j1, Spin j2, FieldMode mode = FieldMode::exact()) {
    return timed_check("R_DICTIONARY", {j1, j2}, mode, [&](VerificationReport& rep) {
        auto r = two_leg_operator(j1, j2, [&](Exponent a, Exponent b, Exponent c, Exponent d) {
            return r_from_6j(j1, j2, a, b, c, d);
        });
        compare_operators(rep, "R from 6j = R(x)", r, gnf_r(j1, j2));
    });
}

// Delta M = sum_{j12} 3j M^{(j12)} 3j
inline GradedOperator delta_m_decomposition(Spin j1, Spin j2) {
    std::map<int, GradedOperator> ms;
    return two_leg_operator(j1, j2, [&](Exponent s1, Exponent s2, Exponent m1, Exponent m2) {
        std::vector<Scalar> parts;
        for (int t = j1.twice + j2.twice; t >= std::abs(j1.twice - j2.twice); t -= 2) {
            Spin j12{t};
            if (!detail::valid_m(j12, s1 + s2) || !detail::valid_m(j12, m1 + m2)) continue;
            auto it = ms.find(t);
            if (it == ms.end()) it = ms.emplace(t, boundary_m(j12)).first;
            int row = (t - detail::twice(s1 + s2)) / 2, col = (t - detail::twice(m1 + m2)) / 2;
            Scalar v = three_j(j1, j2, j12, s1, s2, s1 + s2) * it->second.at(row, col) *
                       three_j(j1, j2, j12, m1, m2, m1 + m2);
            if (!v.is_zero()) parts.push_back(v);
        }
        return Scalar::sum(parts);
    });
}

inline VerificationReport verify_f_dictionary(Spin j1, Spin j2, FieldMode mode = FieldMode::exact()) {
    return timed_check("F_DICTIONARY", {j1, j2}, mode, [&](VerificationReport& rep) {
        auto cop = coproduct(generators(j1), generators(j2));
        compare_operators(rep, "Delta M = sum 3j M 3j", delta_m_decomposition(j1, j2), boundary_series(cop));
        auto f = two_leg_operator(j1, j2, [&](Exponent a, Exponent b, Exponent c, Exponent d) {
            return f_from_3j6j(j1, j2, a, b, c, d);
        });
        compare_operators(rep, "F from 3j 6j = F(x)", f, twist_f(j1, j2).f);
    });
}

// Pre-limit 3j (j1 J J+sigma; m1 m2 m1+m2) at a numeric point, J = j(x0).
inline std::complex<double> prelimit_three_j(Spin j1, Exponent m1e, Exponent sigma, double q0, double x0, int m2) {
    using C = std::complex<double>;
    const double q = q0, j1v = j1.j().to_double(), m1 = m1e.to_double(), s = sigma.to_double();
    const double J = (std::log(x0) / std::log(q) - 1) / 2, j2 = J, j3 = J + s, m3 = m1 + m2;
    auto br = [&](double y) { return (std::pow(q, y) - std::pow(q, -y)) / (q - 1 / q); };
    auto qf = [&](double n) {
        double r = 1;
        for (long i = 1; i <= std::lround(n); ++i) r *= br(static_cast<double>(i));
        return r;
    };
    const C sq_qdiff = std::sqrt(C(q - 1 / q));
    auto sqbr = [&](double y) {
        double num = std::pow(q, y) - std::pow(q, -y);
        return (num < 0 ? C(0, 1) : C(1)) * std::sqrt(std::abs(num)) / sq_qdiff;
    };
    auto ratio_sqrt = [&](double a, double b) {
        long n = std::lround(a - b);
        C v = 1;
        if (n >= 0)
            for (long i = 1; i <= n; ++i) v *= sqbr(b + static_cast<double>(i));
        else
            for (long i = 1; i <= -n; ++i) v /= sqbr(a + static_cast<double>(i));
        return v;
    };
    auto ratio = [&](double a, double b) {
        long n = std::lround(a - b);
        double v = 1;
        if (n >= 0)
            for (long i = 1; i <= n; ++i) v *= br(b + static_cast<double>(i));
        else
            for (long i = 1; i <= -n; ++i) v /= br(a + static_cast<double>(i));
        return v;
    };
    C delta = (std::lround(j1v - s) % 2 ? -1.0 : 1.0) * std::sqrt(qf(j1v + s) * qf(j1v - s));
    for (int i = 1; i <= j1.twice + 1; ++i) delta /= std::sqrt(C(br(2 * J + s - j1v + i)));
    C pre = delta * std::pow(q, -0.5 * (j1v + j2 - j3) * (j1v + j2 + j3 + 1) + j1v * m2 - j2 * m1) *
            std::sqrt(C(br(2 * j3 + 1))) * std::sqrt(qf(j1v + m1) * qf(j1v - m1));
    C sq = ratio_sqrt(j2 + m2, j3 - j1v + m2) * ratio_sqrt(j3 + m3, j3 - j1v + m2) * ratio_sqrt(j3 - m3, j2 - m2);
    C sum = 0;
    for (int p = 0; p < 30; ++p) {
        double args[] = {static_cast<double>(p), j1v + j2 - j3 - p, j1v + m1 - p, j3 - j2 - m1 + p};
        bool ok = true;
        for (double a : args) ok = ok && a > -1e-9;
        if (!ok) continue;
        double r = ratio(j2 - m2, j2 - m2 - p) * ratio(j3 - j1v + m2, j3 - j1v + m2 + p);
        double d = 1;
        for (double a : args) d *= qf(a);
        sum += (p % 2 ? -1.0 : 1.0) * std::pow(q, p * (j1v + j2 + j3 + 1)) * r / d;
    }
    return pre * sq * sum;
}

}  // namespace gnf

namespace gnf {

// The pre-limit 3j at m2 approaches limit_three_j within tol (relative) for every (sigma, m1).
inline VerificationReport verify_prelimit(Spin j1, double q0 = 0.7, double x0 = 0.3, int m2 = 40, double tol = 1e-6) {
    return timed_check("PRELIMIT_3J", {j1}, FieldMode::at(q0, x0), [&](VerificationReport& rep) {
        double worst = 0;
        for (int a = 0; a < j1.dim(); ++a)
            for (int b = 0; b < j1.dim(); ++b) {
                Exponent sigma = j1.m(a), m1 = j1.m(b);
                auto lim = limit_three_j(j1, m1, sigma).eval_complex(q0, x0);
                double e = std::abs(prelimit_three_j(j1, m1, sigma, q0, x0, m2) / lim - 1.0);
                worst = std::max(worst, e);
                if (e > tol)
                    rep.fail("relative error " + std::to_string(e),
                             FailingEntry{"sigma=" + sigma.str(), "m1=" + m1.str(), std::to_string(e)});
            }
        char buf[64];
        std::snprintf(buf, sizeof buf, "m2=%d worst relative error %.2e", m2, worst);
        rep.note = buf;
    });
}

}  // namespace gnf
