#pragma once

// q-difference operators, the dressed Lax matrix, the transfer matrix and the trigonometric
// q-Lame Hamiltonian with its shift operators and eigenfunctions.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gnf/io.hpp"
#include "gnf/twist.hpp"

namespace gnf {

// sum_s a_s(x) T^s with (T^s f)(x) = f(q^s x); T^s a(x) = a(q^s x) T^s.
class QDiffOperator {
public:
    QDiffOperator() = default;
    QDiffOperator(Scalar a, Exponent s) { add(s, std::move(a)); }

    static QDiffOperator shift(Exponent s) { return QDiffOperator(Scalar(1L), s); }
    static QDiffOperator coefficient(Scalar a) { return QDiffOperator(std::move(a), Exponent()); }

    const std::map<Exponent, Scalar>& terms() const { return terms_; }
    Scalar at(Exponent s) const {
        auto it = terms_.find(s);
        return it == terms_.end() ? Scalar() : it->second;
    }
    bool is_zero() const { return terms_.empty(); }
    bool operator==(const QDiffOperator& o) const { return terms_ == o.terms_; }

    void add(Exponent s, Scalar a) {
        if (a.is_zero()) return;
        auto it = terms_.find(s);
        if (it == terms_.end()) {
            terms_.emplace(s, std::move(a));
            return;
        }
        it->second += a;
        if (it->second.is_zero()) terms_.erase(it);
    }

    QDiffOperator operator+(const QDiffOperator& o) const {
        QDiffOperator r = *this;
        for (const auto& [s, a] : o.terms_) r.add(s, a);
        return r;
    }
    QDiffOperator operator-(const QDiffOperator& o) const {
        QDiffOperator r = *this;
        for (const auto& [s, a] : o.terms_) r.add(s, -a);
        return r;
    }
    QDiffOperator operator*(const QDiffOperator& o) const {
        QDiffOperator r;
        for (const auto& [s, a] : terms_)
            for (const auto& [t, b] : o.terms_) r.add(s + t, a * b.shift_x(s));
        return r;
    }
    QDiffOperator scaled(const Scalar& c) const {
        QDiffOperator r;
        for (const auto& [s, a] : terms_) r.add(s, c * a);
        return r;
    }

    Scalar apply(const Scalar& f) const {
        std::vector<Scalar> parts;
        for (const auto& [s, a] : terms_) parts.push_back(a * f.shift_x(s));
        return Scalar::sum(parts);
    }

private:
    std::map<Exponent, Scalar> terms_;
};

// A matrix of q-difference operators on a tensor space, stored by shift: sum_s A_s(x) T^s.
class MatrixQDiffOperator {
public:
    MatrixQDiffOperator() = default;
    explicit MatrixQDiffOperator(TensorSpace s) : space_(std::move(s)) {}
    MatrixQDiffOperator(GradedOperator a, Exponent s) : space_(a.space()) { add(s, a); }

    const TensorSpace& space() const { return space_; }
    const std::map<Exponent, GradedOperator>& blocks() const { return blocks_; }

    void add(Exponent s, const GradedOperator& a) {
        if (a.is_zero()) return;
        auto it = blocks_.find(s);
        if (it == blocks_.end()) {
            blocks_.emplace(s, a);
            return;
        }
        it->second += a;
        if (it->second.is_zero()) blocks_.erase(it);
    }
    void set_entry(std::size_t i, std::size_t j, Exponent s, const Scalar& v) {
        auto it = blocks_.find(s);
        if (it == blocks_.end()) it = blocks_.emplace(s, GradedOperator(space_)).first;
        it->second.set(i, j, it->second.at(i, j) + v);
        if (it->second.is_zero()) blocks_.erase(it);
    }

    QDiffOperator entry(std::size_t i, std::size_t j) const {
        QDiffOperator r;
        for (const auto& [s, a] : blocks_) r.add(s, a.at(i, j));
        return r;
    }

    MatrixQDiffOperator operator*(const MatrixQDiffOperator& o) const {
        MatrixQDiffOperator r(space_);
        for (const auto& [s, a] : blocks_)
            for (const auto& [t, b] : o.blocks_) r.add(s + t, a * b.shift_x(s));
        return r;
    }
    MatrixQDiffOperator operator-(const MatrixQDiffOperator& o) const {
        MatrixQDiffOperator r = *this;
        for (const auto& [s, a] : o.blocks_) r.add(s, -a);
        return r;
    }
    bool operator==(const MatrixQDiffOperator& o) const { return space_ == o.space_ && blocks_ == o.blocks_; }
    bool is_zero() const { return blocks_.empty(); }

    MatrixQDiffOperator embedded(const TensorSpace& target, const std::vector<std::size_t>& legs) const {
        MatrixQDiffOperator r(target);
        for (const auto& [s, a] : blocks_) r.add(s, embed(a, target, legs));
        return r;
    }

    // Trace over leg 0.
    MatrixQDiffOperator trace_first_leg() const {
        std::vector<Spin> rest(space_.legs().begin() + 1, space_.legs().end());
        TensorSpace t(rest);
        MatrixQDiffOperator r(t);
        const std::size_t n = t.size();
        for (const auto& [s, a] : blocks_) {
            GradedOperator tr(t);
            for (int d = 0; d < space_.leg(0).dim(); ++d)
                for (std::size_t i = 0; i < n; ++i)
                    for (const auto& [j, v] : a.row(d * n + i))
                        if (j / n == static_cast<std::size_t>(d)) tr.set(i, j % n, tr.at(i, j % n) + v);
            r.add(s, tr);
        }
        return r;
    }

private:
    TensorSpace space_;
    std::map<Exponent, GradedOperator> blocks_;
};

namespace detail {

inline Scalar qs(Exponent e) { return Scalar::q_pow(e); }
inline Scalar xs(Exponent e) { return Scalar::x_pow(e); }

// X - X^-1 with X = x q^c
inline Scalar xb(Exponent c) { return Scalar(xbinomial(Exponent::integer(1), c)); }
inline Scalar xb_inv(Exponent c) { return Scalar(inverse_xbinomial(Exponent::integer(1), c)); }

// (q^a X - q^-a X^-1) with X = x q^c
inline Scalar xq(Exponent a, Exponent c) { return xb(a + c); }

}  // namespace detail

// c_j(X) = (q^j X - q^-j X^-1)(q^{-j-1} X - q^{j+1} X^-1) / ((X - X^-1)(q^-1 X - q X^-1)), X = x q^c
inline Scalar c_function(int j, Exponent c = Exponent()) {
    using namespace detail;
    const Exponent J = Exponent::integer(j), one = Exponent::integer(1);
    return xq(J, c) * xq(-J - one, c) * xb_inv(c) * xb_inv(c - one);
}

// d_j(X) = (q^-j X - q^j X^-1)(q^{-j-1} X - q^{j+1} X^-1) / ((X - X^-1)(q^-1 X - q X^-1))
inline Scalar d_function(int j, Exponent c = Exponent()) {
    using namespace detail;
    const Exponent J = Exponent::integer(j), one = Exponent::integer(1);
    return xq(-J, c) * xq(-J - one, c) * xb_inv(c) * xb_inv(c - one);
}

// H_j = T^-1 + c_j(qx) T
inline QDiffOperator hamiltonian(int j) {
    const Exponent one = Exponent::integer(1);
    return QDiffOperator::shift(-one) + QDiffOperator(c_function(j, one), one);
}

// D_j = T^-1 - d_j(qx) T
inline QDiffOperator shift_operator(int j) {
    const Exponent one = Exponent::integer(1);
    return QDiffOperator::shift(-one) - QDiffOperator(d_function(j, one), one);
}

inline std::string to_text(const QDiffOperator& op) {
    std::string s;
    for (const auto& [e, a] : op.terms()) {
        if (!s.empty()) s += " + ";
        s += "(" + to_text(a) + ")*T^(" + e.str() + ")";
    }
    return s.empty() ? "0" : s;
}

inline nlohmann::json to_json(const QDiffOperator& op) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [e, a] : op.terms()) terms.push_back({{"shift", e.str()}, {"value", to_json(a)}});
    return {{"terms", terms}};
}

inline QDiffOperator qdiff_from_json(const nlohmann::json& j) {
    QDiffOperator op;
    for (const auto& t : j.at("terms")) op.add(Exponent::parse(t.at("shift")), scalar_from_json(t.at("value")));
    return op;
}

inline std::string to_latex(const QDiffOperator& op) {
    std::string s;
    for (const auto& [e, a] : op.terms()) {
        if (!s.empty()) s += " + ";
        s += "\\left(" + to_text(a, true) + "\\right) T^{" + e.str() + "}";
    }
    return s.empty() ? "0" : s;
}

inline nlohmann::json to_json(const MatrixQDiffOperator& op) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& [e, a] : op.blocks()) blocks.push_back({{"shift", e.str()}, {"operator", to_json(a)}});
    return {{"legs", spins_json(op.space().legs())}, {"blocks", blocks}};
}

inline MatrixQDiffOperator matrix_qdiff_from_json(const nlohmann::json& j) {
    std::vector<Spin> legs;
    for (const auto& l : j.at("legs")) legs.push_back(Spin::parse(l.get<std::string>()));
    MatrixQDiffOperator op{TensorSpace(legs)};
    for (const auto& b : j.at("blocks")) op.add(Exponent::parse(b.at("shift")), operator_from_json(b.at("operator")));
    return op;
}

inline std::string to_text(const MatrixQDiffOperator& op) {
    std::string s;
    for (const auto& [e, a] : op.blocks()) s += "T^" + e.str() + ":\n" + to_text(a);
    return s;
}

inline std::string to_latex(const MatrixQDiffOperator& op) {
    std::string s;
    for (const auto& [e, a] : op.blocks()) {
        if (!s.empty()) s += "\n+ ";
        s += to_latex(a) + " T^{" + e.str() + "}";
    }
    return s.empty() ? "0" : s;
}

inline VerificationReport verify_intertwining(int j) {
    return timed_check("INTERTWINING", {Spin{2 * j}}, FieldMode::exact(), [&](VerificationReport& rep) {
        if (j < 1) return rep.fail("j must be at least 1");
        QDiffOperator res = hamiltonian(j) * shift_operator(j) - shift_operator(j) * hamiltonian(j - 1);
        if (!res.is_zero()) {
            const auto& [s, a] = *res.terms().begin();
            rep.fail("H_j D_j = D_j H_{j-1}", FailingEntry{"T^" + s.str(), "", to_text(a)});
        }
    });
}

enum class WaveMethod { closed, recursive };

inline Scalar wavefunction(int j, int k, WaveMethod method = WaveMethod::closed) {
    using namespace detail;
    const Exponent K = Exponent::integer(k);
    Scalar seed = xs(K) - xs(-K);
    if (method == WaveMethod::recursive) {
        Scalar psi = seed;
        for (int i = 1; i <= j; ++i) psi = shift_operator(i).apply(psi);
        return psi;
    }
    std::vector<Scalar> parts;
    for (int n = 0; n <= j; ++n) {
        Scalar t = qbinom(j, n);
        if (n % 2) t = -t;
        for (int r = 1; r <= n; ++r) t *= xb(Exponent::integer(r - j - 1)) * xb_inv(Exponent::integer(r));
        Exponent e = Exponent::integer(k * (2 * n - j));
        t *= qs(e) * xs(K) - qs(-e) * xs(-K);
        parts.push_back(t);
    }
    return Scalar::sum(parts);
}

namespace detail {

// p(x = sign q^e) for a Laurent polynomial with integer powers of x.
inline Laurent at_point(const Laurent& p, int sign, Exponent e) {
    std::vector<Term> out;
    for (const auto& t : p.terms()) {
        Exponent a = Exponent::units(t.m.x);
        if (!a.is_integer()) throw std::domain_error("substitution needs integer powers of x");
        mpq_class c = t.c;
        if (sign < 0 && a.to_integer() % 2) c = -c;
        out.push_back({Mono{0, t.m.q + a.times(e).units()}, c});
    }
    return Laurent::from_terms(std::move(out));
}

}  // namespace detail

// lim_{x -> sign q^-r} (x - sign q^-r) f(x), if finite.
inline std::optional<Laurent> residue_numerator(const Scalar& f, int sign, int r) {
    if (!f.is_rational()) throw std::domain_error("residues need a radical-free function");
    const Exponent e = Exponent::integer(-r);
    Laurent lin = Laurent::monomial(Mono{kLattice, 0}) - Laurent::monomial(Mono{0, e.units()}, mpq_class(sign));
    RationalFunction g = f.rational_part() * RationalFunction(lin);
    Laurent den = detail::at_point(g.den_poly(), sign, e);
    if (den.is_zero()) return std::nullopt;
    return detail::at_point(g.num(), sign, e);
}

inline VerificationReport verify_spectral_properties(int j, int kmax) {
    return timed_check("SPECTRAL", {Spin{2 * j}}, FieldMode::exact(), [&](VerificationReport& rep) {
        QDiffOperator h = hamiltonian(j);
        for (int k = -kmax; k <= kmax && rep.passed; ++k) {
            Scalar psi = wavefunction(j, k);
            const Exponent K = Exponent::integer(k);
            Scalar e = Scalar::q_pow(K) + Scalar::q_pow(-K);
            if (!(h.apply(psi) - e * psi).is_zero())
                rep.fail("eigen-equation", FailingEntry{"k=" + std::to_string(k), "", ""});
            if (std::abs(k) <= j && !psi.is_zero())
                rep.fail("exclusion", FailingEntry{"k=" + std::to_string(k), "", to_text(psi)});
            for (int r = 1; r <= j && rep.passed; ++r)
                for (int sign : {1, -1}) {
                    auto res = residue_numerator(psi, sign, r);
                    std::string at = std::string(sign > 0 ? "+" : "-") + "q^-" + std::to_string(r);
                    if (!res) rep.fail("residue", FailingEntry{"k=" + std::to_string(k), at, "pole of higher order"});
                    else if (!res->is_zero())
                        rep.fail("residue", FailingEntry{"k=" + std::to_string(k), at, to_text(*res)});
                }
        }
    });
}

// Lax matrix L_13(x) = q^{-(H_1 + H_3/2)p} R_13(x) q^{H_3 p/2} on (1/2, j): the entry between
// (m1', m3') and (m1, m3) is R(x q^a) T^{a + m3} with a = -(2 m1' + m3').
inline MatrixQDiffOperator lax_dressing(Spin j) {
    const Spin half{1};
    GradedOperator r = gnf_r(half, j);
    const TensorSpace& s = r.space();
    MatrixQDiffOperator l(s);
    for (std::size_t row = 0; row < s.size(); ++row) {
        auto mr = s.ms(row);
        Exponent a = -(mr[0] * 2 + mr[1]);
        for (const auto& [col, v] : r.row(row)) {
            Exponent m3 = s.ms(col)[1];
            l.set_entry(row, col, a + m3, v.shift_x(a));
        }
    }
    return l;
}

// The same matrix written out entrywise, with f(y) = (q - q^-1)/(y - y^-1).
inline MatrixQDiffOperator lax_display(Spin j) {
    using namespace detail;
    const Spin half{1};
    TensorSpace s({half, j});
    MatrixQDiffOperator l(s);
    const auto g = generators(j);
    const GradedOperator ef = g.ep * g.em;
    const std::size_t d = static_cast<std::size_t>(j.dim());
    const Exponent one = Exponent::integer(1), hf = Exponent::ratio(1, 2);
    const Scalar qd(qdiff_poly());
    auto f = [&](Exponent c) { return qd * xb_inv(c); };  // f(x q^c)
    for (std::size_t i = 0; i < d; ++i) {
        Exponent mi = j.m(static_cast<int>(i));
        l.set_entry(i, i, -one, qs(mi));
        for (const auto& [k, v] : g.em.row(i))
            l.set_entry(i, d + k, Exponent(), -qs(-hf) * xs(-one) * f(mi) * qs(-mi) * v);
        for (const auto& [k, v] : g.ep.row(i))
            l.set_entry(d + i, k, Exponent(), qs(-hf) * xs(one) * f(one - mi) * qs(mi) * v);
        Scalar br = Scalar(1L) - f(one - mi) * f(mi) * ef.at(i, i);
        l.set_entry(d + i, d + i, one, qs(-mi) * br);
    }
    return l;
}

inline VerificationReport verify_lax(Spin j) {
    return timed_check("LAX", {j}, FieldMode::exact(), [&](VerificationReport& rep) {
        MatrixQDiffOperator a = lax_dressing(j), b = lax_display(j);
        std::map<Exponent, bool> keys;
        for (const auto& [s, m] : a.blocks()) keys[s] = true;
        for (const auto& [s, m] : b.blocks()) keys[s] = true;
        for (const auto& [s, unused] : keys) {
            GradedOperator z(a.space());
            auto ia = a.blocks().find(s), ib = b.blocks().find(s);
            compare_operators(rep, "dressing = display at T^" + s.str(), ia == a.blocks().end() ? z : ia->second,
                              ib == b.blocks().end() ? z : ib->second);
        }
    });
}

inline void compare_matrix_qdiff(VerificationReport& rep, const std::string& what, const MatrixQDiffOperator& a,
                                 const MatrixQDiffOperator& b) {
    std::map<Exponent, bool> keys;
    for (const auto& [s, m] : a.blocks()) keys[s] = true;
    for (const auto& [s, m] : b.blocks()) keys[s] = true;
    for (const auto& [s, unused] : keys) {
        GradedOperator z(a.space());
        auto ia = a.blocks().find(s), ib = b.blocks().find(s);
        compare_operators(rep, what + " at T^" + s.str(), ia == a.blocks().end() ? z : ia->second,
                          ib == b.blocks().end() ? z : ib->second);
    }
}

// R_12(x q^{-H_3/2}) L_13 L_23 = L_23 L_13 R_12(x q^{H_3/2}) on (1/2, 1/2, j), with r on the
// auxiliary legs; r = gnf_r(1/2, 1/2) is the genuine relation.
inline VerificationReport verify_rll_with(Spin j, const GradedOperator& r, const std::string& name = "RLL") {
    const Spin half{1};
    return timed_check(name, {half, half, j}, FieldMode::exact(), [&](VerificationReport& rep) {
        TensorSpace s({half, half, j});
        MatrixQDiffOperator l = lax_dressing(j);
        MatrixQDiffOperator l13 = l.embedded(s, {0, 2}), l23 = l.embedded(s, {1, 2});
        const Exponent hf = Exponent::ratio(1, 2);
        MatrixQDiffOperator rm(embed(r, s, {0, 1}, {{2, -hf}}), Exponent());
        MatrixQDiffOperator rp(embed(r, s, {0, 1}, {{2, hf}}), Exponent());
        compare_matrix_qdiff(rep, "RLL", rm * l13 * l23, l23 * l13 * rp);
    });
}

inline VerificationReport verify_rll(Spin j) { return verify_rll_with(j, gnf_r(Spin{1}, Spin{1})); }

// Tr_1 L_13(x) on rho^(j).
inline MatrixQDiffOperator transfer_matrix(Spin j) { return lax_dressing(j).trace_first_leg(); }

// Tr_1 L_13(x) restricted to |j,0>.
inline QDiffOperator transfer_and_restrict(int j) {
    Spin s{2 * j};
    auto z = zero_weight_subspace(s);
    MatrixQDiffOperator t = transfer_matrix(s);
    for (const auto& [e, m] : t.blocks())
        for (std::size_t i = 0; i < m.size(); ++i)
            for (const auto& [k, v] : m.row(i))
                if (k != i) throw std::logic_error("transfer matrix is not weight-diagonal");
    return t.entry(*z, *z);
}

// Classical limit: with q = e^eps and x = e^z, (H_j - 2)/eps^2 acting on e^{kz} should approach
// k^2 - j(j+1)/sinh^2 z.
struct ClassicalLimitRow {
    int j = 0, k = 0;
    double z = 0;
    double target = 0;
    std::vector<double> eps, value;  // value(eps) for each eps
    double extrapolated = 0, rel_error = 0, order = 0;
    // the even part (v(eps) + v(-eps))/2
    double sym_extrapolated = 0, sym_rel_error = 0, sym_order = 0;
};

inline constexpr double kClassicalTolerance = 1e-4;

inline ClassicalLimitRow classical_limit_row(int j, int k, double z, double e1 = 1e-2, double e2 = 1e-3) {
    const Exponent K = Exponent::integer(k);
    // (H_j x^k)/x^k as an exact function of (q, x)
    Scalar ratio = hamiltonian(j).apply(Scalar::x_pow(K)) * Scalar::x_pow(-K);
    auto v = [&](double eps) { return (ratio.eval(std::exp(eps), std::exp(z)) - 2.0) / (eps * eps); };
    auto sym = [&](double eps) { return (v(eps) + v(-eps)) / 2; };
    ClassicalLimitRow row;
    row.j = j;
    row.k = k;
    row.z = z;
    row.target = k * k - j * (j + 1) / std::pow(std::sinh(z), 2);
    row.eps = {e1, e2};
    row.value = {v(e1), v(e2)};
    const double r2 = (e1 / e2) * (e1 / e2);
    auto richardson = [&](double a, double b) { return (r2 * b - a) / (r2 - 1); };
    auto order = [&](double a, double b) {
        return std::log(std::abs(a - row.target) / std::abs(b - row.target)) / std::log(e1 / e2);
    };
    row.extrapolated = richardson(row.value[0], row.value[1]);
    row.rel_error = std::abs(row.extrapolated - row.target) / std::abs(row.target);
    row.order = order(row.value[0], row.value[1]);
    double s1 = sym(e1), s2 = sym(e2);
    row.sym_extrapolated = richardson(s1, s2);
    row.sym_rel_error = std::abs(row.sym_extrapolated - row.target) / std::abs(row.target);
    row.sym_order = order(s1, s2);
    return row;
}

inline bool classical_row_passes(const ClassicalLimitRow& r) {
    return r.rel_error <= kClassicalTolerance && std::abs(r.order - 2.0) <= 0.25;
}

inline VerificationReport classical_limit_check(int j, const std::vector<int>& ks = {2, 3},
                                                const std::vector<double>& zs = {0.5, 1.0}) {
    return timed_check("CLASSICAL_LIMIT", {Spin{2 * j}}, FieldMode::exact(), [&](VerificationReport& rep) {
        double worst = 0, lo = 1e9, hi = -1e9;
        for (int k : ks)
            for (double z : zs) {
                ClassicalLimitRow r = classical_limit_row(j, k, z);
                worst = std::max(worst, r.rel_error);
                lo = std::min(lo, r.order);
                hi = std::max(hi, r.order);
                if (!classical_row_passes(r) && rep.passed) {
                    char buf[160];
                    std::snprintf(buf, sizeof buf, "relative error %.3g, observed order %.3f", r.rel_error, r.order);
                    rep.fail("k=" + std::to_string(k) + " z=" + std::to_string(z).substr(0, 3),
                             FailingEntry{"k=" + std::to_string(k), "z=" + std::to_string(z).substr(0, 3), buf});
                }
            }
        char note[128];
        std::snprintf(note, sizeof note, "worst relative error %.2e, observed order %.2f..%.2f", worst, lo, hi);
        rep.note = note;
    });
}

}  // namespace gnf
