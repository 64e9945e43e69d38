#pragma once

// Drinfeld R-matrix, the twist F(x), the dynamical R(x), the boundary M(x), the associator
// Phi(x) and exact checks of the identities relating them.

#include <array>
#include <string>
#include <vector>

#include "gnf/report.hpp"

namespace gnf {

namespace detail {

inline Scalar qdiff_pow(std::int64_t k) {
    Laurent p(1);
    for (std::int64_t i = 0; i < k; ++i) p *= qdiff_poly();
    return Scalar(p);
}

// Weight of each basis state of a = space(g1) x space(g2), split as (h1, h2).
inline std::pair<int, int> split_weight(const TensorSpace& a, const TensorSpace& b, std::size_t idx) {
    return {a.weight(idx / b.size()), b.weight(idx % b.size())};
}

inline GradedOperator power(const GradedOperator& a, int k) {
    GradedOperator r = GradedOperator::identity(a.space());
    for (int i = 0; i < k; ++i) r = r * a;
    return r;
}

}  // namespace detail

// Term i of R^D = q^{H x H/2} sum_i (q-q^-1)^i q^{-i(i+1)/2}/[i]! q^{iH/2}E+^i x q^{-iH/2}E-^i.
inline GradedOperator drinfeld_term(const GeneratorSet& g1, const GeneratorSet& g2, int i) {
    const TensorSpace &s1 = g1.space(), &s2 = g2.space();
    Scalar c = detail::qdiff_pow(i) * Scalar::q_pow(Exponent::ratio(-i * (i + 1), 2)) * Scalar(inverse_qfact(i));
    GradedOperator a = q_power_of_weight(s1, Exponent::ratio(i, 2)) * detail::power(g1.ep, i);
    GradedOperator b = q_power_of_weight(s2, Exponent::ratio(-i, 2)) * detail::power(g2.em, i);
    return kron(a, b).scaled(c);
}

inline GradedOperator q_half_hh(const TensorSpace& s1, const TensorSpace& s2, int sign = 1) {
    TensorSpace s = tensor(s1, s2);
    return GradedOperator::diagonal(s, [&](std::size_t b) {
        auto [h1, h2] = detail::split_weight(s1, s2, b);
        return Scalar::q_pow(Exponent::ratio(sign * h1 * h2, 2));
    });
}

inline GradedOperator drinfeld_series(const GeneratorSet& g1, const GeneratorSet& g2) {
    GradedOperator sum(tensor(g1.space(), g2.space()));
    for (int i = 0;; ++i) {
        GradedOperator t = drinfeld_term(g1, g2, i);
        if (t.is_zero()) break;
        sum += t;
    }
    return q_half_hh(g1.space(), g2.space()) * sum;
}

inline GradedOperator drinfeld_r(Spin j1, Spin j2) { return drinfeld_series(generators(j1), generators(j2)); }

// Term k of F(x) (or of F^-1(x)).  The denominator is diagonal in the weight h2 of the second
// factor and stands to the left of q^{k(H1+H2)/2} E+^k x E-^k.
inline GradedOperator twist_term(const GeneratorSet& g1, const GeneratorSet& g2, int k, bool inverse) {
    const TensorSpace &s1 = g1.space(), &s2 = g2.space();
    TensorSpace s = tensor(s1, s2);
    Scalar c = detail::qdiff_pow(k) * Scalar(inverse_qfact(k)) * Scalar::x_pow(Exponent::integer(k));
    if (!inverse && k % 2 == 1) c = -c;
    const int lo = inverse ? 1 : k, hi = inverse ? k : 2 * k - 1;
    GradedOperator den = GradedOperator::diagonal(s, [&](std::size_t b) {
        int h2 = detail::split_weight(s1, s2, b).second;
        RationalFunction r(mpq_class(1));
        for (int nu = lo; nu <= hi; ++nu) r *= inverse_xbinomial(Exponent::integer(1), Exponent::integer(nu + h2));
        return Scalar(r);
    });
    GradedOperator kk = q_power_of_weight(s, Exponent::ratio(k, 2));
    GradedOperator ee = kron(detail::power(g1.ep, k), detail::power(g2.em, k));
    return (den * kk * ee).scaled(c);
}

inline GradedOperator twist_series(const GeneratorSet& g1, const GeneratorSet& g2, bool inverse) {
    GradedOperator sum(tensor(g1.space(), g2.space()));
    for (int k = 0;; ++k) {
        GradedOperator t = twist_term(g1, g2, k, inverse);
        if (t.is_zero()) break;
        sum += t;
    }
    return sum;
}

struct TwistFamily {
    Spin j1, j2;
    GradedOperator f, finv;
};

inline TwistFamily twist_f(Spin j1, Spin j2) {
    auto g1 = generators(j1), g2 = generators(j2);
    return {j1, j2, twist_series(g1, g2, false), twist_series(g1, g2, true)};
}

// op acting on (j2, j1), transported to (j1, j2) by the flip.
inline GradedOperator flipped(const GradedOperator& op) {
    const TensorSpace& s = op.space();
    if (s.arity() != 2) throw std::invalid_argument("flip needs a two-leg operator");
    return embed(op, TensorSpace({s.leg(1), s.leg(0)}), {1, 0});
}

// R(x) = F21^-1(x) R^D F12(x)
inline GradedOperator gnf_r(Spin j1, Spin j2) {
    auto t12 = twist_f(j1, j2);
    auto t21 = twist_f(j2, j1);
    return flipped(t21.finv) * drinfeld_r(j1, j2) * t12.f;
}

// Term (n, m) of M(x).
inline GradedOperator boundary_term(const GeneratorSet& g, int n, int m) {
    const TensorSpace& s = g.space();
    RationalFunction r(mpq_class(m % 2 ? -1 : 1));
    r *= RationalFunction(Laurent::monomial(Mono{m * kLattice, 0}));
    r *= inverse_qfact(n) * inverse_qfact(m);
    for (int nu = 1; nu <= n; ++nu) r *= inverse_xbinomial(Exponent::integer(1), Exponent::integer(nu));
    Scalar c = Scalar(r) * Scalar::q_pow(Exponent::ratio(n * (n - 1) + 2 * m * (n - m), 2));
    GradedOperator op = detail::power(g.ep, n) * detail::power(g.em, m) * q_power_of_weight(s, Exponent::ratio(n + m, 2));
    return op.scaled(c);
}

inline GradedOperator boundary_series(const GeneratorSet& g) {
    GradedOperator sum(g.space());
    for (int n = 0; !detail::power(g.ep, n).is_zero(); ++n)
        for (int m = 0; !detail::power(g.em, m).is_zero(); ++m) sum += boundary_term(g, n, m);
    return sum;
}

inline GradedOperator boundary_m(Spin j) { return boundary_series(generators(j)); }

// Three-leg assembly helpers on a fixed space.
class ThreeLeg {
public:
    explicit ThreeLeg(std::array<Spin, 3> spins)
        : spins_(spins), space_({spins[0], spins[1], spins[2]}) {
        for (std::size_t l = 0; l < 3; ++l) gens_[l] = generators(spins[l]);
    }

    const TensorSpace& space() const { return space_; }
    const GeneratorSet& gens(std::size_t l) const { return gens_[l]; }

    // F with its first factor on leg a and second on leg b, x -> x q^{H_c} if shifted.
    GradedOperator f(std::size_t a, std::size_t b, bool inverse = false, bool shifted = false) const {
        auto t = twist_f(spins_[a], spins_[b]);
        return embed(inverse ? t.finv : t.f, space_, {a, b}, shift_list(a, b, shifted));
    }
    GradedOperator r(std::size_t a, std::size_t b, bool shifted = false) const {
        return embed(gnf_r(spins_[a], spins_[b]), space_, {a, b}, shift_list(a, b, shifted));
    }
    GradedOperator r_shift(std::size_t a, std::size_t b, Exponent c) const {
        return embed(gnf_r(spins_[a], spins_[b]), space_, {a, b}, {{other(a, b), c}});
    }
    // Phi_{abc} = F^-1_{ab}(x q^{H_c}) F_{ab}(x)
    GradedOperator phi(std::size_t a, std::size_t b) const { return f(a, b, true, true) * f(a, b); }
    GradedOperator phi_inverse(std::size_t a, std::size_t b) const { return f(a, b, true) * f(a, b, false, true); }

    GeneratorSet cop12() const { return coproduct(gens_[0], gens_[1]); }
    GeneratorSet cop23() const { return coproduct(gens_[1], gens_[2]); }

    // (Delta x id) and (id x Delta) images of a two-leg series built on generator sets.
    template <class Series>
    GradedOperator left_coproduct(Series&& series) const { return series(cop12(), gens_[2]); }
    template <class Series>
    GradedOperator right_coproduct(Series&& series) const { return series(gens_[0], cop23()); }

    // op on (j_{c}, j_a, j_b) with c the coproduct leg pair, placed back.
    GradedOperator place(const GradedOperator& op, const std::vector<std::size_t>& legs) const {
        return embed(op, space_, legs);
    }

    static std::size_t other(std::size_t a, std::size_t b) { return 3 - a - b; }

private:
    std::vector<std::pair<std::size_t, Exponent>> shift_list(std::size_t a, std::size_t b, bool shifted) const {
        if (!shifted) return {};
        return {{other(a, b), Exponent::integer(1)}};
    }

    std::array<Spin, 3> spins_;
    TensorSpace space_;
    std::array<GeneratorSet, 3> gens_;
};

// Phi(x) in its long form F^-1_23 [(id x Delta)F^-1] [(Delta x id)F] F_12.
inline GradedOperator associator_phi_long(const ThreeLeg& t) {
    auto fi = [](const GeneratorSet& a, const GeneratorSet& b) { return twist_series(a, b, true); };
    auto fw = [](const GeneratorSet& a, const GeneratorSet& b) { return twist_series(a, b, false); };
    return t.f(1, 2, true) * t.right_coproduct(fi) * t.left_coproduct(fw) * t.f(0, 1);
}

inline GradedOperator associator_phi(Spin j1, Spin j2, Spin j3) { return ThreeLeg({j1, j2, j3}).phi(0, 1); }

enum class Relation {
    GNF,
    COCYCLE,
    COBOUNDARY,
    SHIFTED_COASSOC,
    PHI_CONJUGATION,
    QUASI_YBE,
    QUASITRIANG_LEFT,
    QUASITRIANG_RIGHT,
    RD_INTERTWINER,
    DELTAX_HOMOMORPHISM,
};

inline const std::vector<std::pair<Relation, std::string>>& relation_names() {
    static const std::vector<std::pair<Relation, std::string>> names = {
        {Relation::GNF, "GNF"},
        {Relation::COCYCLE, "COCYCLE"},
        {Relation::COBOUNDARY, "COBOUNDARY"},
        {Relation::SHIFTED_COASSOC, "SHIFTED_COASSOC"},
        {Relation::PHI_CONJUGATION, "PHI_CONJUGATION"},
        {Relation::QUASI_YBE, "QUASI_YBE"},
        {Relation::QUASITRIANG_LEFT, "QUASITRIANG_LEFT"},
        {Relation::QUASITRIANG_RIGHT, "QUASITRIANG_RIGHT"},
        {Relation::RD_INTERTWINER, "RD_INTERTWINER"},
        {Relation::DELTAX_HOMOMORPHISM, "DELTAX_HOMOMORPHISM"},
    };
    return names;
}

inline std::string relation_name(Relation r) {
    for (const auto& [k, n] : relation_names())
        if (k == r) return n;
    return "?";
}

inline std::optional<Relation> relation_from_name(const std::string& s) {
    for (const auto& [k, n] : relation_names())
        if (n == s) return k;
    return std::nullopt;
}

inline std::size_t relation_arity(Relation r) {
    switch (r) {
        case Relation::COBOUNDARY:
        case Relation::RD_INTERTWINER:
        case Relation::DELTAX_HOMOMORPHISM: return 2;
        default: return 3;
    }
}

namespace detail {

inline void check_two_leg(Relation rel, const std::vector<Spin>& s, VerificationReport& rep) {
    const Spin j1 = s[0], j2 = s[1];
    TensorSpace sp({j1, j2});
    auto g1 = generators(j1), g2 = generators(j2);
    auto cop = coproduct(g1, g2);
    switch (rel) {
        case Relation::COBOUNDARY: {
            // F12(x) M1(x q^{H2}) M2(x) = Delta M(x)
            auto t = twist_f(j1, j2);
            auto m1 = embed(boundary_m(j1), sp, {0}, {{1, Exponent::integer(1)}});
            auto m2 = embed(boundary_m(j2), sp, {1});
            compare_operators(rep, "F M1(xq^H2) M2 = Delta M", t.f * m1 * m2, boundary_series(cop));
            break;
        }
        case Relation::RD_INTERTWINER: {
            auto rd = drinfeld_r(j1, j2);
            auto opp = coproduct(g2, g1);
            for (Generator g : {Generator::H, Generator::Eplus, Generator::Eminus})
                compare_operators(rep, "R^D Delta(" + generator_name(g) + ")", rd * cop[g], flipped(opp[g]) * rd);
            break;
        }
        case Relation::DELTAX_HOMOMORPHISM: {
            auto t = twist_f(j1, j2);
            compare_operators(rep, "F Finv", t.f * t.finv, GradedOperator::identity(sp));
            GeneratorSet dx{t.finv * cop.h * t.f, t.finv * cop.ep * t.f, t.finv * cop.em * t.f};
            rep.absorb(check_algebra_set(dx, "DELTAX_HOMOMORPHISM", {j1, j2}, rep.mode));
            break;
        }
        default: throw std::logic_error("not a two-leg relation");
    }
}

inline void check_three_leg(Relation rel, const std::vector<Spin>& s, VerificationReport& rep) {
    ThreeLeg t({s[0], s[1], s[2]});
    auto fw = [](const GeneratorSet& a, const GeneratorSet& b) { return twist_series(a, b, false); };
    auto fi = [](const GeneratorSet& a, const GeneratorSet& b) { return twist_series(a, b, true); };
    switch (rel) {
        case Relation::GNF: {
            // R12(x) R13(x q^H2) R23(x) = R23(x q^H1) R13(x) R12(x q^H3)
            auto lhs = t.r(0, 1) * t.r(0, 2, true) * t.r(1, 2);
            auto rhs = t.r(1, 2, true) * t.r(0, 2) * t.r(0, 1, true);
            compare_operators(rep, "GNF", lhs, rhs);
            break;
        }
        case Relation::COCYCLE: {
            // [(id x Delta)F][id x F] = [(Delta x id)F][F(x q^H3) x id]
            auto lhs = t.right_coproduct(fw) * t.f(1, 2);
            auto rhs = t.left_coproduct(fw) * t.f(0, 1, false, true);
            compare_operators(rep, "shifted cocycle", lhs, rhs);
            break;
        }
        case Relation::SHIFTED_COASSOC: {
            auto inner = coproduct(t.cop12(), t.gens(2));
            auto f23 = t.f(1, 2), f23i = t.f(1, 2, true);
            auto f12s = t.f(0, 1, false, true), f12si = t.f(0, 1, true, true);
            auto rf = t.right_coproduct(fw), rfi = t.right_coproduct(fi);
            auto lf = t.left_coproduct(fw), lfi = t.left_coproduct(fi);
            for (Generator g : {Generator::H, Generator::Eplus, Generator::Eminus}) {
                auto lhs = f23i * rfi * inner[g] * rf * f23;
                auto rhs = f12si * lfi * inner[g] * lf * f12s;
                compare_operators(rep, "coassociativity on " + generator_name(g), lhs, rhs);
            }
            break;
        }
        case Relation::PHI_CONJUGATION: {
            // R12(x q^H3) Phi_123 = Phi_213 R12(x)
            compare_operators(rep, "R12(xq^H3) Phi123 = Phi213 R12", t.r(0, 1, true) * t.phi(0, 1),
                              t.phi(1, 0) * t.r(0, 1));
            break;
        }
        case Relation::QUASI_YBE: {
            auto lhs = t.phi_inverse(2, 1) * t.r(0, 1) * t.phi(2, 0) * t.r(0, 2) * t.phi_inverse(0, 2) * t.r(1, 2);
            auto rhs = t.r(1, 2) * t.phi_inverse(1, 2) * t.r(0, 2) * t.phi(1, 0) * t.r(0, 1) * t.phi_inverse(0, 1);
            compare_operators(rep, "quasi-Yang-Baxter", lhs, rhs);
            break;
        }
        case Relation::QUASITRIANG_LEFT: {
            // (Delta_x x id) R(x) = R13(x q^H2) R23(x) F12^-1(x q^H3) F12(x)
            auto fa = t.place(twist_series(t.gens(2), t.cop12(), true), {2, 0, 1});
            auto lhs = t.f(0, 1, true) * fa * drinfeld_series(t.cop12(), t.gens(2)) * t.left_coproduct(fw) * t.f(0, 1);
            auto rhs = t.r(0, 2, true) * t.r(1, 2) * t.f(0, 1, true, true) * t.f(0, 1);
            compare_operators(rep, "(Delta_x x id) R", lhs, rhs);
            break;
        }
        case Relation::QUASITRIANG_RIGHT: {
            // (id x Delta_x) R(x) = F23^-1(x) F23(x q^H1) R13(x) R12(x q^H3)
            auto fb = t.place(twist_series(t.cop23(), t.gens(0), true), {1, 2, 0});
            auto lhs = t.f(1, 2, true) * fb * drinfeld_series(t.gens(0), t.cop23()) * t.right_coproduct(fw) * t.f(1, 2);
            auto rhs = t.f(1, 2, true) * t.f(1, 2, false, true) * t.r(0, 2) * t.r(0, 1, true);
            compare_operators(rep, "(id x Delta_x) R", lhs, rhs);
            break;
        }
        default: throw std::logic_error("not a three-leg relation");
    }
}

}  // namespace detail

inline VerificationReport verify_relation(Relation rel, const std::vector<Spin>& spins,
                                          FieldMode mode = FieldMode::exact()) {
    if (spins.size() != relation_arity(rel))
        throw std::invalid_argument(relation_name(rel) + " needs " + std::to_string(relation_arity(rel)) + " spins");
    return timed_check(relation_name(rel), spins, mode, [&](VerificationReport& rep) {
        if (relation_arity(rel) == 2) detail::check_two_leg(rel, spins, rep);
        else detail::check_three_leg(rel, spins, rep);
    });
}

// Both lines of the associator formula agree.
inline VerificationReport verify_phi_forms(Spin j1, Spin j2, Spin j3, FieldMode mode = FieldMode::exact()) {
    return timed_check("PHI_FORMS", {j1, j2, j3}, mode, [&](VerificationReport& rep) {
        ThreeLeg t({j1, j2, j3});
        compare_operators(rep, "long form = F12^-1(xq^H3) F12", associator_phi_long(t), t.phi(0, 1));
    });
}

// F and R at x -> 0 and x -> infinity.
inline VerificationReport verify_limits(Spin j1, Spin j2) {
    return timed_check("LIMITS", {j1, j2}, FieldMode::exact(), [&](VerificationReport& rep) {
        TensorSpace s({j1, j2});
        auto t = twist_f(j1, j2);
        auto rd = drinfeld_r(j1, j2);
        auto r = gnf_r(j1, j2);
        auto f0 = t.f.limit_x(LimitPoint::zero);
        if (!f0) return rep.fail("F at 0 diverges");
        compare_operators(rep, "F(0) = 1", *f0, GradedOperator::identity(s));
        auto r0 = r.limit_x(LimitPoint::zero);
        if (!r0) return rep.fail("R at 0 diverges");
        compare_operators(rep, "R(0) = R^D", *r0, rd);
        auto rinf = r.limit_x(LimitPoint::infinity);
        if (!rinf) return rep.fail("R at infinity diverges");
        auto expect = q_half_hh(TensorSpace({j1}), TensorSpace({j2}), -1) * flipped(drinfeld_r(j2, j1)) *
                      q_half_hh(TensorSpace({j1}), TensorSpace({j2}));
        compare_operators(rep, "R(inf) = q^{-HH/2} R^D_21 q^{HH/2}", *rinf, expect);
    });
}

}  // namespace gnf
