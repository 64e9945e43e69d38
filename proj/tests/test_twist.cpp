#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gnf/twist.hpp"
#include "numeric_oracle.hpp"

using namespace gnf;
using namespace oracle;

namespace {

const Spin half{1}, one{2}, zero{0};

Scalar qp(int twice) { return Scalar::q_pow(Exponent::ratio(twice, 2)); }
Scalar xs() { return Scalar::x_pow(Exponent::integer(1)); }
Scalar qdiff() { return Scalar(qdiff_poly()); }

void expect_pass(const VerificationReport& r) {
    EXPECT_TRUE(r.passed) << r.relation << " " << r.check
                          << (r.failing_entry ? " " + r.failing_entry->row + r.failing_entry->col + " " +
                                                    r.failing_entry->residual
                                              : std::string());
}

void expect_close(const GradedOperator& exact, const Mat& ref, double q0, double x0, double tol) {
    auto v = exact.eval_complex(q0, x0);
    for (std::size_t i = 0; i < ref.size(); ++i)
        for (std::size_t j = 0; j < ref.size(); ++j) {
            double scale = std::max(1.0, std::abs(ref[i][j]));
            EXPECT_NEAR(v[i][j].real(), ref[i][j], tol * scale) << i << "," << j << " at " << q0 << "," << x0;
            EXPECT_NEAR(v[i][j].imag(), 0.0, tol * scale);
        }
}

}  // namespace

TEST(Drinfeld, SpinZeroIsIdentity) {
    for (int t : {0, 1, 2, 3}) {
        auto r = drinfeld_r(zero, Spin{t});
        EXPECT_EQ(r, GradedOperator::identity(r.space()));
    }
}

TEST(Drinfeld, OffDiagonalEntryHalfHalf) {
    auto r = drinfeld_r(half, half);
    // <+-|R^D|-+> = q^{-1/2}(q - q^-1)
    EXPECT_EQ(r.at(1, 2), qp(-1) * qdiff());
    EXPECT_EQ(r.at(0, 0), qp(1));
    EXPECT_EQ(r.at(1, 1), qp(-1));
    EXPECT_TRUE(r.at(2, 1).is_zero());
}

TEST(Drinfeld, Intertwiner) {
    for (auto [a, b] : {std::pair{half, half}, std::pair{half, one}, std::pair{one, one}, std::pair{one, Spin{3}}})
        expect_pass(verify_relation(Relation::RD_INTERTWINER, {a, b}));
}

TEST(Drinfeld, TruncationIsSound) {
    auto g1 = generators(one), g2 = generators(Spin{3});
    EXPECT_TRUE(drinfeld_term(g1, g2, 3).is_zero());
    EXPECT_FALSE(drinfeld_term(g1, g2, 2).is_zero());
    EXPECT_TRUE(twist_term(g1, g2, 3, false).is_zero());
    EXPECT_TRUE(twist_term(g1, g2, 3, true).is_zero());
    auto g = generators(one);
    EXPECT_TRUE(boundary_term(g, 3, 0).is_zero());
    EXPECT_TRUE(boundary_term(g, 0, 3).is_zero());
}

TEST(Twist, EntryHalfHalf) {
    auto t = twist_f(half, half);
    // <+-|F|-+> = -(q - q^-1) x/(x - x^-1)
    Scalar expect = -qdiff() * xs() * Scalar(inverse_xbinomial(Exponent::integer(1), Exponent()));
    EXPECT_EQ(t.f.at(1, 2), expect);
    EXPECT_TRUE(t.f.at(2, 1).is_zero());
    EXPECT_TRUE(t.f.at(0, 0).is_one());
}

TEST(Twist, InverseMatchesGeometricSeries) {
    // F = 1 - N with N nilpotent of order 2j+1 in the leg-1 grading; F^-1 = sum_n N^n
    for (auto [a, b] : {std::pair{one, one}, std::pair{half, Spin{3}}}) {
        auto t = twist_f(a, b);
        auto id = GradedOperator::identity(t.f.space());
        auto n = id - t.f;
        GradedOperator inv = id, p = id;
        for (int k = 1; k <= std::min(a.twice, b.twice); ++k) {
            p = p * n;
            inv += p;
        }
        EXPECT_TRUE((p * n).is_zero());
        EXPECT_EQ(inv, t.finv);
        EXPECT_EQ(t.f * t.finv, id);
        EXPECT_EQ(t.finv * t.f, id);
    }
}

TEST(Twist, RaisesLegOneOnly) {
    auto t = twist_f(one, Spin{3});
    for (std::size_t i = 0; i < t.f.size(); ++i)
        for (const auto& [j, v] : t.f.row(i)) {
            EXPECT_EQ(t.f.total_weight_change(i, j), 0);
            EXPECT_GE(t.f.weight_change(i, j)[0], 0);
        }
}

TEST(Twist, LimitsAtZero) {
    for (auto [a, b] : {std::pair{half, one}, std::pair{one, one}}) {
        auto f0 = twist_f(a, b).f.limit_x(LimitPoint::zero);
        ASSERT_TRUE(f0.has_value());
        EXPECT_EQ(*f0, GradedOperator::identity(f0->space()));
    }
}

TEST(DynamicalR, Limits) {
    expect_pass(verify_limits(half, one));
    expect_pass(verify_limits(half, half));
}

TEST(DynamicalR, NonzeroWeightEntriesAreConstant) {
    auto r = gnf_r(half, half);
    const auto& s = r.space();
    for (std::size_t i = 0; i < s.size(); ++i)
        for (const auto& [j, v] : r.row(i)) {
            if (s.weight(j) == 0) continue;
            EXPECT_EQ(v.shift_x(Exponent::integer(1)), v) << s.label(i) << s.label(j);
        }
    // the zero-weight block does depend on x
    bool varies = false;
    for (std::size_t i : {1u, 2u})
        for (std::size_t j : {1u, 2u}) varies |= r.at(i, j).shift_x(Exponent::integer(1)) != r.at(i, j);
    EXPECT_TRUE(varies);
}

TEST(DynamicalR, InverseFromFactors) {
    for (auto [a, b] : {std::pair{half, half}, std::pair{half, one}}) {
        auto t12 = twist_f(a, b), t21 = twist_f(b, a);
        // R^D is upper triangular in the basis order; invert it by a Neumann series
        auto rd = drinfeld_r(a, b);
        auto id = GradedOperator::identity(rd.space());
        auto d = GradedOperator::diagonal(rd.space(), [&](std::size_t k) { return rd.at(k, k).inverse(); });
        auto n = id - d * rd;  // strictly triangular
        GradedOperator inv = id, p = id;
        for (;;) {
            p = p * n;
            if (p.is_zero()) break;
            inv += p;
        }
        inv = inv * d;
        EXPECT_EQ(rd * inv, id);
        auto r = gnf_r(a, b);
        auto rinv = t12.finv * inv * flipped(t21.f);
        EXPECT_EQ(r * rinv, id);
        EXPECT_EQ(rinv * r, id);
    }
}

TEST(DynamicalR, NumericCoherenceWithSeries) {
    std::mt19937 rng(20261015);
    std::uniform_real_distribution<double> u(0.2, 0.9);
    auto r = gnf_r(half, one);
    auto f = twist_f(one, one).f;
    for (int n = 0; n < 20; ++n) {
        double q0 = u(rng), x0 = u(rng);
        NumericSeries ns{q0, x0};
        expect_close(r, ns.r(1, 2), q0, x0, 1e-10);
        expect_close(f, ns.twist(2, 2, false), q0, x0, 1e-10);
    }
}

TEST(Boundary, SpinZeroAndHalf) {
    auto m0 = boundary_m(zero);
    EXPECT_TRUE(m0.at(0, 0).is_one());
    auto m = boundary_m(half);
    Scalar den = Scalar(inverse_xbinomial(Exponent::integer(1), Exponent::integer(1)));
    EXPECT_EQ(m.at(0, 0), Scalar(1L) - xs() * Scalar::q_pow(Exponent::integer(1)) * den);
    EXPECT_EQ(m.at(0, 1), qp(-1) * den);
    EXPECT_EQ(m.at(1, 0), -xs() * qp(-1));
    EXPECT_TRUE(m.at(1, 1).is_one());
}

TEST(Relations, TwoLeg) {
    for (auto [a, b] : {std::pair{half, half}, std::pair{half, one}, std::pair{one, one}}) {
        expect_pass(verify_relation(Relation::COBOUNDARY, {a, b}));
        expect_pass(verify_relation(Relation::DELTAX_HOMOMORPHISM, {a, b}));
    }
}

TEST(Relations, GnfHalfHalfHalf) { expect_pass(verify_relation(Relation::GNF, {half, half, half})); }

TEST(Relations, GnfMixed) {
    for (auto s : {std::vector{half, half, one}, std::vector{half, one, half}, std::vector{one, half, half}})
        expect_pass(verify_relation(Relation::GNF, s));
}

TEST(Relations, GnfWithSpinZeroLeg) {
    expect_pass(verify_relation(Relation::GNF, {zero, half, one}));
    expect_pass(verify_relation(Relation::GNF, {half, zero, half}));
}

TEST(Relations, Cocycle) {
    for (auto s : {std::vector{half, half, half}, std::vector{half, one, half}, std::vector{half, half, one}})
        expect_pass(verify_relation(Relation::COCYCLE, s));
}

TEST(Relations, QuasiHopf) {
    for (Relation r : {Relation::SHIFTED_COASSOC, Relation::PHI_CONJUGATION, Relation::QUASI_YBE,
                       Relation::QUASITRIANG_LEFT, Relation::QUASITRIANG_RIGHT})
        expect_pass(verify_relation(r, {half, half, half}));
}

TEST(Relations, NumericMode) {
    auto r = verify_relation(Relation::GNF, {half, half, half}, FieldMode::at(0.7, 0.3));
    expect_pass(r);
    EXPECT_EQ(r.mode.str(), "numeric");
}

TEST(Relations, ArityMismatch) {
    EXPECT_THROW(verify_relation(Relation::GNF, {half, half}), std::invalid_argument);
    EXPECT_THROW(verify_relation(Relation::COBOUNDARY, {half, half, half}), std::invalid_argument);
    EXPECT_EQ(relation_from_name("QUASI_YBE"), Relation::QUASI_YBE);
    EXPECT_FALSE(relation_from_name("YBE").has_value());
}

TEST(Relations, UnshiftedGnfFails) {
    // dropping the shifts breaks the equation, and the report says where
    ThreeLeg t({half, half, half});
    VerificationReport rep;
    rep.relation = "GNF-unshifted";
    compare_operators(rep, "GNF", t.r(0, 1) * t.r(0, 2) * t.r(1, 2), t.r(1, 2) * t.r(0, 2) * t.r(0, 1));
    EXPECT_FALSE(rep.passed);
    ASSERT_TRUE(rep.failing_entry.has_value());
    ASSERT_TRUE(rep.residual_rank.has_value());
    EXPECT_GT(*rep.residual_rank, 0);
}

TEST(Associator, Forms) {
    expect_pass(verify_phi_forms(half, half, half));
    expect_pass(verify_phi_forms(half, half, one));
}

TEST(Associator, TrivialThirdLeg) {
    auto p = associator_phi(half, one, zero);
    EXPECT_EQ(p, GradedOperator::identity(p.space()));
}

TEST(Associator, PreservesTotalWeight) {
    auto p = associator_phi(half, half, one);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (const auto& [j, v] : p.row(i)) EXPECT_EQ(p.total_weight_change(i, j), 0);
}
