#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gnf/symbols.hpp"

using namespace gnf;

namespace {

const Spin zero{0}, half{1}, one{2}, three_halves{3};

Exponent h(int twice) { return Exponent::ratio(twice, 2); }

void expect_pass(const VerificationReport& r) {
    EXPECT_TRUE(r.passed) << r.relation << " " << r.check
                          << (r.failing_entry ? " " + r.failing_entry->row + r.failing_entry->col + " " +
                                                    r.failing_entry->residual
                                              : std::string());
}

double fact(double n) { return std::tgamma(n + 1); }

// Classical Clebsch-Gordan <j1 m1 j2 m2 | j3 m3> by the Racah formula.
double classical_cg(double j1, double j2, double j3, double m1, double m2, double m3) {
    if (std::abs(m1 + m2 - m3) > 1e-9) return 0;
    double pre = std::sqrt((2 * j3 + 1) * fact(j1 + j2 - j3) * fact(j1 - j2 + j3) * fact(-j1 + j2 + j3) /
                           fact(j1 + j2 + j3 + 1));
    pre *= std::sqrt(fact(j1 + m1) * fact(j1 - m1) * fact(j2 + m2) * fact(j2 - m2) * fact(j3 + m3) * fact(j3 - m3));
    double s = 0;
    for (int k = 0; k < 20; ++k) {
        double a[] = {static_cast<double>(k), j1 + j2 - j3 - k, j1 - m1 - k, j2 + m2 - k, j3 - j2 + m1 + k,
                      j3 - j1 - m2 + k};
        bool ok = true;
        double d = 1;
        for (double v : a) {
            ok = ok && v > -1e-9;
            if (ok) d *= fact(v);
        }
        if (ok) s += (k % 2 ? -1 : 1) / d;
    }
    return pre * s;
}

// Classical Racah W(abcd; ef).
double classical_racah(double a, double b, double e, double d, double c, double f) {
    auto D = [](double x, double y, double z) {
        return std::sqrt(fact(x + y - z) * fact(x - y + z) * fact(-x + y + z) / fact(x + y + z + 1));
    };
    double pre = D(a, b, e) * D(a, c, f) * D(c, d, e) * D(d, b, f);
    double s = 0;
    for (int z = 0; z < 30; ++z) {
        double args[] = {z - a - b - e, z - a - c - f, z - b - d - f, z - d - c - e,
                         a + b + c + d - z, a + d + e + f - z, b + c + e + f - z};
        bool ok = true;
        double den = 1;
        for (double v : args) {
            ok = ok && v > -1e-9;
            if (ok) den *= fact(v);
        }
        if (ok) s += (z % 2 ? -1 : 1) * fact(z + 1) / den;
    }
    return pre * s;
}

// Columns (j12, m) of the Clebsch-Gordan matrix on (j1, j2), j12 descending.
std::vector<std::pair<Spin, int>> cg_columns(Spin j1, Spin j2) {
    std::vector<std::pair<Spin, int>> cols;
    for (int t = j1.twice + j2.twice; t >= std::abs(j1.twice - j2.twice); t -= 2)
        for (int i = 0; i <= t; ++i) cols.push_back({Spin{t}, i});
    return cols;
}

}  // namespace

TEST(ThreeJ, SelectionRules) {
    EXPECT_FALSE(three_j(half, half, one, h(1), h(1), h(2)).is_zero());
    EXPECT_TRUE(three_j(half, half, one, h(1), h(-1), h(2)).is_zero());
    EXPECT_TRUE(three_j(half, half, Spin{4}, h(1), h(1), h(2)).is_zero());
    EXPECT_TRUE(three_j(half, half, one, h(1), h(1), h(4)).is_zero());
    // highest weight of 1/2 x 1/2 -> 1 is a single product state
    EXPECT_TRUE(three_j(half, half, one, h(1), h(1), h(2)).is_one());
}

TEST(ThreeJ, ClassicalLimit) {
    const double q0 = 1 + 1e-5;
    for (int t1 = 0; t1 <= 3; ++t1)
        for (int t2 = 0; t2 <= 3; ++t2)
            for (int t3 = std::abs(t1 - t2); t3 <= t1 + t2; t3 += 2)
                for (int a = 0; a <= t1; ++a)
                    for (int b = 0; b <= t2; ++b) {
                        Spin j1{t1}, j2{t2}, j3{t3};
                        Exponent m1 = j1.m(a), m2 = j2.m(b);
                        if (!detail::valid_m(j3, m1 + m2)) continue;
                        double v = three_j(j1, j2, j3, m1, m2, m1 + m2).eval(q0, 0.5);
                        double c = classical_cg(t1 / 2.0, t2 / 2.0, t3 / 2.0, m1.to_double(), m2.to_double(),
                                                (m1 + m2).to_double());
                        EXPECT_NEAR(v, c, 1e-4) << t1 << t2 << t3 << " " << m1.str() << " " << m2.str();
                    }
    EXPECT_NEAR(three_j(one, one, one, h(2), h(0), h(2)).eval(q0, 0.5), std::sqrt(0.5), 1e-4);
}

TEST(ThreeJ, IntertwinerAndOrthogonality) {
    for (int t1 = 1; t1 <= 3; ++t1)
        for (int t2 = 1; t2 <= 3; ++t2) {
            Spin j1{t1}, j2{t2};
            TensorSpace s({j1, j2});
            auto cols = cg_columns(j1, j2);
            ASSERT_EQ(cols.size(), s.size());
            // C maps the coupled basis to the product basis; C^T C = 1 and Delta(g) C = C rho(g)
            GradedOperator c(s);
            for (std::size_t col = 0; col < cols.size(); ++col)
                for (std::size_t row = 0; row < s.size(); ++row) {
                    auto m = s.ms(row);
                    c.set(row, col, three_j(j1, j2, cols[col].first, m[0], m[1], cols[col].first.m(cols[col].second)));
                }
            EXPECT_EQ(c.transpose() * c, GradedOperator::identity(s));
            auto cop = coproduct(generators(j1), generators(j2));
            for (Generator g : {Generator::H, Generator::Eplus, Generator::Eminus}) {
                GradedOperator b(s);
                std::size_t base = 0;
                for (int t = t1 + t2; t >= std::abs(t1 - t2); t -= 2) {
                    auto rg = rep_generator(g, Spin{t});
                    for (int i = 0; i <= t; ++i)
                        for (const auto& [k, v] : rg.row(static_cast<std::size_t>(i))) b.set(base + i, base + k, v);
                    base += static_cast<std::size_t>(t + 1);
                }
                EXPECT_EQ(cop[g] * c, c * b) << t1 << "," << t2 << " " << generator_name(g);
            }
        }
}

TEST(SixJ, BruteForceMatchesRacahSum) {
    int checked = 0;
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; b <= 3; ++b)
            for (int c = 0; c <= 3; ++c)
                for (int j = 0; j <= 6; ++j)
                    for (int e = 0; e <= 5; ++e)
                        for (int f = 0; f <= 5; ++f) {
                            Spin j1{a}, j2{b}, j3{c}, jj{j}, j12{e}, j23{f};
                            auto A = [](Spin s) { return Affine::spin(s); };
                            if (!triangle(A(j1), A(j2), A(j12)) || !triangle(A(j12), A(j3), A(jj)) ||
                                !triangle(A(j2), A(j3), A(j23)) || !triangle(A(j1), A(j23), A(jj)))
                                continue;
                            if (a + b + c + j > 8) continue;
                            Scalar u = six_j(j1, j2, j12, j3, jj, j23);
                            Scalar r = evaluate(six_j_racah(A(j1), A(j2), A(j12), A(j3), A(jj), A(j23)));
                            EXPECT_EQ(u, r) << a << b << e << c << j << f;
                            ++checked;
                        }
    EXPECT_GT(checked, 100);
}

TEST(SixJ, ClassicalRacah) {
    const double q0 = 1 + 1e-5;
    Scalar v = six_j(one, one, one, one, one, one);
    double w = classical_racah(1, 1, 1, 1, 1, 1);
    EXPECT_NEAR(w, 1.0 / 6, 1e-12);
    // {1 1 1; 1 1 1} = (-1)^4 sqrt(3 * 3) W
    EXPECT_NEAR(v.eval(q0, 0.5), 3 * w, 1e-4);
    for (auto s : {std::array{1, 1, 2, 1, 1, 0}, std::array{2, 1, 3, 1, 2, 2}, std::array{2, 2, 2, 2, 2, 4}}) {
        Spin j1{s[0]}, j2{s[1]}, j12{s[2]}, j3{s[3]}, j{s[4]}, j23{s[5]};
        double d[6];
        for (int i = 0; i < 6; ++i) d[i] = s[static_cast<std::size_t>(i)] / 2.0;
        double expect = ((s[0] + s[1] + s[3] + s[4]) / 2 % 2 ? -1 : 1) * std::sqrt((2 * d[2] + 1) * (2 * d[5] + 1)) *
                        classical_racah(d[0], d[1], d[2], d[3], d[4], d[5]);
        EXPECT_NEAR(six_j(j1, j2, j12, j3, j, j23).eval(q0, 0.5), expect, 1e-4);
    }
}

TEST(SixJ, TrivialThirdSpin) {
    EXPECT_TRUE(six_j(half, one, three_halves, zero, three_halves, one).is_one());
    EXPECT_TRUE(six_j(one, one, Spin{4}, zero, Spin{4}, one).is_one());
    EXPECT_TRUE(six_j(one, one, Spin{4}, zero, one, one).is_zero());
}

TEST(SixJ, RecouplingIdentityHalves) {
    // |(j1 j2) j12, j3; j m> = sum_{j23} {j1 j2 j12; j3 j j23} |j1, (j2 j3) j23; j m>
    TensorSpace s({half, half, half});
    for (int t12 : {0, 2})
        for (int tj = 1; tj <= 3; tj += 2) {
            Spin j12{t12}, j{tj};
            if (!triangle(Affine::spin(j12), Affine::spin(half), Affine::spin(j))) continue;
            for (int im = 0; im <= tj; ++im) {
                Exponent m = j.m(im);
                for (std::size_t b = 0; b < s.size(); ++b) {
                    auto ms = s.ms(b);
                    if (ms[0] + ms[1] + ms[2] != m) continue;
                    Scalar left = three_j(half, half, j12, ms[0], ms[1], ms[0] + ms[1]) *
                                  three_j(j12, half, j, ms[0] + ms[1], ms[2], m);
                    Scalar right;
                    for (int t23 : {0, 2}) {
                        Spin j23{t23};
                        Scalar u = six_j(half, half, j12, half, j, j23);
                        if (u.is_zero()) continue;
                        right += u * three_j(half, half, j23, ms[1], ms[2], ms[1] + ms[2]) *
                                 three_j(half, j23, j, ms[0], ms[1] + ms[2], m);
                    }
                    EXPECT_TRUE((left - right).is_zero()) << t12 << " " << tj << " " << s.label(b);
                }
            }
        }
}

TEST(MElement, SpinZero) { EXPECT_TRUE(m_element(zero, h(0), h(0)).is_one()); }

TEST(MElement, MatchesBoundarySeries) {
    for (Spin j : {half, one, three_halves}) expect_pass(verify_m_element(j));
}

TEST(MElement, HighestEntryDenominator) {
    // (1 - x^2 q^2) M_{1/2,1/2} is a Laurent polynomial
    Scalar v = m_element(half, h(1), h(1));
    Scalar f = Scalar(Laurent(1) - Laurent::monomial(Mono{2 * kLattice, 2 * kLattice}));
    EXPECT_FALSE(v.rational_part().is_polynomial());
    EXPECT_TRUE((v * f).rational_part().is_polynomial());
}

TEST(Normalization, Xi) {
    EXPECT_TRUE(norm_xi(h(0)).is_one());
    EXPECT_EQ(norm_xi(h(2)), Scalar::zeta(-2) * Scalar::q_pow(h(1)));
}

TEST(LimitThreeJ, HighestTermIsSingle) {
    for (Spin j : {half, one, three_halves}) EXPECT_EQ(limit_three_j_terms(j, j.j(), j.j()).size(), 1u);
}

TEST(LimitThreeJ, ContinuedDeltaCancels) {
    for (Spin j : {half, one})
        for (int a = 0; a < j.dim(); ++a)
            for (int b = 0; b < j.dim(); ++b) {
                auto n = norm_psi_term(j, j.m(a));
                for (const auto& t : limit_three_j_terms(j, j.m(b), j.m(a))) {
                    EXPECT_FALSE(t.j_free_factorials());
                    EXPECT_TRUE((n * t).j_free_factorials());
                }
            }
}

TEST(LimitThreeJ, ReproducesM) {
    for (Spin j : {half, one, three_halves}) expect_pass(verify_m_three_j(j));
}

TEST(LimitThreeJ, PreLimitConverges) {
    const double q0 = 0.7, x0 = 0.3;
    for (Spin j : {half, one})
        for (int a = 0; a < j.dim(); ++a)
            for (int b = 0; b < j.dim(); ++b) {
                Exponent sigma = j.m(a), m1 = j.m(b);
                auto lim = limit_three_j(j, m1, sigma).eval_complex(q0, x0);
                double e20 = std::abs(prelimit_three_j(j, m1, sigma, q0, x0, 20) / lim - 1.0);
                double e40 = std::abs(prelimit_three_j(j, m1, sigma, q0, x0, 40) / lim - 1.0);
                EXPECT_LT(e40, 1e-6) << j.str() << " " << sigma.str() << " " << m1.str();
                EXPECT_LE(e40, e20 + 1e-15);
            }
}

TEST(Continued, ShiftCompatibility) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> small(-2, 2), pick(0, 3);
    for (int n = 0; n < 40; ++n) {
        ContinuedTerm t(Scalar::x_pow(h(small(rng))) * Scalar::q_pow(h(small(rng))));
        int c = 3 + pick(rng);
        // a balanced ratio of continued factorials, a bracket and a linear q-power
        t.fact(Affine{2, Exponent::integer(c)}, 2).fact(Affine{2, Exponent::integer(c - 1 - pick(rng))}, -2);
        t.bracket(Affine{1, h(small(rng))}, 2);
        t.bracket(Affine{2, Exponent::integer(small(rng))}, 1);
        t.q_pow(Affine{small(rng), h(small(rng))});
        t.q_product(Affine::jx(h(1)), Affine::jx(h(1))).q_product(Affine::jx(), Affine{-1, h(-2)});
        t.sign(Affine{4, h(small(rng))});
        Exponent s = h(small(rng));
        EXPECT_EQ(t.offset_j(s).evaluate(), t.evaluate().shift_x(s * 2)) << n;
    }
}

TEST(Continued, IrreducibleFactorialIsRejected) {
    ContinuedTerm t;
    t.fact(Affine::jx(), 2);
    EXPECT_THROW(t.evaluate(), std::domain_error);
    ContinuedTerm u;
    u.q_product(Affine::jx(), Affine::jx());
    EXPECT_THROW(u.evaluate(), std::domain_error);
    ContinuedTerm v;
    v.sign(Affine::jx());
    EXPECT_THROW(v.evaluate(), std::domain_error);
}

TEST(Dictionary, RHighestWeightEntry) {
    Exponent p = h(1);
    EXPECT_EQ(r_from_6j(half, half, p, p, p, p), gnf_r(half, half).at(0, 0));
}

TEST(Dictionary, R) {
    expect_pass(verify_r_dictionary(half, half));
    expect_pass(verify_r_dictionary(half, one));
    expect_pass(verify_r_dictionary(one, half));
}

TEST(Dictionary, DeltaMDecomposition) {
    for (auto [a, b] : {std::pair{half, half}, std::pair{half, one}}) {
        auto cop = coproduct(generators(a), generators(b));
        EXPECT_EQ(delta_m_decomposition(a, b), boundary_series(cop));
    }
}

TEST(Dictionary, F) {
    expect_pass(verify_f_dictionary(half, half));
    expect_pass(verify_f_dictionary(half, one));
}

TEST(Dictionary, FWithSpinZero) {
    auto f = two_leg_operator(one, zero, [&](Exponent a, Exponent b, Exponent c, Exponent d) {
        return f_from_3j6j(one, zero, a, b, c, d);
    });
    EXPECT_EQ(f, GradedOperator::identity(f.space()));
}
