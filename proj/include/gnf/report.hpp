#pragma once

// Outcome of an identity check.

#include <Eigen/Dense>

#include <chrono>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "gnf/repr.hpp"
#include "gnf/scalar_io.hpp"

namespace gnf {

struct FieldMode {
    bool numeric = false;
    double q0 = 0.0, x0 = 0.0;

    static FieldMode exact() { return {}; }
    static FieldMode at(double q0, double x0) { return {true, q0, x0}; }
    std::string str() const { return numeric ? "numeric" : "exact"; }
};

struct FailingEntry {
    std::string row, col;
    std::string residual;
};

struct VerificationReport {
    std::string relation;
    std::vector<Spin> spins;
    FieldMode mode;
    bool passed = true;
    std::string check;  // the sub-check that failed, if any
    std::optional<FailingEntry> failing_entry;
    std::optional<int> residual_rank;
    std::string note;
    double elapsed_ms = 0.0;

    void fail(std::string what, std::optional<FailingEntry> entry = std::nullopt) {
        if (!passed) return;
        passed = false;
        check = std::move(what);
        failing_entry = std::move(entry);
    }
    // Merges a sub-report; the first failure wins.
    void absorb(const VerificationReport& o) {
        if (!o.passed && passed) {
            passed = false;
            check = o.check.empty() ? o.relation : o.check;
            failing_entry = o.failing_entry;
            residual_rank = o.residual_rank;
        }
    }
};

// Runs body(report) and records the wall time.
template <class F>
VerificationReport timed_check(std::string relation, std::vector<Spin> spins, FieldMode mode, F&& body) {
    VerificationReport r;
    r.relation = std::move(relation);
    r.spins = std::move(spins);
    r.mode = mode;
    auto t0 = std::chrono::steady_clock::now();
    body(r);
    r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// Rank of a floating-point matrix by full-pivot LU.
inline int numeric_rank(const std::vector<std::vector<std::complex<double>>>& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
    lu.setThreshold(1e-9);
    return static_cast<int>(lu.rank());
}

// Generic point at which residual ranks are measured.
inline constexpr double kRankQ = 0.6180339887, kRankX = 0.4142135623;

// Compares lhs and rhs; exact mode tests the residual for structural zero, numeric mode
// compares evaluations at (q0, x0) to a relative tolerance.
inline void compare_operators(VerificationReport& rep, const std::string& what, const GradedOperator& lhs,
                              const GradedOperator& rhs, double tol = 1e-9) {
    if (!rep.passed) return;
    const TensorSpace& s = lhs.space();
    if (rep.mode.numeric) {
        auto a = lhs.eval_complex(rep.mode.q0, rep.mode.x0), b = rhs.eval_complex(rep.mode.q0, rep.mode.x0);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < a.size(); ++j) {
                double scale = std::max({1.0, std::abs(a[i][j]), std::abs(b[i][j])});
                if (std::abs(a[i][j] - b[i][j]) > tol * scale) {
                    std::complex<double> d = a[i][j] - b[i][j];
                    rep.fail(what, FailingEntry{s.label(i), s.label(j),
                                                std::to_string(d.real()) + (d.imag() >= 0 ? "+" : "") +
                                                    std::to_string(d.imag()) + "i"});
                    return;
                }
            }
        return;
    }
    GradedOperator res = lhs - rhs;
    if (auto e = res.first_nonzero()) {
        rep.fail(what, FailingEntry{s.label(e->first), s.label(e->second), to_text(res.at(e->first, e->second))});
        try {
            rep.residual_rank = numeric_rank(res.eval_complex(kRankQ, kRankX));
        } catch (const std::exception&) {
            rep.residual_rank.reset();
        }
    }
}

inline void require_zero(VerificationReport& rep, const std::string& what, const GradedOperator& residual) {
    compare_operators(rep, what, residual, GradedOperator(residual.space()));
}

inline VerificationReport check_algebra_set(const GeneratorSet& g, std::string relation, std::vector<Spin> spins,
                                            FieldMode mode = FieldMode::exact()) {
    return timed_check(std::move(relation), std::move(spins), mode, [&](VerificationReport& r) {
        for (const auto& [name, res] : algebra_residuals(g)) require_zero(r, name, res);
    });
}

inline VerificationReport check_algebra(Spin j, FieldMode mode = FieldMode::exact()) {
    return check_algebra_set(generators(j), "ALGEBRA", {j}, mode);
}

}  // namespace gnf
