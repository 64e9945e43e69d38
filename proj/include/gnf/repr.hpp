#pragma once

// Spin-j representations of U_q(sl2), tensor spaces and sparse operators over Scalar.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gnf/scalar.hpp"

namespace gnf {

struct Spin {
    int twice = 0;

    static Spin half(int twice_j) {
        if (twice_j < 0) throw std::invalid_argument("negative spin");
        return Spin{twice_j};
    }
    static Spin parse(const std::string& s) {
        Exponent e = Exponent::parse(s);
        if (e.units() < 0 || (2 * e.units()) % kLattice != 0)
            throw std::invalid_argument("spin must be a nonnegative half-integer: " + s);
        return Spin{static_cast<int>(2 * e.units() / kLattice)};
    }
    int dim() const { return twice + 1; }
    Exponent j() const { return Exponent::ratio(twice, 2); }
    bool integer() const { return twice % 2 == 0; }
    // 2m of the i-th basis state (m descending)
    int weight(int i) const { return twice - 2 * i; }
    Exponent m(int i) const { return Exponent::ratio(weight(i), 2); }
    std::string str() const { return j().str(); }
    auto operator<=>(const Spin&) const = default;
};

class TensorSpace {
public:
    TensorSpace() = default;
    explicit TensorSpace(std::vector<Spin> legs) : legs_(std::move(legs)) {
        stride_.assign(legs_.size(), 1);
        for (std::size_t l = legs_.size(); l-- > 1;)
            stride_[l - 1] = stride_[l] * static_cast<std::size_t>(legs_[l].dim());
        size_ = legs_.empty() ? 1 : stride_[0] * static_cast<std::size_t>(legs_[0].dim());
    }

    std::size_t size() const { return size_; }
    std::size_t arity() const { return legs_.size(); }
    const std::vector<Spin>& legs() const { return legs_; }
    const Spin& leg(std::size_t l) const { return legs_[l]; }

    // index of the state on leg l within basis element b
    int digit(std::size_t b, std::size_t l) const {
        return static_cast<int>((b / stride_[l]) % static_cast<std::size_t>(legs_[l].dim()));
    }
    std::vector<int> digits(std::size_t b) const {
        std::vector<int> d(legs_.size());
        for (std::size_t l = 0; l < legs_.size(); ++l) d[l] = digit(b, l);
        return d;
    }
    std::size_t index(const std::vector<int>& d) const {
        std::size_t b = 0;
        for (std::size_t l = 0; l < legs_.size(); ++l) b += static_cast<std::size_t>(d[l]) * stride_[l];
        return b;
    }
    int leg_weight(std::size_t b, std::size_t l) const { return legs_[l].weight(digit(b, l)); }
    int weight(std::size_t b) const {
        int w = 0;
        for (std::size_t l = 0; l < legs_.size(); ++l) w += leg_weight(b, l);
        return w;
    }
    std::vector<Exponent> ms(std::size_t b) const {
        std::vector<Exponent> r;
        for (std::size_t l = 0; l < legs_.size(); ++l) r.push_back(legs_[l].m(digit(b, l)));
        return r;
    }
    std::string label(std::size_t b) const {
        std::string s = "(";
        for (std::size_t l = 0; l < legs_.size(); ++l) s += (l ? "," : "") + legs_[l].m(digit(b, l)).str();
        return s + ")";
    }

    bool operator==(const TensorSpace& o) const { return legs_ == o.legs_; }

private:
    std::vector<Spin> legs_;
    std::vector<std::size_t> stride_;
    std::size_t size_ = 1;
};

inline TensorSpace tensor(const TensorSpace& a, const TensorSpace& b) {
    std::vector<Spin> l = a.legs();
    l.insert(l.end(), b.legs().begin(), b.legs().end());
    return TensorSpace(std::move(l));
}

// Sparse square matrix over Scalar on a tensor space.  The weight change of an entry is
// read off its row and column labels.
class GradedOperator {
public:
    using Row = std::vector<std::pair<std::size_t, Scalar>>;  // sorted by column

    GradedOperator() = default;
    explicit GradedOperator(TensorSpace s) : space_(std::move(s)), rows_(space_.size()) {}

    static GradedOperator identity(const TensorSpace& s) {
        GradedOperator r(s);
        for (std::size_t i = 0; i < s.size(); ++i) r.rows_[i].push_back({i, Scalar(1)});
        return r;
    }
    // diagonal entries f(basis index)
    static GradedOperator diagonal(const TensorSpace& s, const std::function<Scalar(std::size_t)>& f) {
        GradedOperator r(s);
        for (std::size_t i = 0; i < s.size(); ++i) r.set(i, i, f(i));
        return r;
    }

    const TensorSpace& space() const { return space_; }
    std::size_t size() const { return space_.size(); }
    const Row& row(std::size_t i) const { return rows_[i]; }

    Scalar at(std::size_t i, std::size_t j) const {
        const Row& r = rows_[i];
        auto it = std::lower_bound(r.begin(), r.end(), j, [](const auto& e, std::size_t c) { return e.first < c; });
        return it != r.end() && it->first == j ? it->second : Scalar();
    }
    void set(std::size_t i, std::size_t j, Scalar v) {
        Row& r = rows_[i];
        auto it = std::lower_bound(r.begin(), r.end(), j, [](const auto& e, std::size_t c) { return e.first < c; });
        if (it != r.end() && it->first == j) {
            if (v.is_zero()) r.erase(it);
            else it->second = std::move(v);
        } else if (!v.is_zero()) {
            r.insert(it, {j, std::move(v)});
        }
    }

    std::size_t nonzeros() const {
        std::size_t n = 0;
        for (const auto& r : rows_) n += r.size();
        return n;
    }
    bool is_zero() const { return nonzeros() == 0; }
    bool operator==(const GradedOperator& o) const { return space_ == o.space_ && rows_ == o.rows_; }

    // per-leg change of 2m for entry (i, j)
    std::vector<int> weight_change(std::size_t i, std::size_t j) const {
        std::vector<int> d(space_.arity());
        for (std::size_t l = 0; l < d.size(); ++l) d[l] = space_.leg_weight(i, l) - space_.leg_weight(j, l);
        return d;
    }
    int total_weight_change(std::size_t i, std::size_t j) const { return space_.weight(i) - space_.weight(j); }

    GradedOperator operator+(const GradedOperator& o) const { return combine(o, false); }
    GradedOperator operator-(const GradedOperator& o) const { return combine(o, true); }
    GradedOperator& operator+=(const GradedOperator& o) { return *this = *this + o; }
    GradedOperator operator-() const { return map([](const Scalar& s) { return -s; }); }

    GradedOperator operator*(const GradedOperator& o) const {
        check_space(o);
        GradedOperator r(space_);
        std::vector<std::vector<Scalar>> acc(size());
        std::vector<std::size_t> touched;
        for (std::size_t i = 0; i < size(); ++i) {
            touched.clear();
            for (const auto& [k, a] : rows_[i])
                for (const auto& [j, b] : o.rows_[k]) {
                    if (acc[j].empty()) touched.push_back(j);
                    acc[j].push_back(a * b);
                }
            std::sort(touched.begin(), touched.end());
            for (std::size_t j : touched) {
                Scalar v = acc[j].size() == 1 ? std::move(acc[j][0]) : Scalar::sum(acc[j]);
                acc[j].clear();
                if (!v.is_zero()) r.rows_[i].push_back({j, std::move(v)});
            }
        }
        return r;
    }
    GradedOperator& operator*=(const GradedOperator& o) { return *this = *this * o; }

    GradedOperator scaled(const Scalar& c) const {
        return map([&](const Scalar& s) { return c * s; });
    }
    GradedOperator map(const std::function<Scalar(const Scalar&)>& f) const {
        GradedOperator r(space_);
        for (std::size_t i = 0; i < size(); ++i)
            for (const auto& [j, v] : rows_[i]) {
                Scalar w = f(v);
                if (!w.is_zero()) r.rows_[i].push_back({j, std::move(w)});
            }
        return r;
    }
    GradedOperator shift_x(Exponent m) const {
        return map([&](const Scalar& s) { return s.shift_x(m); });
    }
    std::optional<GradedOperator> limit_x(LimitPoint pt) const {
        GradedOperator r(space_);
        for (std::size_t i = 0; i < size(); ++i)
            for (const auto& [j, v] : rows_[i]) {
                auto l = v.limit_x(pt);
                if (!l) return std::nullopt;
                r.set(i, j, std::move(*l));
            }
        return r;
    }
    GradedOperator transpose() const {
        GradedOperator r(space_);
        for (std::size_t i = 0; i < size(); ++i)
            for (const auto& [j, v] : rows_[i]) r.rows_[j].push_back({i, v});
        return r;
    }

    // first nonzero entry in row-major basis order
    std::optional<std::pair<std::size_t, std::size_t>> first_nonzero() const {
        for (std::size_t i = 0; i < size(); ++i)
            if (!rows_[i].empty()) return std::make_pair(i, rows_[i].front().first);
        return std::nullopt;
    }

    std::vector<std::vector<std::complex<double>>> eval_complex(double q0, double x0) const {
        std::vector<std::vector<std::complex<double>>> m(size(), std::vector<std::complex<double>>(size()));
        for (std::size_t i = 0; i < size(); ++i)
            for (const auto& [j, v] : rows_[i]) m[i][j] = v.eval_complex(q0, x0);
        return m;
    }

private:
    void check_space(const GradedOperator& o) const {
        if (!(space_ == o.space_)) throw std::invalid_argument("operators act on different spaces");
    }
    GradedOperator combine(const GradedOperator& o, bool minus) const {
        check_space(o);
        GradedOperator r(space_);
        for (std::size_t i = 0; i < size(); ++i) {
            const Row &a = rows_[i], &b = o.rows_[i];
            std::size_t p = 0, k = 0;
            while (p < a.size() || k < b.size()) {
                if (k == b.size() || (p < a.size() && a[p].first < b[k].first)) {
                    r.rows_[i].push_back(a[p++]);
                } else if (p == a.size() || b[k].first < a[p].first) {
                    r.rows_[i].push_back({b[k].first, minus ? -b[k].second : b[k].second});
                    ++k;
                } else {
                    Scalar v = minus ? a[p].second - b[k].second : a[p].second + b[k].second;
                    if (!v.is_zero()) r.rows_[i].push_back({a[p].first, std::move(v)});
                    ++p;
                    ++k;
                }
            }
        }
        return r;
    }

    TensorSpace space_;
    std::vector<Row> rows_;
};

inline GradedOperator kron(const GradedOperator& a, const GradedOperator& b) {
    TensorSpace s = tensor(a.space(), b.space());
    GradedOperator r(s);
    const std::size_t nb = b.size();
    for (std::size_t i = 0; i < a.size(); ++i)
        for (const auto& [j, va] : a.row(i))
            for (std::size_t k = 0; k < nb; ++k)
                for (const auto& [l, vb] : b.row(k)) r.set(i * nb + k, j * nb + l, va * vb);
    return r;
}

enum class Generator { H, Eplus, Eminus };

inline std::string generator_name(Generator g) {
    switch (g) {
        case Generator::H: return "H";
        case Generator::Eplus: return "E+";
        case Generator::Eminus: return "E-";
    }
    return {};
}

// rho^(j)(g); E+- |j,m> = sqrt([j -+ m][j +- m + 1]) |j,m+-1>
inline GradedOperator rep_generator(Generator g, Spin j) {
    TensorSpace s({j});
    GradedOperator r(s);
    const int tj = j.twice;
    for (int i = 0; i < j.dim(); ++i) {
        const int w = j.weight(i);  // 2m
        switch (g) {
            case Generator::H: r.set(i, i, Scalar(static_cast<long>(w))); break;
            case Generator::Eplus:
                if (i > 0) {
                    // [j-m][j+m+1] with j-m = (tj-w)/2
                    int a = (tj - w) / 2, b = (tj + w) / 2 + 1;
                    r.set(i - 1, i, Scalar::sqrt_qint(a) * Scalar::sqrt_qint(b));
                }
                break;
            case Generator::Eminus:
                if (i < tj) {
                    int a = (tj + w) / 2, b = (tj - w) / 2 + 1;
                    r.set(i + 1, i, Scalar::sqrt_qint(a) * Scalar::sqrt_qint(b));
                }
                break;
        }
    }
    return r;
}

// q^{c H} for a diagonal H given by the weights of the space (lattice exponent c * 2m).
inline GradedOperator q_power_of_weight(const TensorSpace& s, Exponent c) {
    return GradedOperator::diagonal(s, [&](std::size_t b) { return Scalar::q_pow(c * s.weight(b)); });
}

// A triple (H, E+, E-) realising U_q(sl2) on some space; H is diagonal with the total weight.
struct GeneratorSet {
    GradedOperator h, ep, em;

    const TensorSpace& space() const { return h.space(); }
    const GradedOperator& operator[](Generator g) const {
        return g == Generator::H ? h : g == Generator::Eplus ? ep : em;
    }
};

inline GeneratorSet generators(Spin j) {
    return {rep_generator(Generator::H, j), rep_generator(Generator::Eplus, j), rep_generator(Generator::Eminus, j)};
}

// Delta(H) = H x 1 + 1 x H,  Delta(E+-) = E+- x K + K^-1 x E+-,  K = q^{H/2}
inline GeneratorSet coproduct(const GeneratorSet& a, const GeneratorSet& b) {
    auto ia = GradedOperator::identity(a.space()), ib = GradedOperator::identity(b.space());
    auto kb = q_power_of_weight(b.space(), Exponent::ratio(1, 2));
    auto kai = q_power_of_weight(a.space(), Exponent::ratio(-1, 2));
    return {kron(a.h, ib) + kron(ia, b.h), kron(a.ep, kb) + kron(kai, b.ep), kron(a.em, kb) + kron(kai, b.em)};
}

inline GradedOperator coproduct_rep(Generator g, Spin j1, Spin j2) {
    return coproduct(generators(j1), generators(j2))[g];
}

// Places op (acting on legs `legs` of target, in that order) into target, as the identity
// on the remaining legs.  Each (leg, c) in `shifts` substitutes x -> x q^{c H_leg} blockwise;
// shifted legs must not be among `legs`.
inline GradedOperator embed(const GradedOperator& op, const TensorSpace& target, const std::vector<std::size_t>& legs,
                            const std::vector<std::pair<std::size_t, Exponent>>& shifts = {}) {
    const TensorSpace& src = op.space();
    if (src.arity() != legs.size()) throw std::invalid_argument("leg list does not match the operator arity");
    std::vector<bool> used(target.arity(), false);
    for (std::size_t k = 0; k < legs.size(); ++k) {
        if (legs[k] >= target.arity() || used[legs[k]]) throw std::invalid_argument("bad leg list");
        if (!(target.leg(legs[k]) == src.leg(k))) throw std::invalid_argument("spin mismatch on leg");
        used[legs[k]] = true;
    }
    for (const auto& [l, c] : shifts)
        if (l >= target.arity() || used[l]) throw std::invalid_argument("shift leg overlaps the operator legs");

    GradedOperator r(target);
    std::map<std::int64_t, GradedOperator> shifted;  // by shift amount in lattice units
    std::vector<int> d;
    for (std::size_t col = 0; col < target.size(); ++col) {
        Exponent amount;
        for (const auto& [l, c] : shifts) amount += c * target.leg_weight(col, l);
        const GradedOperator* a = &op;
        if (!amount.is_zero()) {
            auto it = shifted.find(amount.units());
            if (it == shifted.end()) it = shifted.emplace(amount.units(), op.shift_x(amount)).first;
            a = &it->second;
        }
        d = target.digits(col);
        std::vector<int> sd(legs.size());
        for (std::size_t k = 0; k < legs.size(); ++k) sd[k] = d[legs[k]];
        std::size_t scol = src.index(sd);
        for (std::size_t srow = 0; srow < src.size(); ++srow) {
            Scalar v = a->at(srow, scol);
            if (v.is_zero()) continue;
            std::vector<int> rd = d;
            for (std::size_t k = 0; k < legs.size(); ++k) rd[legs[k]] = src.digit(srow, k);
            r.set(target.index(rd), col, std::move(v));
        }
    }
    return r;
}

inline GradedOperator act_on_legs(const GradedOperator& op, const TensorSpace& target,
                                  const std::vector<std::size_t>& legs) {
    return embed(op, target, legs);
}

// x -> x q^{coeff H_leg} applied to an operator on legs A of target.
inline GradedOperator cartan_shift(const GradedOperator& op, const TensorSpace& target,
                                   const std::vector<std::size_t>& legs, std::size_t shift_leg, Exponent coeff) {
    return embed(op, target, legs, {{shift_leg, coeff}});
}

// x -> x q^{c H_leg} on an operator that already acts on leg; every nonzero entry must
// preserve the weight of that leg.
inline GradedOperator shift_by_leg_weight(const GradedOperator& op, std::size_t leg, Exponent c) {
    const TensorSpace& s = op.space();
    GradedOperator r(s);
    for (std::size_t i = 0; i < s.size(); ++i)
        for (const auto& [j, v] : op.row(i)) {
            if (s.leg_weight(i, leg) != s.leg_weight(j, leg))
                throw std::invalid_argument("operator changes the weight of the shift leg");
            r.set(i, j, v.shift_x(c * s.leg_weight(j, leg)));
        }
    return r;
}

// Basis index of |j,0> within rho^(j), if any.
inline std::optional<std::size_t> zero_weight_subspace(Spin j) {
    if (!j.integer()) return std::nullopt;
    return static_cast<std::size_t>(j.twice / 2);
}

inline GradedOperator commutator(const GradedOperator& a, const GradedOperator& b) { return a * b - b * a; }

// Residuals of H = diag(2m), [H,E+-] = +-2E+- and [E+,E-] = (K^2 - K^-2)/(q - q^-1) for a generator set.
inline std::vector<std::pair<std::string, GradedOperator>> algebra_residuals(const GeneratorSet& g) {
    const TensorSpace& s = g.space();
    auto kk = GradedOperator::diagonal(s, [&](std::size_t b) {
        // (q^{w} - q^{-w})/(q - q^-1) with w the H-eigenvalue
        return qnum(s.weight(b));
    });
    auto weights = GradedOperator::diagonal(s, [&](std::size_t b) { return Scalar(static_cast<long>(s.weight(b))); });
    return {{"H-weight", g.h - weights},
            {"[H,E+]-2E+", commutator(g.h, g.ep) - g.ep.scaled(2)},
            {"[H,E-]+2E-", commutator(g.h, g.em) + g.em.scaled(2)},
            {"[E+,E-]-[H]", commutator(g.ep, g.em) - kk}};
}

}  // namespace gnf
