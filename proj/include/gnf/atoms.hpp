#pragma once

// Irreducible denominator atoms Phi_d(x^{a/D} q^{b/D}) and exact division by them.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "gnf/laurent.hpp"

namespace gnf {

inline std::int64_t totient(std::int64_t n) {
    std::int64_t r = n;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            while (n % p == 0) n /= p;
            r -= r / p;
        }
    }
    if (n > 1) r -= r / n;
    return r;
}

// Coefficients of the n-th cyclotomic polynomial, lowest degree first.
inline const std::vector<std::int64_t>& cyclotomic(std::int64_t n) {
    thread_local std::map<std::int64_t, std::vector<std::int64_t>> cache;
    if (auto it = cache.find(n); it != cache.end()) return it->second;
    std::vector<std::int64_t> p(n + 1, 0);
    p[0] = -1;
    p[n] = 1;
    for (std::int64_t d = 1; d < n; ++d) {
        if (n % d != 0) continue;
        const auto& f = cyclotomic(d);
        std::size_t df = f.size() - 1;
        std::vector<std::int64_t> quo(p.size() - df, 0);
        for (std::size_t k = p.size(); k-- > df;) {
            std::int64_t c = p[k];
            quo[k - df] = c;
            for (std::size_t i = 0; i <= df; ++i) p[k - df + i] -= c * f[i];
        }
        p = std::move(quo);
    }
    return cache.emplace(n, std::move(p)).first->second;
}

// Phi_d(Y) with Y = x^{a/D} q^{b/D}, gcd(a,b) = 1, a > 0 or (a = 0, b > 0).
struct Atom {
    std::int64_t d = 1;
    std::int64_t a = 0;
    std::int64_t b = 1;
    auto operator<=>(const Atom&) const = default;
};

using AtomPowers = std::vector<std::pair<Atom, int>>;  // sorted by atom, positive powers

inline bool positive_direction(std::int64_t a, std::int64_t b) { return a > 0 || (a == 0 && b > 0); }

// (c, e) with a*e - b*c = 1.
inline std::pair<std::int64_t, std::int64_t> unimodular_partner(std::int64_t a, std::int64_t b) {
    std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        std::int64_t k = old_r / r;
        std::tie(old_r, r) = std::make_pair(r, old_r - k * r);
        std::tie(old_s, s) = std::make_pair(s, old_s - k * s);
        std::tie(old_t, t) = std::make_pair(t, old_t - k * t);
    }
    // a*old_s + b*old_t = old_r = +-1
    if (old_r == -1) { old_s = -old_s; old_t = -old_t; }
    else if (old_r != 1) throw std::logic_error("direction is not primitive");
    return {-old_t, old_s};
}

inline Laurent atom_poly(const Atom& at) {
    const auto& c = cyclotomic(at.d);
    std::vector<Term> terms;
    for (std::size_t k = 0; k < c.size(); ++k)
        if (c[k] != 0)
            terms.push_back({Mono{at.a * static_cast<std::int64_t>(k), at.b * static_cast<std::int64_t>(k)},
                             mpq_class(static_cast<long>(c[k]))});
    return Laurent::from_terms(std::move(terms));
}

inline Laurent atoms_product(const AtomPowers& ap) {
    Laurent r(1);
    for (const auto& [at, e] : ap) {
        Laurent p = atom_poly(at);
        for (int i = 0; i < e; ++i) r *= p;
    }
    return r;
}

namespace detail {

// Exact division of a univariate polynomial (coefficients from degree 0) by a monic integer
// polynomial; returns nullopt if there is a remainder.
inline std::optional<std::vector<mpq_class>> divide_univariate(std::vector<mpq_class> p,
                                                               const std::vector<std::int64_t>& f) {
    std::size_t df = f.size() - 1;
    if (p.size() < f.size()) return std::nullopt;
    std::vector<mpq_class> quo(p.size() - df);
    mpq_class tmp;
    for (std::size_t k = p.size(); k-- > df;) {
        if (p[k] == 0) continue;
        mpq_class c = p[k];
        quo[k - df] = c;
        for (std::size_t i = 0; i <= df; ++i) {
            if (f[i] == 0) continue;
            tmp = c * static_cast<long>(f[i]);
            p[k - df + i] -= tmp;
        }
    }
    for (std::size_t k = 0; k < df; ++k)
        if (p[k] != 0) return std::nullopt;
    return quo;
}

}  // namespace detail

// Exact quotient N / Phi_d(Y), or nullopt if Phi_d(Y) does not divide N.
inline std::optional<Laurent> divide_by_atom(const Laurent& n, const Atom& at) {
    if (n.is_zero()) return Laurent{};
    auto [c, e] = unimodular_partner(at.a, at.b);
    // (i, j) = s*(a,b) + t*(c,e)
    struct Row {
        std::int64_t t, s;
        const mpq_class* v;
    };
    std::vector<Row> rows;
    rows.reserve(n.size());
    for (const auto& term : n.terms()) {
        std::int64_t i = term.m.x, j = term.m.q;
        rows.push_back({at.a * j - at.b * i, i * e - j * c, &term.c});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& l, const Row& r) {
        return l.t != r.t ? l.t < r.t : l.s < r.s;
    });
    const auto& f = cyclotomic(at.d);
    std::vector<Term> out;
    for (std::size_t g = 0; g < rows.size();) {
        std::size_t h = g;
        while (h < rows.size() && rows[h].t == rows[g].t) ++h;
        std::int64_t s0 = rows[g].s, s1 = rows[h - 1].s;
        std::vector<mpq_class> p(static_cast<std::size_t>(s1 - s0 + 1));
        for (std::size_t k = g; k < h; ++k) p[static_cast<std::size_t>(rows[k].s - s0)] = *rows[k].v;
        auto quo = detail::divide_univariate(std::move(p), f);
        if (!quo) return std::nullopt;
        std::int64_t t = rows[g].t;
        for (std::size_t k = 0; k < quo->size(); ++k) {
            if ((*quo)[k] == 0) continue;
            std::int64_t s = s0 + static_cast<std::int64_t>(k);
            out.push_back({Mono{s * at.a + t * c, s * at.b + t * e}, std::move((*quo)[k])});
        }
        g = h;
    }
    return Laurent::from_terms(std::move(out));
}

// Unit (signed monomial) times a product of atoms.
struct AtomFactorization {
    Laurent unit;
    AtomPowers atoms;
};

inline void add_atom(AtomPowers& ap, const Atom& at, int e) {
    auto it = std::lower_bound(ap.begin(), ap.end(), at,
                               [](const std::pair<Atom, int>& p, const Atom& a) { return p.first < a; });
    if (it != ap.end() && it->first == at) {
        it->second += e;
        if (it->second == 0) ap.erase(it);
    } else if (e != 0) {
        ap.insert(it, {at, e});
    }
}

// Factorization of Y - 1 (sign = -1) or Y + 1 (sign = +1) for a monomial Y != 1.
inline AtomFactorization binomial_atoms(Mono y, int sign) {
    if (y.x == 0 && y.q == 0) throw std::invalid_argument("binomial of the unit monomial");
    std::int64_t g = std::gcd(y.x < 0 ? -y.x : y.x, y.q < 0 ? -y.q : y.q);
    std::int64_t a = y.x / g, b = y.q / g;
    AtomFactorization r{Laurent(1), {}};
    if (!positive_direction(a, b)) {
        a = -a;
        b = -b;
        // Y -+ 1 = Z^{-g}(1 -+ Z^g)
        r.unit = Laurent::monomial(Mono{-a * g, -b * g}, sign < 0 ? -1 : 1);
    }
    if (sign < 0) {
        for (std::int64_t e = 1; e <= g; ++e)
            if (g % e == 0) add_atom(r.atoms, Atom{e, a, b}, 1);
    } else {
        for (std::int64_t e = 1; e <= 2 * g; ++e)
            if ((2 * g) % e == 0 && g % e != 0) add_atom(r.atoms, Atom{e, a, b}, 1);
    }
    return r;
}

// Divides out every atom Phi_e(Z) (Z in direction (a,b)) with e drawn from `candidates`,
// repeatedly.  Returns the remaining cofactor.
inline Laurent strip_atoms(Laurent n, std::int64_t a, std::int64_t b,
                           const std::vector<std::int64_t>& candidates, AtomPowers& found) {
    for (std::int64_t e : candidates) {
        Atom at{e, a, b};
        while (!n.is_monomial()) {
            auto quo = divide_by_atom(n, at);
            if (!quo) break;
            n = std::move(*quo);
            add_atom(found, at, 1);
        }
        if (n.is_monomial()) break;
    }
    return n;
}

inline std::vector<std::int64_t> cyclotomic_orders_up_to_degree(std::int64_t deg) {
    std::vector<std::int64_t> r;
    for (std::int64_t e = 1; e <= 2 * deg * deg + 2; ++e)
        if (totient(e) <= deg) r.push_back(e);
    return r;
}

// Factors a polynomial that is a unit times a product of atoms.  The edges of the Newton
// polygon of such a product are parallel to the directions of its atoms, so the candidates
// are read off the polygon.  Returns nullopt for anything else.
inline std::optional<AtomFactorization> factor_into_atoms(Laurent n) {
    if (n.is_zero()) return std::nullopt;
    AtomFactorization r{Laurent(1), {}};
    while (!n.is_monomial()) {
        // convex hull (monotone chain) of the support
        std::vector<Mono> pts;
        for (const auto& t : n.terms()) pts.push_back(t.m);
        std::sort(pts.begin(), pts.end());
        auto cross = [](Mono o, Mono p, Mono s) {
            return (p.x - o.x) * (s.q - o.q) - (p.q - o.q) * (s.x - o.x);
        };
        std::vector<Mono> hull;
        for (int pass = 0; pass < 2; ++pass) {
            std::size_t base = hull.size();
            for (const auto& p : pts) {
                while (hull.size() >= base + 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0)
                    hull.pop_back();
                hull.push_back(p);
            }
            hull.pop_back();
            std::reverse(pts.begin(), pts.end());
        }
        std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> dirs;
        for (std::size_t i = 0; i < hull.size(); ++i) {
            Mono d = hull[(i + 1) % hull.size()] - hull[i];
            if (d.x == 0 && d.q == 0) continue;
            std::int64_t g = std::gcd(d.x < 0 ? -d.x : d.x, d.q < 0 ? -d.q : d.q);
            std::int64_t a = d.x / g, b = d.q / g;
            if (!positive_direction(a, b)) { a = -a; b = -b; }
            auto& len = dirs[{a, b}];
            len = std::max(len, g);
        }
        bool progress = false;
        for (const auto& [dir, len] : dirs) {
            std::size_t before = n.size();
            auto cands = cyclotomic_orders_up_to_degree(len);
            AtomPowers found;
            n = strip_atoms(std::move(n), dir.first, dir.second, cands, found);
            for (const auto& [at, e] : found) add_atom(r.atoms, at, e);
            if (!found.empty() || n.size() != before) progress = true;
            if (n.is_monomial()) break;
        }
        if (!progress) return std::nullopt;
    }
    r.unit = std::move(n);
    return r;
}

}  // namespace gnf
