#pragma once

// Text, LaTeX and JSON forms of exact scalars.

#include <json.hpp>

#include <ostream>
#include <sstream>
#include <string>

#include "gnf/scalar.hpp"

namespace gnf {

namespace detail {

inline std::string exp_text(std::int64_t units, bool latex) {
    std::string e = Exponent::units(units).str();
    if (latex) return "{" + e + "}";
    return e.find('/') != std::string::npos || units < 0 ? "(" + e + ")" : e;
}

inline std::string mono_text(const Mono& m, bool latex) {
    std::string s;
    auto part = [&](const char* var, std::int64_t u) {
        if (u == 0) return;
        if (!s.empty()) s += latex ? " " : "*";
        s += var;
        if (u != kLattice) s += "^" + exp_text(u, latex);
    };
    part("q", m.q);
    part("x", m.x);
    return s;
}

inline std::string coeff_text(const mpq_class& c, bool latex) {
    if (latex && c.get_den() != 1) {
        std::string sgn = c < 0 ? "-" : "";
        mpz_class n = abs(c.get_num());
        return sgn + "\\frac{" + n.get_str() + "}{" + c.get_den().get_str() + "}";
    }
    return c.get_str();
}

}  // namespace detail

inline std::string to_text(const Laurent& p, bool latex = false) {
    if (p.is_zero()) return "0";
    std::string s;
    const auto& ts = p.terms();
    for (auto it = ts.rbegin(); it != ts.rend(); ++it) {
        mpq_class c = it->c;
        bool neg = c < 0;
        if (neg) c = -c;
        std::string mono = detail::mono_text(it->m, latex);
        std::string body;
        if (mono.empty()) body = detail::coeff_text(c, latex);
        else if (c == 1) body = mono;
        else body = detail::coeff_text(c, latex) + (latex ? " " : "*") + mono;
        if (s.empty()) s = neg ? "-" + body : body;
        else s += (neg ? " - " : " + ") + body;
    }
    return s;
}

inline std::string to_text(const RationalFunction& r, bool latex = false) {
    std::string n = to_text(r.num(), latex);
    if (r.is_polynomial()) return n;
    std::string d = to_text(r.den_poly(), latex);
    if (latex) return "\\frac{" + n + "}{" + d + "}";
    return "(" + n + ")/(" + d + ")";
}

inline std::string radical_text(const Radical& r, bool latex) {
    switch (r.kind) {
        case Radical::Kind::qdiff: return latex ? "\\sqrt{q-q^{-1}}" : "sqrt(q-q^-1)";
        case Radical::Kind::qint:
            return latex ? "\\sqrt{[" + std::to_string(r.param) + "]}" : "sqrt([" + std::to_string(r.param) + "])";
        case Radical::Kind::xbracket: {
            std::string c = Exponent::units(r.param).str();
            return latex ? "\\sqrt{\\langle " + c + "\\rangle}" : "sqrt(<" + c + ">)";
        }
    }
    return {};
}

inline std::string to_text(const Scalar& s, bool latex = false) {
    if (s.is_zero()) return "0";
    if (s.is_rational()) return to_text(s.rational_part(), latex);
    std::string out;
    for (const auto& [k, r] : s.terms()) {
        std::string t = "(" + to_text(r, latex) + ")";
        if (k.phase != 0)
            t += latex ? " \\zeta_8^{" + std::to_string(k.phase) + "}" : "*zeta8^" + std::to_string(k.phase);
        for (const auto& rad : k.rads) t += (latex ? " " : "*") + radical_text(rad, latex);
        out += out.empty() ? t : " + " + t;
    }
    return out;
}

inline std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << to_text(s); }
inline std::ostream& operator<<(std::ostream& os, const RationalFunction& r) { return os << to_text(r); }

inline nlohmann::json to_json(const Laurent& p) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& t : p.terms())
        a.push_back({{"q", Exponent::units(t.m.q).str()}, {"x", Exponent::units(t.m.x).str()}, {"c", t.c.get_str()}});
    return a;
}

inline Laurent laurent_from_json(const nlohmann::json& a) {
    std::vector<Term> terms;
    for (const auto& t : a) {
        mpq_class c(t.at("c").get<std::string>());
        c.canonicalize();
        terms.push_back({Mono{Exponent::parse(t.at("x").get<std::string>()).units(),
                              Exponent::parse(t.at("q").get<std::string>()).units()},
                         c});
    }
    return Laurent::from_terms(std::move(terms));
}

inline Radical radical_from_string(const std::string& s) {
    if (s == "QDiff") return Radical::qdiff();
    auto open = s.find('('), close = s.rfind(')');
    if (open == std::string::npos || close == std::string::npos) throw std::invalid_argument("bad radical " + s);
    std::string kind = s.substr(0, open), arg = s.substr(open + 1, close - open - 1);
    if (kind == "QInt") return Radical::qint(std::stoll(arg));
    if (kind == "XBracket") return Radical::xbracket(Exponent::parse(arg));
    throw std::invalid_argument("bad radical " + s);
}

inline nlohmann::json to_json(const Scalar& s) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [k, r] : s.terms()) {
        nlohmann::json rads = nlohmann::json::array();
        for (const auto& rad : k.rads) rads.push_back(rad.str());
        nlohmann::json atoms = nlohmann::json::array();
        for (const auto& [at, e] : r.den())
            atoms.push_back({{"order", at.d},
                             {"x", Exponent::units(at.a).str()},
                             {"q", Exponent::units(at.b).str()},
                             {"power", e}});
        terms.push_back({{"phase", k.phase},
                         {"radical", rads},
                         {"num", to_json(r.num())},
                         {"den", to_json(r.den_poly())},
                         {"den_atoms", atoms}});
    }
    return {{"terms", terms}};
}

inline Scalar scalar_from_json(const nlohmann::json& j) {
    std::vector<Scalar> parts;
    for (const auto& t : j.at("terms")) {
        RadKey k;
        k.phase = t.value("phase", 0);
        for (const auto& rad : t.at("radical")) k.rads.push_back(radical_from_string(rad.get<std::string>()));
        std::sort(k.rads.begin(), k.rads.end());
        Laurent num = laurent_from_json(t.at("num"));
        RationalFunction r;
        if (t.contains("den_atoms")) {
            AtomPowers den;
            for (const auto& a : t.at("den_atoms"))
                add_atom(den,
                         Atom{a.at("order").get<std::int64_t>(), Exponent::parse(a.at("x").get<std::string>()).units(),
                              Exponent::parse(a.at("q").get<std::string>()).units()},
                         a.at("power").get<int>());
            r = RationalFunction::fraction(std::move(num), std::move(den));
        } else {
            r = RationalFunction(num) * RationalFunction(laurent_from_json(t.at("den"))).inverse();
        }
        Scalar unit = Scalar::zeta(k.phase);
        for (const auto& rad : k.rads) unit *= Scalar::sqrt_of(rad);
        parts.push_back(unit * r);
    }
    return Scalar::sum(parts);
}

}  // namespace gnf
