#pragma once

// JSON and LaTeX forms of operators and reports.

#include <json.hpp>

#include <sstream>
#include <string>

#include "gnf/report.hpp"

namespace gnf {

inline nlohmann::json spins_json(const std::vector<Spin>& spins) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& s : spins) a.push_back(s.str());
    return a;
}

inline nlohmann::json to_json(const GradedOperator& op) {
    const TensorSpace& s = op.space();
    nlohmann::json entries = nlohmann::json::array();
    auto ms = [&](std::size_t b) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& m : s.ms(b)) a.push_back(m.str());
        return a;
    };
    for (std::size_t i = 0; i < op.size(); ++i)
        for (const auto& [j, v] : op.row(i)) entries.push_back({{"row", ms(i)}, {"col", ms(j)}, {"value", to_json(v)}});
    return {{"legs", spins_json(s.legs())}, {"entries", entries}};
}

inline GradedOperator operator_from_json(const nlohmann::json& j) {
    std::vector<Spin> legs;
    for (const auto& l : j.at("legs")) legs.push_back(Spin::parse(l.get<std::string>()));
    TensorSpace s(legs);
    auto index = [&](const nlohmann::json& ms) {
        std::vector<int> d;
        for (std::size_t l = 0; l < legs.size(); ++l) {
            Exponent m = Exponent::parse(ms.at(l).get<std::string>());
            int w = static_cast<int>(2 * m.units() / kLattice);
            d.push_back((legs[l].twice - w) / 2);
        }
        return s.index(d);
    };
    GradedOperator op(s);
    for (const auto& e : j.at("entries")) op.set(index(e.at("row")), index(e.at("col")), scalar_from_json(e.at("value")));
    return op;
}

inline std::string to_latex(const GradedOperator& op) {
    std::ostringstream os;
    os << "\\begin{pmatrix}\n";
    for (std::size_t i = 0; i < op.size(); ++i) {
        for (std::size_t j = 0; j < op.size(); ++j) {
            if (j) os << " & ";
            Scalar v = op.at(i, j);
            os << (v.is_zero() ? "0" : to_text(v, true));
        }
        os << (i + 1 < op.size() ? " \\\\\n" : "\n");
    }
    os << "\\end{pmatrix}";
    return os.str();
}

inline std::string to_text(const GradedOperator& op) {
    std::ostringstream os;
    const TensorSpace& s = op.space();
    for (std::size_t i = 0; i < op.size(); ++i)
        for (const auto& [j, v] : op.row(i)) os << s.label(i) << " <- " << s.label(j) << " : " << to_text(v) << "\n";
    return os.str();
}

inline nlohmann::json to_json(const VerificationReport& r, bool with_timing = false) {
    nlohmann::json j = {{"relation", r.relation},
                        {"spins", spins_json(r.spins)},
                        {"mode", r.mode.str()},
                        {"status", r.passed ? "pass" : "fail"}};
    if (r.mode.numeric) {
        j["q0"] = r.mode.q0;
        j["x0"] = r.mode.x0;
    }
    if (!r.passed) {
        j["check"] = r.check;
        if (r.failing_entry)
            j["failing_entry"] = {{"row", r.failing_entry->row},
                                  {"col", r.failing_entry->col},
                                  {"residual", r.failing_entry->residual}};
        if (r.residual_rank) j["residual_rank"] = *r.residual_rank;
    }
    if (!r.note.empty()) j["note"] = r.note;
    if (with_timing) j["elapsed_ms"] = r.elapsed_ms;
    return j;
}

inline std::string to_text(const VerificationReport& r, bool with_timing = false) {
    std::string s = (r.passed ? "PASS " : "FAIL ") + r.relation + " (";
    for (std::size_t i = 0; i < r.spins.size(); ++i) s += (i ? "," : "") + r.spins[i].str();
    s += ") " + r.mode.str();
    if (!r.passed) {
        s += " [" + r.check + "]";
        if (r.failing_entry)
            s += " at " + r.failing_entry->row + "," + r.failing_entry->col + ": " + r.failing_entry->residual;
        if (r.residual_rank) s += " rank " + std::to_string(*r.residual_rank);
    }
    if (!r.note.empty()) s += " -- " + r.note;
    if (with_timing) {
        std::ostringstream os;
        os.precision(1);
        os << std::fixed << r.elapsed_ms;
        s += " " + os.str() + " ms";
    }
    return s;
}

}  // namespace gnf
