#pragma once

// Command-line front end: verification suites, dumps, symbol queries and the q-Lame solver.

#include <CLI11.hpp>

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "gnf/lame.hpp"
#include "gnf/symbols.hpp"

namespace gnf::cli {

enum class Exit { pass = 0, fail = 1, usage = 2 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::vector<std::string> split(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

inline std::vector<Spin> parse_spins(const std::string& s) {
    std::vector<Spin> out;
    for (const auto& p : split(s)) {
        try {
            out.push_back(Spin::parse(p));
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
    }
    return out;
}

inline std::vector<Exponent> parse_exponents(const std::string& s) {
    std::vector<Exponent> out;
    for (const auto& p : split(s)) {
        try {
            out.push_back(Exponent::parse(p));
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
    }
    return out;
}

inline std::string spins_str(const std::vector<Spin>& s) {
    std::string r;
    for (std::size_t i = 0; i < s.size(); ++i) r += (i ? "," : "") + s[i].str();
    return r;
}

// ---- checks ----

struct CheckSpec {
    std::size_t arity;
    bool numeric;  // accepts numeric mode
    std::function<VerificationReport(const std::vector<Spin>&, FieldMode)> run;
};

namespace detail {

inline int integer_spin(Spin s) {
    if (!s.integer()) throw UsageError("j must be an integer here, got " + s.str());
    return s.twice / 2;
}

inline VerificationReport transfer_check(Spin j) {
    return timed_check("TRANSFER", {j}, FieldMode::exact(), [&](VerificationReport& rep) {
        if (j.integer()) {
            QDiffOperator t = transfer_and_restrict(j.twice / 2), h = hamiltonian(j.twice / 2);
            QDiffOperator d = t - h;
            if (!d.is_zero()) {
                const auto& [s, a] = *d.terms().begin();
                rep.fail("Tr L restricted to |j,0> = H_j", FailingEntry{"T^" + s.str(), "", to_text(a)});
            }
            return;
        }
        auto m = transfer_matrix(j);
        for (const auto& [s, a] : m.blocks())
            for (std::size_t i = 0; i < a.size(); ++i)
                for (const auto& [k, v] : a.row(i))
                    if (k != i) rep.fail("weight-diagonal", FailingEntry{a.space().label(i), a.space().label(k), to_text(v)});
        rep.note = "half-integer j: no zero-weight vector, transfer matrix left unrestricted";
    });
}

}  // namespace detail

inline const std::map<std::string, CheckSpec>& checks() {
    static const std::map<std::string, CheckSpec> table = [] {
        std::map<std::string, CheckSpec> t;
        for (const auto& [rel, name] : relation_names()) {
            Relation r = rel;
            t[name] = {relation_arity(r), true, [r](const std::vector<Spin>& s, FieldMode m) {
                           return verify_relation(r, s, m);
                       }};
        }
        t["ALGEBRA"] = {1, true, [](const std::vector<Spin>& s, FieldMode m) { return check_algebra(s[0], m); }};
        t["PHI_FORMS"] = {3, true, [](const std::vector<Spin>& s, FieldMode m) {
                              return verify_phi_forms(s[0], s[1], s[2], m);
                          }};
        t["LIMITS"] = {2, false, [](const std::vector<Spin>& s, FieldMode) { return verify_limits(s[0], s[1]); }};
        t["M_ELEMENT"] = {1, true, [](const std::vector<Spin>& s, FieldMode m) { return verify_m_element(s[0], m); }};
        t["M_THREE_J"] = {1, true, [](const std::vector<Spin>& s, FieldMode m) { return verify_m_three_j(s[0], m); }};
        t["R_DICTIONARY"] = {2, true, [](const std::vector<Spin>& s, FieldMode m) {
                                 return verify_r_dictionary(s[0], s[1], m);
                             }};
        t["F_DICTIONARY"] = {2, true, [](const std::vector<Spin>& s, FieldMode m) {
                                 return verify_f_dictionary(s[0], s[1], m);
                             }};
        t["PRELIMIT_3J"] = {1, false, [](const std::vector<Spin>& s, FieldMode) { return verify_prelimit(s[0]); }};
        t["INTERTWINING"] = {1, false, [](const std::vector<Spin>& s, FieldMode) {
                                 return verify_intertwining(detail::integer_spin(s[0]));
                             }};
        t["SPECTRAL"] = {1, false, [](const std::vector<Spin>& s, FieldMode) {
                             return verify_spectral_properties(detail::integer_spin(s[0]), 5);
                         }};
        t["LAX"] = {1, false, [](const std::vector<Spin>& s, FieldMode) { return verify_lax(s[0]); }};
        t["RLL"] = {1, false, [](const std::vector<Spin>& s, FieldMode) { return verify_rll(s[0]); }};
        t["TRANSFER"] = {1, false, [](const std::vector<Spin>& s, FieldMode) { return detail::transfer_check(s[0]); }};
        t["CLASSICAL_LIMIT"] = {1, false, [](const std::vector<Spin>& s, FieldMode) {
                                    return classical_limit_check(detail::integer_spin(s[0]));
                                }};
        return t;
    }();
    return table;
}

inline VerificationReport run_check(const std::string& name, const std::vector<Spin>& spins, FieldMode mode) {
    auto it = checks().find(name);
    if (it == checks().end()) throw UsageError("unknown relation '" + name + "'");
    if (spins.size() != it->second.arity)
        throw UsageError(name + " needs " + std::to_string(it->second.arity) + " spins");
    if (mode.numeric && !it->second.numeric) throw UsageError(name + " is exact only");
    return it->second.run(spins, mode);
}

// ---- suite ----

struct SuiteEntry {
    std::string relation;
    std::vector<Spin> spins;
};

struct SuiteManifest {
    std::string version;
    std::vector<SuiteEntry> entries;
};

inline const SuiteManifest& default_manifest() {
    static const SuiteManifest m = [] {
        const Spin h{1}, o{2};
        SuiteManifest s{"gnf-suite/1", {}};
        auto add = [&](std::string r, std::vector<Spin> sp) { s.entries.push_back({std::move(r), std::move(sp)}); };
        for (int t = 0; t <= 5; ++t) add("ALGEBRA", {Spin{t}});
        for (auto p : {std::pair{h, h}, std::pair{h, o}, std::pair{o, o}}) add("RD_INTERTWINER", {p.first, p.second});
        add("DELTAX_HOMOMORPHISM", {h, h});
        add("DELTAX_HOMOMORPHISM", {h, o});
        for (auto t : std::vector<std::vector<Spin>>{{h, h, h}, {h, h, o}, {h, o, h}, {o, h, h}, {o, o, h}})
            add("GNF", t);
        add("COCYCLE", {h, h, h});
        add("COCYCLE", {h, o, h});
        for (auto p : {std::pair{h, h}, std::pair{h, o}, std::pair{o, o}}) add("COBOUNDARY", {p.first, p.second});
        for (const char* r : {"SHIFTED_COASSOC", "PHI_CONJUGATION", "QUASI_YBE", "QUASITRIANG_LEFT", "QUASITRIANG_RIGHT"})
            add(r, {h, h, h});
        add("PHI_FORMS", {h, h, h});
        add("PHI_FORMS", {h, h, o});
        add("LIMITS", {h, h});
        add("LIMITS", {h, o});
        for (Spin j : {h, o}) add("M_ELEMENT", {j});
        for (Spin j : {h, o}) add("M_THREE_J", {j});
        add("R_DICTIONARY", {h, h});
        add("F_DICTIONARY", {h, h});
        for (Spin j : {h, o}) add("PRELIMIT_3J", {j});
        for (int j = 1; j <= 4; ++j) add("INTERTWINING", {Spin{2 * j}});
        for (int j = 1; j <= 3; ++j) add("SPECTRAL", {Spin{2 * j}});
        for (int t = 0; t <= 3; ++t) add("LAX", {Spin{t}});
        for (Spin j : {h, o}) add("RLL", {j});
        for (int j = 1; j <= 3; ++j) add("TRANSFER", {Spin{2 * j}});
        for (int j = 0; j <= 2; ++j) add("CLASSICAL_LIMIT", {Spin{2 * j}});
        return s;
    }();
    return m;
}

// Runs the manifest on `jobs` workers; sink receives reports in manifest order.
inline bool run_suite(const SuiteManifest& m, FieldMode mode, unsigned jobs,
                      const std::function<void(const VerificationReport&)>& sink) {
    const std::size_t n = m.entries.size();
    std::vector<std::optional<VerificationReport>> done(n);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next++) < n;) {
            const auto& e = m.entries[i];
            VerificationReport r;
            try {
                FieldMode md = checks().at(e.relation).numeric ? mode : FieldMode::exact();
                r = run_check(e.relation, e.spins, md);
            } catch (const std::exception& ex) {
                r.relation = e.relation;
                r.spins = e.spins;
                r.fail(std::string("error: ") + ex.what());
            }
            std::lock_guard<std::mutex> lock(mu);
            done[i] = std::move(r);
            cv.notify_all();
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::max(1u, jobs); ++t) pool.emplace_back(work);
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) {
        VerificationReport r;
        {
            std::unique_lock<std::mutex> lock(mu);
            cv.wait(lock, [&] { return done[i].has_value(); });
            r = *done[i];
        }
        ok = ok && r.passed;
        sink(r);
    }
    for (auto& t : pool) t.join();
    return ok;
}

// ---- dumps ----

inline const std::vector<std::string>& dump_objects() {
    static const std::vector<std::string> o = {"rmatrix", "drinfeld", "twist",  "boundary",
                                               "phi",     "lax",      "hamiltonian", "transfer"};
    return o;
}

template <class T>
std::string render(const T& v, const std::string& format) {
    if (format == "json") return to_json(v).dump();
    if (format == "latex") return to_latex(v);
    return to_text(v);
}

inline std::string dump(const std::string& object, const std::vector<Spin>& s, const std::string& format) {
    auto need = [&](std::size_t n) {
        if (s.size() != n) throw UsageError(object + " needs " + std::to_string(n) + " spins");
    };
    if (object == "rmatrix") return need(2), render(gnf_r(s[0], s[1]), format);
    if (object == "drinfeld") return need(2), render(drinfeld_r(s[0], s[1]), format);
    if (object == "twist") return need(2), render(twist_f(s[0], s[1]).f, format);
    if (object == "boundary") return need(1), render(boundary_m(s[0]), format);
    if (object == "phi") return need(3), render(associator_phi(s[0], s[1], s[2]), format);
    if (object == "lax") return need(1), render(lax_dressing(s[0]), format);
    if (object == "transfer") return need(1), render(transfer_matrix(s[0]), format);
    if (object == "hamiltonian") return need(1), render(hamiltonian(detail::integer_spin(s[0])), format);
    throw UsageError("unknown object '" + object + "'");
}

// ---- application ----

struct Options {
    std::string spins, mode = "exact", format, out, relation, object, symbol, j, m, sigma, method = "closed";
    double q0 = 0.7, x0 = 0.3;
    unsigned jobs = 1;
    bool timing = false;
    int k = 0, kmax = 5;
};

inline FieldMode field_mode(const Options& o) {
    if (o.mode == "exact") return FieldMode::exact();
    if (o.mode != "numeric") throw UsageError("mode must be exact or numeric");
    if (o.q0 <= 0 || o.q0 == 1 || o.x0 <= 0) throw UsageError("numeric mode needs q0 > 0, q0 != 1 and x0 > 0");
    return FieldMode::at(o.q0, o.x0);
}

inline std::string report_line(const VerificationReport& r, const Options& o) {
    return o.format == "json" ? to_json(r, o.timing).dump() : to_text(r, o.timing);
}

inline std::string number_text(std::complex<double> v) {
    std::ostringstream os;
    os << std::setprecision(17) << v.real();
    if (v.imag() != 0) os << (v.imag() < 0 ? " - " : " + ") << std::abs(v.imag()) << "i";
    return os.str();
}

inline nlohmann::json number_json(std::complex<double> v) { return {{"re", v.real()}, {"im", v.imag()}}; }

inline Exit symbol_cmd(const Options& o, std::ostream& out) {
    auto js = parse_spins(o.j);
    auto ms = parse_exponents(o.m);
    Scalar v;
    nlohmann::json meta = {{"symbol", o.symbol}, {"j", spins_json(js)}};
    if (o.symbol == "3j") {
        if (js.size() != 3 || ms.size() != 3) throw UsageError("3j needs --j a,b,c and --m a,b,c");
        v = three_j(js[0], js[1], js[2], ms[0], ms[1], ms[2]);
    } else if (o.symbol == "6j") {
        if (js.size() != 6) throw UsageError("6j needs six spins in --j");
        v = six_j(js[0], js[1], js[2], js[3], js[4], js[5]);
    } else if (o.symbol == "M" || o.symbol == "limit3j") {
        auto sg = parse_exponents(o.sigma);
        if (js.size() != 1 || ms.size() != 1 || sg.size() != 1) throw UsageError(o.symbol + " needs --j, --sigma, --m");
        v = o.symbol == "M" ? m_element(js[0], sg[0], ms[0]) : limit_three_j(js[0], ms[0], sg[0]);
        meta["sigma"] = sg[0].str();
    } else {
        throw UsageError("unknown symbol '" + o.symbol + "' (3j, 6j, M, limit3j)");
    }
    if (!ms.empty()) {
        meta["m"] = nlohmann::json::array();
        for (auto e : ms) meta["m"].push_back(e.str());
    }
    FieldMode mode = field_mode(o);
    std::optional<std::complex<double>> num;
    if (mode.numeric) num = v.eval_complex(mode.q0, mode.x0);
    if (o.format == "json") {
        meta["value"] = to_json(v);
        if (num) meta["numeric"] = number_json(*num), meta["q0"] = mode.q0, meta["x0"] = mode.x0;
        out << meta.dump() << "\n";
    } else if (num) {
        out << number_text(*num) << "\n";
    } else {
        out << to_text(v, o.format == "latex") << "\n";
    }
    return Exit::pass;
}

inline Exit lame_cmd(const std::string& action, const Options& o, std::ostream& out) {
    auto js = parse_spins(o.j);
    if (js.size() != 1) throw UsageError("lame needs a single --j");
    const int j = detail::integer_spin(js[0]);
    if (action == "hamiltonian") {
        out << render(hamiltonian(j), o.format.empty() ? "text" : o.format) << "\n";
        return Exit::pass;
    }
    if (action == "wavefunction") {
        if (o.method != "closed" && o.method != "recursive") throw UsageError("method must be closed or recursive");
        Scalar psi = wavefunction(j, o.k, o.method == "closed" ? WaveMethod::closed : WaveMethod::recursive);
        if (o.format == "json") out << to_json(psi).dump() << "\n";
        else out << to_text(psi, o.format == "latex") << "\n";
        return Exit::pass;
    }
    if (action == "verify") {
        std::vector<VerificationReport> reps;
        if (j >= 1) reps.push_back(verify_intertwining(j));
        reps.push_back(verify_spectral_properties(j, o.kmax));
        reps.push_back(detail::transfer_check(js[0]));
        bool ok = true;
        for (const auto& r : reps) {
            out << report_line(r, o) << "\n";
            ok = ok && r.passed;
        }
        return ok ? Exit::pass : Exit::fail;
    }
    if (action == "classical") {
        bool ok = true;
        nlohmann::json rows = nlohmann::json::array();
        std::ostringstream table;
        table << "  k    z      target        eps=1e-2      eps=1e-3      extrapolated  rel.err   order"
                 "  | even part: rel.err  order\n";
        for (int k : {2, 3})
            for (double z : {0.5, 1.0}) {
                auto r = classical_limit_row(j, k, z);
                ok = ok && classical_row_passes(r);
                char buf[256];
                std::snprintf(buf, sizeof buf,
                              "%3d  %4.1f  %12.6f  %12.6f  %12.6f  %12.6f  %8.2e  %5.2f  |           %8.2e  %5.2f  %s\n", k,
                              z, r.target, r.value[0], r.value[1], r.extrapolated, r.rel_error, r.order,
                              r.sym_rel_error, r.sym_order, classical_row_passes(r) ? "ok" : "FAIL");
                table << buf;
                rows.push_back({{"k", k}, {"z", z}, {"target", r.target}, {"values", r.value},
                                {"extrapolated", r.extrapolated}, {"rel_error", r.rel_error}, {"order", r.order},
                                {"even_rel_error", r.sym_rel_error}, {"even_order", r.sym_order},
                                {"status", classical_row_passes(r) ? "pass" : "fail"}});
            }
        if (o.format == "json")
            out << nlohmann::json{{"j", j}, {"tolerance", kClassicalTolerance}, {"rows", rows}}.dump() << "\n";
        else
            out << "classical limit j=" << j << " (tolerance " << kClassicalTolerance << ", expected order 2)\n"
                << table.str();
        return ok ? Exit::pass : Exit::fail;
    }
    throw UsageError("unknown lame action '" + action + "'");
}

// Lets "--m -1/2,1/2" through: a value starting with '-' and a digit is glued to its option.
inline std::vector<std::string> glue_negative_values(std::vector<std::string> args) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) == 0 && a.find('=') == std::string::npos && i + 1 < args.size() &&
            args[i + 1].size() > 1 && args[i + 1][0] == '-' && std::isdigit(static_cast<unsigned char>(args[i + 1][1]))) {
            out.push_back(a + "=" + args[i + 1]);
            ++i;
        } else {
            out.push_back(a);
        }
    }
    return out;
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Exact verification of the dynamical R-matrix of U_q(sl2) and the q-Lame equation", "gnfcalc"};
    app.require_subcommand(1);
    auto common = [&](CLI::App* c, bool spins) {
        if (spins) c->add_option("--spins", o.spins, "comma-separated spins, e.g. 1/2,1");
        c->add_option("--format", o.format, "json | latex | text")->check(CLI::IsMember({"json", "latex", "text"}));
        c->add_option("--out", o.out, "write output to a file");
    };
    auto numeric = [&](CLI::App* c) {
        c->add_option("--mode", o.mode, "exact | numeric")->check(CLI::IsMember({"exact", "numeric"}));
        c->add_option("--q0", o.q0, "numeric value of q");
        c->add_option("--x0", o.x0, "numeric value of x");
    };

    auto* verify = app.add_subcommand("verify", "check an identity, or the whole suite with 'all'");
    verify->add_option("relation", o.relation, "relation name or 'all'")->required();
    common(verify, true);
    numeric(verify);
    verify->add_option("--jobs", o.jobs, "worker threads for 'all'")->check(CLI::Range(1u, 256u));
    verify->add_flag("--timing", o.timing, "include elapsed_ms in reports");

    auto* dumpc = app.add_subcommand("dump", "serialize an operator");
    dumpc->add_option("object", o.object, "rmatrix | drinfeld | twist | boundary | phi | lax | hamiltonian | transfer")
        ->required();
    common(dumpc, true);

    auto* sym = app.add_subcommand("symbol", "evaluate a 3j, 6j or boundary symbol");
    sym->add_option("kind", o.symbol, "3j | 6j | M | limit3j")->required();
    sym->add_option("--j", o.j, "spins")->required();
    sym->add_option("--m", o.m, "magnetic numbers");
    sym->add_option("--sigma", o.sigma, "sigma for M and limit3j");
    common(sym, false);
    numeric(sym);

    std::string action;
    auto* lame = app.add_subcommand("lame", "q-Lame Hamiltonian, eigenfunctions and checks");
    lame->add_option("action", action, "hamiltonian | wavefunction | verify | classical")->required();
    lame->add_option("--j", o.j, "integer spin")->required();
    lame->add_option("--k", o.k, "spectral parameter");
    lame->add_option("--kmax", o.kmax, "range of k for verify")->check(CLI::NonNegativeNumber);
    lame->add_option("--method", o.method, "closed | recursive");
    common(lame, false);

    auto* limits = app.add_subcommand("limits", "limits of F and R at x -> 0 and infinity");
    common(limits, true);
    limits->add_flag("--timing", o.timing, "include elapsed_ms in reports");

    args = glue_negative_values(std::move(args));
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return static_cast<int>(Exit::usage);
    }

    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out);
        if (!file) {
            err << "error: cannot open " << o.out << "\n";
            return static_cast<int>(Exit::usage);
        }
    }
    std::ostream& sink = o.out.empty() ? out : file;

    try {
        Exit code = Exit::pass;
        if (*verify) {
            FieldMode mode = field_mode(o);
            if (o.format == "latex") throw UsageError("reports are json or text");
            if (o.relation == "all") {
                if (!o.spins.empty()) throw UsageError("'verify all' takes no --spins");
                const auto& m = default_manifest();
                if (o.format == "json") sink << nlohmann::json{{"manifest", m.version}, {"entries", m.entries.size()}}.dump() << "\n";
                else sink << "manifest " << m.version << " (" << m.entries.size() << " checks)\n";
                bool ok = run_suite(m, mode, o.jobs, [&](const VerificationReport& r) {
                    sink << report_line(r, o) << "\n";
                    sink.flush();
                });
                code = ok ? Exit::pass : Exit::fail;
            } else {
                auto r = run_check(o.relation, parse_spins(o.spins), mode);
                sink << report_line(r, o) << "\n";
                code = r.passed ? Exit::pass : Exit::fail;
            }
        } else if (*dumpc) {
            sink << dump(o.object, parse_spins(o.spins), o.format.empty() ? "json" : o.format) << "\n";
        } else if (*sym) {
            code = symbol_cmd(o, sink);
        } else if (*lame) {
            code = lame_cmd(action, o, sink);
        } else if (*limits) {
            auto s = parse_spins(o.spins);
            if (s.size() != 2) throw UsageError("limits needs two spins");
            auto r = verify_limits(s[0], s[1]);
            sink << report_line(r, o) << "\n";
            code = r.passed ? Exit::pass : Exit::fail;
        }
        return static_cast<int>(code);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(Exit::usage);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(Exit::usage);
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(Exit::usage);
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace gnf::cli
