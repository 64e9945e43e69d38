#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "gnf/cli.hpp"

using namespace gnf;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, VerifyGnfPasses) {
    auto r = run({"verify", "GNF", "--spins", "1/2,1/2,1/2"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "PASS GNF (1/2,1/2,1/2) exact\n");
}

TEST(Cli, JsonReportSchema) {
    auto r = run({"verify", "COBOUNDARY", "--spins", "1/2,1", "--format", "json"});
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["relation"], "COBOUNDARY");
    EXPECT_EQ(j["spins"], nlohmann::json::array({"1/2", "1"}));
    EXPECT_EQ(j["mode"], "exact");
    EXPECT_EQ(j["status"], "pass");
    EXPECT_FALSE(j.contains("elapsed_ms"));
    auto t = run({"verify", "COBOUNDARY", "--spins", "1/2,1", "--format", "json", "--timing"});
    EXPECT_TRUE(nlohmann::json::parse(t.out).contains("elapsed_ms"));
}

TEST(Cli, NumericMode) {
    auto r = run({"verify", "GNF", "--spins", "1/2,1/2,1/2", "--mode", "numeric", "--q0", "0.6", "--x0", "0.4",
                  "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["mode"], "numeric");
    EXPECT_DOUBLE_EQ(j["q0"].get<double>(), 0.6);
}

TEST(Cli, SymbolLatexAndNegativeM) {
    auto r = run({"symbol", "3j", "--j", "1/2,1/2,1", "--m", "1/2,1/2,1", "--format", "latex"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "1\n");
    // (1/2 1/2 0; -1/2 1/2 0): the singlet coefficient
    auto s = run({"symbol", "3j", "--j", "1/2,1/2,0", "--m", "-1/2,1/2,0", "--format", "json"});
    ASSERT_EQ(s.code, 0) << s.err;
    auto j = nlohmann::json::parse(s.out);
    EXPECT_EQ(scalar_from_json(j["value"]),
              three_j(Spin{1}, Spin{1}, Spin{0}, Exponent::ratio(-1, 2), Exponent::ratio(1, 2), Exponent()));
    auto n = run({"symbol", "6j", "--j", "1/2,1/2,1,1/2,1/2,1", "--mode", "numeric", "--q0", "0.5", "--x0", "1"});
    EXPECT_EQ(n.code, 0);
    Scalar v = six_j(Spin{1}, Spin{1}, Spin{2}, Spin{1}, Spin{1}, Spin{2});
    EXPECT_NEAR(std::stod(n.out), v.eval(0.5, 1.0), 1e-12);
}

TEST(Cli, LameVerify) {
    auto r = run({"lame", "verify", "--j", "1", "--kmax", "3"});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("PASS SPECTRAL (1)"), std::string::npos);
    auto w = run({"lame", "wavefunction", "--j", "2", "--k", "3", "--format", "json"});
    ASSERT_EQ(w.code, 0);
    EXPECT_EQ(scalar_from_json(nlohmann::json::parse(w.out)), wavefunction(2, 3));
    auto rec = run({"lame", "wavefunction", "--j", "2", "--k", "3", "--format", "json", "--method", "recursive"});
    EXPECT_EQ(scalar_from_json(nlohmann::json::parse(rec.out)), wavefunction(2, 3));
}

TEST(Cli, ClassicalTablePrintsOrders) {
    auto r = run({"lame", "classical", "--j", "0"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("order"), std::string::npos);
    auto j = run({"lame", "classical", "--j", "0", "--format", "json"});
    EXPECT_EQ(nlohmann::json::parse(j.out)["rows"].size(), 4u);
}

TEST(Cli, DumpRmatrixWithSpinZeroIsIdentity) {
    auto r = run({"dump", "rmatrix", "--spins", "0,1"});
    ASSERT_EQ(r.code, 0);
    auto op = operator_from_json(nlohmann::json::parse(r.out));
    EXPECT_EQ(op, GradedOperator::identity(TensorSpace({Spin{0}, Spin{2}})));
}

TEST(Cli, DumpIsDeterministicAndRoundTrips) {
    auto a = run({"dump", "rmatrix", "--spins", "1/2,1/2"});
    auto b = run({"dump", "rmatrix", "--spins", "1/2,1/2"});
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(operator_from_json(nlohmann::json::parse(a.out)), gnf_r(Spin{1}, Spin{1}));
    auto phi = run({"dump", "phi", "--spins", "1/2,1/2,1/2"});
    EXPECT_EQ(operator_from_json(nlohmann::json::parse(phi.out)), associator_phi(Spin{1}, Spin{1}, Spin{1}));
    auto lax = run({"dump", "lax", "--spins", "1"});
    EXPECT_EQ(matrix_qdiff_from_json(nlohmann::json::parse(lax.out)), lax_dressing(Spin{2}));
}

TEST(Cli, DumpHamiltonianSpinZero) {
    auto r = run({"dump", "hamiltonian", "--spins", "0"});
    ASSERT_EQ(r.code, 0);
    QDiffOperator h = qdiff_from_json(nlohmann::json::parse(r.out));
    EXPECT_EQ(h, QDiffOperator::shift(Exponent::integer(1)) + QDiffOperator::shift(Exponent::integer(-1)));
    auto tex = run({"dump", "hamiltonian", "--spins", "1", "--format", "latex"});
    EXPECT_NE(tex.out.find("T^{1}"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"verify", "NOPE", "--spins", "1/2"}).code, 2);
    EXPECT_EQ(run({"verify", "GNF", "--spins", "1/2,1/2"}).code, 2);
    EXPECT_EQ(run({"verify", "GNF", "--spins", "1/3,1/2,1/2"}).code, 2);
    EXPECT_EQ(run({"verify", "GNF", "--spins", "1/2,1/2,1/2", "--mode", "numeric", "--q0", "1"}).code, 2);
    EXPECT_EQ(run({"verify", "GNF", "--spins", "1/2,1/2,1/2", "--mode", "numeric", "--x0", "-2"}).code, 2);
    EXPECT_EQ(run({"verify", "GNF", "--bogus"}).code, 2);
    EXPECT_EQ(run({"dump", "phi", "--spins", "1/2,1/2"}).code, 2);
    EXPECT_EQ(run({"lame", "hamiltonian", "--j", "1/2"}).code, 2);
    EXPECT_EQ(run({"symbol", "9j", "--j", "1"}).code, 2);
    auto r = run({"verify"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("verify"), std::string::npos);
}

TEST(Cli, CheckFailureExitsOne) {
    // the raw finite-difference quotient converges at first order, so the order-2 criterion fails
    auto r = run({"verify", "CLASSICAL_LIMIT", "--spins", "1", "--format", "json"});
    EXPECT_EQ(r.code, 1);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["status"], "fail");
    EXPECT_TRUE(j.contains("failing_entry"));
}

TEST(Cli, OutWritesFile) {
    std::string path = ::testing::TempDir() + "gnfcalc_out.json";
    auto r = run({"dump", "boundary", "--spins", "1/2", "--out", path});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream f(path);
    nlohmann::json j = nlohmann::json::parse(f);
    EXPECT_EQ(operator_from_json(j), boundary_m(Spin{1}));
    std::remove(path.c_str());
}

TEST(Manifest, CoversEveryCheck) {
    std::set<std::string> in_manifest;
    for (const auto& e : cli::default_manifest().entries) in_manifest.insert(e.relation);
    for (const auto& [name, spec] : cli::checks()) EXPECT_TRUE(in_manifest.count(name)) << name;
    for (const auto& [rel, name] : relation_names()) EXPECT_TRUE(in_manifest.count(name)) << name;
    EXPECT_FALSE(cli::default_manifest().version.empty());
}

TEST(Manifest, OutputFollowsManifestOrderForAnyJobCount) {
    auto a = run({"verify", "all", "--format", "json", "--jobs", "1"});
    auto b = run({"verify", "all", "--format", "json", "--jobs", "4"});
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.code, b.code);
    std::istringstream is(a.out);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(nlohmann::json::parse(line)["manifest"], cli::default_manifest().version);
    std::size_t i = 0;
    const auto& entries = cli::default_manifest().entries;
    while (std::getline(is, line)) {
        ASSERT_LT(i, entries.size());
        EXPECT_EQ(nlohmann::json::parse(line)["relation"], entries[i].relation);
        ++i;
    }
    EXPECT_EQ(i, entries.size());
}
