#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli_support.hpp"

using favard::DenseMatrix;
using favard::cli::Json;
using favard::cli::MatrixKind;
using favard::cli::MatrixSpecFile;

namespace {

using favard::testing::run;
using favard::testing::t1_spec;
using favard::testing::TempDir;
using favard::testing::random_spec;

std::string sample(const char* name) { return std::string(FAVARD_SAMPLES_DIR) + "/" + name; }

}  // namespace

TEST(SpecFile, RoundTripIsByteStable) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 60; ++i) {
    const auto s = random_spec(rng, i % 3);
    const std::string once = favard::cli::emit_spec(s);
    const auto back = favard::cli::parse_spec(once);
    EXPECT_TRUE(back == s) << once;
    EXPECT_EQ(favard::cli::emit_spec(back), once);
  }
}

TEST(SpecFile, ReferenceSampleHonorsNmax) {
  const auto s = favard::cli::parse_input(sample("t1.json"));
  EXPECT_EQ(s.kind, MatrixKind::pbf_factors);
  EXPECT_EQ(s.n_max, 20u);
  EXPECT_EQ(s.rows(), 64u);
  EXPECT_TRUE(s == t1_spec(64, 20));
  const auto t = s.matrix();
  const auto ref = favard::reference_t1<double>(64);
  EXPECT_EQ(t.truncate(20), ref.truncate(20));
}

TEST(SpecFile, MissingStartMatricesMeanIdentity) {
  auto text = favard::cli::emit_spec(t1_spec(8, 3));
  const auto s = favard::cli::parse_spec(text);
  EXPECT_FALSE(s.nu.has_value());
  EXPECT_TRUE(s.initial_conditions().is_identity());
  EXPECT_EQ(s.nu_matrix(), DenseMatrix<>(DenseMatrix<>::Identity(3, 3)));
  EXPECT_EQ(s.xi_matrix(), DenseMatrix<>(DenseMatrix<>::Identity(2, 2)));
  // Partial nu: absent entries are zero.
  const auto p = favard::cli::parse_spec(R"({"kind":"banded23","N_max":0,"nu":{"12":0.5},
    "bands":{"-3":[],"-2":[],"-1":[],"0":[1],"+1":[],"+2":[]}})");
  ASSERT_TRUE(p.nu.has_value());
  EXPECT_EQ(p.initial_conditions().nu12, 0.5);
  EXPECT_EQ(p.initial_conditions().nu11, 0.0);
}

TEST(SpecFile, ZeroEllNamesItsIndex) {
  const std::string text = "{\n  \"kind\": \"jacobi\",\n  \"N_max\": 2,\n  \"m\": [0, 0, 0],\n  \"ell\": [\n    1,\n    0\n  ]\n}\n";
  try {
    favard::cli::parse_spec(text);
    FAIL() << "accepted ell_2 = 0";
  } catch (const favard::cli::SpecError& e) {
    EXPECT_EQ(e.field(), "ell[1]");
    EXPECT_EQ(e.line(), 7u);
    EXPECT_NE(std::string(e.what()).find("ell_2"), std::string::npos) << e.what();
  }
}

TEST(SpecFile, ErrorsCarryFieldAndLine) {
  auto expect = [](const std::string& text, const std::string& field, std::size_t line) {
    try {
      favard::cli::parse_spec(text);
      ADD_FAILURE() << "accepted " << text;
    } catch (const favard::cli::SpecError& e) {
      EXPECT_EQ(e.field(), field) << e.what();
      EXPECT_EQ(e.line(), line) << e.what();
    }
  };
  expect("{\n\"kind\": \"jacobi\",\n\"N_max\": 1,\n\"m\": [0, 0\n", "", 5);
  expect("{\n\"kind\": \"banded23\",\n\"N_max\": 0,\n\"bands\": {\"-3\": [], \"-2\": [], \"-1\": [],\n \"0\": [1, 2],\n \"+1\": [1],"
         "\n \"+2\": []}}",
         "bands.-1", 4);
  expect("{\"kind\": \"pbf-factors\", \"N_max\": 0, \"delta\": [1, 1],\n \"lowers\": [[1], [1], [1]],\n \"uppers\": [[1], [0.5, 2]]}",
         "uppers[1]", 3);
  expect("{\"kind\": \"jacobi\", \"N_max\": 3, \"m\": [0, 0], \"ell\": [1]}", "N_max", 1);
  expect("{\"kind\": \"toeplitz\", \"N_max\": 3}", "kind", 1);
}

TEST(Cli, QuadratureTableOnReference) {
  const auto r = run({"quadrature", sample("t1.json"), "--N", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  const auto& tab = j["payload"]["quadrature"];
  ASSERT_EQ(tab["rows"].size(), 6u);
  std::map<std::pair<int, int>, int> degree;
  for (const auto& row : tab["rows"]) {
    degree[{row[0].get<int>(), row[1].get<int>()}] = row[2].get<int>();
    EXPECT_EQ(row[4].get<int>(), 1);  // exact
    EXPECT_GE(row[3].get<int>(), row[2].get<int>());
  }
  EXPECT_EQ((degree[{1, 1}]), 4);
  EXPECT_EQ((degree[{2, 3}]), 2);
  for (const auto& v : j["verdicts"]) EXPECT_TRUE(v["pass"].get<bool>()) << v["name"];
}

TEST(Cli, SpectrumOfTwoByTwoReference) {
  // T1^{[1]} as the product of the unit bidiagonal corners: leading blocks
  // of lower and upper triangular factors multiply separately.
  DenseMatrix<> l = DenseMatrix<>::Identity(2, 2), u = DenseMatrix<>::Identity(2, 2);
  l(1, 0) = 1.0;
  u(0, 1) = 1.0;
  const DenseMatrix<> full = l * l * l * u * u;
  const double tr = full(0, 0) + full(1, 1);
  const double det = full(0, 0) * full(1, 1) - full(0, 1) * full(1, 0);
  const double disc = std::sqrt(tr * tr - 4 * det);

  const auto r = run({"spectrum", sample("t1.json"), "--N", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = Json::parse(r.out)["payload"]["eigenvalues"]["rows"];
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0][1].get<double>(), (tr + disc) / 2, 1e-12);
  EXPECT_NEAR(rows[1][1].get<double>(), (tr - disc) / 2, 1e-12);
  EXPECT_NEAR(rows[0][1].get<double>(), 7.8730, 5e-5);
  EXPECT_NEAR(rows[1][1].get<double>(), 0.1270, 5e-5);
}

TEST(Cli, FactorizeShiftedJacobi) {
  const auto r = run({"factorize", sample("shifted_jacobi.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  // [[2,1],[1,2]] = [[1,0],[1/2,1]] diag(2, 3/2) [[1,1/2],[0,1]]
  const auto& delta = j["payload"]["delta"]["rows"];
  ASSERT_EQ(delta.size(), 2u);
  EXPECT_DOUBLE_EQ(delta[0][1].get<double>(), 2.0);
  EXPECT_DOUBLE_EQ(delta[1][1].get<double>(), 1.5);
  EXPECT_DOUBLE_EQ(j["payload"]["L1"]["rows"][0][1].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(j["payload"]["U1"]["rows"][0][1].get<double>(), 0.5);
  for (const auto& v : j["verdicts"]) EXPECT_TRUE(v["pass"].get<bool>()) << v["name"];
}

TEST(Cli, VerdictFailureExitsTwo) {
  const TempDir dir;
  // Tridiagonal with a negative entry: no positive factorization.
  const auto path = dir.write("neg.json", R"({"kind":"jacobi","N_max":2,"m":[1,-3,1],"ell":[1,1]})");
  const auto r = run({"factorize", path});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(Json::parse(r.out)["pass"].get<bool>());
  // m = 0 has a zero leading pivot, so the Darboux suite cannot start.
  EXPECT_EQ(run({"verify", sample("chebyshev.json"), "--N", "5", "--suite", "darboux"}).code, 2);
}

TEST(Cli, SameReportTwiceIsByteIdentical) {
  const auto spec = favard::cli::parse_input(sample("t1.json"));
  favard::cli::Options o;
  o.command = "verify";
  o.n = 6;
  o.seed = 3;
  o.suites = {"cd", "biorthogonality"};
  const auto a = favard::cli::run_command(spec, o);
  const auto b = favard::cli::run_command(spec, o);
  EXPECT_EQ(favard::cli::emit_report(a, "json"), favard::cli::emit_report(a, "json"));
  EXPECT_EQ(favard::cli::emit_report(a, "json"), favard::cli::emit_report(b, "json"));
  EXPECT_EQ(favard::cli::emit_report(a, "csv"), favard::cli::emit_report(b, "csv"));
  o.seed = 4;
  EXPECT_NE(favard::cli::emit_report(favard::cli::run_command(spec, o), "json"), favard::cli::emit_report(a, "json"));
}

TEST(Cli, CsvCarriesTheJsonValuesExactly) {
  const auto json = run({"measure", sample("t1.json"), "--N", "6"});
  const auto csv = run({"measure", sample("t1.json"), "--N", "6", "--format", "csv"});
  ASSERT_EQ(json.code, 0);
  ASSERT_EQ(csv.code, 0);
  const auto j = Json::parse(json.out);
  std::istringstream in(csv.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "table,row,column,value");
  std::size_t cells = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string part; std::getline(ss, part, ',');) f.push_back(part);
    ASSERT_EQ(f.size(), 4u) << line;
    if (f[0] == "verdicts") continue;
    const auto& tab = j["payload"][f[0]];
    const auto cols = tab["columns"].get<std::vector<std::string>>();
    const auto c = static_cast<std::size_t>(std::find(cols.begin(), cols.end(), f[2]) - cols.begin());
    ASSERT_LT(c, cols.size());
    const double want = tab["rows"][std::stoul(f[1])][c].get<double>();
    EXPECT_EQ(std::strtod(f[3].c_str(), nullptr), want) << line;
    ++cells;
  }
  EXPECT_EQ(cells, 7u * (1 + 2 * 6));
}

TEST(Cli, EmptySuiteGivesEmptyPayload) {
  const auto r = run({"verify", sample("t1.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_TRUE(j["payload"].empty());
  EXPECT_TRUE(j["verdicts"].empty());
  EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(Cli, DigestIgnoresFormatting) {
  const TempDir dir;
  const auto spec = favard::cli::parse_input(sample("chebyshev.json"));
  const auto compact = dir.write("compact.json", favard::cli::spec_to_json(spec).dump());
  const auto a = Json::parse(run({"spectrum", compact, "--N", "3"}).out);
  const auto b = Json::parse(run({"spectrum", sample("chebyshev.json"), "--N", "3"}).out);
  EXPECT_EQ(a["input_digest"], b["input_digest"]);
  const auto norm = run({"normalize", compact});
  EXPECT_EQ(norm.code, 0);
  EXPECT_EQ(norm.out, favard::cli::emit_spec(spec));
}

// Every malformed input or invocation must exit 1 without a report.
TEST(Cli, MalformedInputsExitOne) {
  const TempDir dir;
  const auto cases = favard::testing::malformed_cases(dir, 2024, 100);
  ASSERT_EQ(cases.size(), 100u);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto r = run(cases[i].args);
    EXPECT_EQ(r.code, 1) << "case " << i << ": " << cases[i].text << "\n" << r.err;
    EXPECT_TRUE(r.out.empty()) << "case " << i;
  }
}
