#pragma once

// Shared by the CLI unit tests and the acceptance runner.

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "favard/cli/commands.hpp"

namespace favard::testing {

namespace fs = std::filesystem;
using favard::cli::Json;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

/// In-process invocation of the command line.
inline Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "favard");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = favard::cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "favard_cli")
      : path_(fs::temp_directory_path() / (tag + "_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }

 private:
  fs::path path_;
};

inline favard::cli::MatrixSpecFile t1_spec(std::size_t rows, std::size_t n_max) {
  favard::cli::MatrixSpecFile s;
  s.kind = favard::cli::MatrixKind::pbf_factors;
  s.n_max = n_max;
  s.lowers.assign(3, std::vector<double>(rows - 1, 1.0));
  s.delta.assign(rows, 1.0);
  s.uppers.assign(2, std::vector<double>(rows - 1, 1.0));
  return s;
}

// A random valid spec of each kind, with awkward doubles.
inline favard::cli::MatrixSpecFile random_spec(std::mt19937_64& rng, int kind) {
  std::uniform_real_distribution<double> u(0.1, 3.0);
  std::uniform_int_distribution<std::size_t> len(1, 12);
  auto vec = [&](std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = u(rng) / 7.0;
    return v;
  };
  favard::cli::MatrixSpecFile s;
  const std::size_t rows = len(rng) + 1;
  s.n_max = std::uniform_int_distribution<std::size_t>(0, rows - 1)(rng);
  if (rng() % 2) s.shift = u(rng) * 1e-3;
  if (kind == 0) {
    s.kind = favard::cli::MatrixKind::jacobi;
    s.m = vec(rows);
    for (double& x : s.m) x -= 0.2;
    s.ell = vec(rows - 1);
    return s;
  }
  if (rng() % 2) s.nu = std::array<double, 3>{u(rng), -u(rng), 1e-300 * u(rng)};
  if (rng() % 2) s.xi = -u(rng) * 1e10;
  if (kind == 1) {
    s.kind = favard::cli::MatrixKind::banded23;
    for (int d : favard::cli::kBandOffsets) {
      const std::size_t ad = static_cast<std::size_t>(d < 0 ? -d : d);
      s.bands.push_back(vec(rows > ad ? rows - ad : 0));
    }
    return s;
  }
  s.kind = favard::cli::MatrixKind::pbf_factors;
  s.delta = vec(rows);
  for (int i = 0; i < 3; ++i) s.lowers.push_back(vec(rows - 1));
  for (int i = 0; i < 2; ++i) s.uppers.push_back(vec(rows - 1));
  return s;
}

struct MalformedCase {
  std::vector<std::string> args;  // argv after the program name
  std::string text;               // contents of the spec file, when one is written
};

/// Seeded malformed spec files and invocations, each of which must exit 1.
/// Mutations cycle through 14 families; the base file rotates over the
/// three kinds so every family meets every kind.
inline std::vector<MalformedCase> malformed_cases(const TempDir& dir, std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  const Json t1j = Json::parse(favard::cli::emit_spec(t1_spec(12, 4)));
  Json jac = {{"kind", "jacobi"}, {"N_max", 10}};
  jac["m"] = std::vector<double>(12, 0.0);
  jac["ell"] = std::vector<double>(11, 1.0);
  const Json band = Json::parse(R"({"kind":"banded23","N_max":2,"bands":{"-3":[1,1],"-2":[1,1,1],"-1":[1,1,1,1],
    "0":[4,4,4,4,4],"+1":[1,1,1,1],"+2":[1,1,1]}})");
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  std::vector<MalformedCase> out;
  for (int i = 0; i < count; ++i) {
    std::vector<std::string> args;
    std::string text;
    // Rotate the base file so each mutation meets every kind.
    const int which = (i / 14 + i) % 3;
    Json j = which == 0 ? t1j : (which == 1 ? jac : band);
    const std::string kind = j["kind"];
    switch (i % 14) {
      case 0: {  // truncated text
        const std::string full = favard::cli::dump17(j);
        text = full.substr(0, 1 + pick(full.size() - 1));
        break;
      }
      case 1: {  // a required key removed
        std::vector<std::string> keys;
        for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
        j.erase(keys[pick(keys.size())]);
        break;
      }
      case 2:  // bad N_max
        j["N_max"] = std::vector<Json>{-1, 2.5, "3", nullptr, 100000, 5000}[pick(6)];
        break;
      case 3:  // N_max beyond the rows
        j["N_max"] = kind == "banded23" ? 5 : 12;
        break;
      case 4: {  // a number replaced by a non-number
        const Json bad = std::vector<Json>{"1", nullptr, true, Json::array(), Json::object()}[pick(5)];
        if (kind == "jacobi") j["ell"][pick(11)] = bad;
        else if (kind == "pbf-factors") j["lowers"][pick(3)][pick(11)] = bad;
        else j["bands"]["0"][pick(5)] = bad;
        break;
      }
      case 5: {  // nonpositive ell or factor parameter
        const double v = std::vector<double>{0.0, -1.0, -1e-300}[pick(3)];
        if (kind == "jacobi") j["ell"][pick(11)] = v;
        else if (kind == "pbf-factors") (pick(2) ? j["uppers"][pick(2)][pick(11)] : j["delta"][pick(12)]) = v;
        else j["bands"]["-3"][pick(2)] = 0.0;  // extreme diagonal must not vanish
        break;
      }
      case 6: {  // a list one entry short
        if (kind == "jacobi") j["m"].erase(0);
        else if (kind == "pbf-factors") j["lowers"][pick(3)].erase(0);
        else j["bands"][favard::cli::band_key(favard::cli::kBandOffsets[pick(6)])].erase(0);
        break;
      }
      case 7:
        j["kind"] = std::vector<Json>{"toeplitz", "Jacobi", "", 3}[pick(4)];
        break;
      case 8:
        j[std::vector<std::string>{"N", "band", "comment", "lower"}[pick(4)]] = 1;
        break;
      case 9:  // wrong container shapes
        if (kind == "jacobi") j["nu"] = Json{{"11", 0.5}};
        else if (kind == "pbf-factors") j["uppers"] = Json::array({j["uppers"][0]});
        else j["bands"] = Json::array();
        break;
      case 10:
        text = std::vector<std::string>{"", "[]", "null", "{\"kind\": \"jacobi\"", "{} {}", "{\"kind\":\"jacobi\",\"N_max\":0,\"m\":[1e999],\"ell\":[]}"}[pick(6)];
        break;
      case 11:  // out-of-range N
        args = {"spectrum", "", "--N", std::to_string(j["N_max"].get<std::size_t>() + 1 + pick(5))};
        break;
      case 12: {  // bad flags
        const std::vector<std::vector<std::string>> bad = {
            {"frobnicate", ""},         {"weyl", ""},  {"weyl", "", "--z", "a,b"},         {"moments", ""},
            {"spectrum", "", "--N", "x"}, {"spectrum", "", "--format", "xml"},          {"verify", "", "--suite", "cd,foo"},
            {"spectrum", "", "--tol", "-1"}, {"spectrum", "", "--bogus"},                {"quadrature", "", "--z", "1,1"}};
        args = bad[pick(bad.size())];
        break;
      }
      default:  // unreadable file
        args = {"spectrum", (fs::temp_directory_path() / "favard_no_such_file.json").string()};
        break;
    }
    if (text.empty() && i % 14 != 10) text = favard::cli::dump17(j);
    const std::string path = dir.write("case" + std::to_string(i) + ".json", text);
    if (args.empty()) args = {"spectrum", path};
    for (auto& a : args)
      if (a.empty()) a = path;
    out.push_back({std::move(args), std::move(text)});
  }
  return out;
}

}  // namespace favard::testing
