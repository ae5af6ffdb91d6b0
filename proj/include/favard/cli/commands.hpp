#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "favard/banded.hpp"
#include "favard/bidiagonal.hpp"
#include "favard/cli/report.hpp"
#include "favard/cli/spec_file.hpp"
#include "favard/dense.hpp"
#include "favard/errors.hpp"
#include "favard/jacobi.hpp"
#include "favard/mixed.hpp"
#include "favard/moments.hpp"

namespace favard::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Bad flags or flag values, including an out-of-range N.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string command;
  std::optional<std::size_t> n;      // --N, truncation order
  std::optional<std::size_t> order;  // --n, moment index or moment-matrix order
  std::optional<std::complex<double>> z;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::vector<std::string> suites;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"factorize", "spectrum", "measure", "weyl",
                                                 "moments",   "quadrature", "verify"};
  return names;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"cd", "interlacing", "biorthogonality", "darboux", "gaussborel"};
  return names;
}

/// "re,im" or a bare real number.
inline std::complex<double> parse_complex(const std::string& text) {
  auto number = [&](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v))
      throw UsageError("--z: cannot read \"" + text + "\" as re,im");
    return v;
  };
  const auto comma = text.find(',');
  if (comma == std::string::npos) return {number(text), 0.0};
  return {number(std::string_view(text).substr(0, comma)), number(std::string_view(text).substr(comma + 1))};
}

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline std::size_t resolve_n(const MatrixSpecFile& s, const Options& o, Report& r) {
  const std::size_t n = o.n.value_or(s.n_max);
  if (n > s.n_max)
    throw UsageError("--N = " + std::to_string(n) + " exceeds N_max = " + std::to_string(s.n_max));
  r.options["N"] = n;
  return n;
}

inline double tolerance(const Options& o, Report& r, const std::string& name, double fallback) {
  const double t = o.tol.value_or(fallback);
  r.tolerances[name] = t;
  return t;
}

inline bool mixed(const MatrixSpecFile& s) { return s.kind != MatrixKind::jacobi; }

// The (2,3) overloads fill in the initial-condition matrices for the small
// truncations; Jacobi files take the generic path with 1 x 1 start matrices.
inline TruncationSpectrum<double> spectrum_of(const MatrixSpecFile& s, const BandedMatrix<double>& t, std::size_t n,
                                              double tol) {
  if (mixed(s)) return truncation_spectrum(t, n, s.initial_conditions(), tol);
  return banded_spectrum(t, n, s.nu_matrix(), s.xi_matrix(), tol);
}

inline ChristoffelNumbers<double> christoffel_of(const MatrixSpecFile& s, const TruncationSpectrum<double>& sp) {
  if (mixed(s)) return christoffel_numbers(sp, s.initial_conditions());
  return christoffel_numbers(sp, s.nu_matrix(), s.xi_matrix());
}

inline TruncationMeasure<double> measure_of(const MatrixSpecFile& s, const BandedMatrix<double>& t, std::size_t n) {
  if (mixed(s)) return truncation_measure(t, n, s.initial_conditions());
  return truncation_measure(t, n, s.nu_matrix(), s.xi_matrix());
}

inline void factor_table(Report& r, const std::string& name, const std::vector<double>& v) {
  auto& tab = r.table(name, {"index", "value"});
  for (std::size_t i = 0; i < v.size(); ++i) tab.add({double(i + 1), v[i]});
}

inline void cmd_factorize(const MatrixSpecFile& s, const Options& o, Report& r) {
  const std::size_t n = resolve_n(s, o, r);
  const double tol = tolerance(o, r, "reassembly", 1e-12);
  const DenseMatrix<double> m = s.matrix().truncate(n);
  const auto f = neville_factorize(m, s.upper(), s.lower());
  r.verdict("positive_bidiagonal_factorization", f.positive(), f.failure ? f.failure->message() : "");
  const auto cert = is_oscillatory(m);
  r.verdict("oscillatory", cert.oscillatory, cert.reason);
  if (f.status == FactorizationStatus::degenerate) return;
  const DenseMatrix<double> back = reassemble(f.factors);
  const double err = max_abs(DenseMatrix<double>(back - m)) / std::max(1.0, max_abs(m));
  r.verdict("reassembly", err <= tol, "relative error " + sci(err));
  for (std::size_t k = 0; k < f.factors.lowers.size(); ++k) factor_table(r, "L" + std::to_string(k + 1), f.factors.lowers[k]);
  factor_table(r, "delta", f.factors.delta);
  for (std::size_t j = f.factors.uppers.size(); j-- > 0;) factor_table(r, "U" + std::to_string(j + 1), f.factors.uppers[j]);
}

inline void cmd_spectrum(const MatrixSpecFile& s, const Options& o, Report& r) {
  const std::size_t n = resolve_n(s, o, r);
  auto& tab = r.table("eigenvalues", {"k", "lambda"});
  if (!mixed(s)) {
    const double tol = tolerance(o, r, "mass_crosscheck", 1e-9);
    const auto data = spectral_data(s.jacobi(), n);
    for (std::size_t k = 0; k < data.lambdas.size(); ++k) tab.add({double(k), data.lambdas[k]});
    r.verdict("mass_crosscheck", data.mass_crosscheck <= tol, sci(data.mass_crosscheck));
    return;
  }
  const double tol = tolerance(o, r, "biorthogonality", 1e-7);
  const auto sp = spectrum_of(s, s.matrix(), n, tol);
  for (std::size_t k = 0; k < sp.lambdas.size(); ++k) tab.add({double(k), sp.lambdas[k]});
  const double worst = std::max(sp.uw_residual, sp.wu_residual);
  r.verdict("biorthogonality", worst <= tol, "UW, WU residual " + sci(worst));
}

// Step function of the discrete measure: jumps and running sums in
// increasing order of the support.
inline void cmd_measure(const MatrixSpecFile& s, const Options& o, Report& r) {
  const std::size_t n = resolve_n(s, o, r);
  const double tol = tolerance(o, r, "total_mass", 1e-8);
  if (!mixed(s)) {
    const auto data = spectral_data(s.jacobi(), n);
    auto& tab = r.table("measure", {"lambda", "mass", "christoffel", "cumulative"});
    double acc = 0.0;
    for (std::size_t k = data.lambdas.size(); k-- > 0;) {
      acc += data.masses[k];
      tab.add({data.lambdas[k], data.masses[k], data.christoffel[k], acc});
    }
    r.verdict("total_mass", std::abs(acc - 1.0) <= tol, "sum of masses - 1 = " + sci(acc - 1.0));
    r.verdict("mass_crosscheck", data.mass_crosscheck <= tol, sci(data.mass_crosscheck));
    return;
  }
  const auto t = s.matrix();
  const auto m = measure_of(s, t, n);
  const auto dm = discrete_measure(m.spectrum, m.christoffel, m.nu, m.xi, tol);
  const std::size_t p = m.spectrum.upper, q = m.spectrum.lower;
  std::vector<std::string> cols = {"lambda"};
  for (const char* kind : {"w", "F"})
    for (std::size_t b = 1; b <= p; ++b)
      for (std::size_t a = 1; a <= q; ++a) cols.push_back(std::string(kind) + "_" + std::to_string(b) + "_" + std::to_string(a));
  auto& tab = r.table("measure", cols);
  DenseMatrix<double> acc = DenseMatrix<double>::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
  for (std::size_t k = dm.support.size(); k-- > 0;) {
    const auto& w = dm.weights[k];
    acc += w;
    std::vector<double> row = {dm.support[k]};
    for (const DenseMatrix<double>* mat : {&w, static_cast<const DenseMatrix<double>*>(&acc)})
      for (Eigen::Index b = 0; b < mat->rows(); ++b)
        for (Eigen::Index a = 0; a < mat->cols(); ++a) row.push_back((*mat)(b, a));
    tab.add(std::move(row));
  }
  r.verdict("total_mass", dm.mass_residual <= tol, "total against xi^-1 I nu^-T: " + sci(dm.mass_residual));
}

inline void cmd_weyl(const MatrixSpecFile& s, const Options& o, Report& r) {
  if (!o.z) throw UsageError("weyl needs --z re,im");
  const std::size_t n = resolve_n(s, o, r);
  const double tol = tolerance(o, r, "routes_agree", 1e-7);
  r.options["z"] = Json::array({o.z->real(), o.z->imag()});
  auto& tab = r.table("weyl", {"b", "a", "re", "im"});
  auto& diag = r.table("diagnostics", {"residual", "pole_distance"});
  if (!mixed(s)) {
    const auto jac = s.jacobi();
    const auto data = spectral_data(jac, n);
    const auto w = weyl(jac, n, *o.z, data);
    tab.add({1, 1, w.value.real(), w.value.imag()});
    double dist = std::numeric_limits<double>::infinity();
    for (double l : data.lambdas) dist = std::min(dist, std::abs(*o.z - l));
    diag.add({w.residual, dist});
    r.verdict("routes_agree", w.residual <= tol, sci(w.residual));
    return;
  }
  const auto w = weyl_matrix(measure_of(s, s.matrix(), n), *o.z, tol);
  for (Eigen::Index b = 0; b < w.s.rows(); ++b)
    for (Eigen::Index a = 0; a < w.s.cols(); ++a)
      tab.add({double(b + 1), double(a + 1), w.s(b, a).real(), w.s(b, a).imag()});
  diag.add({w.residual, w.pole_distance});
  r.verdict("routes_agree", w.residual <= tol, sci(w.residual));
}

inline void cmd_moments(const MatrixSpecFile& s, const Options& o, Report& r) {
  if (!o.order) throw UsageError("moments needs --n");
  const std::size_t n = *o.order;
  r.options["n"] = n;
  const auto psi = moment_sequence_as<work_t<double>>(s.matrix(), n + 1, s.nu_matrix(), s.xi_matrix());
  auto& tab = r.table("moments", {"j", "b", "a", "value"});
  for (std::size_t j = 0; j < psi.size(); ++j)
    for (Eigen::Index b = 0; b < psi[j].rows(); ++b)
      for (Eigen::Index a = 0; a < psi[j].cols(); ++a)
        tab.add({double(j), double(b + 1), double(a + 1), static_cast<double>(psi[j](b, a))});
}

inline void cmd_quadrature(const MatrixSpecFile& s, const Options& o, Report& r) {
  const std::size_t n = resolve_n(s, o, r);
  const double tol = tolerance(o, r, "exactness", 1e-8);
  r.tolerances["optimality_threshold"] = 1e-4;
  const auto t = s.matrix();
  const auto table = mixed(s) ? quadrature_table(t, n, s.initial_conditions(), tol)
                              : quadrature_table(t, n, s.nu_matrix(), s.xi_matrix(), tol);
  auto& tab = r.table("quadrature", {"b", "a", "degree", "exact_degree", "exact", "optimal", "residual_next"});
  for (const auto& c : table) {
    const auto next = static_cast<std::size_t>(c.degree + 1);
    const double res_next = next < c.residuals.size() ? c.residuals[next] : std::numeric_limits<double>::quiet_NaN();
    tab.add({double(c.b), double(c.a), double(c.degree), double(c.exact_degree), c.exact ? 1.0 : 0.0,
             c.optimal ? 1.0 : 0.0, res_next});
    r.verdict("exact_" + std::to_string(c.b) + "_" + std::to_string(c.a), c.exact,
              "d = " + std::to_string(c.degree) + ", observed " + std::to_string(c.exact_degree));
  }
}

inline void suite_cd(const MatrixSpecFile& s, const Options& o, Report& r, std::size_t n) {
  const double tol = tolerance(o, r, "cd", 1e-9);
  const auto t = s.matrix();
  const double bound = 1.1 * std::max(1.0, norm_inf(t.truncate(n)));
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> u(-bound, bound);
  auto& tab = r.table("cd", {"x", "y", "residual", "confluent_residual", "kernel"});
  double worst = 0.0, worst_conf = 0.0, worst_scalar = 0.0;
  double min_kernel = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng), y = u(rng);
    const auto g = generalized_cd_check(t, n, s.nu_matrix(), s.xi_matrix(), x, y);
    tab.add({x, y, g.residual, g.confluent_residual, g.kernel});
    worst = std::max(worst, g.residual);
    worst_conf = std::max(worst_conf, g.confluent_residual);
    min_kernel = std::min(min_kernel, g.kernel);
    if (!mixed(s)) worst_scalar = std::max(worst_scalar, cd_check(s.jacobi(), n, x, y).residual);
  }
  r.verdict("cd:residual", worst <= tol, sci(worst));
  r.verdict("cd:confluent_residual", worst_conf <= tol, sci(worst_conf));
  r.verdict("cd:kernel_positive", min_kernel > 0.0, "smallest kernel " + sci(min_kernel));
  if (!mixed(s)) r.verdict("cd:scalar_residual", worst_scalar <= tol, sci(worst_scalar));
}

inline void suite_interlacing(const MatrixSpecFile& s, const Options&, Report& r, std::size_t n) {
  const auto t = s.matrix();
  auto& tab = r.table("interlacing", {"N", "interlaced", "wronskian_positive", "signs_at_zeros", "min_wronskian"});
  std::string strict_detail, wronskian_detail;
  for (std::size_t k = 1; k <= n; ++k) {
    const auto rep = interlacing_check(t, k, 100);
    tab.add({double(k), rep.interlaced ? 1.0 : 0.0, rep.wronskian_positive ? 1.0 : 0.0, rep.signs_at_zeros ? 1.0 : 0.0,
             rep.min_wronskian});
    const std::string where = "N = " + std::to_string(k) + (rep.witness ? ", x = " + sci(*rep.witness) : "") + ": " + rep.violation;
    if ((!rep.interlaced || !rep.signs_at_zeros) && strict_detail.empty()) strict_detail = where;
    if (!rep.wronskian_positive && wronskian_detail.empty()) wronskian_detail = where;
  }
  r.verdict("interlacing:strict", strict_detail.empty(), strict_detail);
  r.verdict("interlacing:wronskian_positive", wronskian_detail.empty(), wronskian_detail);
}

inline void suite_biorthogonality(const MatrixSpecFile& s, const Options& o, Report& r, std::size_t n) {
  const double tol = tolerance(o, r, "biorthogonality", 1e-7);
  const auto t = s.matrix();
  const auto sp = spectrum_of(s, t, n, tol);
  const auto c = christoffel_of(s, sp);
  const auto powers = spectral_power_residuals(sp, 10);
  auto& tab = r.table("biorthogonality_powers", {"n", "residual"});
  double worst_power = 0.0;
  for (std::size_t k = 0; k < powers.size(); ++k) {
    tab.add({double(k), powers[k]});
    worst_power = std::max(worst_power, powers[k]);
  }
  const double uw = std::max(sp.uw_residual, sp.wu_residual);
  const double disc = discrete_biorthogonality(t, sp, c, s.nu_matrix(), s.xi_matrix());
  r.verdict("biorthogonality:uw_wu", uw <= tol, sci(uw));
  r.verdict("biorthogonality:powers", worst_power <= tol, sci(worst_power));
  r.verdict("biorthogonality:discrete", disc <= tol, sci(disc));
}

inline void suite_darboux(const MatrixSpecFile& s, const Options& o, Report& r, std::size_t n) {
  const double tol = tolerance(o, r, "darboux", 1e-9);
  const DenseMatrix<double> m = s.matrix().truncate(n);
  const auto f = neville_factorize(m, s.upper(), s.lower());
  r.verdict("darboux:pbf", f.positive(), f.failure ? f.failure->message() : "");
  if (!f.positive()) return;
  const auto base = dense_charpoly(m);
  auto& tab = r.table("darboux", {"variant", "distance"});
  double worst = 0.0;
  for (int v = -static_cast<int>(s.upper()); v <= static_cast<int>(s.lower()); ++v) {
    if (v == 0) continue;
    const double d = relative_coeff_distance(dense_charpoly(darboux_transform(f.factors, v)), base);
    tab.add({double(v), d});
    worst = std::max(worst, d);
  }
  r.verdict("darboux:isospectral", worst <= tol, sci(worst));
}

inline void suite_gaussborel(const MatrixSpecFile& s, const Options& o, Report& r, std::size_t n) {
  const double tol = tolerance(o, r, "gaussborel", 1e-7);
  const std::size_t order = o.order.value_or(n + 1);
  r.options["n"] = order;
  const auto t = s.matrix();
  const auto g = mixed(s) ? gauss_borel(t, s.initial_conditions(), order, tol)
                          : gauss_borel_as<work_t<double>>(t, s.nu_matrix(), s.xi_matrix(), order, tol);
  r.table("gaussborel", {"order", "residual", "recursion_residual", "recursion_mismatch", "min_pivot"})
      .add({double(order), g.residual, g.recursion_residual, g.recursion_mismatch, g.min_pivot});
  r.verdict("gaussborel:residual", g.residual <= tol, sci(g.residual));
  r.verdict("gaussborel:recursion", g.recursion_mismatch <= tol, sci(g.recursion_mismatch));
}

inline void cmd_verify(const MatrixSpecFile& s, const Options& o, Report& r) {
  std::vector<std::string> suites;
  for (const auto& name : o.suites) {
    if (name.empty() || std::find(suites.begin(), suites.end(), name) != suites.end()) continue;
    if (std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end())
      throw UsageError("unknown suite \"" + name + "\"");
    suites.push_back(name);
  }
  r.options["suite"] = suites;
  r.options["seed"] = o.seed;
  if (suites.empty()) return;
  const std::size_t n = resolve_n(s, o, r);
  for (const auto& name : suites) {
    try {
      if (name == "cd") suite_cd(s, o, r, n);
      else if (name == "interlacing") suite_interlacing(s, o, r, n);
      else if (name == "biorthogonality") suite_biorthogonality(s, o, r, n);
      else if (name == "darboux") suite_darboux(s, o, r, n);
      else suite_gaussborel(s, o, r, n);
    } catch (const PoleProximity&) {
      throw;
    } catch (const NumericalError& e) {
      r.verdict(name + ":computation", false, e.what());
    } catch (const std::domain_error& e) {
      r.verdict(name + ":computation", false, e.what());
    }
  }
}

}  // namespace detail

/// Runs one analysis. Numerical failures become a failing "computation"
/// verdict; usage and input problems throw.
inline Report run_command(const MatrixSpecFile& spec, const Options& o) {
  Report r;
  r.command = o.command;
  r.version = kVersion;
  r.input_digest = hex64(fnv1a64(emit_spec(spec)));
  r.options["command"] = o.command;
  if (o.tol) r.options["tol"] = *o.tol;
  try {
    if (o.command == "factorize") detail::cmd_factorize(spec, o, r);
    else if (o.command == "spectrum") detail::cmd_spectrum(spec, o, r);
    else if (o.command == "measure") detail::cmd_measure(spec, o, r);
    else if (o.command == "weyl") detail::cmd_weyl(spec, o, r);
    else if (o.command == "moments") detail::cmd_moments(spec, o, r);
    else if (o.command == "quadrature") detail::cmd_quadrature(spec, o, r);
    else if (o.command == "verify") detail::cmd_verify(spec, o, r);
    else throw UsageError("unknown command \"" + o.command + "\"");
  } catch (const PoleProximity&) {
    throw;
  } catch (const NumericalError& e) {
    r.payload.clear();
    r.verdict("computation", false, e.what());
  } catch (const std::domain_error& e) {
    r.payload.clear();
    r.verdict("computation", false, e.what());
  }
  return r;
}

/// The whole command line: exit 0 when every verdict passes, 2 when one
/// fails, 1 for usage, input and range errors.
inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral analysis of banded matrices with a positive bidiagonal factorization.", "favard"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string file, format = "json", out_path, z_text;
  std::size_t big_n = 0, small_n = 0;
  double tol = 0.0;
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("spec", file, "matrix description (JSON), - for stdin")->required();
    sub->add_option("--tol", tol, "override the verdict tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", out_path, "write the report here instead of stdout");
  };
  auto with_n = [&](CLI::App* sub) { sub->add_option("--N", big_n, "truncation order, default N_max"); };

  auto* factorize = app.add_subcommand("factorize", "Neville elimination of T^[N] and the oscillation test");
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of T^[N]");
  auto* measure = app.add_subcommand("measure", "discrete measure of T^[N] as a step-function table");
  auto* weyl_cmd = app.add_subcommand("weyl", "Weyl function matrix of T^[N] at z");
  auto* moments = app.add_subcommand("moments", "moments Psi_0 .. Psi_n");
  auto* quadrature = app.add_subcommand("quadrature", "degrees of precision of the truncated measure");
  auto* verify = app.add_subcommand("verify", "identity checks");
  auto* normalize = app.add_subcommand("normalize", "print the canonical form of the matrix description");
  for (auto* sub : {factorize, spectrum, measure, weyl_cmd, moments, quadrature, verify}) common(sub);
  for (auto* sub : {factorize, spectrum, measure, weyl_cmd, quadrature, verify}) with_n(sub);
  normalize->add_option("spec", file, "matrix description (JSON), - for stdin")->required();
  normalize->add_option("--out", out_path, "write here instead of stdout");
  weyl_cmd->add_option("--z", z_text, "evaluation point re,im")->required();
  moments->add_option("--n", small_n, "largest moment index")->required();
  verify->add_option("--n", small_n, "moment-matrix order for gaussborel, default N + 1");
  verify->add_option("--suite", o.suites, "cd, interlacing, biorthogonality, darboux, gaussborel")
      ->delimiter(',')
      ->check(CLI::IsMember({"cd", "interlacing", "biorthogonality", "darboux", "gaussborel", ""}));
  verify->add_option("--seed", o.seed, "seed for the randomized suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  auto fail = [&](const std::string& msg, int code) {
    err << "favard: " << msg << "\n";
    return code;
  };
  auto write = [&](const std::string& text) {
    if (out_path.empty()) {
      out << text;
      return true;
    }
    std::ofstream f(out_path, std::ios::binary);
    f << text;
    return static_cast<bool>(f);
  };

  CLI::App* sub = app.get_subcommands().front();
  o.command = sub->get_name();
  try {
    const MatrixSpecFile spec = parse_input(file);
    if (sub == normalize) return write(emit_spec(spec)) ? 0 : fail("cannot write " + out_path, 1);
    auto given = [&](const char* name) {
      const CLI::Option* opt = sub->get_option_no_throw(name);
      return opt != nullptr && opt->count() > 0;
    };
    if (given("--N")) o.n = big_n;
    if (given("--n")) o.order = small_n;
    if (given("--tol")) o.tol = tol;
    if (sub == weyl_cmd) o.z = parse_complex(z_text);
    const Report r = run_command(spec, o);
    if (!write(emit_report(r, format))) return fail("cannot write " + out_path, 1);
    if (!r.pass())
      for (const auto& v : r.verdicts)
        if (!v.pass) err << "favard: " << o.command << ": " << v.name << " failed" << (v.detail.empty() ? "" : ": " + v.detail) << "\n";
    return r.pass() ? 0 : 2;
  } catch (const SpecError& e) {
    return fail(file + ": " + e.what(), 1);
  } catch (const UsageError& e) {
    return fail(e.what(), 1);
  } catch (const PoleProximity& e) {
    return fail(e.what(), 1);
  } catch (const NumericalError& e) {
    return fail(e.what(), 2);
  } catch (const std::domain_error& e) {
    return fail(e.what(), 2);
  } catch (const std::exception& e) {
    return fail(e.what(), 1);
  }
}

}  // namespace favard::cli
