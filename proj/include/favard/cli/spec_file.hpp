#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "favard/banded.hpp"
#include "favard/bidiagonal.hpp"
#include "favard/cli/json_text.hpp"
#include "favard/jacobi.hpp"
#include "favard/mixed.hpp"

namespace favard::cli {

enum class MatrixKind { jacobi, banded23, pbf_factors };

inline const char* kind_name(MatrixKind k) {
  switch (k) {
    case MatrixKind::jacobi: return "jacobi";
    case MatrixKind::banded23: return "banded23";
    case MatrixKind::pbf_factors: return "pbf-factors";
  }
  return "?";
}

/// Dense computations scale with the row count; larger files are refused.
inline constexpr std::size_t kMaxRows = 2048;

/// Offsets of the (2,3) bands in file order.
inline constexpr std::array<int, 6> kBandOffsets = {-3, -2, -1, 0, 1, 2};

inline std::string band_key(int d) { return d > 0 ? "+" + std::to_string(d) : std::to_string(d); }

/// A validated matrix description. Only the members of the active kind are
/// populated; nu holds the free entries (nu11, nu12, nu22) of the unit lower
/// triangular start matrix and xi its single entry xi1.
struct MatrixSpecFile {
  MatrixKind kind = MatrixKind::banded23;
  std::size_t n_max = 0;
  std::optional<double> shift;
  std::optional<std::array<double, 3>> nu;
  std::optional<double> xi;

  std::vector<double> m;    // jacobi diagonal m_0 .. m_{L-1}
  std::vector<double> ell;  // jacobi ell_1 .. ell_{L-1}

  std::vector<std::vector<double>> bands;  // banded23, offsets -3 .. +2

  std::vector<std::vector<double>> lowers;  // L1, L2, L3
  std::vector<double> delta;
  std::vector<std::vector<double>> uppers;  // U1, U2 (U1 is the rightmost factor)

  friend bool operator==(const MatrixSpecFile&, const MatrixSpecFile&) = default;

  std::size_t rows() const {
    switch (kind) {
      case MatrixKind::jacobi: return m.size();
      case MatrixKind::banded23: return bands.size() == 6 ? bands[3].size() : 0;
      case MatrixKind::pbf_factors: return delta.size();
    }
    return 0;
  }
  std::size_t upper() const { return kind == MatrixKind::jacobi ? 1 : 2; }
  std::size_t lower() const { return kind == MatrixKind::jacobi ? 1 : 3; }

  InitialConditions<double> initial_conditions() const {
    InitialConditions<double> ic;
    if (nu) {
      ic.nu11 = (*nu)[0];
      ic.nu12 = (*nu)[1];
      ic.nu22 = (*nu)[2];
    }
    if (xi) ic.xi1 = *xi;
    return ic;
  }

  DenseMatrix<double> nu_matrix() const {
    return kind == MatrixKind::jacobi ? DenseMatrix<double>::Identity(1, 1) : initial_conditions().nu();
  }
  DenseMatrix<double> xi_matrix() const {
    return kind == MatrixKind::jacobi ? DenseMatrix<double>::Identity(1, 1) : initial_conditions().xi();
  }

  /// The described factorization, unshifted (pbf-factors only).
  BidiagonalFactorization<double> factors() const {
    if (kind != MatrixKind::pbf_factors) throw std::logic_error("MatrixSpecFile::factors: not a pbf-factors file");
    BidiagonalFactorization<double> f;
    f.lowers = lowers;
    f.delta = delta;
    f.uppers = uppers;
    f.lower_structural.assign(lowers.size(), 0);
    f.upper_structural.assign(uppers.size(), 0);
    f.positive = true;
    return f;
  }

  /// Jacobi view with the shift applied to the diagonal (jacobi only).
  JacobiMatrix<double> jacobi() const {
    if (kind != MatrixKind::jacobi) throw std::logic_error("MatrixSpecFile::jacobi: not a jacobi file");
    std::vector<double> diag = m;
    for (double& v : diag) v += shift.value_or(0.0);
    return JacobiMatrix<double>(std::move(diag), ell);
  }

  /// T + shift I.
  BandedMatrix<double> matrix() const {
    BandedMatrix<double> t;
    switch (kind) {
      case MatrixKind::jacobi: return jacobi().to_banded();
      case MatrixKind::banded23: t = BandedMatrix<double>::from_bands(2, 3, rows(), bands); break;
      case MatrixKind::pbf_factors: t = banded_from_factors(factors()); break;
    }
    return shift ? t.shifted(*shift) : t;
  }
};

/// Malformed or inconsistent input. `field` is a dotted path such as
/// "bands.-1[4]"; `line` is 1-based, 0 when unknown.
class SpecError : public std::runtime_error {
 public:
  SpecError(std::string field, std::size_t line, const std::string& message)
      : std::runtime_error(compose(field, line, message)), field_(std::move(field)), line_(line) {}
  const std::string& field() const { return field_; }
  std::size_t line() const { return line_; }

 private:
  static std::string compose(const std::string& field, std::size_t line, const std::string& message) {
    std::string s = line > 0 ? "line " + std::to_string(line) + ": " : "";
    if (!field.empty()) s += field + ": ";
    return s + message;
  }
  std::string field_;
  std::size_t line_;
};

namespace detail {

/// One step of a field path: an object key or an array index.
struct Step {
  std::string key;
  std::optional<std::size_t> index;
};

class SpecReader {
 public:
  explicit SpecReader(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const std::vector<Step>& path, const std::string& message) const {
    throw SpecError(field_name(path), locate(path), message);
  }

  static std::string field_name(const std::vector<Step>& path) {
    std::string s;
    for (const auto& st : path) {
      if (st.index) {
        s += "[" + std::to_string(*st.index) + "]";
      } else {
        if (!s.empty()) s += ".";
        s += st.key;
      }
    }
    return s;
  }

  std::size_t line_at(std::size_t offset) const {
    offset = std::min(offset, text_.size());
    return 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + static_cast<long>(offset), '\n'));
  }

  /// Best-effort position of a path in the (already syntactically valid) text.
  std::size_t locate(const std::vector<Step>& path) const {
    std::size_t pos = 0;
    for (const auto& st : path) {
      if (st.index) {
        const auto at = element_offset(pos, *st.index);
        if (!at) break;
        pos = *at;
      } else {
        const auto at = text_.find(Json(st.key).dump(), pos);
        if (at == std::string_view::npos) break;
        pos = at;
      }
    }
    return line_at(pos);
  }

 private:
  // Offset of element `index` of the first array opened at or after `from`.
  std::optional<std::size_t> element_offset(std::size_t from, std::size_t index) const {
    std::size_t i = text_.find('[', from);
    if (i == std::string_view::npos) return std::nullopt;
    ++i;
    int depth = 0;
    std::size_t seen = 0;
    bool in_string = false;
    auto skip_ws = [&](std::size_t k) {
      while (k < text_.size() && std::isspace(static_cast<unsigned char>(text_[k]))) ++k;
      return k;
    };
    if (index == 0) return skip_ws(i);
    for (; i < text_.size(); ++i) {
      const char c = text_[i];
      if (in_string) {
        if (c == '\\') ++i;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '[' || c == '{') ++depth;
      else if (c == ']' || c == '}') {
        if (depth == 0) return std::nullopt;
        --depth;
      } else if (c == ',' && depth == 0 && ++seen == index) {
        return skip_ws(i + 1);
      }
    }
    return std::nullopt;
  }

  std::string_view text_;
};

inline double finite_number(const SpecReader& rd, const Json& v, const std::vector<Step>& path) {
  if (!v.is_number()) rd.fail(path, "expected a number, got " + std::string(v.type_name()));
  const double x = v.get<double>();
  if (!std::isfinite(x)) rd.fail(path, "number is not finite");
  return x;
}

inline std::vector<double> number_list(const SpecReader& rd, const Json& v, std::vector<Step> path) {
  if (!v.is_array()) rd.fail(path, "expected an array of numbers, got " + std::string(v.type_name()));
  if (v.size() > kMaxRows) rd.fail(path, "more than " + std::to_string(kMaxRows) + " entries");
  std::vector<double> out;
  out.reserve(v.size());
  path.push_back({"", 0});
  for (std::size_t i = 0; i < v.size(); ++i) {
    path.back().index = i;
    out.push_back(finite_number(rd, v[i], path));
  }
  return out;
}

inline void require_length(const SpecReader& rd, const std::vector<double>& v, std::size_t want,
                           const std::vector<Step>& path) {
  if (v.size() != want)
    rd.fail(path, "has " + std::to_string(v.size()) + " entries, expected " + std::to_string(want));
}

template <class Name>
void require_positive(const SpecReader& rd, const std::vector<double>& v, std::vector<Step> path, Name&& what) {
  path.push_back({"", 0});
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > 0.0) continue;
    path.back().index = i;
    rd.fail(path, what(i) + " must be strictly positive");
  }
}

inline std::vector<std::vector<double>> list_of_lists(const SpecReader& rd, const Json& v, std::size_t count,
                                                      const std::vector<Step>& path) {
  if (!v.is_array()) rd.fail(path, "expected an array of " + std::to_string(count) + " arrays");
  if (v.size() != count)
    rd.fail(path, "has " + std::to_string(v.size()) + " factors, expected " + std::to_string(count));
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < count; ++i) {
    auto p = path;
    p.push_back({"", i});
    out.push_back(number_list(rd, v[i], p));
  }
  return out;
}

inline void reject_unknown(const SpecReader& rd, const Json& obj, std::initializer_list<std::string_view> allowed,
                           const std::vector<Step>& prefix, const std::string& context) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) != allowed.end()) continue;
    auto p = prefix;
    p.push_back({it.key(), std::nullopt});
    rd.fail(p, "unknown key" + context);
  }
}

}  // namespace detail

/// Parses and validates a matrix description.
inline MatrixSpecFile parse_spec(std::string_view text) {
  using detail::Step;
  const detail::SpecReader rd(text);
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    throw SpecError("", rd.line_at(byte), std::string("malformed JSON: ") + e.what());
  } catch (const Json::exception& e) {  // e.g. a number literal out of double range
    throw SpecError("", 0, std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw SpecError("", 1, "top level must be an object");

  auto key = [](std::string k) { return std::vector<Step>{{std::move(k), std::nullopt}}; };
  auto required = [&](const char* k) -> const Json& {
    if (!root.contains(k)) throw SpecError(k, 0, "missing required key");
    return root[k];
  };

  MatrixSpecFile s;
  const Json& kind = required("kind");
  if (!kind.is_string()) rd.fail(key("kind"), "expected a string");
  const auto kname = kind.get<std::string>();
  if (kname == "jacobi") s.kind = MatrixKind::jacobi;
  else if (kname == "banded23") s.kind = MatrixKind::banded23;
  else if (kname == "pbf-factors") s.kind = MatrixKind::pbf_factors;
  else rd.fail(key("kind"), "unknown kind \"" + kname + "\" (expected jacobi, banded23 or pbf-factors)");

  switch (s.kind) {
    case MatrixKind::jacobi:
      detail::reject_unknown(rd, root, {"kind", "N_max", "shift", "m", "ell"}, {}, " for kind jacobi");
      break;
    case MatrixKind::banded23:
      detail::reject_unknown(rd, root, {"kind", "N_max", "shift", "nu", "xi", "bands"}, {}, " for kind banded23");
      break;
    case MatrixKind::pbf_factors:
      detail::reject_unknown(rd, root, {"kind", "N_max", "shift", "nu", "xi", "lowers", "delta", "uppers"}, {},
                             " for kind pbf-factors");
      break;
  }

  const Json& nmax = required("N_max");
  if (!nmax.is_number_integer()) rd.fail(key("N_max"), "expected a non-negative integer");
  if (nmax.is_number_unsigned()) {
    const auto v = nmax.get<std::uint64_t>();
    if (v >= kMaxRows) rd.fail(key("N_max"), "must be below " + std::to_string(kMaxRows));
    s.n_max = static_cast<std::size_t>(v);
  } else {
    rd.fail(key("N_max"), "must be non-negative");
  }

  if (root.contains("shift")) s.shift = detail::finite_number(rd, root["shift"], key("shift"));

  if (root.contains("nu")) {
    const Json& nu = root["nu"];
    if (!nu.is_object()) rd.fail(key("nu"), "expected an object with keys \"11\", \"12\", \"22\"");
    detail::reject_unknown(rd, nu, {"11", "12", "22"}, key("nu"), "");
    std::array<double, 3> v{0.0, 0.0, 0.0};
    const char* names[3] = {"11", "12", "22"};
    for (std::size_t i = 0; i < 3; ++i)
      if (nu.contains(names[i])) v[i] = detail::finite_number(rd, nu[names[i]], {{"nu", std::nullopt}, {names[i], std::nullopt}});
    s.nu = v;
  }
  if (root.contains("xi")) {
    const Json& xi = root["xi"];
    if (!xi.is_object()) rd.fail(key("xi"), "expected an object with key \"1\"");
    detail::reject_unknown(rd, xi, {"1"}, key("xi"), "");
    s.xi = xi.contains("1") ? detail::finite_number(rd, xi["1"], {{"xi", std::nullopt}, {"1", std::nullopt}}) : 0.0;
  }

  std::size_t rows = 0;
  std::vector<Step> size_field;
  switch (s.kind) {
    case MatrixKind::jacobi: {
      s.m = detail::number_list(rd, required("m"), key("m"));
      s.ell = detail::number_list(rd, required("ell"), key("ell"));
      if (s.m.empty()) rd.fail(key("m"), "must not be empty");
      detail::require_length(rd, s.ell, s.m.size() - 1, key("ell"));
      detail::require_positive(rd, s.ell, key("ell"), [](std::size_t i) { return "ell_" + std::to_string(i + 1); });
      rows = s.m.size();
      size_field = key("m");
      break;
    }
    case MatrixKind::banded23: {
      const Json& bands = required("bands");
      if (!bands.is_object()) rd.fail(key("bands"), "expected an object keyed \"-3\" .. \"+2\"");
      detail::reject_unknown(rd, bands, {"-3", "-2", "-1", "0", "+1", "+2"}, key("bands"), " (diagonals are \"-3\" .. \"+2\")");
      auto band_path = [](int d) { return std::vector<Step>{{"bands", std::nullopt}, {band_key(d), std::nullopt}}; };
      for (int d : kBandOffsets) {
        if (!bands.contains(band_key(d))) rd.fail(band_path(d), "missing diagonal");
        s.bands.push_back(detail::number_list(rd, bands[band_key(d)], band_path(d)));
      }
      rows = s.bands[3].size();
      if (rows == 0) rd.fail(band_path(0), "must not be empty");
      for (std::size_t b = 0; b < kBandOffsets.size(); ++b) {
        const int d = kBandOffsets[b];
        const std::size_t ad = static_cast<std::size_t>(d < 0 ? -d : d);
        detail::require_length(rd, s.bands[b], rows > ad ? rows - ad : 0, band_path(d));
      }
      for (int d : {-3, 2}) {
        const auto& band = s.bands[static_cast<std::size_t>(d + 3)];
        for (std::size_t i = 0; i < band.size(); ++i) {
          if (band[i] != 0.0) continue;
          auto p = band_path(d);
          p.push_back({"", i});
          rd.fail(p, "extreme diagonal entries must be nonzero");
        }
      }
      size_field = band_path(0);
      break;
    }
    case MatrixKind::pbf_factors: {
      s.delta = detail::number_list(rd, required("delta"), key("delta"));
      if (s.delta.empty()) rd.fail(key("delta"), "must not be empty");
      rows = s.delta.size();
      s.lowers = detail::list_of_lists(rd, required("lowers"), 3, key("lowers"));
      s.uppers = detail::list_of_lists(rd, required("uppers"), 2, key("uppers"));
      for (const char* name : {"lowers", "uppers"}) {
        const auto& lists = std::string_view(name) == "lowers" ? s.lowers : s.uppers;
        const std::string factor = std::string_view(name) == "lowers" ? "L" : "U";
        for (std::size_t f = 0; f < lists.size(); ++f) {
          std::vector<Step> p = {{name, std::nullopt}, {"", f}};
          detail::require_length(rd, lists[f], rows - 1, p);
          detail::require_positive(rd, lists[f], p, [&](std::size_t i) {
            return factor + std::to_string(f + 1) + " parameter " + std::to_string(i + 1);
          });
        }
      }
      detail::require_positive(rd, s.delta, key("delta"), [](std::size_t i) { return "delta_" + std::to_string(i + 1); });
      size_field = key("delta");
      break;
    }
  }
  if (rows > kMaxRows) rd.fail(size_field, "more than " + std::to_string(kMaxRows) + " rows");
  if (rows < s.n_max + 1)
    rd.fail(key("N_max"), "N_max = " + std::to_string(s.n_max) + " needs at least " + std::to_string(s.n_max + 1) +
                              " rows, the matrix has " + std::to_string(rows));
  return s;
}

/// Reads and parses a file; "-" reads standard input.
inline MatrixSpecFile parse_input(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError("", 0, "cannot read " + path);
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return parse_spec(text);
}

/// Canonical JSON form: fixed key order, 17 significant digits.
inline Json spec_to_json(const MatrixSpecFile& s) {
  Json j = Json::object();
  j["kind"] = kind_name(s.kind);
  j["N_max"] = s.n_max;
  if (s.shift) j["shift"] = *s.shift;
  if (s.nu) j["nu"] = Json{{"11", (*s.nu)[0]}, {"12", (*s.nu)[1]}, {"22", (*s.nu)[2]}};
  if (s.xi) j["xi"] = Json{{"1", *s.xi}};
  auto floats = [](const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
  };
  switch (s.kind) {
    case MatrixKind::jacobi:
      j["m"] = floats(s.m);
      j["ell"] = floats(s.ell);
      break;
    case MatrixKind::banded23: {
      Json b = Json::object();
      for (std::size_t i = 0; i < kBandOffsets.size(); ++i) b[band_key(kBandOffsets[i])] = floats(s.bands[i]);
      j["bands"] = b;
      break;
    }
    case MatrixKind::pbf_factors: {
      Json lo = Json::array(), up = Json::array();
      for (const auto& l : s.lowers) lo.push_back(floats(l));
      for (const auto& u : s.uppers) up.push_back(floats(u));
      j["lowers"] = lo;
      j["delta"] = floats(s.delta);
      j["uppers"] = up;
      break;
    }
  }
  return j;
}

inline std::string emit_spec(const MatrixSpecFile& s) { return dump17(spec_to_json(s)) + "\n"; }

}  // namespace favard::cli
