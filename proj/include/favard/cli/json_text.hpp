#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include <json.hpp>

namespace favard::cli {

using Json = nlohmann::ordered_json;

/// %.17g, which round-trips every double; non-finite values become null.
inline std::string format17(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void dump_into(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + Json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump_into(it.value(), indent, depth + 1, out);
      }
      out += nl + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line; tables stay readable.
      bool flat = true;
      for (const auto& v : j)
        if (v.is_structured()) flat = false;
      out += "[";
      if (!flat) out += nl;
      bool first = true;
      for (const auto& v : j) {
        if (!first) {
          out += ",";
          out += flat ? (indent > 0 ? " " : "") : nl;
        }
        first = false;
        if (!flat) out += pad;
        dump_into(v, indent, depth + 1, out);
      }
      if (!flat) out += nl + close_pad;
      out += "]";
      return;
    }
    case Json::value_t::number_float:
      out += format17(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// Deterministic serialization: insertion-ordered keys, 17 significant
/// digits for every float.
inline std::string dump17(const Json& j, int indent = 2) {
  std::string out;
  detail::dump_into(j, indent, 0, out);
  return out;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace favard::cli
