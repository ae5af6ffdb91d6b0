#pragma once

#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace favard {

/// 113-bit binary floating point, used where a formula cancels so badly
/// that double intermediates cannot meet the checks (tiny Christoffel
/// numbers, Newton refinement of computed eigenvalues).
using Quad = boost::multiprecision::cpp_bin_float_quad;

/// 50 and 100 decimal digits, for the banded eigenvector formulas. Forward
/// evaluation of the recursion families at the small eigenvalues of a PBF
/// truncation loses about 2.5 digits per order N (the computed components
/// are swamped by the dominant solution), and WU = I exposes all of it.
using Wide = boost::multiprecision::cpp_bin_float_50;
using Wider = boost::multiprecision::cpp_bin_float_100;

/// Complex arithmetic at the precision of Wide (resolvents, adjugates).
using WideComplex = boost::multiprecision::cpp_complex_50;

/// Newton refinement of a simple root of f, given f and f' through
/// eval(x) -> pair, stopping once the step is below working precision
/// relative to `scale`. The refined value is rejected, and the start value
/// kept, if it drifts more than `max_move` away.
template <class X, class Eval>
X newton_polish(X x0, const Eval& eval, X scale, X max_move, int max_iter = 12) {
  using std::abs;
  X x = x0;
  for (int it = 0; it < max_iter; ++it) {
    const auto [f, df] = eval(x);
    if (df == X(0)) break;
    const X step = f / df;
    x -= step;
    if (abs(x - x0) > max_move) return x0;
    if (abs(step) <= scale * std::numeric_limits<X>::epsilon() * X(4)) break;
  }
  return x;
}

}  // namespace favard
