#pragma once
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace carpet {

struct RootResult {
  double x = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Bisection for a continuous strictly decreasing f on [lo, hi], with boundary
// clamping: f(lo) <= tol returns lo, f(hi) >= -tol returns hi. Plain bisection
// instead of Newton: the residual curves here flatten near brackets and
// Cauchy-Schwarz degeneracy can zero the derivative.
template <class F>
RootResult bisect_decreasing(F&& f, double lo, double hi, double tol,
                             int max_iter = 200) {
  double flo = f(lo);
  if (!std::isfinite(flo))
    throw std::invalid_argument("bisect: residual not finite at left bracket");
  if (flo <= tol) return {lo, flo, 0, true};
  double fhi = f(hi);
  if (!std::isfinite(fhi))
    throw std::invalid_argument("bisect: residual not finite at right bracket");
  if (fhi >= -tol) return {hi, fhi, 0, true};

  double mid = lo, fm = flo;
  for (int it = 1; it <= max_iter; ++it) {
    mid = 0.5 * (lo + hi);
    fm = f(mid);
    if (std::fabs(fm) <= tol) return {mid, fm, it, true};
    if (fm > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::fabs(mid)))
      return {mid, fm, it, std::fabs(fm) <= tol};
  }
  return {mid, fm, max_iter, std::fabs(fm) <= tol};
}

template <class F>
RootResult bisect_increasing(F&& f, double lo, double hi, double tol,
                             int max_iter = 200) {
  auto neg = [&f](double x) { return -f(x); };
  RootResult r = bisect_decreasing(neg, lo, hi, tol, max_iter);
  r.residual = -r.residual;
  return r;
}

// Expands [-start, start] by doubling until g changes sign. `increasing`
// selects the expected monotonicity. Throws when |bound| exceeds cap.
template <class F>
std::pair<double, double> expand_bracket(F&& g, bool increasing,
                                         double start = 1.0, double cap = 1e6,
                                         const std::string& what = "root") {
  // Work with an increasing view of g; we need value(lo) < 0 < value(hi).
  auto value = [&](double x) { return increasing ? g(x) : -g(x); };
  double lo = -start, hi = start;
  double glo = value(lo), ghi = value(hi);
  while (glo >= 0.0) {
    lo *= 2.0;
    if (std::fabs(lo) > cap)
      throw std::runtime_error("bracket failure (" + what +
                               "): no sign change within |x| <= " +
                               std::to_string(cap));
    glo = value(lo);
  }
  while (ghi <= 0.0) {
    hi *= 2.0;
    if (std::fabs(hi) > cap)
      throw std::runtime_error("bracket failure (" + what +
                               "): no sign change within |x| <= " +
                               std::to_string(cap));
    ghi = value(hi);
  }
  return {lo, hi};
}

}  // namespace carpet
