#pragma once
#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "carpet/model.hpp"
#include "carpet/moran.hpp"
#include "carpet/rng.hpp"

namespace carpet {

enum class Method { structural, generic, closed_form };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::structural: return "structural";
    case Method::generic: return "generic";
    default: return "closed_form";
  }
}

struct Diagnostics {
  double t_under = std::nan("");
  double t_over = std::nan("");
  int iterations = 0;
  double residual = 0.0;
  double agreement_gap = std::nan("");
  double structural_value = std::nan("");
  double generic_value = std::nan("");
  std::vector<double> local_maxima_t;  // structural sweep local maxima
  std::vector<std::string> warnings;
  std::string hypothesis_verdict;
  bool converged = true;
};

struct DimensionResult {
  double dimension = 0.0;
  double lambda = 0.0;
  double t = 0.0;
  RowDistribution P_star;
  Method method = Method::generic;
  Diagnostics diagnostics;
};

struct DimensionOptions {
  double tol = 1e-12;            // residual tolerance of all root solves
  double agreement_tol = 1e-4;   // structural vs generic warning threshold
  int t_grid = 64;               // Chebyshev sweep density
  double t_refine_tol = 1e-10;   // golden-section width in t
  int starts = 16;               // multi-start count for the generic route
  int max_iterations = 1500;     // ascent iterations per start
  double fd_step = 1e-6;         // central-difference step
  double robust_eps = 0.1;       // eps for the robust hypothesis report
  std::uint64_t seed = 0;        // Dirichlet start seed
  int threads = 0;               // 0 = hardware concurrency
};

namespace detail {

inline double objective(const RandomCarpetSystem& sys, const RowDistribution& p,
                        double tol) {
  return lambda_of(sys, p) + solve_t(sys, p, tol);
}

struct AscentResult {
  double value = -std::numeric_limits<double>::infinity();
  RowDistribution P;
  int iterations = 0;
  bool converged = false;
};

// Exponentiated-gradient ascent on the product of scaled simplices:
// multiplicative update from finite-difference gradients, per-row
// renormalization, step halving on non-improvement.
inline AscentResult ascend(const RandomCarpetSystem& sys, RowDistribution p,
                           const DimensionOptions& opts) {
  const double h = opts.fd_step;
  AscentResult res;
  double f = objective(sys, p, opts.tol);

  std::vector<std::vector<double>> grad(p.weights.size());
  for (std::size_t i = 0; i < p.weights.size(); ++i)
    grad[i].assign(p.weights[i].size(), 0.0);

  double eta = 0.5;
  int small_streak = 0;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    double gmax = 0.0;
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      if (p.weights[i].size() < 2) {
        std::fill(grad[i].begin(), grad[i].end(), 0.0);
        continue;  // single row: weight pinned to p_i
      }
      for (std::size_t j = 0; j < p.weights[i].size(); ++j) {
        const double w = p.weights[i][j];
        double g;
        if (w >= h) {
          p.weights[i][j] = w + h;
          const double fp = objective(sys, p, opts.tol);
          p.weights[i][j] = w - h;
          const double fm = objective(sys, p, opts.tol);
          g = (fp - fm) / (2.0 * h);
        } else {
          p.weights[i][j] = w + h;
          const double fp = objective(sys, p, opts.tol);
          g = (fp - f) / h;
        }
        p.weights[i][j] = w;
        grad[i][j] = g;
        gmax = std::max(gmax, std::fabs(g));
      }
    }
    if (gmax < 1e-14) {
      res.converged = true;
      break;
    }

    bool accepted = false;
    RowDistribution cand = p;
    while (eta >= 1e-14) {
      bool usable = true;
      for (std::size_t i = 0; i < p.weights.size(); ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < p.weights[i].size(); ++j) {
          cand.weights[i][j] =
              p.weights[i][j] * std::exp(eta * grad[i][j] / gmax);
          total += cand.weights[i][j];
        }
        if (!(total > 0.0) || !std::isfinite(total)) {
          usable = false;
          break;
        }
        const double scale = sys.env_probs[i] / total;
        for (double& w : cand.weights[i]) w *= scale;
      }
      if (usable) {
        const double fc = objective(sys, cand, opts.tol);
        if (fc > f) {
          const double gain = fc - f;
          p = cand;
          f = fc;
          eta = std::min(eta * 1.3, 64.0);
          accepted = true;
          small_streak = (gain < 1e-13 * std::max(1.0, std::fabs(f)))
                             ? small_streak + 1
                             : 0;
          break;
        }
      }
      eta *= 0.5;
    }
    if (!accepted || small_streak >= 3) {
      res.converged = true;
      break;
    }
  }

  res.value = f;
  res.P = std::move(p);
  res.iterations = it;
  return res;
}

inline std::vector<RowDistribution> start_points(const RandomCarpetSystem& sys,
                                                 const DimensionOptions& opts) {
  std::vector<RowDistribution> starts;
  starts.push_back(RowDistribution::uniform(sys));

  RowDistribution prop;  // proportional to the rows' width sums
  prop.weights.resize(sys.maps.size());
  for (int i = 0; i < sys.map_count(); ++i) {
    double total = 0.0;
    prop.weights[i].resize(sys.row_count(i));
    for (int j = 0; j < sys.row_count(i); ++j) {
      prop.weights[i][j] = row_sum(sys, i, j, 1.0);
      total += prop.weights[i][j];
    }
    for (double& w : prop.weights[i]) w *= sys.env_probs[i] / total;
  }
  starts.push_back(std::move(prop));

  for (int s = 2; s < opts.starts; ++s) {
    Rng rng(opts.seed, static_cast<std::uint64_t>(s));
    RowDistribution d;
    d.weights.resize(sys.maps.size());
    for (int i = 0; i < sys.map_count(); ++i) {
      d.weights[i].resize(sys.row_count(i));
      double total = 0.0;
      for (double& w : d.weights[i]) {
        w = -std::log(1.0 - rng.uniform01());  // Dirichlet(1,...,1)
        total += w;
      }
      for (double& w : d.weights[i]) w *= sys.env_probs[i] / total;
    }
    starts.push_back(std::move(d));
  }
  if (static_cast<int>(starts.size()) > opts.starts)
    starts.resize(std::max(1, opts.starts));
  return starts;
}

inline int thread_count(const DimensionOptions& opts) {
  if (opts.threads > 0) return opts.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace detail

// Sweeps the Lemma-2 family over t: solve lambda(t) on a Chebyshev grid in
// (t_under, t_over), then golden-section refine the best h(t) = lambda(t)+t.
// Degenerate bracket (t constant over all P) falls back to the fixed-t
// entropy maximization.
inline DimensionResult maximize_structural(const RandomCarpetSystem& sys,
                                           const DimensionOptions& opts = {}) {
  DimensionResult res;
  res.method = Method::structural;
  Diagnostics& diag = res.diagnostics;

  const TBounds tb = t_bounds(sys, opts.tol);
  diag.t_under = tb.t_under;
  diag.t_over = tb.t_over;

  if (tb.t_over - tb.t_under <= opts.tol) {
    const VerticalSolve vs = solve_vertical_lambda(sys, opts.tol);
    res.lambda = vs.lambda;
    res.t = tb.t_under;
    res.dimension = res.lambda + res.t;
    res.P_star = vs.P;
    diag.residual = vs.residual;
    diag.warnings.push_back("degenerate t bracket: fixed-t entropy maximization");
    return res;
  }

  const double range = tb.t_over - tb.t_under;
  const double mid = 0.5 * (tb.t_under + tb.t_over);
  const double rad = 0.5 * range;
  const int n = std::max(4, opts.t_grid);

  auto value_at = [&](double t) -> double {
    try {
      LambdaSolve ls = solve_lambda(sys, t, opts.tol);
      diag.iterations += ls.iterations;
      return ls.lambda + t;
    } catch (const std::runtime_error& e) {
      diag.warnings.push_back("t=" + std::to_string(t) + ": " + e.what());
      return -std::numeric_limits<double>::infinity();
    }
  };

  std::vector<double> nodes(n), vals(n);
  for (int g = 0; g < n; ++g) {
    nodes[g] = mid - rad * std::cos((2.0 * g + 1.0) * M_PI / (2.0 * n));
    vals[g] = value_at(nodes[g]);
  }

  int best = -1;
  for (int g = 0; g < n; ++g) {
    if (!std::isfinite(vals[g])) continue;
    if (best < 0 || vals[g] > vals[best]) best = g;
    const bool up = (g == 0) || !std::isfinite(vals[g - 1]) || vals[g] >= vals[g - 1];
    const bool down = (g == n - 1) || !std::isfinite(vals[g + 1]) || vals[g] >= vals[g + 1];
    if (up && down) diag.local_maxima_t.push_back(nodes[g]);
  }
  if (best < 0)
    throw std::runtime_error("structural sweep: lambda solve failed at every grid point");

  const double inset = 1e-7 * range;
  double lo = (best > 0) ? nodes[best - 1] : tb.t_under + inset;
  double hi = (best < n - 1) ? nodes[best + 1] : tb.t_over - inset;

  // Golden-section maximization of h(t) on [lo, hi].
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = value_at(x1), f2 = value_at(x2);
  while (hi - lo > opts.t_refine_tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = value_at(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = value_at(x1);
    }
  }

  const double t_hat = (f1 > f2) ? x1 : x2;
  LambdaSolve ls = solve_lambda(sys, t_hat, opts.tol);
  res.lambda = ls.lambda;
  res.t = t_hat;
  res.dimension = ls.lambda + t_hat;
  res.P_star = std::move(ls.point.P);
  diag.residual = ls.residual;
  return res;
}

// Direct maximization of lambda(P) + t(P) by multi-start exponentiated
// gradient over the scaled simplices. Deterministic for a fixed options
// seed: fixed start list, ordered reduction.
inline DimensionResult maximize_generic(const RandomCarpetSystem& sys,
                                        const DimensionOptions& opts = {}) {
  const auto starts = detail::start_points(sys, opts);
  std::vector<detail::AscentResult> results(starts.size());

  const int workers = std::min<int>(detail::thread_count(opts),
                                    static_cast<int>(starts.size()));
  if (workers <= 1) {
    for (std::size_t s = 0; s < starts.size(); ++s)
      results[s] = detail::ascend(sys, starts[s], opts);
  } else {
    std::size_t next = 0;
    while (next < starts.size()) {
      std::vector<std::future<detail::AscentResult>> wave;
      for (int w = 0; w < workers && next < starts.size(); ++w, ++next)
        wave.push_back(std::async(std::launch::async, [&, next] {
          return detail::ascend(sys, starts[next], opts);
        }));
      for (std::size_t w = 0; w < wave.size(); ++w)
        results[next - wave.size() + w] = wave[w].get();
    }
  }

  std::size_t best = 0;
  for (std::size_t s = 1; s < results.size(); ++s)
    if (results[s].value > results[best].value) best = s;

  DimensionResult res;
  res.method = Method::generic;
  res.P_star = std::move(results[best].P);
  const RootResult tr = solve_t_info(sys, res.P_star, opts.tol);
  res.t = tr.x;
  res.lambda = lambda_of(sys, res.P_star);
  res.dimension = res.lambda + res.t;
  res.diagnostics.residual = tr.residual;
  res.diagnostics.converged = results[best].converged;
  for (const auto& r : results) res.diagnostics.iterations += r.iterations;
  if (!results[best].converged)
    res.diagnostics.warnings.push_back("ascent hit the iteration cap");
  return res;
}

// Orchestrates both routes: structural when the separation hypothesis is not
// violated, generic always; reports the larger value and keeps both in the
// diagnostics together with their gap.
inline DimensionResult dimension(const RandomCarpetSystem& sys,
                                 const DimensionOptions& opts = {}) {
  const ValidationReport vr = validate_geometry(sys);
  if (!vr.ok)
    throw std::invalid_argument("dimension: system fails geometry validation (" +
                                vr.violations.front().constraint + ")");

  std::vector<std::string> warnings;
  const HypothesisReport gen = check_generic_hypothesis(sys);
  const auto robust = check_robust_hypotheses(sys, opts.robust_eps);
  if (robust.first.verdict == Verdict::fail && robust.second.verdict == Verdict::fail)
    warnings.push_back("both robust hypotheses fail at eps=" +
                       std::to_string(opts.robust_eps) +
                       "; Theorem A guarantee not certified");

  std::optional<DimensionResult> structural;
  if (gen.verdict != Verdict::fail) {
    try {
      structural = maximize_structural(sys, opts);
    } catch (const std::runtime_error& e) {
      warnings.push_back(std::string("structural route failed: ") + e.what());
    }
  } else {
    warnings.push_back("generic hypothesis failed (" + gen.detail +
                       "); structural route skipped");
  }

  DimensionResult generic = maximize_generic(sys, opts);

  DimensionResult res;
  if (structural && structural->dimension >= generic.dimension) {
    for (const auto& w : generic.diagnostics.warnings) warnings.push_back(w);
    res = std::move(*structural);
    res.diagnostics.generic_value = generic.dimension;
    res.diagnostics.structural_value = res.dimension;
    res.diagnostics.iterations += generic.diagnostics.iterations;
  } else {
    double structural_value = std::nan("");
    if (structural) {
      structural_value = structural->dimension;
      for (const auto& w : structural->diagnostics.warnings) warnings.push_back(w);
      generic.diagnostics.t_under = structural->diagnostics.t_under;
      generic.diagnostics.t_over = structural->diagnostics.t_over;
    }
    res = std::move(generic);
    res.diagnostics.structural_value = structural_value;
    res.diagnostics.generic_value = res.dimension;
  }
  if (structural) {
    res.diagnostics.agreement_gap =
        std::fabs(res.diagnostics.structural_value - res.diagnostics.generic_value);
    if (res.diagnostics.agreement_gap > opts.agreement_tol)
      warnings.push_back("structural/generic disagreement " +
                         std::to_string(res.diagnostics.agreement_gap) +
                         " exceeds " + std::to_string(opts.agreement_tol));
  }
  if (std::isnan(res.diagnostics.t_under)) {
    const TBounds tb = t_bounds(sys, opts.tol);
    res.diagnostics.t_under = tb.t_under;
    res.diagnostics.t_over = tb.t_over;
  }
  res.diagnostics.hypothesis_verdict = to_string(gen.verdict);
  for (auto& w : warnings) res.diagnostics.warnings.push_back(std::move(w));
  return res;
}

}  // namespace carpet
