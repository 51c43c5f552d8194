#pragma once
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "carpet/model.hpp"
#include "carpet/roots.hpp"

namespace carpet {

// Row weights p_ij >= 0 with sum_j p_ij = p_i. The variational variable.
struct RowDistribution {
  std::vector<std::vector<double>> weights;

  static RowDistribution uniform(const RandomCarpetSystem& sys) {
    RowDistribution p;
    p.weights.resize(sys.maps.size());
    for (int i = 0; i < sys.map_count(); ++i) {
      const int mi = sys.row_count(i);
      p.weights[i].assign(mi, sys.env_probs[i] / mi);
    }
    return p;
  }

  double total(int i) const {
    double s = 0.0;
    for (double w : weights[i]) s += w;
    return s;
  }
};

inline void require_shape(const RandomCarpetSystem& sys, const RowDistribution& p,
                          const char* where) {
  if (static_cast<int>(p.weights.size()) != sys.map_count())
    throw std::invalid_argument(std::string(where) + ": distribution/map count mismatch");
  for (int i = 0; i < sys.map_count(); ++i)
    if (static_cast<int>(p.weights[i].size()) != sys.row_count(i))
      throw std::invalid_argument(std::string(where) + ": distribution/row count mismatch");
}

inline bool is_valid_distribution(const RandomCarpetSystem& sys,
                                  const RowDistribution& p, double tol = 1e-12) {
  if (static_cast<int>(p.weights.size()) != sys.map_count()) return false;
  for (int i = 0; i < sys.map_count(); ++i) {
    if (static_cast<int>(p.weights[i].size()) != sys.row_count(i)) return false;
    double s = 0.0;
    for (double w : p.weights[i]) {
      if (!(w >= 0.0) || !std::isfinite(w)) return false;
      s += w;
    }
    if (std::fabs(s - sys.env_probs[i]) > tol) return false;
  }
  return true;
}

// One point of the Lemma-2 family: P recomputable from (alpha, lambda, t).
struct FamilyPoint {
  double alpha = 0.0;
  double lambda = 0.0;
  double t = 0.0;
  std::vector<double> gamma;  // per-map normalizers
  RowDistribution P;
};

namespace detail {

inline std::vector<std::vector<double>> log_row_sums(const RandomCarpetSystem& sys,
                                                     double t) {
  std::vector<std::vector<double>> ls(sys.maps.size());
  for (int i = 0; i < sys.map_count(); ++i) {
    ls[i].resize(sys.row_count(i));
    for (int j = 0; j < sys.row_count(i); ++j)
      ls[i][j] = std::log(row_sum(sys, i, j, t));
  }
  return ls;
}

// Per-map family weights: w_j = lambda*log b_ij + alpha*logS_ij. Returns the
// conditional probabilities p_ij/p_i and log gamma_i, evaluated in log space
// so |alpha| up to the bracket cap cannot overflow.
inline double family_row_conditionals(const RandomCarpetSystem& sys,
                                      const std::vector<double>& logS_i, int i,
                                      double alpha, double lambda,
                                      std::vector<double>& cond) {
  const auto& rows = sys.maps[i].rows;
  const int mi = static_cast<int>(rows.size());
  cond.resize(mi);
  double wmax = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < mi; ++j) {
    cond[j] = lambda * std::log(rows[j].height) + alpha * logS_i[j];
    wmax = std::max(wmax, cond[j]);
  }
  double z = 0.0;
  for (int j = 0; j < mi; ++j) z += std::exp(cond[j] - wmax);
  for (int j = 0; j < mi; ++j) cond[j] = std::exp(cond[j] - wmax) / z;
  return wmax + std::log(z);  // log gamma_i
}

inline double family_F(const RandomCarpetSystem& sys,
                       const std::vector<std::vector<double>>& logS,
                       double alpha, double lambda) {
  double f = 0.0;
  std::vector<double> cond;
  for (int i = 0; i < sys.map_count(); ++i) {
    family_row_conditionals(sys, logS[i], i, alpha, lambda, cond);
    double inner = 0.0;
    for (int j = 0; j < sys.row_count(i); ++j) inner += cond[j] * logS[i][j];
    f += sys.env_probs[i] * inner;
  }
  return f;
}

inline RootResult solve_alpha_at(const RandomCarpetSystem& sys,
                                 const std::vector<std::vector<double>>& logS,
                                 double lambda, double t, double tol) {
  auto F = [&](double alpha) { return family_F(sys, logS, alpha, lambda); };
  const double f0 = F(0.0);
  if (std::fabs(f0) <= tol) return {0.0, f0, 0, true};
  auto bracket = expand_bracket(F, /*increasing=*/true, 1.0, 1e6,
                                "alpha at t=" + std::to_string(t));
  return bisect_increasing(F, bracket.first, bracket.second, tol);
}

}  // namespace detail

// Phi(t) = sum_{i,j} p_ij log(sum_k a_ijk^t); zero weights contribute nothing.
inline double phi(const RandomCarpetSystem& sys, const RowDistribution& p,
                  double t) {
  require_shape(sys, p, "phi");
  double s = 0.0;
  for (int i = 0; i < sys.map_count(); ++i)
    for (int j = 0; j < sys.row_count(i); ++j) {
      const double w = p.weights[i][j];
      if (w == 0.0) continue;
      s += w * std::log(row_sum(sys, i, j, t));
    }
  return s;
}

inline RootResult solve_t_info(const RandomCarpetSystem& sys,
                               const RowDistribution& p, double tol = 1e-12) {
  require_shape(sys, p, "solve_t");
  double mass = 0.0;
  for (const auto& row : p.weights)
    for (double w : row) {
      if (!(w >= 0.0) || !std::isfinite(w))
        throw std::invalid_argument("solve_t: weights must be finite and >= 0");
      mass += w;
    }
  if (!(mass > 0.0)) throw std::invalid_argument("solve_t: distribution has no mass");
  return bisect_decreasing([&](double t) { return phi(sys, p, t); }, 0.0, 1.0, tol);
}

// Root of the random Moran equation, clamped to [0,1].
inline double solve_t(const RandomCarpetSystem& sys, const RowDistribution& p,
                      double tol = 1e-12) {
  return solve_t_info(sys, p, tol).x;
}

// Entropy-over-Lyapunov ratio (vertical dimension contribution), 0 log 0 = 0.
inline double lambda_of(const RandomCarpetSystem& sys, const RowDistribution& p) {
  require_shape(sys, p, "lambda_of");
  double num = 0.0, den = 0.0;
  for (int i = 0; i < sys.map_count(); ++i) {
    const double pi = sys.env_probs[i];
    for (int j = 0; j < sys.row_count(i); ++j) {
      const double w = p.weights[i][j];
      if (w > 0.0) num += w * std::log(w);
      den += w * std::log(sys.maps[i].rows[j].height);
    }
    if (pi > 0.0) num -= pi * std::log(pi);
  }
  if (den == 0.0) return 0.0;  // no mass
  return num / den;
}

struct TBounds {
  double t_under = 0.0;
  double t_over = 0.0;
};

// Roots of sum_i p_i log(min_j / max_j row_sum) = 0; the attainable range of
// solve_t over all distributions.
inline TBounds t_bounds(const RandomCarpetSystem& sys, double tol = 1e-12) {
  auto extreme = [&](bool use_max) {
    return bisect_decreasing(
        [&](double t) {
          double s = 0.0;
          for (int i = 0; i < sys.map_count(); ++i) {
            double ext = row_sum(sys, i, 0, t);
            for (int j = 1; j < sys.row_count(i); ++j) {
              const double v = row_sum(sys, i, j, t);
              ext = use_max ? std::max(ext, v) : std::min(ext, v);
            }
            s += sys.env_probs[i] * std::log(ext);
          }
          return s;
        },
        0.0, 1.0, tol);
  };
  return {extreme(false).x, extreme(true).x};
}

// gamma_i(alpha, lambda, t) = sum_j b_ij^lambda (sum_k a_ijk^t)^alpha.
inline double gamma_value(const RandomCarpetSystem& sys, int i, double alpha,
                          double lambda, double t) {
  if (i < 0 || i >= sys.map_count()) throw std::out_of_range("gamma_value: map index");
  const auto logS = detail::log_row_sums(sys, t);
  std::vector<double> cond;
  return std::exp(detail::family_row_conditionals(sys, logS[i], i, alpha, lambda, cond));
}

// The family of Lemma 2: p_ij = p_i b_ij^lambda (sum_k a_ijk^t)^alpha / gamma_i.
inline FamilyPoint family_point(const RandomCarpetSystem& sys, double alpha,
                                double lambda, double t) {
  FamilyPoint fp;
  fp.alpha = alpha;
  fp.lambda = lambda;
  fp.t = t;
  fp.P.weights.resize(sys.maps.size());
  const auto logS = detail::log_row_sums(sys, t);
  std::vector<double> cond;
  for (int i = 0; i < sys.map_count(); ++i) {
    const double lg = detail::family_row_conditionals(sys, logS[i], i, alpha, lambda, cond);
    fp.gamma.push_back(std::exp(lg));
    fp.P.weights[i].resize(sys.row_count(i));
    for (int j = 0; j < sys.row_count(i); ++j)
      fp.P.weights[i][j] = sys.env_probs[i] * cond[j];
  }
  return fp;
}

// Solves F(alpha, lambda, t) = 0 in alpha, i.e. t(P(alpha,lambda,t)) = t.
// F is strictly increasing in alpha under the separation hypothesis; the
// bracket grows geometrically from [-1,1] and fails past |alpha| = 1e6, which
// signals t at/outside (t_under, t_over) or a violated hypothesis.
inline double solve_alpha(const RandomCarpetSystem& sys, double lambda, double t,
                          double tol = 1e-12) {
  const auto logS = detail::log_row_sums(sys, t);
  return detail::solve_alpha_at(sys, logS, lambda, t, tol).x;
}

struct LambdaSolve {
  double lambda = 0.0;
  double alpha = 0.0;
  FamilyPoint point;
  int iterations = 0;
  double residual = 0.0;
};

// Solves G(alpha(lambda,t), lambda, t) = 0 in lambda. G is strictly
// decreasing in lambda (its total derivative is sum p_ij log b_ij < 0), so a
// doubling bracket plus bisection suffices. At the root, lambda equals the
// entropy ratio of the returned family point.
inline LambdaSolve solve_lambda(const RandomCarpetSystem& sys, double t,
                                double tol = 1e-12) {
  const auto logS = detail::log_row_sums(sys, t);
  LambdaSolve out;
  std::vector<double> cond;
  auto G = [&](double lambda) {
    const RootResult a = detail::solve_alpha_at(sys, logS, lambda, t, tol);
    out.iterations += a.iterations + 1;
    double g = 0.0;
    for (int i = 0; i < sys.map_count(); ++i)
      g += sys.env_probs[i] *
           detail::family_row_conditionals(sys, logS[i], i, a.x, lambda, cond);
    out.alpha = a.x;
    return g;
  };
  auto bracket = expand_bracket(G, /*increasing=*/false, 1.0, 1e6,
                                "lambda at t=" + std::to_string(t));
  const RootResult r = bisect_decreasing(G, bracket.first, bracket.second, tol);
  out.lambda = r.x;
  out.residual = r.residual;
  // Re-evaluate at the root so point/alpha match the returned lambda.
  const RootResult a = detail::solve_alpha_at(sys, logS, out.lambda, t, tol);
  out.alpha = a.x;
  out.point = family_point(sys, out.alpha, out.lambda, t);
  return out;
}

struct VerticalSolve {
  double lambda = 0.0;
  RowDistribution P;
  double residual = 0.0;
};

// Fixed-t entropy maximization when t(P) is constant over all P: the
// alpha-free slice of the family. Solves sum_i p_i log(sum_j b_ij^lambda) = 0
// and returns the Gibbs weights p_ij = p_i b_ij^lambda / sum_j b_ij^lambda.
inline VerticalSolve solve_vertical_lambda(const RandomCarpetSystem& sys,
                                           double tol = 1e-12) {
  auto G = [&](double lambda) {
    double g = 0.0;
    for (int i = 0; i < sys.map_count(); ++i) {
      double z = 0.0;
      for (const Row& r : sys.maps[i].rows) z += std::pow(r.height, lambda);
      g += sys.env_probs[i] * std::log(z);
    }
    return g;
  };
  auto bracket = expand_bracket(G, /*increasing=*/false, 1.0, 1e6, "vertical lambda");
  const RootResult r = bisect_decreasing(G, bracket.first, bracket.second, tol);
  VerticalSolve out;
  out.lambda = r.x;
  out.residual = r.residual;
  out.P.weights.resize(sys.maps.size());
  for (int i = 0; i < sys.map_count(); ++i) {
    double z = 0.0;
    std::vector<double> b(sys.row_count(i));
    for (int j = 0; j < sys.row_count(i); ++j) {
      b[j] = std::pow(sys.maps[i].rows[j].height, out.lambda);
      z += b[j];
    }
    out.P.weights[i].resize(sys.row_count(i));
    for (int j = 0; j < sys.row_count(i); ++j)
      out.P.weights[i][j] = sys.env_probs[i] * b[j] / z;
  }
  return out;
}

}  // namespace carpet
