#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "carpet/model.hpp"
#include "carpet/moran.hpp"
#include "carpet/rng.hpp"

namespace carpet {

// Stream ids used when splitting a seed (see rng.hpp for the contract).
// Environment and path draws each own their caller-supplied seed and use
// stream 0; approximation subsampling derives stream level+1 from the
// environment seed.
inline constexpr std::uint64_t kDrawStream = 0;

struct Environment {
  std::uint64_t seed = 0;
  std::vector<int> indices;  // i_l, 0-based
};

struct SymbolPath {
  std::vector<std::pair<int, int>> entries;  // (j_l, k_l), 0-based
};

// Axis-aligned rectangle in [0,1]^2. log_w/log_h stay exact when w/h
// underflow at deep composition levels.
struct Rect {
  double x = 0.0, y = 0.0, w = 1.0, h = 1.0;
  double log_w = 0.0, log_h = 0.0;
};

struct RectSet {
  int depth = 0;
  std::vector<Rect> rects;
  bool truncated = false;
};

inline Environment sample_environment(const RandomCarpetSystem& sys, int n,
                                      std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_environment: n >= 1");
  Environment env;
  env.seed = seed;
  env.indices.reserve(n);
  Rng rng(seed, kDrawStream);
  for (int l = 0; l < n; ++l) env.indices.push_back(rng.pick(sys.env_probs));
  return env;
}

// Bernoulli path draw: row j with probability p_ij/p_i, then cell k with
// probability a_ijk^t / sum_k a_ijk^t, independently per step. t must be the
// precomputed solve_t(P).
inline SymbolPath sample_path(const RandomCarpetSystem& sys,
                              const RowDistribution& p, double t,
                              const Environment& env, std::uint64_t seed) {
  require_shape(sys, p, "sample_path");
  // Per-row cell weights at this t, built once.
  std::vector<std::vector<std::vector<double>>> cellw(sys.maps.size());
  for (int i = 0; i < sys.map_count(); ++i) {
    cellw[i].resize(sys.row_count(i));
    for (int j = 0; j < sys.row_count(i); ++j) {
      const auto& cells = sys.maps[i].rows[j].cells;
      cellw[i][j].resize(cells.size());
      for (std::size_t k = 0; k < cells.size(); ++k)
        cellw[i][j][k] = std::pow(cells[k].width, t);
    }
  }
  Rng rng(seed, kDrawStream);
  SymbolPath path;
  path.entries.reserve(env.indices.size());
  for (int i : env.indices) {
    const int j = rng.pick(p.weights[i]);
    const int k = rng.pick(cellw[i][j]);
    path.entries.emplace_back(j, k);
  }
  return path;
}

// Composition of the first n maps applied to the unit square.
inline Rect cylinder_rectangle(const RandomCarpetSystem& sys,
                               const Environment& env, const SymbolPath& path,
                               int n) {
  if (n < 0 || n > static_cast<int>(path.entries.size()) ||
      n > static_cast<int>(env.indices.size()))
    throw std::out_of_range("cylinder_rectangle: n exceeds path length");
  Rect r;
  double x = 0.0, y = 0.0, w = 1.0, h = 1.0, lw = 0.0, lh = 0.0;
  for (int l = 0; l < n; ++l) {
    const int i = env.indices[l];
    const auto [j, k] = path.entries[l];
    const Row& row = sys.maps[i].rows[j];
    const Cell& cell = row.cells[k];
    x += w * cell.x_offset;
    y += h * row.y_offset;
    w *= cell.width;
    h *= row.height;
    lw += std::log(cell.width);
    lh += std::log(row.height);
  }
  r.x = x;
  r.y = y;
  r.w = w;
  r.h = h;
  r.log_w = lw;
  r.log_h = lh;
  return r;
}

inline int approximation_depth_threshold(const RandomCarpetSystem& sys) {
  double min_a = 1.0, max_b = 0.0;
  for (const auto& m : sys.maps)
    for (const Row& r : m.rows) {
      max_b = std::max(max_b, r.height);
      for (const Cell& c : r.cells) min_a = std::min(min_a, c.width);
    }
  return static_cast<int>(std::ceil(std::log(min_a) / std::log(max_b)));
}

// L_n = max{ k >= 1 : prod_{l<=n} b >= ... }, the horizontal refinement depth
// that makes the cylinder approximately square. Running log-sums.
inline int approximate_square_depth(const RandomCarpetSystem& sys,
                                    const Environment& env,
                                    const SymbolPath& path, int n) {
  if (n < 1 || n > static_cast<int>(path.entries.size()) ||
      n > static_cast<int>(env.indices.size()))
    throw std::out_of_range("approximate_square_depth: n out of range");
  const int threshold = approximation_depth_threshold(sys);
  if (n < threshold)
    throw std::invalid_argument(
        "approximate_square_depth: n=" + std::to_string(n) +
        " below validity threshold n >= " + std::to_string(threshold) +
        " (log min width / log max height)");

  double log_b = 0.0;
  for (int l = 0; l < n; ++l) {
    const int i = env.indices[l];
    log_b += std::log(sys.maps[i].rows[path.entries[l].first].height);
  }
  double log_a = 0.0;
  int L = 0;
  for (int l = 0; l < n; ++l) {
    const int i = env.indices[l];
    const auto [j, k] = path.entries[l];
    log_a += std::log(sys.maps[i].rows[j].cells[k].width);
    if (log_a >= log_b)
      L = l + 1;
    else
      break;
  }
  if (L < 1)
    throw std::invalid_argument("approximate_square_depth: no k >= 1 satisfies the bound");
  return L;
}

struct PathMass {
  double log_value = -std::numeric_limits<double>::infinity();
  bool positive = true;  // false: path visits a zero-probability row
};

// log of the approximate-square mass: row factors to depth n, cell factors to
// depth L_n, entirely in log space.
inline PathMass path_measure(const RandomCarpetSystem& sys,
                             const RowDistribution& p, double t,
                             const Environment& env, const SymbolPath& path,
                             int n) {
  require_shape(sys, p, "path_measure");
  const int L = approximate_square_depth(sys, env, path, n);
  PathMass out;
  double acc = 0.0;
  for (int l = 0; l < n; ++l) {
    const int i = env.indices[l];
    const int j = path.entries[l].first;
    const double w = p.weights[i][j];
    if (w <= 0.0) {
      out.positive = false;
      return out;
    }
    acc += std::log(w / sys.env_probs[i]);
  }
  for (int l = 0; l < L; ++l) {
    const int i = env.indices[l];
    const auto [j, k] = path.entries[l];
    const double a = sys.maps[i].rows[j].cells[k].width;
    acc += t * std::log(a) - std::log(row_sum(sys, i, j, t));
  }
  out.log_value = acc;
  return out;
}

struct PointwiseDim {
  double value = std::numeric_limits<double>::quiet_NaN();
  bool valid = false;  // false: propagated -inf mass flag
};

// Lemma-1 ratio d_{P,i,n} = log mass(B_n) / sum_{l<=n} log b. Converges to
// lambda(P) + t(P) for typical paths and environments.
inline PointwiseDim empirical_pointwise_dim(const RandomCarpetSystem& sys,
                                            const RowDistribution& p, double t,
                                            const Environment& env,
                                            const SymbolPath& path, int n) {
  const PathMass mass = path_measure(sys, p, t, env, path, n);
  if (!mass.positive) return {};
  double log_b = 0.0;
  for (int l = 0; l < n; ++l) {
    const int i = env.indices[l];
    log_b += std::log(sys.maps[i].rows[path.entries[l].first].height);
  }
  return {mass.log_value / log_b, true};
}

// Breadth-first n-approximation. When a level exceeds `cap` rectangles, each
// is kept independently with probability cap/count (seeded from the
// environment) and the result is marked truncated.
inline RectSet generate_approximation(const RandomCarpetSystem& sys,
                                      const Environment& env, int depth,
                                      std::size_t cap = 1000000) {
  if (depth < 1) throw std::invalid_argument("generate_approximation: depth >= 1");
  if (depth > static_cast<int>(env.indices.size()))
    throw std::out_of_range("generate_approximation: depth exceeds environment length");
  RectSet out;
  out.depth = depth;
  std::vector<Rect> level{Rect{}};
  for (int l = 0; l < depth; ++l) {
    const int i = env.indices[l];
    std::vector<Rect> next;
    std::size_t branching = 0;
    for (const Row& r : sys.maps[i].rows) branching += r.cells.size();
    next.reserve(level.size() * branching);
    for (const Rect& parent : level) {
      for (const Row& row : sys.maps[i].rows)
        for (const Cell& cell : row.cells) {
          Rect child;
          child.x = parent.x + parent.w * cell.x_offset;
          child.y = parent.y + parent.h * row.y_offset;
          child.w = parent.w * cell.width;
          child.h = parent.h * row.height;
          child.log_w = parent.log_w + std::log(cell.width);
          child.log_h = parent.log_h + std::log(row.height);
          next.push_back(child);
        }
    }
    if (next.size() > cap) {
      out.truncated = true;
      const double keep = static_cast<double>(cap) / next.size();
      Rng rng(env.seed, static_cast<std::uint64_t>(l) + 1);
      std::vector<Rect> kept;
      kept.reserve(cap + cap / 8);
      for (const Rect& r : next)
        if (rng.uniform01() < keep) kept.push_back(r);
      next = std::move(kept);
    }
    level = std::move(next);
  }
  out.rects = std::move(level);
  return out;
}

struct BoxCountResult {
  double dimension = 0.0;
  double r2 = 0.0;
  std::vector<double> scales;
  std::vector<std::size_t> counts;
};

// Counts occupied delta-grid boxes per scale and fits log N against
// log(1/delta). Boxes are half-open and clamped to [0,1]^2.
inline BoxCountResult box_count_estimate(const RectSet& set,
                                         const std::vector<double>& scales) {
  if (scales.size() < 3)
    throw std::invalid_argument("box_count_estimate: need at least 3 scales");
  for (std::size_t s = 1; s < scales.size(); ++s)
    if (!(scales[s] < scales[s - 1]))
      throw std::invalid_argument("box_count_estimate: scales must be strictly decreasing");
  if (set.rects.empty())
    throw std::invalid_argument("box_count_estimate: empty rectangle set");

  double max_h = 0.0;
  for (const Rect& r : set.rects) max_h = std::max(max_h, std::exp(r.log_h));
  if (scales.back() < max_h)
    throw std::invalid_argument(
        "box_count_estimate: scale " + std::to_string(scales.back()) +
        " below resolution; valid scales are >= " + std::to_string(max_h));

  BoxCountResult out;
  out.scales = scales;
  for (double delta : scales) {
    const long grid = static_cast<long>(std::ceil(1.0 / delta));
    auto clamp_idx = [&](double v) {
      long idx = static_cast<long>(std::floor(v / delta));
      return std::min(std::max(idx, 0L), grid - 1);
    };
    std::size_t count = 0;
    if (grid <= 8192) {
      std::vector<bool> occupied(static_cast<std::size_t>(grid) * grid, false);
      for (const Rect& r : set.rects) {
        const long x0 = clamp_idx(r.x), x1 = clamp_idx(r.x + r.w);
        const long y0 = clamp_idx(r.y), y1 = clamp_idx(r.y + r.h);
        for (long ix = x0; ix <= x1; ++ix)
          for (long iy = y0; iy <= y1; ++iy) {
            auto& cell = occupied[static_cast<std::size_t>(ix) * grid + iy];
            if (!cell) {
              cell = true;
              ++count;
            }
          }
      }
    } else {
      std::unordered_set<std::uint64_t> occupied;
      for (const Rect& r : set.rects) {
        const long x0 = clamp_idx(r.x), x1 = clamp_idx(r.x + r.w);
        const long y0 = clamp_idx(r.y), y1 = clamp_idx(r.y + r.h);
        for (long ix = x0; ix <= x1; ++ix)
          for (long iy = y0; iy <= y1; ++iy)
            occupied.insert(static_cast<std::uint64_t>(ix) *
                                static_cast<std::uint64_t>(grid) +
                            static_cast<std::uint64_t>(iy));
      }
      count = occupied.size();
    }
    out.counts.push_back(count);
  }

  // Least squares of log N on log(1/delta).
  const std::size_t n = scales.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t s = 0; s < n; ++s) {
    const double x = std::log(1.0 / scales[s]);
    const double y = std::log(static_cast<double>(out.counts[s]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double denom = n * sxx - sx * sx;
  out.dimension = (n * sxy - sx * sy) / denom;
  const double ss_tot = syy - sy * sy / n;
  const double ss_res = ss_tot - out.dimension * (sxy - sx * sy / n);
  out.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

}  // namespace carpet
