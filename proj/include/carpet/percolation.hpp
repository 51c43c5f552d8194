#pragma once
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "carpet/model.hpp"
#include "carpet/moran.hpp"

namespace carpet {

// One selection pattern on the k x k grid. Cell (row, col) maps to bit
// row*k + col, so enumerating masks in increasing order fixes the map
// indexing reproducibly.
struct GridPattern {
  int k = 0;
  std::vector<std::pair<int, int>> selected;  // (row, col), ascending by bit
};

inline std::vector<GridPattern> enumerate_patterns(int k) {
  if (k < 2) throw std::invalid_argument("enumerate_patterns: k >= 2");
  const int cells = k * k;
  if (cells >= 20)  // 2^20 - 1 > 1e6
    throw std::invalid_argument("enumerate_patterns: pattern count exceeds 1e6 cap");
  std::vector<GridPattern> out;
  const std::uint32_t n = 1u << cells;
  out.reserve(n - 1);
  for (std::uint32_t mask = 1; mask < n; ++mask) {
    GridPattern p;
    p.k = k;
    for (int bit = 0; bit < cells; ++bit)
      if (mask & (1u << bit)) p.selected.emplace_back(bit / k, bit % k);
    out.push_back(std::move(p));
  }
  return out;
}

// Grid-variant fractal percolation: one map per nonempty pattern. A pattern
// with l cells gets probability a q^l (1-q)^(k^2-l), a = (1-(1-q)^(k^2))^-1,
// the binomial law conditioned on at least one selected cell.
inline RandomCarpetSystem build_percolation_system(int k, double q) {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("build_percolation_system: q must lie in (0,1)");
  const auto patterns = enumerate_patterns(k);
  const int cells = k * k;
  const double side = 1.0 / k;

  RandomCarpetSystem sys;
  sys.maps.reserve(patterns.size());
  sys.env_probs.reserve(patterns.size());
  const double a = 1.0 / (1.0 - std::pow(1.0 - q, cells));
  for (const auto& p : patterns) {
    CarpetMap map;
    int row = -1;
    for (const auto& [r, c] : p.selected) {
      if (r != row) {
        map.rows.push_back({side, r * side, {}});
        row = r;
      }
      map.rows.back().cells.push_back({side, c * side});
    }
    sys.maps.push_back(std::move(map));
    const int l = static_cast<int>(p.selected.size());
    sys.env_probs.push_back(a * std::pow(q, l) * std::pow(1.0 - q, cells - l));
  }
  double total = 0.0;
  for (double p : sys.env_probs) total += p;
  for (double& p : sys.env_probs) p /= total;
  return sys;
}

// Closed-form dimension of the grid-percolation limit set:
//   a sum_l C(k^2,l) q^l (1-q)^(k^2-l) log l / log k.
// Needs no pattern enumeration, so any k works; binomials switch to log
// space past k^2 = 30.
inline double closed_form_dim(int k, double q) {
  if (k < 2) throw std::invalid_argument("closed_form_dim: k >= 2");
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("closed_form_dim: q must lie in (0,1)");
  const int n = k * k;
  const double a = 1.0 / (1.0 - std::pow(1.0 - q, n));
  double s = 0.0;
  if (n <= 30) {
    double binom = static_cast<double>(n);  // C(n,1)
    for (int l = 1; l <= n; ++l) {
      s += binom * std::pow(q, l) * std::pow(1.0 - q, n - l) * std::log(l);
      binom = binom * (n - l) / (l + 1);
    }
  } else {
    const double lq = std::log(q), l1q = std::log1p(-q);
    for (int l = 1; l <= n; ++l) {
      const double log_binom = std::lgamma(n + 1.0) - std::lgamma(l + 1.0) -
                               std::lgamma(n - l + 1.0);
      s += std::exp(log_binom + l * lq + (n - l) * l1q) * std::log(l);
    }
  }
  return a * s / std::log(k);
}

// Lagrange-multiplier optimum p_ij = p_i m_ij / sum_j m_ij, valid only when
// every height and width equals the common grid side.
inline RowDistribution optimal_row_distribution(const RandomCarpetSystem& sys) {
  double side = -1.0;
  for (const auto& map : sys.maps)
    for (const Row& r : map.rows) {
      if (side < 0.0) side = r.height;
      if (std::fabs(r.height - side) > 1e-12)
        throw std::invalid_argument(
            "optimal_row_distribution: non-uniform row heights");
      for (const Cell& c : r.cells)
        if (std::fabs(c.width - side) > 1e-12)
          throw std::invalid_argument(
              "optimal_row_distribution: cell widths differ from grid side");
    }

  RowDistribution p;
  p.weights.resize(sys.maps.size());
  for (int i = 0; i < sys.map_count(); ++i) {
    int total_cells = 0;
    for (const Row& r : sys.maps[i].rows)
      total_cells += static_cast<int>(r.cells.size());
    p.weights[i].resize(sys.row_count(i));
    for (int j = 0; j < sys.row_count(i); ++j)
      p.weights[i][j] = sys.env_probs[i] *
                        static_cast<double>(sys.maps[i].rows[j].cells.size()) /
                        total_cells;
  }
  return p;
}

}  // namespace carpet
