#pragma once
#include <cmath>
#include <vector>

#include "carpet/model.hpp"
#include "carpet/moran.hpp"
#include "carpet/rng.hpp"

namespace testutil {

// Two-row McMullen carpet: bottom row two cells, top row one cell, heights
// 1/2, widths 1/3.
inline carpet::RandomCarpetSystem mcmullen_system() {
  const double a = 1.0 / 3.0;
  carpet::RandomCarpetSystem sys;
  carpet::CarpetMap map;
  map.rows.push_back({0.5, 0.0, {{a, 0.0}, {a, 2.0 * a}}});
  map.rows.push_back({0.5, 0.5, {{a, 0.0}}});
  sys.maps.push_back(map);
  sys.env_probs = {1.0};
  return sys;
}

// Closed-form dimension of an n-column/m-row deterministic carpet with
// t_j cells selected in row j:  log_m( sum_j t_j^(log_n m) ).
inline double mcmullen_oracle(const std::vector<int>& cells_per_row, int m_rows,
                              int n_cols) {
  const double e = std::log(static_cast<double>(m_rows)) /
                   std::log(static_cast<double>(n_cols));
  double s = 0.0;
  for (int tj : cells_per_row) s += std::pow(static_cast<double>(tj), e);
  return std::log(s) / std::log(static_cast<double>(m_rows));
}

// Single map, single row of height 1/2 holding two width-1/4 cells.
inline carpet::RandomCarpetSystem two_quarter_cells() {
  carpet::RandomCarpetSystem sys;
  carpet::CarpetMap map;
  map.rows.push_back({0.5, 0.0, {{0.25, 0.0}, {0.25, 0.5}}});
  sys.maps.push_back(map);
  sys.env_probs = {1.0};
  return sys;
}

// Random valid system with m <= max_maps, m_i <= max_rows, m_ij <= max_cells.
// Rows and cells come from positive partitions of [0,1]; widths are shrunk
// below both their slot and the row height so every inequality holds with
// margin.
inline carpet::RandomCarpetSystem random_system(carpet::Rng& rng,
                                                int max_maps = 3,
                                                int max_rows = 3,
                                                int max_cells = 3) {
  auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * rng.uniform01();
  };
  carpet::RandomCarpetSystem sys;
  const int m = 1 + static_cast<int>(rng.next_u64() % max_maps);
  double ptotal = 0.0;
  for (int i = 0; i < m; ++i) {
    const double w = uniform(0.2, 1.0);
    sys.env_probs.push_back(w);
    ptotal += w;
  }
  for (double& p : sys.env_probs) p /= ptotal;

  for (int i = 0; i < m; ++i) {
    carpet::CarpetMap map;
    const int mi = 1 + static_cast<int>(rng.next_u64() % max_rows);
    std::vector<double> part(2 * mi + 1);
    double total = 0.0;
    for (double& v : part) {
      v = uniform(0.05, 1.0);
      total += v;
    }
    for (double& v : part) v /= total;
    double pos = 0.0;
    for (int j = 0; j < mi; ++j) {
      pos += part[2 * j];  // gap below the row
      const double height = part[2 * j + 1];
      carpet::Row row;
      row.height = height;
      row.y_offset = pos;
      pos += height;

      const int mij = 1 + static_cast<int>(rng.next_u64() % max_cells);
      std::vector<double> cpart(2 * mij + 1);
      double ctotal = 0.0;
      for (double& v : cpart) {
        v = uniform(0.05, 1.0);
        ctotal += v;
      }
      for (double& v : cpart) v /= ctotal;
      double cpos = 0.0;
      for (int k = 0; k < mij; ++k) {
        cpos += cpart[2 * k];
        const double slot = cpart[2 * k + 1];
        const double width = std::min(slot, height) * uniform(0.3, 1.0);
        row.cells.push_back({width, cpos});
        cpos += slot;
      }
      map.rows.push_back(std::move(row));
    }
    sys.maps.push_back(std::move(map));
  }
  return sys;
}

// Random valid system that passes the separation hypothesis cleanly.
inline carpet::RandomCarpetSystem random_separated_system(carpet::Rng& rng,
                                                          int max_maps = 3,
                                                          int max_rows = 3,
                                                          int max_cells = 3) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    carpet::RandomCarpetSystem sys = random_system(rng, max_maps, max_rows, max_cells);
    if (carpet::check_generic_hypothesis(sys).verdict == carpet::Verdict::pass)
      return sys;
  }
  throw std::runtime_error("random_separated_system: no passing draw in 200 attempts");
}

// Random feasible row distribution (Dirichlet within each scaled simplex).
inline carpet::RowDistribution random_distribution(
    const carpet::RandomCarpetSystem& sys, carpet::Rng& rng) {
  carpet::RowDistribution p;
  p.weights.resize(sys.maps.size());
  for (int i = 0; i < sys.map_count(); ++i) {
    p.weights[i].resize(sys.row_count(i));
    double total = 0.0;
    for (double& w : p.weights[i]) {
      w = -std::log(1.0 - rng.uniform01());
      total += w;
    }
    for (double& w : p.weights[i]) w *= sys.env_probs[i] / total;
  }
  return p;
}

}  // namespace testutil
