#pragma once
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace carpet {

// Geometry of one contraction family: rows of height b stacked in [0,1],
// cells of width a packed left-to-right inside each row. Widths never exceed
// the row height, so every map contracts at least as strongly horizontally.
struct Cell {
  double width = 0.0;     // a_ijk
  double x_offset = 0.0;  // c_ijk
};

struct Row {
  double height = 0.0;    // b_ij
  double y_offset = 0.0;  // d_ij
  std::vector<Cell> cells;
};

struct CarpetMap {
  std::vector<Row> rows;
};

struct RandomCarpetSystem {
  std::vector<CarpetMap> maps;
  std::vector<double> env_probs;  // p_i, positive, summing to 1

  int map_count() const { return static_cast<int>(maps.size()); }
  int row_count(int i) const { return static_cast<int>(maps[i].rows.size()); }
  int cell_count(int i, int j) const {
    return static_cast<int>(maps[i].rows[j].cells.size());
  }
  int total_rows() const {
    int n = 0;
    for (const auto& m : maps) n += static_cast<int>(m.rows.size());
    return n;
  }
};

struct Violation {
  std::string constraint;  // stable id, e.g. "row_heights_exceed_one"
  int i = -1, j = -1, k = -1;
  double measured = 0.0;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "inconclusive";
  }
}

struct HypothesisReport {
  std::string hypothesis;  // "generic" | "robust1" | "robust2"
  Verdict verdict = Verdict::inconclusive;
  double witness_t = std::nan("");   // t of the recorded witness (generic)
  double measured = std::nan("");    // min separation / worst ratio
  double suspect_lo = std::nan("");  // suspect t interval (inconclusive)
  double suspect_hi = std::nan("");
  int wi = -1, wj = -1, wk = -1;     // indices of the witness
  std::vector<double> centers;       // instantiated a_i, b_i (robust1)
  std::string detail;
};

// Slack applied to every geometric inequality.
inline constexpr double kGeomSlack = 1e-12;

inline ValidationReport validate_geometry(const RandomCarpetSystem& sys) {
  ValidationReport rep;
  auto add = [&](std::string id, int i, int j, int k, double v) {
    rep.violations.push_back({std::move(id), i, j, k, v});
  };

  if (sys.maps.empty()) add("no_maps", -1, -1, -1, 0.0);
  for (int i = 0; i < sys.map_count(); ++i) {
    const auto& rows = sys.maps[i].rows;
    if (rows.empty()) {
      add("empty_map", i, -1, -1, 0.0);
      continue;
    }
    double height_sum = 0.0;
    for (int j = 0; j < static_cast<int>(rows.size()); ++j) {
      const Row& r = rows[j];
      height_sum += r.height;
      if (!(r.height > 0.0 && r.height < 1.0))
        add("row_height_range", i, j, -1, r.height);
      if (!(r.y_offset >= -kGeomSlack && r.y_offset < 1.0))
        add("row_offset_range", i, j, -1, r.y_offset);
      if (j + 1 < static_cast<int>(rows.size())) {
        const double gap = rows[j + 1].y_offset - r.y_offset;
        if (gap < r.height - kGeomSlack) add("row_gap", i, j, -1, gap);
      } else if (1.0 - r.y_offset < r.height - kGeomSlack) {
        add("row_top_edge", i, j, -1, 1.0 - r.y_offset);
      }

      if (r.cells.empty()) {
        add("empty_row", i, j, -1, 0.0);
        continue;
      }
      double width_sum = 0.0;
      for (int k = 0; k < static_cast<int>(r.cells.size()); ++k) {
        const Cell& c = r.cells[k];
        width_sum += c.width;
        if (!(c.width > 0.0 && c.width < 1.0))
          add("cell_width_range", i, j, k, c.width);
        if (c.width > r.height + kGeomSlack)
          add("cell_wider_than_row", i, j, k, c.width);
        if (!(c.x_offset >= -kGeomSlack && c.x_offset < 1.0))
          add("cell_offset_range", i, j, k, c.x_offset);
        if (k + 1 < static_cast<int>(r.cells.size())) {
          const double gap = r.cells[k + 1].x_offset - c.x_offset;
          if (gap < c.width - kGeomSlack) add("cell_gap", i, j, k, gap);
        } else if (1.0 - c.x_offset < c.width - kGeomSlack) {
          add("cell_right_edge", i, j, k, 1.0 - c.x_offset);
        }
      }
      if (width_sum > 1.0 + kGeomSlack)
        add("cell_widths_exceed_one", i, j, -1, width_sum);
    }
    if (height_sum > 1.0 + kGeomSlack)
      add("row_heights_exceed_one", i, -1, -1, height_sum);
  }

  if (sys.env_probs.size() != sys.maps.size()) {
    add("env_prob_count", -1, -1, -1, static_cast<double>(sys.env_probs.size()));
  } else {
    double total = 0.0;
    for (int i = 0; i < static_cast<int>(sys.env_probs.size()); ++i) {
      if (!(sys.env_probs[i] > 0.0))
        add("env_prob_nonpositive", i, -1, -1, sys.env_probs[i]);
      total += sys.env_probs[i];
    }
    if (std::fabs(total - 1.0) > kGeomSlack)
      add("env_prob_sum", -1, -1, -1, total);
  }

  rep.ok = rep.violations.empty();
  return rep;
}

// Sum_k a_ijk^t, summed in index order.
inline double row_sum(const RandomCarpetSystem& sys, int i, int j, double t) {
  if (i < 0 || i >= sys.map_count()) throw std::out_of_range("row_sum: map index");
  if (j < 0 || j >= sys.row_count(i)) throw std::out_of_range("row_sum: row index");
  double s = 0.0;
  for (const Cell& c : sys.maps[i].rows[j].cells) s += std::pow(c.width, t);
  return s;
}

namespace detail {

// Largest pairwise row-sum difference at one t, over all row pairs of every
// map. Zero when no map has two rows.
inline double pairwise_separation(const RandomCarpetSystem& sys, double t,
                                  int* out_i = nullptr, int* out_j = nullptr,
                                  int* out_j2 = nullptr) {
  double best = 0.0;
  for (int i = 0; i < sys.map_count(); ++i) {
    const int mi = sys.row_count(i);
    if (mi < 2) continue;
    std::vector<double> sums(mi);
    for (int j = 0; j < mi; ++j) sums[j] = row_sum(sys, i, j, t);
    for (int j = 0; j < mi; ++j)
      for (int j2 = j + 1; j2 < mi; ++j2) {
        const double d = std::fabs(sums[j] - sums[j2]);
        if (d > best) {
          best = d;
          if (out_i) *out_i = i;
          if (out_j) *out_j = j;
          if (out_j2) *out_j2 = j2;
        }
      }
  }
  return best;
}

inline bool identical_width_multisets(const RandomCarpetSystem& sys) {
  bool any_pair = false;
  for (const auto& m : sys.maps) {
    if (m.rows.size() < 2) continue;
    any_pair = true;
    auto sorted_widths = [](const Row& r) {
      std::vector<double> w;
      w.reserve(r.cells.size());
      for (const Cell& c : r.cells) w.push_back(c.width);
      std::sort(w.begin(), w.end());
      return w;
    };
    const auto ref = sorted_widths(m.rows[0]);
    for (std::size_t j = 1; j < m.rows.size(); ++j)
      if (sorted_widths(m.rows[j]) != ref) return false;
  }
  return any_pair;  // vacuous when no pairs, handled by the caller
}

}  // namespace detail

// Checks the separation hypothesis on the cell widths: for every t in [0,1]
// some map must have two rows whose width-power sums differ. Grid scan with
// one bisection refinement level around failing points; three-valued verdict
// because an exact check over all t is not decidable numerically.
inline HypothesisReport check_generic_hypothesis(const RandomCarpetSystem& sys,
                                                 int grid_points = 1025,
                                                 double tol = 1e-9) {
  if (grid_points < 2) throw std::invalid_argument("check_generic_hypothesis: grid_points >= 2");
  HypothesisReport rep;
  rep.hypothesis = "generic";

  bool any_pair = false;
  for (const auto& m : sys.maps) any_pair |= (m.rows.size() >= 2);
  if (!any_pair) {
    rep.verdict = Verdict::fail;
    rep.detail = "no map has two rows; no pairwise sums exist to separate";
    return rep;
  }
  if (detail::identical_width_multisets(sys)) {
    rep.verdict = Verdict::fail;
    rep.detail = "all pairwise sums equal: every row pair shares one cell-width multiset";
    return rep;
  }

  const double h = 1.0 / (grid_points - 1);
  double min_sep = std::numeric_limits<double>::infinity();
  double min_t = 0.0;
  int min_i = -1, min_j = -1, min_j2 = -1;
  std::vector<double> failing;
  for (int g = 0; g < grid_points; ++g) {
    const double t = g * h;
    int wi, wj, wj2;
    const double d = detail::pairwise_separation(sys, t, &wi, &wj, &wj2);
    if (d < min_sep) {
      min_sep = d;
      min_t = t;
      min_i = wi; min_j = wj; min_j2 = wj2;
    }
    if (d <= tol) failing.push_back(t);
  }

  rep.witness_t = min_t;
  rep.measured = min_sep;
  rep.wi = min_i; rep.wj = min_j; rep.wk = min_j2;

  if (failing.empty()) {
    rep.verdict = Verdict::pass;
    rep.detail = "min pairwise separation " + std::to_string(min_sep) +
                 " at t=" + std::to_string(min_t);
    return rep;
  }

  // One refinement level: probe midpoints around each failing grid point to
  // narrow the suspect interval.
  double lo = failing.front(), hi = failing.back();
  for (double t : failing) {
    const double l = std::max(0.0, t - 0.5 * h);
    const double r = std::min(1.0, t + 0.5 * h);
    if (detail::pairwise_separation(sys, l) <= tol) lo = std::min(lo, l);
    if (detail::pairwise_separation(sys, r) <= tol) hi = std::max(hi, r);
  }
  rep.verdict = Verdict::inconclusive;
  rep.suspect_lo = std::max(0.0, lo - 0.5 * h);
  rep.suspect_hi = std::min(1.0, hi + 0.5 * h);
  rep.detail = "pairwise sums within tol near t=" + std::to_string(failing.front());
  return rep;
}

// Robust hypotheses. The existential centers a_i, b_i are instantiated as
// geometric means (the best multiplicative center); they are recorded in the
// report so a caller can test alternatives.
inline std::pair<HypothesisReport, HypothesisReport> check_robust_hypotheses(
    const RandomCarpetSystem& sys, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("check_robust_hypotheses: eps must be > 0");

  HypothesisReport r1, r2;
  r1.hypothesis = "robust1";
  r2.hypothesis = "robust2";
  const double bound = 1.0 + eps;

  double worst1 = 1.0, worst2 = 1.0;
  for (int i = 0; i < sys.map_count(); ++i) {
    const auto& rows = sys.maps[i].rows;
    double log_b = 0.0, log_a = 0.0;
    int na = 0;
    for (const Row& r : rows) {
      log_b += std::log(r.height);
      for (const Cell& c : r.cells) {
        log_a += std::log(c.width);
        ++na;
      }
    }
    const double b_i = std::exp(log_b / static_cast<double>(rows.size()));
    const double a_i = std::exp(log_a / static_cast<double>(na));
    r1.centers.push_back(a_i);
    r1.centers.push_back(b_i);

    for (int j = 0; j < static_cast<int>(rows.size()); ++j) {
      const Row& r = rows[j];
      const double rb = r.height / b_i;
      const double devb = std::max(rb, 1.0 / rb);
      if (devb > worst1) {
        worst1 = devb;
        r1.wi = i; r1.wj = j; r1.wk = -1;
        r1.measured = devb;
      }
      for (int k = 0; k < static_cast<int>(r.cells.size()); ++k) {
        const double ra = r.cells[k].width / a_i;
        const double deva = std::max(ra, 1.0 / ra);
        if (deva > worst1) {
          worst1 = deva;
          r1.wi = i; r1.wj = j; r1.wk = k;
          r1.measured = deva;
        }
        const double rba = r.height / r.cells[k].width;
        if (rba > worst2) {
          worst2 = rba;
          r2.wi = i; r2.wj = j; r2.wk = k;
          r2.measured = rba;
        }
      }
    }
  }
  if (std::isnan(r1.measured)) r1.measured = worst1;
  if (std::isnan(r2.measured)) r2.measured = worst2;

  r1.verdict = (worst1 < bound) ? Verdict::pass : Verdict::fail;
  r1.detail = "worst multiplicative deviation from geometric-mean centers: " +
              std::to_string(worst1);
  r2.verdict = (worst2 < bound) ? Verdict::pass : Verdict::fail;
  r2.detail = "worst height/width ratio: " + std::to_string(worst2);
  return {r1, r2};
}

}  // namespace carpet
