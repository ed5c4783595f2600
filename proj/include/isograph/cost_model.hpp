#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "isograph/types.hpp"

namespace isograph {

/// F(x) = sum_{i=1..m} x_{i-1} (x_i - x_{i-1}) on the simplex 0 <= x_0 <= ... <= x_m = N,
/// and its upper bound m N^2 / (2 (m + 1)).
struct SimplexBound {
  double value = 0.0;
  double bound = 0.0;
};

/// Throws InvalidInput for an empty, negative or decreasing sequence. N is the last entry.
SimplexBound simplex_bound(std::span<const double> x);

/// Graph size measurements that drive the cost model.
struct Measurements {
  std::size_t n = 0;    ///< vertices
  std::size_t s = 0;    ///< structural set size
  std::size_t k = 0;    ///< depth
  std::size_t m = 0;    ///< most branches at any vertex
  std::size_t ell = 0;  ///< iteration cap
  std::size_t p = 0;    ///< delta size

  nlohmann::json to_json() const;
};

/// Whether p << s << N, k + p << N and p (k + 1) m << N^3, reading a << b as a <= ratio * b.
struct ScaleConditions {
  bool p_much_less_s = false;
  bool s_much_less_n = false;
  bool depth_much_less_n = false;
  bool branch_work_much_less_cube = false;

  bool all() const { return p_much_less_s && s_much_less_n && depth_much_less_n && branch_work_much_less_cube; }
};

ScaleConditions scale_conditions(const Measurements& m, double ratio = 0.1);

/// Itemized cost of one update session against re-iterating the full matrix.
/// One scalar multiply-add is one unit.
struct CostReport {
  Measurements before;       ///< measured on the stored graph; ell and p from the session
  Measurements after;        ///< the same quantities for the updated graph

  double step3 = 0.0;        ///< branch set edits: vertices written or dropped
  double step4 = 0.0;        ///< branch weight products added to / subtracted from the extended matrix
  double step4_reweight = 0.0;  ///< the part of step4 spent re-weighting branches of renormalized columns
  double step5 = 0.0;        ///< ell * s'^3
  double step6 = 0.0;        ///< sum_j j |S'_{j-1}| (|S'_j| - |S'_{j-1}|)
  double baseline = 0.0;     ///< ell * N'^3
  double savings = 0.0;      ///< 1 - (step3 + step4 + step5 + step6) / baseline

  double branch_bound = 0.0;       ///< p (k + 1) m, with k and m the larger of before/after
  double lift_bound = 0.0;         ///< k' N'^2 / 2
  double lift_bound_claimed = 0.0; ///< (k + p) N'^2 / 2
  bool depth_within_k_plus_p = true;  ///< k' <= k + p
  ScaleConditions conditions;

  std::size_t ops_applied = 0;     ///< step 1, excluded from savings
  std::size_t promotions = 0;      ///< step 2, excluded from savings
  bool structural_fallback = false;
  std::size_t power_iterations = 0;
  double eigen_residual = 0.0;     ///< ||M' v - v||_1 of the lifted vector

  /// The per-step invariants: steps 3 and 4 within branch_bound, step 6 within lift_bound,
  /// step 5 equal to ell s'^3.
  bool bounds_hold() const;

  nlohmann::json to_json() const;
  std::string table() const;
};

/// A report built from the bounds alone, for measurements without an actual update:
/// steps 3 and 4 = p (k + 1) m, step 5 = ell s^3, step 6 = (k + p) N^2 / 2.
CostReport bound_report(const Measurements& m, double ratio = 0.1);

/// sum_{j=1..k} j |S_{j-1}| (|S_j| - |S_{j-1}|) from the cumulative level sizes |S_0|..|S_k|.
double lift_cost(std::span<const std::size_t> level_sizes);

}  // namespace isograph
