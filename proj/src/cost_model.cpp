#include "isograph/cost_model.hpp"

#include <cstdio>
#include <sstream>

namespace isograph {

SimplexBound simplex_bound(std::span<const double> x) {
  if (x.empty()) throw Error(ErrorKind::InvalidInput, "simplex point needs at least one coordinate");
  if (x.front() < 0.0) throw Error(ErrorKind::InvalidInput, "simplex coordinates must be non-negative");
  SimplexBound out;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] < x[i - 1]) throw Error(ErrorKind::InvalidInput, "simplex coordinates must be non-decreasing");
    out.value += x[i - 1] * (x[i] - x[i - 1]);
  }
  const double m = double(x.size() - 1);
  const double n = x.back();
  out.bound = m * n * n / (2.0 * (m + 1.0));
  return out;
}

nlohmann::json Measurements::to_json() const {
  return {{"N", n}, {"s", s}, {"k", k}, {"m", m}, {"ell", ell}, {"p", p}};
}

ScaleConditions scale_conditions(const Measurements& m, double ratio) {
  const double n = double(m.n);
  ScaleConditions c;
  c.p_much_less_s = double(m.p) <= ratio * double(m.s);
  c.s_much_less_n = double(m.s) <= ratio * n;
  c.depth_much_less_n = double(m.k + m.p) <= ratio * n;
  c.branch_work_much_less_cube = double(m.p) * double(m.k + 1) * double(m.m) <= ratio * n * n * n;
  return c;
}

double lift_cost(std::span<const std::size_t> level_sizes) {
  double cost = 0.0;
  for (std::size_t j = 1; j < level_sizes.size(); ++j)
    cost += double(j) * double(level_sizes[j - 1]) * double(level_sizes[j] - level_sizes[j - 1]);
  return cost;
}

bool CostReport::bounds_hold() const {
  const double s = double(after.s);
  return step3 <= branch_bound && step4 <= branch_bound &&
         step5 == double(after.ell) * s * s * s && step6 <= lift_bound;
}

CostReport bound_report(const Measurements& m, double ratio) {
  CostReport r;
  r.before = m;
  r.after = m;
  const double n = double(m.n);
  const double s = double(m.s);
  r.branch_bound = double(m.p) * double(m.k + 1) * double(m.m);
  r.step3 = r.branch_bound;
  r.step4 = r.branch_bound;
  r.step5 = double(m.ell) * s * s * s;
  r.lift_bound_claimed = double(m.k + m.p) * n * n / 2.0;
  r.lift_bound = r.lift_bound_claimed;
  r.step6 = r.lift_bound_claimed;
  r.baseline = double(m.ell) * n * n * n;
  r.savings = 1.0 - (r.step3 + r.step4 + r.step5 + r.step6) / r.baseline;
  r.conditions = scale_conditions(m, ratio);
  r.ops_applied = m.p;
  return r;
}

nlohmann::json CostReport::to_json() const {
  return {
      {"before", before.to_json()},
      {"after", after.to_json()},
      {"costs",
       {{"step3_branches", step3},
        {"step4_extended_matrix", step4},
        {"step4_of_which_reweight", step4_reweight},
        {"step5_reduced_eigenvector", step5},
        {"step6_lift", step6},
        {"baseline_full_iteration", baseline}}},
      {"savings", savings},
      {"bounds",
       {{"branch_bound", branch_bound},
        {"lift_bound", lift_bound},
        {"lift_bound_k_plus_p", lift_bound_claimed},
        {"depth_within_k_plus_p", depth_within_k_plus_p},
        {"hold", bounds_hold()}}},
      {"scale_conditions",
       {{"p_much_less_s", conditions.p_much_less_s},
        {"s_much_less_N", conditions.s_much_less_n},
        {"k_plus_p_much_less_N", conditions.depth_much_less_n},
        {"branch_work_much_less_N3", conditions.branch_work_much_less_cube},
        {"all", conditions.all()}}},
      {"session",
       {{"ops_applied", ops_applied},
        {"promotions", promotions},
        {"structural_fallback", structural_fallback},
        {"power_iterations", power_iterations},
        {"eigen_residual", eigen_residual}}},
  };
}

std::string CostReport::table() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "N=%zu s=%zu k=%zu m=%zu ell=%zu p=%zu  ->  N'=%zu s'=%zu k'=%zu m'=%zu\n",
                before.n, before.s, before.k, before.m, before.ell, before.p, after.n, after.s,
                after.k, after.m);
  out << line;
  auto row = [&](const char* name, double value, double bound) {
    if (bound >= 0.0)
      std::snprintf(line, sizeof line, "  %-28s %14.0f   (bound %.0f)\n", name, value, bound);
    else
      std::snprintf(line, sizeof line, "  %-28s %14.0f\n", name, value);
    out << line;
  };
  row("step 3  branch set", step3, branch_bound);
  row("step 4  extended matrix", step4, branch_bound);
  row("step 5  reduced eigenvector", step5, -1.0);
  row("step 6  lift", step6, lift_bound);
  row("full re-iteration ell*N^3", baseline, -1.0);
  std::snprintf(line, sizeof line, "  savings %.2f%%   bounds %s   scale conditions %s\n", 100.0 * savings,
                bounds_hold() ? "hold" : "VIOLATED", conditions.all() ? "met" : "not met");
  out << line;
  return out.str();
}

}  // namespace isograph
