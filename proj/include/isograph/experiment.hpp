#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "isograph/generator.hpp"

namespace isograph {

struct ExperimentConfig {
  std::size_t n = 60;
  double degree_lo = 2.0;  ///< average out-degree drawn uniformly per trial
  double degree_hi = 3.0;
  std::size_t p = 3;
  std::size_t ell = 10;
  std::size_t trials = 50;
  std::uint64_t seed = 1;
  double ratio = 0.1;       ///< a << b means a <= ratio * b
  double threshold = 0.7;   ///< savings a trial must beat
  DeltaMix mix{1.0, 0.0, 0.0, 0.0, false};  ///< edge insertions only unless configured
  bool compare_scratch = true;  ///< also rebuild from scratch and compare
};

struct TrialResult {
  std::size_t id = 0;
  std::uint64_t seed = 0;
  double degree = 0.0;
  CostReport report;
  bool matches_scratch = true;  ///< S', branches, extended matrix (1e-12) and eigenvector (1e-8)
  std::string delta;            ///< compact JSON of the delta
};

struct TrialFailure {
  std::size_t id = 0;
  std::uint64_t seed = 0;
  std::string error;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialResult> trials;     ///< completed trials, sorted by id
  std::vector<TrialFailure> failures;  ///< trials that threw, sorted by id; the rest still run

  double fraction_above_threshold() const;
  double fraction_meeting_conditions() const;
  double fraction_bounds_hold() const;
  double fraction_matching_scratch() const;
  double mean_savings() const;
  double median_savings() const;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Throws InvalidInput unless n >= 3, 1 <= degree_lo <= degree_hi and trials >= 1.
void validate(const ExperimentConfig& cfg);

/// One trial: generate, build, draw a delta (empty when p = 0), update incrementally, report costs.
TrialResult run_trial(const ExperimentConfig& cfg, std::size_t id);

/// Runs all trials in parallel (OpenMP); per-trial seeds derive from cfg.seed, so the
/// result does not depend on the thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);
ExperimentResult run_experiment_serial(const ExperimentConfig& cfg);

/// Compares an incremental result with a scratch rebuild.
bool states_match(const StoredState& incremental, const StoredState& scratch, double matrix_tol = 1e-12,
                  double eigen_tol = 1e-8);

}  // namespace isograph
