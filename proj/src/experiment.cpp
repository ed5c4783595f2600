#include "isograph/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace isograph {

bool states_match(const StoredState& a, const StoredState& b, double matrix_tol, double eigen_tol) {
  if (a.structural.members != b.structural.members) return false;
  if (a.structural.depth_of != b.structural.depth_of) return false;
  if (!(a.branches == b.branches)) return false;
  if (a.extended.entries.rows() != b.extended.entries.rows()) return false;
  if ((a.extended.entries - b.extended.entries).cwiseAbs().maxCoeff() > matrix_tol) return false;
  if (a.dominant.vertices != b.dominant.vertices) return false;
  return (a.dominant.vector - b.dominant.vector).cwiseAbs().maxCoeff() <= eigen_tol;
}

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t id) {
  TrialResult t;
  t.id = id;
  t.seed = derive_seed(cfg.seed, id);
  Rng rng(t.seed);
  t.degree = rng.uniform(cfg.degree_lo, cfg.degree_hi);
  GeneratorOptions gen;
  gen.n = cfg.n;
  gen.avg_out_degree = t.degree;
  const auto before = StoredState::build(generate_random_graph(gen, rng));
  const auto delta = cfg.p == 0 ? GraphDelta{} : random_delta(before, cfg.p, rng, cfg.mix);
  t.delta = delta.to_json().dump();
  const auto out = update(before, delta);
  t.report = cost_report(before, out.state, delta, out.log, cfg.ell, cfg.ratio);
  if (cfg.compare_scratch) t.matches_scratch = states_match(out.state, scratch_update(before, delta));
  return t;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.n < 3) throw Error(ErrorKind::InvalidInput, "experiment needs N >= 3");
  if (!(cfg.degree_lo >= 1.0) || !(cfg.degree_hi >= cfg.degree_lo))
    throw Error(ErrorKind::InvalidInput, "average degree range must satisfy 1 <= lo <= hi");
  if (cfg.trials < 1) throw Error(ErrorKind::InvalidInput, "experiment needs at least one trial");
}

namespace {

ExperimentResult collect(const ExperimentConfig& cfg, std::vector<TrialResult>& done, std::vector<std::string>& errors) {
  ExperimentResult r;
  r.config = cfg;
  for (std::size_t id = 0; id < cfg.trials; ++id) {
    if (errors[id].empty())
      r.trials.push_back(std::move(done[id]));
    else
      r.failures.push_back({id, derive_seed(cfg.seed, id), errors[id]});
  }
  return r;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<TrialResult> done(cfg.trials);
  std::vector<std::string> errors(cfg.trials);
#pragma omp parallel for schedule(dynamic)
  for (long long id = 0; id < static_cast<long long>(cfg.trials); ++id) {
    try {
      done[std::size_t(id)] = run_trial(cfg, std::size_t(id));
    } catch (const std::exception& e) {
      errors[std::size_t(id)] = e.what();
    }
  }
  return collect(cfg, done, errors);
}

ExperimentResult run_experiment_serial(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<TrialResult> done(cfg.trials);
  std::vector<std::string> errors(cfg.trials);
  for (std::size_t id = 0; id < cfg.trials; ++id) {
    try {
      done[id] = run_trial(cfg, id);
    } catch (const std::exception& e) {
      errors[id] = e.what();
    }
  }
  return collect(cfg, done, errors);
}

namespace {

template <class Pred>
double fraction(const std::vector<TrialResult>& trials, Pred pred) {
  if (trials.empty()) return 0.0;
  return double(std::count_if(trials.begin(), trials.end(), pred)) / double(trials.size());
}

}  // namespace

double ExperimentResult::fraction_above_threshold() const {
  return fraction(trials, [&](const TrialResult& t) { return t.report.savings > config.threshold; });
}
double ExperimentResult::fraction_meeting_conditions() const {
  return fraction(trials, [](const TrialResult& t) { return t.report.conditions.all(); });
}
double ExperimentResult::fraction_bounds_hold() const {
  return fraction(trials, [](const TrialResult& t) { return t.report.bounds_hold(); });
}
double ExperimentResult::fraction_matching_scratch() const {
  return fraction(trials, [](const TrialResult& t) { return t.matches_scratch; });
}

double ExperimentResult::mean_savings() const {
  if (trials.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& t : trials) sum += t.report.savings;
  return sum / double(trials.size());
}

double ExperimentResult::median_savings() const {
  if (trials.empty()) return 0.0;
  std::vector<double> s;
  for (const auto& t : trials) s.push_back(t.report.savings);
  std::sort(s.begin(), s.end());
  const auto n = s.size();
  return n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

nlohmann::json ExperimentResult::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& t : trials) {
    auto j = t.report.to_json();
    j["id"] = t.id;
    j["seed"] = t.seed;
    j["degree"] = t.degree;
    j["matches_scratch"] = t.matches_scratch;
    j["delta"] = nlohmann::json::parse(t.delta);
    list.push_back(std::move(j));
  }
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& f : failures) failed.push_back({{"id", f.id}, {"seed", f.seed}, {"error", f.error}});
  return {{"config",
           {{"N", config.n},
            {"degree", {config.degree_lo, config.degree_hi}},
            {"p", config.p},
            {"ell", config.ell},
            {"trials", config.trials},
            {"seed", config.seed},
            {"ratio", config.ratio},
            {"threshold", config.threshold}}},
          {"summary",
           {{"fraction_above_threshold", fraction_above_threshold()},
            {"fraction_meeting_scale_conditions", fraction_meeting_conditions()},
            {"fraction_bounds_hold", fraction_bounds_hold()},
            {"fraction_matching_scratch", fraction_matching_scratch()},
            {"mean_savings", mean_savings()},
            {"median_savings", median_savings()},
            {"failed_trials", failures.size()}}},
          {"trials", std::move(list)},
          {"failures", std::move(failed)}};
}

std::string ExperimentResult::to_csv() const {
  std::ostringstream out;
  out << "id,seed,degree,N,s,k,m,N2,s2,k2,m2,step3,step4,step5,step6,baseline,savings,bounds_hold,"
         "depth_within_k_plus_p,scale_conditions,matches_scratch\n";
  char line[512];
  for (const auto& t : trials) {
    const auto& r = t.report;
    std::snprintf(line, sizeof line,
                  "%zu,%llu,%.6f,%zu,%zu,%zu,%zu,%zu,%zu,%zu,%zu,%.0f,%.0f,%.0f,%.0f,%.0f,%.6f,%d,%d,%d,%d\n", t.id,
                  static_cast<unsigned long long>(t.seed), t.degree, r.before.n, r.before.s, r.before.k, r.before.m,
                  r.after.n, r.after.s, r.after.k, r.after.m, r.step3, r.step4, r.step5, r.step6, r.baseline,
                  r.savings, int(r.bounds_hold()), int(r.depth_within_k_plus_p), int(r.conditions.all()),
                  int(t.matches_scratch));
    out << line;
  }
  return out.str();
}

}  // namespace isograph
