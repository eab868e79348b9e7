#pragma once

#include <string>
#include <vector>

#include "bench/scene.hpp"

namespace mlpnp::bench {

struct SolverSpec {
  std::string name;
  bool use_covariance = true;
};

struct TrialRecord {
  std::uint64_t trial = 0;
  std::string solver;
  bool ok = false;
  std::string error;
  double rot_err_deg = 0.0;
  double trans_err_pct = 0.0;
  double runtime_sec = 0.0;
  double sigma0_sq = 0.0;
  Vec6<double> internal_sigmas = Vec6<double>::Zero();
};

struct SolverAggregate {
  std::string name;
  int n_ok = 0;
  double mean_rot_err_deg = 0.0;
  double mean_trans_err_pct = 0.0;
  double mean_sigma0_sq = 0.0;
  double runtime_sec = 0.0;  // median-of-means over trials
};

struct ExperimentReport {
  std::vector<TrialRecord> trials;       // T rows per solver
  std::vector<SolverAggregate> solvers;  // aggregated over commonly successful trials
};

// Repeats the scene T times (common random numbers: every solver sees the
// identical correspondences of a trial) and aggregates the error metrics.
// Solver failures are recorded per trial, not fatal; aggregation uses the
// trials in which every solver succeeded.
ExperimentReport run_experiment(const SceneConfig& cfg, int n_trials,
                                const std::vector<SolverSpec>& solvers);

double median_of_means(std::vector<double> values, int n_groups = 10);

}  // namespace mlpnp::bench
