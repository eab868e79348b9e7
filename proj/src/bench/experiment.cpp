#include "bench/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <map>

namespace mlpnp::bench {

double median_of_means(std::vector<double> values, int n_groups) {
  if (values.empty()) return 0.0;
  n_groups = std::min<int>(n_groups, static_cast<int>(values.size()));
  std::vector<double> means(static_cast<size_t>(n_groups), 0.0);
  std::vector<int> counts(static_cast<size_t>(n_groups), 0);
  for (size_t i = 0; i < values.size(); ++i) {
    means[i % static_cast<size_t>(n_groups)] += values[i];
    counts[i % static_cast<size_t>(n_groups)]++;
  }
  for (size_t g = 0; g < means.size(); ++g) means[g] /= counts[g];
  std::sort(means.begin(), means.end());
  const size_t mid = means.size() / 2;
  return means.size() % 2 == 1 ? means[mid] : 0.5 * (means[mid - 1] + means[mid]);
}

ExperimentReport run_experiment(const SceneConfig& cfg, int n_trials,
                                const std::vector<SolverSpec>& solvers) {
  ExperimentReport report;
  report.trials.reserve(static_cast<size_t>(n_trials) * solvers.size());

  for (int trial = 0; trial < n_trials; ++trial) {
    const Scene scene = generate_scene(cfg, static_cast<std::uint64_t>(trial));
    for (const auto& spec : solvers) {
      TrialRecord rec;
      rec.trial = static_cast<std::uint64_t>(trial);
      rec.solver = spec.name;
      try {
        SolverOptionsd opts;
        opts.use_covariance = spec.use_covariance;
        const auto t0 = std::chrono::steady_clock::now();
        const PoseSolutiond sol = solve<double>(scene.corrs, opts);
        const auto t1 = std::chrono::steady_clock::now();
        rec.ok = true;
        rec.runtime_sec = std::chrono::duration<double>(t1 - t0).count();
        rec.rot_err_deg = rotation_error_deg(scene.ground_truth.rotation, sol.pose.rotation);
        rec.trans_err_pct =
            translation_error_pct(scene.ground_truth.translation, sol.pose.translation);
        rec.sigma0_sq = sol.sigma0_sq;
        rec.internal_sigmas = sol.sigmas;
      } catch (const Error& err) {
        rec.ok = false;
        rec.error = err.what();
      }
      report.trials.push_back(std::move(rec));
    }
  }

  // Trials where every solver succeeded keep the comparison paired.
  std::map<std::uint64_t, int> ok_count;
  for (const auto& rec : report.trials)
    if (rec.ok) ok_count[rec.trial]++;

  for (const auto& spec : solvers) {
    SolverAggregate agg;
    agg.name = spec.name;
    std::vector<double> runtimes;
    for (const auto& rec : report.trials) {
      if (rec.solver != spec.name || !rec.ok) continue;
      if (ok_count[rec.trial] != static_cast<int>(solvers.size())) continue;
      agg.n_ok++;
      agg.mean_rot_err_deg += rec.rot_err_deg;
      agg.mean_trans_err_pct += rec.trans_err_pct;
      agg.mean_sigma0_sq += rec.sigma0_sq;
      runtimes.push_back(rec.runtime_sec);
    }
    if (agg.n_ok > 0) {
      agg.mean_rot_err_deg /= agg.n_ok;
      agg.mean_trans_err_pct /= agg.n_ok;
      agg.mean_sigma0_sq /= agg.n_ok;
      agg.runtime_sec = median_of_means(runtimes);
    }
    report.solvers.push_back(std::move(agg));
  }
  return report;
}

}  // namespace mlpnp::bench
