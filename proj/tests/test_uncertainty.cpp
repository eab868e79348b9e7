#include <doctest.h>

#include <algorithm>
#include <random>

#include "bench/scene.hpp"
#include "mlpnp/solver.hpp"
#include "oracles.hpp"

using namespace mlpnp;
using bench::NoiseModel;
using bench::SceneConfig;

namespace {

bench::Scene make_scene(int n, double sigma, std::uint64_t seed, std::uint64_t trial = 0) {
  SceneConfig cfg;
  cfg.n_points = n;
  cfg.noise = NoiseModel::uniform(sigma);
  cfg.seed = seed;
  return bench::generate_scene(cfg, trial);
}

}  // namespace

TEST_CASE("doubling every reduced covariance doubles the pose covariance") {
  const auto scene = make_scene(20, 2.0, 301);
  const auto sol = solve<double>(scene.corrs);
  const Mat6<double> base = pose_covariance<double>(scene.corrs, sol.pose);

  std::vector<Correspondenced> scaled = scene.corrs;
  for (auto& corr : scaled) {
    corr.observation.cov *= 2.0;
    corr.observation.reduced_cov *= 2.0;
  }
  const Mat6<double> doubled = pose_covariance<double>(scaled, sol.pose);
  CHECK((doubled - 2.0 * base).norm() < 1e-12 * base.norm());
}

TEST_CASE("more observations shrink the pose covariance") {
  SceneConfig cfg;
  cfg.n_points = 20;
  cfg.noise = NoiseModel::uniform(2.0);
  cfg.seed = 307;
  const auto big = bench::generate_scene(cfg, 0);
  const std::vector<Correspondenced> small(big.corrs.begin(), big.corrs.begin() + 10);

  const auto sol = solve<double>(big.corrs);
  const Mat6<double> cov_small = pose_covariance<double>(small, sol.pose);
  const Mat6<double> cov_big = pose_covariance<double>(big.corrs, sol.pose);
  CHECK(cov_big.trace() < cov_small.trace());
}

TEST_CASE("pose covariance is invariant under correspondence relabeling") {
  const auto scene = make_scene(15, 1.5, 311);
  const auto sol = solve<double>(scene.corrs);
  const Mat6<double> base = pose_covariance<double>(scene.corrs, sol.pose);

  std::vector<Correspondenced> shuffled = scene.corrs;
  std::mt19937_64 rng(313);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const Mat6<double> permuted = pose_covariance<double>(shuffled, sol.pose);
  CHECK((base - permuted).norm() < 1e-9 * base.norm());
}

TEST_CASE("variance factor of zero residuals is zero") {
  const auto scene = make_scene(10, 0.0, 317);
  const auto sol = solve<double>(scene.corrs);
  CHECK(variance_factor<double>(scene.corrs, sol.pose) < 1e-18);
}

TEST_CASE("variance factor requires positive redundancy") {
  VecX<double> residuals = VecX<double>::Zero(6);
  std::vector<Mat2<double>> weights(3, Mat2<double>::Identity());
  CHECK_THROWS_AS(variance_factor<double>(residuals, weights, 3), Error);
  try {
    variance_factor<double>(residuals, weights, 3);
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::zero_redundancy);
  }
}

TEST_CASE("variance factor is near one under a correct noise model") {
  double mean = 0.0;
  const int trials = 60;
  SceneConfig cfg;
  cfg.n_points = 50;
  cfg.noise = NoiseModel::uniform(2.0);
  cfg.seed = 331;
  for (int t = 0; t < trials; ++t) {
    const auto scene = bench::generate_scene(cfg, static_cast<std::uint64_t>(t));
    mean += solve<double>(scene.corrs).sigma0_sq;
  }
  mean /= trials;
  CHECK(mean > 0.85);
  CHECK(mean < 1.15);
}

TEST_CASE("variance factor scales with squared misspecification") {
  double mean = 0.0;
  const int trials = 60;
  SceneConfig cfg;
  cfg.n_points = 50;
  cfg.noise = NoiseModel::uniform(2.0);
  cfg.noise_scale = 2.0;  // actual noise is twice the stated sigma
  cfg.seed = 337;
  for (int t = 0; t < trials; ++t) {
    const auto scene = bench::generate_scene(cfg, static_cast<std::uint64_t>(t));
    mean += solve<double>(scene.corrs).sigma0_sq;
  }
  mean /= trials;
  CHECK(mean > 3.2);
  CHECK(mean < 4.8);
}

TEST_CASE("internal sigmas basics") {
  Mat6<double> cov = Mat6<double>::Identity();
  CHECK((internal_sigmas<double>(cov, 1.0) - Vec6<double>::Ones()).norm() == 0.0);
  CHECK((internal_sigmas<double>(cov, 4.0) - 2.0 * Vec6<double>::Ones()).norm() < 1e-15);

  // monotone in the variance factor
  cov.diagonal() << 1, 2, 3, 4, 5, 6;
  const Vec6<double> lo = internal_sigmas<double>(cov, 0.5);
  const Vec6<double> hi = internal_sigmas<double>(cov, 2.0);
  CHECK((hi.array() > lo.array()).all());
}

TEST_CASE("variance factor is consistent in the planar branch too") {
  SceneConfig cfg;
  cfg.n_points = 50;
  cfg.noise = NoiseModel::uniform(2.0);
  cfg.planar = true;
  cfg.seed = 341;
  double mean = 0.0;
  const int trials = 40;
  for (int t = 0; t < trials; ++t) {
    const auto sol = solve<double>(bench::generate_scene(cfg, static_cast<std::uint64_t>(t)).corrs);
    CHECK(sol.diagnostics.planar);
    mean += sol.sigma0_sq;
  }
  mean /= trials;
  CHECK(mean > 0.8);
  CHECK(mean < 1.2);
}

TEST_CASE("feedback covariances rebind onto a nearby direction") {
  const auto scene = make_scene(12, 1.0, 349);
  const auto sol = solve<double>(scene.corrs);
  const auto fed = observation_cofactor_feedback<double>(scene.corrs, sol.pose, sol.param_cov);

  std::mt19937_64 rng(351);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (size_t i = 0; i < fed.size(); ++i) {
    // small angular perturbation stands in for the next frame's direction
    Vec3<double> dir = scene.corrs[i].observation.direction;
    dir += 0.02 * Vec3<double>(gauss(rng), gauss(rng), gauss(rng));
    const auto obs = bearing_with_covariance<double>(dir, fed[i]);
    CHECK(std::abs(obs.direction.norm() - 1.0) < 1e-12);
    Eigen::SelfAdjointEigenSolver<Mat2<double>> eig(obs.reduced_cov);
    CHECK(eig.eigenvalues()[0] >= 1e-14);  // usable as a weight
  }
}

TEST_CASE("cofactor feedback produces symmetric PSD blocks with v in the kernel") {
  const auto scene = make_scene(15, 2.0, 347);
  const auto sol = solve<double>(scene.corrs);
  const auto fed = observation_cofactor_feedback<double>(scene.corrs, sol.pose, sol.param_cov);
  REQUIRE(fed.size() == scene.corrs.size());
  for (size_t i = 0; i < fed.size(); ++i) {
    const Mat3<double>& sigma = fed[i];
    CHECK((sigma - sigma.transpose()).norm() < 1e-15);
    Eigen::SelfAdjointEigenSolver<Mat3<double>> eig(sigma);
    CHECK(eig.eigenvalues()[0] > -1e-15);
    CHECK((sigma * scene.corrs[i].observation.direction).norm() <
          1e-12 * (1.0 + sigma.norm()));
  }
}

TEST_CASE("internal sigmas track the external scatter on a fixed scene") {
  // light version of the full consistency experiment: moderate trial count,
  // generous tolerance
  SceneConfig cfg;
  cfg.n_points = 50;
  cfg.noise = NoiseModel::per_point(5.0);
  cfg.seed = 353;
  const int trials = 300;

  const auto base = bench::generate_scene(cfg, 0);  // fixed geometry

  std::vector<Vec6<double>> params;
  Vec6<double> sigma_sum = Vec6<double>::Zero();
  for (int t = 0; t < trials; ++t) {
    const auto scene = bench::resample_observations(cfg, base, static_cast<std::uint64_t>(t));
    const auto sol = solve<double>(scene.corrs);
    Vec6<double> p;
    p.head<3>() = matrix_to_rodrigues(sol.pose.rotation);
    p.tail<3>() = sol.pose.translation;
    params.push_back(p);
    sigma_sum += sol.sigmas;
  }

  Vec6<double> mean = Vec6<double>::Zero();
  for (const auto& p : params) mean += p;
  mean /= static_cast<double>(params.size());
  Vec6<double> var = Vec6<double>::Zero();
  for (const auto& p : params) var += (p - mean).cwiseProduct(p - mean);
  var /= static_cast<double>(params.size() - 1);

  const Vec6<double> external = var.cwiseSqrt();
  const Vec6<double> internal = sigma_sum / static_cast<double>(params.size());
  for (int k = 0; k < 6; ++k) {
    const double ratio = internal[k] / external[k];
    CHECK(ratio > 0.75);
    CHECK(ratio < 1.25);
  }
}
