#include <doctest.h>

#include <map>
#include <random>

#include "bench/experiment.hpp"
#include "bench/scene.hpp"
#include "bench/sequence.hpp"
#include "oracles.hpp"

using namespace mlpnp;
using namespace mlpnp::bench;

TEST_CASE("rotation error of an identical rotation is zero") {
  std::mt19937_64 rng(401);
  const Mat3d rot = testing::random_rotation_matrix(rng);
  CHECK(rotation_error_deg(rot, rot) == 0.0);
}

TEST_CASE("rotation error of a one-degree turn about a column is exactly one degree") {
  std::mt19937_64 rng(409);
  const Mat3d rot = testing::random_rotation_matrix(rng);
  const Vec3d axis = rot.col(0);
  const Mat3d turned = rodrigues_to_matrix<double>(axis * (M_PI / 180.0)) * rot;
  CHECK(rotation_error_deg(rot, turned) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rotation error is bounded by the applied angle") {
  std::mt19937_64 rng(419);
  std::uniform_real_distribution<double> u(0.0, M_PI / 2);
  for (int i = 0; i < 200; ++i) {
    const Mat3d rot = testing::random_rotation_matrix(rng);
    const double theta = u(rng);
    const Mat3d turned =
        rodrigues_to_matrix<double>(testing::random_unit_vector(rng) * theta) * rot;
    CHECK(rotation_error_deg(rot, turned) <= theta * 180.0 / M_PI + 1e-9);
    CHECK(rotation_error_deg(rot, turned) <= 180.0);
  }
}

TEST_CASE("translation error metric") {
  const Vec3d t(1.0, -2.0, 3.0);
  CHECK(translation_error_pct(t, t) == 0.0);
  CHECK(translation_error_pct(t, 2.0 * t) == doctest::Approx(50.0));

  // first order in a small perturbation
  const Vec3d delta(1e-4, -2e-4, 0.5e-4);
  const double err = translation_error_pct(t, t + delta);
  CHECK(err == doctest::Approx(100.0 * delta.norm() / t.norm()).epsilon(1e-3));

  CHECK_THROWS_AS(translation_error_pct(t, Vec3d::Zero()), Error);
}

TEST_CASE("noise-free scenes are exactly consistent") {
  SceneConfig cfg;
  cfg.n_points = 20;
  cfg.noise = NoiseModel::uniform(0.0);
  cfg.seed = 421;
  for (bool planar : {false, true}) {
    cfg.planar = planar;
    const Scene scene = generate_scene(cfg, 3);
    for (const auto& corr : scene.corrs) {
      const Vec3d predicted = scene.ground_truth.transform(corr.point);
      CHECK((predicted.normalized() - corr.observation.direction).norm() < 1e-12);
      CHECK(predicted.norm() > 0.0);
    }
  }
}

TEST_CASE("planar scenes have zero world z") {
  SceneConfig cfg;
  cfg.n_points = 15;
  cfg.planar = true;
  cfg.seed = 431;
  const Scene scene = generate_scene(cfg, 0);
  for (const auto& corr : scene.corrs) CHECK(corr.point.z() == 0.0);
}

TEST_CASE("mixed deciles assign ten percent of the features to each level") {
  SceneConfig cfg;
  cfg.n_points = 50;
  cfg.noise = NoiseModel::deciles(10.0);
  cfg.seed = 433;
  const Scene scene = generate_scene(cfg, 0);
  std::map<double, int> counts;
  for (double s : scene.stated_sigmas) counts[s]++;
  REQUIRE(counts.size() == 10);
  for (const auto& [sigma, count] : counts) {
    CHECK(count == 5);
    CHECK(sigma >= 1.0);
    CHECK(sigma <= 10.0);
  }
}

TEST_CASE("scene generation is deterministic in seed and trial") {
  SceneConfig cfg;
  cfg.n_points = 12;
  cfg.noise = NoiseModel::per_point(4.0);
  cfg.seed = 439;
  const Scene a = generate_scene(cfg, 7);
  const Scene b = generate_scene(cfg, 7);
  REQUIRE(a.corrs.size() == b.corrs.size());
  CHECK(a.ground_truth.rotation == b.ground_truth.rotation);
  for (size_t i = 0; i < a.corrs.size(); ++i) {
    CHECK(a.corrs[i].point == b.corrs[i].point);
    CHECK(a.corrs[i].observation.direction == b.corrs[i].observation.direction);
    CHECK(a.corrs[i].observation.reduced_cov == b.corrs[i].observation.reduced_cov);
  }

  const Scene c = generate_scene(cfg, 8);
  CHECK((a.ground_truth.rotation - c.ground_truth.rotation).norm() > 0.0);
}

TEST_CASE("experiment on noise-free scenes reports vanishing errors") {
  SceneConfig cfg;
  cfg.n_points = 10;
  cfg.noise = NoiseModel::uniform(0.0);
  cfg.seed = 443;
  const auto report = run_experiment(cfg, 20, {{"ml", true}, {"id", false}});
  REQUIRE(report.solvers.size() == 2);
  for (const auto& agg : report.solvers) {
    CHECK(agg.n_ok == 20);
    CHECK(agg.mean_rot_err_deg < 1e-6);
    CHECK(agg.mean_trans_err_pct < 1e-6);
  }
}

TEST_CASE("experiment reports are reproducible") {
  SceneConfig cfg;
  cfg.n_points = 10;
  cfg.noise = NoiseModel::deciles(5.0);
  cfg.seed = 449;
  const auto a = run_experiment(cfg, 10, {{"ml", true}});
  const auto b = run_experiment(cfg, 10, {{"ml", true}});
  REQUIRE(a.trials.size() == b.trials.size());
  for (size_t i = 0; i < a.trials.size(); ++i) {
    CHECK(a.trials[i].rot_err_deg == b.trials[i].rot_err_deg);
    CHECK(a.trials[i].trans_err_pct == b.trials[i].trans_err_pct);
    CHECK(a.trials[i].sigma0_sq == b.trials[i].sigma0_sq);
  }
}

TEST_CASE("median of means") {
  CHECK(median_of_means({1.0, 1.0, 1.0}) == doctest::Approx(1.0));
  CHECK(median_of_means({}) == 0.0);
  // robust to one outlier
  std::vector<double> values(100, 2.0);
  values[50] = 1e6;
  CHECK(median_of_means(values) == doctest::Approx(2.0));
}

TEST_CASE("single-frame sequence matches the plain solve") {
  SequenceConfig cfg;
  cfg.n_points = 12;
  cfg.n_frames = 1;
  cfg.trials = 10;
  cfg.seed = 457;
  const auto report = run_sequence(cfg);
  REQUIRE(report.frames.size() == 1);
  CHECK(report.n_ok == 10);
  CHECK(report.frames[0].mean_rot_plain == report.frames[0].mean_rot_feedback);
  CHECK(report.frames[0].mean_trans_plain == report.frames[0].mean_trans_feedback);
}

TEST_CASE("sequence runs are deterministic") {
  SequenceConfig cfg;
  cfg.n_points = 10;
  cfg.n_frames = 2;
  cfg.trials = 5;
  cfg.seed = 461;
  const auto a = run_sequence(cfg);
  const auto b = run_sequence(cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].rot_plain == b.rows[i].rot_plain);
    CHECK(a.rows[i].rot_feedback == b.rows[i].rot_feedback);
  }
}
