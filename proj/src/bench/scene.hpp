#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mlpnp/mlpnp.hpp"

namespace mlpnp::bench {

using Vec3d = Vec3<double>;
using Mat3d = Mat3<double>;

enum class NoiseKind {
  uniform_sigma,      // every feature at the same sigma
  mixed_deciles,      // 10% of the features at each of ten levels up to sigma_max
  per_point_uniform,  // per-feature sigma drawn from U(0, sigma_max)
};

struct NoiseModel {
  NoiseKind kind = NoiseKind::uniform_sigma;
  double sigma = 1.0;  // the sigma itself, or sigma_max for the mixed models

  static NoiseModel uniform(double s) { return {NoiseKind::uniform_sigma, s}; }
  static NoiseModel deciles(double s_max) { return {NoiseKind::mixed_deciles, s_max}; }
  static NoiseModel per_point(double s_max) { return {NoiseKind::per_point_uniform, s_max}; }
};

struct SceneConfig {
  int n_points = 50;
  NoiseModel noise;
  bool planar = false;
  double focal = 800.0;
  Vec3d box_min = Vec3d(-2.0, -2.0, 4.0);  // camera-frame sampling box
  Vec3d box_max = Vec3d(2.0, 2.0, 8.0);
  double noise_scale = 1.0;  // actual noise = noise_scale * stated sigma
  std::uint64_t seed = 0;
};

struct Scene {
  Posed ground_truth;
  std::vector<Correspondenced> corrs;
  std::vector<ImageObservationd> pixels;  // noisy pixel + stated covariance
  std::vector<double> stated_sigmas;      // pixel sigma announced to the solver, per feature
};

std::mt19937_64 rng_for_trial(std::uint64_t seed, std::uint64_t trial_index);

Mat3d random_rotation(std::mt19937_64& rng);

// Synthetic scene: points sampled in the camera frame (ordinary) or on the
// world plane z = 0 (planar), projected with a pinhole camera, perturbed per
// noise model and propagated to bearing observations. Deterministic in
// (config.seed, trial_index).
Scene generate_scene(const SceneConfig& cfg, std::uint64_t trial_index);

// Same geometry and stated covariances, fresh pixel noise: supports repeated
// noise realizations of one fixed scene.
Scene resample_observations(const SceneConfig& cfg, const Scene& base,
                            std::uint64_t noise_trial);

// Maximum angular deviation over the three column pairs, in degrees.
double rotation_error_deg(const Mat3d& rot_gt, const Mat3d& rot);

// ||t_gt - t|| / ||t|| * 100; the denominator is the estimate.
double translation_error_pct(const Vec3d& t_gt, const Vec3d& t);

}  // namespace mlpnp::bench
