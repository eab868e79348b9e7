#include "bench/scene.hpp"

#include <algorithm>
#include <cmath>

namespace mlpnp::bench {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double stated_sigma(const NoiseModel& noise, int feature, std::mt19937_64& rng) {
  switch (noise.kind) {
    case NoiseKind::uniform_sigma:
      return noise.sigma;
    case NoiseKind::mixed_deciles:
      // ten equal shares at levels sigma_max * {1/10, ..., 10/10}
      return noise.sigma * static_cast<double>(feature % 10 + 1) / 10.0;
    case NoiseKind::per_point_uniform: {
      // a near-zero draw would state a near-perfect measurement, which the
      // covariance chain rightly rejects as degenerate; keep draws physical
      std::uniform_real_distribution<double> u(0.0, noise.sigma);
      return std::max(u(rng), std::min(1e-3, noise.sigma));
    }
  }
  return noise.sigma;
}

}  // namespace

std::mt19937_64 rng_for_trial(std::uint64_t seed, std::uint64_t trial_index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(trial_index ^ 0x517cc1b727220a95ull)));
}

Mat3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  q.normalize();
  return q.toRotationMatrix();
}

Scene generate_scene(const SceneConfig& cfg, std::uint64_t trial_index) {
  std::mt19937_64 rng = rng_for_trial(cfg.seed, trial_index);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = cfg.n_points;

  Scene scene;
  scene.corrs.reserve(static_cast<size_t>(n));
  scene.stated_sigmas.reserve(static_cast<size_t>(n));

  std::vector<Vec3d> world(static_cast<size_t>(n));
  std::vector<Vec3d> camera_frame(static_cast<size_t>(n));

  if (cfg.planar) {
    // Points on the world plane z = 0, centered so their centroid is the
    // origin; the camera then sits at the centroid distance on its own axis,
    // which keeps every depth positive.
    std::uniform_real_distribution<double> ux(cfg.box_min.x(), cfg.box_max.x());
    std::uniform_real_distribution<double> uy(cfg.box_min.y(), cfg.box_max.y());
    Vec3d mean = Vec3d::Zero();
    for (auto& p : world) {
      p = Vec3d(ux(rng), uy(rng), 0.0);
      mean += p;
    }
    mean /= static_cast<double>(n);
    for (auto& p : world) {
      p.x() -= mean.x();
      p.y() -= mean.y();
    }
    const Mat3d rot_gt = random_rotation(rng);
    const double depth = 0.5 * (cfg.box_min.z() + cfg.box_max.z());
    scene.ground_truth = Posed{rot_gt, Vec3d(0.0, 0.0, depth)};
    for (int i = 0; i < n; ++i)
      camera_frame[static_cast<size_t>(i)] =
          scene.ground_truth.transform(world[static_cast<size_t>(i)]);
  } else {
    std::uniform_real_distribution<double> ux(cfg.box_min.x(), cfg.box_max.x());
    std::uniform_real_distribution<double> uy(cfg.box_min.y(), cfg.box_max.y());
    std::uniform_real_distribution<double> uz(cfg.box_min.z(), cfg.box_max.z());
    Vec3d centroid = Vec3d::Zero();
    for (auto& q : camera_frame) {
      q = Vec3d(ux(rng), uy(rng), uz(rng));
      centroid += q;
    }
    centroid /= static_cast<double>(n);
    const Mat3d rot_gt = random_rotation(rng);
    scene.ground_truth = Posed{rot_gt, centroid};
    for (int i = 0; i < n; ++i)
      world[static_cast<size_t>(i)] =
          rot_gt.transpose() * (camera_frame[static_cast<size_t>(i)] - centroid);
  }

  const PinholeCamera<double> cam(cfg.focal);
  for (int i = 0; i < n; ++i) {
    const double sigma = stated_sigma(cfg.noise, i, rng);
    const double actual = cfg.noise_scale * sigma;

    ImageObservationd obs;
    obs.pixel = cam.project(camera_frame[static_cast<size_t>(i)]);
    if (actual > 0.0) {
      obs.pixel.x() += actual * gauss(rng);
      obs.pixel.y() += actual * gauss(rng);
    }
    // A zero-variance feature would make the reduced covariance singular;
    // fall back to the unit-pixel assumption in that case.
    const double cov_sigma = sigma > 0.0 ? sigma : 1.0;
    obs.pixel_cov = cov_sigma * cov_sigma * Mat2<double>::Identity();

    Correspondenced corr;
    corr.point = world[static_cast<size_t>(i)];
    corr.observation = to_bearing(project_forward(cam, obs));
    scene.corrs.push_back(corr);
    scene.pixels.push_back(obs);
    scene.stated_sigmas.push_back(sigma);
  }
  return scene;
}

Scene resample_observations(const SceneConfig& cfg, const Scene& base,
                            std::uint64_t noise_trial) {
  std::mt19937_64 rng = rng_for_trial(cfg.seed ^ 0x5eed0b5eed0b5eedull, noise_trial);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const PinholeCamera<double> cam(cfg.focal);

  Scene scene = base;
  for (size_t i = 0; i < scene.corrs.size(); ++i) {
    const double sigma = base.stated_sigmas[i];
    const double actual = cfg.noise_scale * sigma;
    ImageObservationd obs;
    obs.pixel = cam.project(base.ground_truth.transform(base.corrs[i].point));
    if (actual > 0.0) {
      obs.pixel.x() += actual * gauss(rng);
      obs.pixel.y() += actual * gauss(rng);
    }
    const double cov_sigma = sigma > 0.0 ? sigma : 1.0;
    obs.pixel_cov = cov_sigma * cov_sigma * Mat2<double>::Identity();
    scene.pixels[i] = obs;
    scene.corrs[i].observation = to_bearing(project_forward(cam, obs));
  }
  return scene;
}

double rotation_error_deg(const Mat3d& rot_gt, const Mat3d& rot) {
  // Largest column angle. Evaluated through atan2 instead of the bare
  // arccos of the dot product, whose resolution bottoms out near 2e-6 deg.
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double dot = rot_gt.col(k).dot(rot.col(k));
    const double cross = rot_gt.col(k).cross(rot.col(k)).norm();
    worst = std::max(worst, std::atan2(cross, dot));
  }
  return worst * 180.0 / M_PI;
}

double translation_error_pct(const Vec3d& t_gt, const Vec3d& t) {
  const double denom = t.norm();
  if (!(denom > 0.0)) throw Error(ErrorCode::zero_estimate, "estimated translation is zero");
  return (t_gt - t).norm() / denom * 100.0;
}

}  // namespace mlpnp::bench
