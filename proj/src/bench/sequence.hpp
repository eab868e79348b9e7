#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bench/scene.hpp"

namespace mlpnp::bench {

// Multi-frame tracking protocol: a static point set observed from a slowly
// moving camera. Every frame is solved twice from identical pixels: once
// with the unit-pixel covariance assumption for each feature, and once with
// the per-feature covariances fed back from the previous frame's solution.
struct SequenceConfig {
  int n_points = 12;
  int n_frames = 2;
  int trials = 250;
  double pixel_sigma = 1.0;    // true isotropic pixel noise
  double motion_rot_deg = 2.0; // inter-frame camera rotation
  double motion_trans = 0.1;   // inter-frame camera translation, world units
  double focal = 800.0;
  Vec3d box_min = Vec3d(-2.0, -2.0, 4.0);
  Vec3d box_max = Vec3d(2.0, 2.0, 8.0);
  std::uint64_t seed = 0;
};

struct SequenceTrialRow {
  std::uint64_t trial = 0;
  int frame = 0;
  double rot_plain = 0.0;
  double trans_plain = 0.0;
  double rot_feedback = 0.0;
  double trans_feedback = 0.0;
};

struct FrameComparison {
  int frame = 0;
  double mean_rot_plain = 0.0;
  double mean_trans_plain = 0.0;
  double mean_rot_feedback = 0.0;
  double mean_trans_feedback = 0.0;
};

struct SequenceReport {
  std::vector<SequenceTrialRow> rows;  // trials in which every solve succeeded
  std::vector<FrameComparison> frames;
  int n_ok = 0;
};

SequenceReport run_sequence(const SequenceConfig& cfg);

}  // namespace mlpnp::bench
