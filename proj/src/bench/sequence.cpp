#include "bench/sequence.hpp"

#include <cmath>

namespace mlpnp::bench {

namespace {

Posed perturb_pose(const Posed& pose, double rot_deg, double trans, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3d axis(gauss(rng), gauss(rng), gauss(rng));
  axis.normalize();
  const Mat3d delta = rodrigues_to_matrix<double>(axis * (rot_deg * M_PI / 180.0));
  Vec3d dir(gauss(rng), gauss(rng), gauss(rng));
  dir.normalize();
  return Posed{delta * pose.rotation, delta * pose.translation + trans * dir};
}

}  // namespace

SequenceReport run_sequence(const SequenceConfig& cfg) {
  SequenceReport report;
  report.frames.resize(static_cast<size_t>(cfg.n_frames));
  for (int f = 0; f < cfg.n_frames; ++f) report.frames[static_cast<size_t>(f)].frame = f + 1;

  const PinholeCamera<double> cam(cfg.focal);

  for (int trial = 0; trial < cfg.trials; ++trial) {
    std::mt19937_64 rng = rng_for_trial(cfg.seed, static_cast<std::uint64_t>(trial));
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Static world, first pose as in the single-frame protocol.
    std::uniform_real_distribution<double> ux(cfg.box_min.x(), cfg.box_max.x());
    std::uniform_real_distribution<double> uy(cfg.box_min.y(), cfg.box_max.y());
    std::uniform_real_distribution<double> uz(cfg.box_min.z(), cfg.box_max.z());
    std::vector<Vec3d> camera_frame(static_cast<size_t>(cfg.n_points));
    Vec3d centroid = Vec3d::Zero();
    for (auto& q : camera_frame) {
      q = Vec3d(ux(rng), uy(rng), uz(rng));
      centroid += q;
    }
    centroid /= static_cast<double>(cfg.n_points);
    const Mat3d rot_gt = random_rotation(rng);
    Posed pose = Posed{rot_gt, centroid};
    std::vector<Vec3d> world(static_cast<size_t>(cfg.n_points));
    for (size_t i = 0; i < world.size(); ++i)
      world[i] = rot_gt.transpose() * (camera_frame[i] - centroid);

    std::vector<SequenceTrialRow> trial_rows;
    std::vector<Mat3d> fed_back;  // per-feature covariances from the previous frame
    bool ok = true;

    for (int frame = 0; frame < cfg.n_frames && ok; ++frame) {
      if (frame > 0) pose = perturb_pose(pose, cfg.motion_rot_deg, cfg.motion_trans, rng);

      std::vector<Correspondenced> plain(world.size());
      std::vector<Correspondenced> feedback(world.size());
      try {
        for (size_t i = 0; i < world.size(); ++i) {
          ImageObservationd obs;
          obs.pixel = cam.project(pose.transform(world[i]));
          obs.pixel.x() += cfg.pixel_sigma * gauss(rng);
          obs.pixel.y() += cfg.pixel_sigma * gauss(rng);
          obs.pixel_cov = Mat2<double>::Identity();  // unit-pixel assumption

          plain[i].point = world[i];
          plain[i].observation = to_bearing(project_forward(cam, obs));
          feedback[i].point = world[i];
          feedback[i].observation =
              fed_back.empty() ? plain[i].observation
                               : bearing_with_covariance(plain[i].observation.direction,
                                                         fed_back[i]);
        }

        const PoseSolutiond sol_plain = solve<double>(plain);
        const PoseSolutiond sol_fb = solve<double>(feedback);
        fed_back = observation_cofactor_feedback<double>(feedback, sol_fb.pose, sol_fb.param_cov);

        SequenceTrialRow row;
        row.trial = static_cast<std::uint64_t>(trial);
        row.frame = frame + 1;
        row.rot_plain = rotation_error_deg(pose.rotation, sol_plain.pose.rotation);
        row.trans_plain = translation_error_pct(pose.translation, sol_plain.pose.translation);
        row.rot_feedback = rotation_error_deg(pose.rotation, sol_fb.pose.rotation);
        row.trans_feedback = translation_error_pct(pose.translation, sol_fb.pose.translation);
        trial_rows.push_back(row);
      } catch (const Error&) {
        ok = false;  // paired comparison: drop the whole trial
      }
    }

    if (!ok) continue;
    report.n_ok++;
    for (const auto& row : trial_rows) {
      report.rows.push_back(row);
      auto& agg = report.frames[static_cast<size_t>(row.frame - 1)];
      agg.mean_rot_plain += row.rot_plain;
      agg.mean_trans_plain += row.trans_plain;
      agg.mean_rot_feedback += row.rot_feedback;
      agg.mean_trans_feedback += row.trans_feedback;
    }
  }

  for (auto& agg : report.frames) {
    if (report.n_ok == 0) break;
    agg.mean_rot_plain /= report.n_ok;
    agg.mean_trans_plain /= report.n_ok;
    agg.mean_rot_feedback /= report.n_ok;
    agg.mean_trans_feedback /= report.n_ok;
  }
  return report;
}

}  // namespace mlpnp::bench
