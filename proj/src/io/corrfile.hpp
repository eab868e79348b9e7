#pragma once

#include <string>
#include <vector>

#include "mlpnp/mlpnp.hpp"

namespace mlpnp::io {

// Line-oriented correspondence format, header "mlpnp v1", one point per
// line: px py pz  u v  s11 s12 s22 (world point, pixel observation,
// upper-triangular pixel covariance). '#' starts a comment.
struct CorrespondenceFile {
  std::vector<Vec3<double>> points;
  std::vector<ImageObservationd> pixels;
};

CorrespondenceFile read_correspondence_file(const std::string& path);

void write_correspondence_file(const std::string& path, const CorrespondenceFile& data,
                               const std::string& comment = {});

// Ground-truth sidecar: header "mlpnp pose v1", three rotation rows, one
// translation row.
Posed read_pose_file(const std::string& path);
void write_pose_file(const std::string& path, const Posed& pose);

}  // namespace mlpnp::io
