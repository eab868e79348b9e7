#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "mlpnp/types.hpp"

namespace mlpnp {

template <typename Scalar>
Mat3<Scalar> skew(const Vec3<Scalar>& w) {
  Mat3<Scalar> m;
  m << Scalar(0), -w.z(), w.y(),
       w.z(), Scalar(0), -w.x(),
       -w.y(), w.x(), Scalar(0);
  return m;
}

// Exponential map of so(3). Second-order Taylor branch near zero.
template <typename Scalar>
Mat3<Scalar> rodrigues_to_matrix(const Vec3<Scalar>& omega) {
  const Scalar theta2 = omega.squaredNorm();
  const Scalar theta = std::sqrt(theta2);
  const Mat3<Scalar> k = skew(omega);
  Scalar a, b;  // R = I + a*K + b*K^2
  if (theta < Scalar(1e-8)) {
    a = Scalar(1) - theta2 / Scalar(6);
    b = Scalar(0.5) - theta2 / Scalar(24);
  } else {
    a = std::sin(theta) / theta;
    b = (Scalar(1) - std::cos(theta)) / theta2;
  }
  return Mat3<Scalar>::Identity() + a * k + b * k * k;
}

// Logarithm map; returns the axis-angle vector with norm in [0, pi].
template <typename Scalar>
Vec3<Scalar> matrix_to_rodrigues(const Mat3<Scalar>& rot) {
  Vec3<Scalar> axis_sin;  // = sin(theta) * axis
  axis_sin << rot(2, 1) - rot(1, 2), rot(0, 2) - rot(2, 0), rot(1, 0) - rot(0, 1);
  axis_sin *= Scalar(0.5);
  const Scalar cos_theta =
      std::clamp((rot.trace() - Scalar(1)) / Scalar(2), Scalar(-1), Scalar(1));
  const Scalar sin_theta = axis_sin.norm();
  const Scalar theta = std::atan2(sin_theta, cos_theta);

  if (theta < Scalar(1e-8)) return axis_sin * (Scalar(1) + theta * theta / Scalar(6));

  if (cos_theta > Scalar(-0.9)) return axis_sin * (theta / sin_theta);

  // Near pi the skew part degrades; the symmetric part gives the axis
  // through n n^T = I + (R + R^T - 2 I) / (2 (1 - cos)).
  const Mat3<Scalar> outer =
      Mat3<Scalar>::Identity() +
      (rot + rot.transpose() - Scalar(2) * Mat3<Scalar>::Identity()) /
          (Scalar(2) * (Scalar(1) - cos_theta));
  int k = 0;
  outer.diagonal().maxCoeff(&k);
  Vec3<Scalar> axis = outer.col(k) / std::sqrt(outer(k, k));
  axis.normalize();
  if (axis.dot(axis_sin) < Scalar(0)) axis = -axis;
  return theta * axis;
}

// Left Jacobian of the exponential map: exp(w + d) ~ exp(Jl(w) d) * exp(w).
template <typename Scalar>
Mat3<Scalar> so3_left_jacobian(const Vec3<Scalar>& omega) {
  const Scalar theta2 = omega.squaredNorm();
  const Scalar theta = std::sqrt(theta2);
  const Mat3<Scalar> k = skew(omega);
  Scalar a, b;  // Jl = I + a*K + b*K^2
  if (theta < Scalar(1e-8)) {
    a = Scalar(0.5) - theta2 / Scalar(24);
    b = Scalar(1) / Scalar(6) - theta2 / Scalar(120);
  } else {
    a = (Scalar(1) - std::cos(theta)) / theta2;
    b = (theta - std::sin(theta)) / (theta2 * theta);
  }
  return Mat3<Scalar>::Identity() + a * k + b * k * k;
}

// Closest rotation in the Frobenius norm, with reflection correction.
template <typename Scalar>
Mat3<Scalar> nearest_rotation(const Mat3<Scalar>& m) {
  Eigen::JacobiSVD<Mat3<Scalar>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3<Scalar> u = svd.matrixU();
  Mat3<Scalar> v = svd.matrixV();
  if ((u * v.transpose()).determinant() < Scalar(0)) v.col(2) = -v.col(2);
  return u * v.transpose();
}

}  // namespace mlpnp
