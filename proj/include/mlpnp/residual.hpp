#pragma once

#include <span>

#include <Eigen/Dense>

#include "mlpnp/rotation.hpp"
#include "mlpnp/types.hpp"

namespace mlpnp {

// Tangent-space residual of one correspondence: the predicted direction
// (R p + t) / |R p + t| expressed in the observation's nullspace basis.
// Zero residual means the prediction coincides with the measured direction.
template <typename Scalar>
Vec2<Scalar> tangent_residual(const Correspondence<Scalar>& corr, const Pose<Scalar>& pose) {
  const Vec3<Scalar> predicted = pose.transform(corr.point).normalized();
  return Vec2<Scalar>(corr.observation.basis.r.dot(predicted),
                      corr.observation.basis.s.dot(predicted));
}

// Residual Jacobian w.r.t. the global parameter vector (omega, t), omega the
// axis-angle vector of the rotation. The rotational block chains through the
// left Jacobian of the exponential map so that it matches finite differences
// of omega itself, not of a local perturbation.
template <typename Scalar>
struct ResidualExpansion {
  VecX<Scalar> residuals;                          // stacked, 2 per point
  Eigen::Matrix<Scalar, Eigen::Dynamic, 6> jacobian;  // stacked, 2 rows per point
};

template <typename Scalar>
ResidualExpansion<Scalar> linearize_residuals(std::span<const Correspondence<Scalar>> corrs,
                                              const Vec3<Scalar>& omega, const Vec3<Scalar>& t) {
  const Mat3<Scalar> rot = rodrigues_to_matrix(omega);
  const Mat3<Scalar> jl = so3_left_jacobian(omega);

  ResidualExpansion<Scalar> out;
  const Eigen::Index n = static_cast<Eigen::Index>(corrs.size());
  out.residuals.resize(2 * n);
  out.jacobian.resize(2 * n, 6);

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& corr = corrs[static_cast<size_t>(i)];
    const Vec3<Scalar> rotated = rot * corr.point;
    const Vec3<Scalar> y = rotated + t;
    const Scalar depth = y.norm();
    const Vec3<Scalar> v = y / depth;

    const Mat32<Scalar> basis = corr.observation.basis.matrix();
    out.residuals.template segment<2>(2 * i) = basis.transpose() * v;

    // d(normalize(y))/dy, then d(y)/d(omega) = -[R p]x Jl and d(y)/dt = I.
    const Mat3<Scalar> dnorm =
        (Mat3<Scalar>::Identity() - v * v.transpose()) / depth;
    const Eigen::Matrix<Scalar, 2, 3> front = basis.transpose() * dnorm;
    out.jacobian.template block<2, 3>(2 * i, 0) = -front * skew(rotated) * jl;
    out.jacobian.template block<2, 3>(2 * i, 3) = front;
  }
  return out;
}

template <typename Scalar>
ResidualExpansion<Scalar> linearize_residuals(std::span<const Correspondence<Scalar>> corrs,
                                              const Pose<Scalar>& pose) {
  return linearize_residuals(corrs, matrix_to_rodrigues(pose.rotation), pose.translation);
}

// Per-point 2x2 weight: inverse reduced covariance, or identity when the
// stochastic model is disabled.
template <typename Scalar>
Mat2<Scalar> observation_weight(const Correspondence<Scalar>& corr, bool use_covariance) {
  return use_covariance ? Mat2<Scalar>(corr.observation.reduced_cov.inverse())
                        : Mat2<Scalar>::Identity();
}

template <typename Scalar>
Scalar weighted_cost(std::span<const Correspondence<Scalar>> corrs, const Pose<Scalar>& pose,
                     bool use_covariance) {
  Scalar cost(0);
  for (const auto& corr : corrs) {
    const Vec2<Scalar> e = tangent_residual(corr, pose);
    cost += e.dot(observation_weight(corr, use_covariance) * e);
  }
  return cost;
}

}  // namespace mlpnp
