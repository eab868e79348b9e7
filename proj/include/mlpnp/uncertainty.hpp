#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mlpnp/errors.hpp"
#include "mlpnp/residual.hpp"
#include "mlpnp/tangent.hpp"
#include "mlpnp/types.hpp"

namespace mlpnp {

template <typename Scalar>
struct Diagnostics {
  bool planar = false;
  int gn_iterations = 0;
  Scalar weighted_cost = Scalar(0);
  int redundancy = 0;            // 2I - 6
  Scalar linear_condition = Scalar(0);  // condition estimate of the linear normal matrix
};

// Full solver output: pose, 6x6 parameter covariance in (omega, t) ordering,
// variance factor and per-parameter standard deviations (first three in
// radians, last three in world units).
template <typename Scalar>
struct PoseSolution {
  Pose<Scalar> pose;
  Mat6<Scalar> param_cov = Mat6<Scalar>::Zero();
  Scalar sigma0_sq = Scalar(0);
  Vec6<Scalar> sigmas = Vec6<Scalar>::Zero();
  Diagnostics<Scalar> diagnostics;
};

using PoseSolutiond = PoseSolution<double>;

namespace detail {

template <typename Scalar>
Mat6<Scalar> accumulate_normal(const ResidualExpansion<Scalar>& lin,
                               std::span<const Correspondence<Scalar>> corrs,
                               bool use_covariance) {
  Mat6<Scalar> h = Mat6<Scalar>::Zero();
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(corrs.size()); ++i) {
    const Eigen::Matrix<Scalar, 2, 6> ji = lin.jacobian.template block<2, 6>(2 * i, 0);
    const Mat2<Scalar> w = observation_weight(corrs[static_cast<size_t>(i)], use_covariance);
    h.noalias() += ji.transpose() * w * ji;
  }
  return Mat6<Scalar>((h + h.transpose()) / Scalar(2));
}

template <typename Scalar>
Mat6<Scalar> invert_normal(const Mat6<Scalar>& h) {
  Eigen::SelfAdjointEigenSolver<Mat6<Scalar>> eig(h);
  const Scalar largest = eig.eigenvalues().maxCoeff();
  if (!(largest > Scalar(0)) || eig.eigenvalues().minCoeff() < Scalar(1e-14) * largest)
    throw Error(ErrorCode::singular_normal_matrix, "normal matrix is not invertible");
  const Vec6<Scalar> inv = eig.eigenvalues().cwiseInverse();
  Mat6<Scalar> cov = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  return Mat6<Scalar>((cov + cov.transpose()) / Scalar(2));
}

}  // namespace detail

// Covariance of the pose parameters: inverse of the weighted Gauss-Newton
// normal matrix evaluated at the converged pose.
template <typename Scalar>
Mat6<Scalar> pose_covariance(std::span<const Correspondence<Scalar>> corrs,
                             const Pose<Scalar>& pose, bool use_covariance = true) {
  const ResidualExpansion<Scalar> lin = linearize_residuals(corrs, pose);
  return detail::invert_normal(detail::accumulate_normal(lin, corrs, use_covariance));
}

// Weighted residual sum over the redundancy 2I - 6. A value near one means
// the stochastic model matches the actual observation noise.
template <typename Scalar>
Scalar variance_factor(const VecX<Scalar>& residuals, std::span<const Mat2<Scalar>> weights,
                       int n_points) {
  const int redundancy = 2 * n_points - 6;
  if (redundancy < 1) throw Error(ErrorCode::zero_redundancy, "need 2I - 6 >= 1");
  Scalar sum(0);
  for (int i = 0; i < n_points; ++i) {
    const Vec2<Scalar> e = residuals.template segment<2>(2 * i);
    sum += e.dot(weights[static_cast<size_t>(i)] * e);
  }
  return sum / Scalar(redundancy);
}

template <typename Scalar>
Scalar variance_factor(std::span<const Correspondence<Scalar>> corrs, const Pose<Scalar>& pose,
                       bool use_covariance = true) {
  const int n = static_cast<int>(corrs.size());
  VecX<Scalar> residuals(2 * n);
  std::vector<Mat2<Scalar>> weights(corrs.size());
  for (int i = 0; i < n; ++i) {
    residuals.template segment<2>(2 * i) = tangent_residual(corrs[static_cast<size_t>(i)], pose);
    weights[static_cast<size_t>(i)] = observation_weight(corrs[static_cast<size_t>(i)], use_covariance);
  }
  return variance_factor<Scalar>(residuals, weights, n);
}

template <typename Scalar>
Vec6<Scalar> internal_sigmas(const Mat6<Scalar>& param_cov, Scalar sigma0_sq) {
  return std::sqrt(sigma0_sq) * param_cov.diagonal().cwiseMax(Scalar(0)).cwiseSqrt();
}

// A-posteriori covariance of each fitted observation, lifted back to the
// 3x3 direction space. Seeds the stochastic model of the same features in
// the next frame of a sequential pipeline. Near-zero blocks are floored so
// they remain usable as weights.
template <typename Scalar>
std::vector<Mat3<Scalar>> observation_cofactor_feedback(
    std::span<const Correspondence<Scalar>> corrs, const Pose<Scalar>& pose,
    const Mat6<Scalar>& param_cov) {
  const ResidualExpansion<Scalar> lin = linearize_residuals(corrs, pose);
  std::vector<Mat3<Scalar>> lifted(corrs.size());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(corrs.size()); ++i) {
    const Eigen::Matrix<Scalar, 2, 6> ji = lin.jacobian.template block<2, 6>(2 * i, 0);
    Mat2<Scalar> q = ji * param_cov * ji.transpose();
    q = ((q + q.transpose()) / Scalar(2)).eval();

    Eigen::SelfAdjointEigenSolver<Mat2<Scalar>> eig(q);
    const Vec2<Scalar> floored = eig.eigenvalues().cwiseMax(Scalar(1e-12));
    q = eig.eigenvectors() * floored.asDiagonal() * eig.eigenvectors().transpose();

    lifted[static_cast<size_t>(i)] =
        lift_covariance(corrs[static_cast<size_t>(i)].observation.basis, q);
  }
  return lifted;
}

}  // namespace mlpnp
