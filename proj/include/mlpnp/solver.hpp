#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mlpnp/errors.hpp"
#include "mlpnp/residual.hpp"
#include "mlpnp/rotation.hpp"
#include "mlpnp/types.hpp"
#include "mlpnp/uncertainty.hpp"

namespace mlpnp {

template <typename Scalar>
struct SolverOptions {
  int max_gn_iterations = 5;
  Scalar gn_tolerance = Scalar(1e-10);
  Scalar planar_eigen_threshold = Scalar(1e-10);
  bool use_covariance = true;
};

using SolverOptionsd = SolverOptions<double>;

// Ratio of the second-smallest to the largest eigenvalue of the linear
// normal matrix below which the homogeneous solution is ambiguous.
inline constexpr double kIllConditionedRatio = 1e-8;

// Distribution of the world points: full 3D, or confined to a plane. For the
// planar case carries the eigen rotation into the plane-aligned frame, the
// index of the coordinate that is constant there, and its constant value.
template <typename Scalar>
struct Planarity {
  bool planar = false;
  Mat3<Scalar> rotation = Mat3<Scalar>::Identity();
  int dropped_axis = -1;
  Scalar dropped_value = Scalar(0);
};

// Weighted homogeneous system A u = 0 over the stacked rotation entries and
// the translation (12 unknowns, 9 in the planar case). Points and directions
// are kept alongside for scale/sign recovery.
template <typename Scalar>
struct LinearSystem {
  MatX<Scalar> design;                 // (2I) x 12, or (2I) x 9 planar
  std::vector<Mat2<Scalar>> weights;   // per-point blocks of P
  Planarity<Scalar> planarity;
  std::vector<Vec3<Scalar>> points;    // in the system frame (plane-aligned if planar)
  std::vector<Vec3<Scalar>> directions;
};

// Rank test on the mean-centered scatter of the world points. Planar iff the
// scatter is rank 2; rank below 2 (collinear or coincident points) cannot be
// solved at all.
template <typename Scalar>
Planarity<Scalar> detect_planarity(std::span<const Vec3<Scalar>> points,
                                   Scalar eigen_threshold = Scalar(1e-10)) {
  Vec3<Scalar> mean = Vec3<Scalar>::Zero();
  for (const auto& p : points) mean += p;
  mean /= Scalar(points.size());

  Mat3<Scalar> scatter = Mat3<Scalar>::Zero();
  for (const auto& p : points) {
    const Vec3<Scalar> d = p - mean;
    scatter.noalias() += d * d.transpose();
  }

  Eigen::SelfAdjointEigenSolver<Mat3<Scalar>> eig(scatter);  // ascending eigenvalues
  const Vec3<Scalar> lambda = eig.eigenvalues().cwiseMax(Scalar(0));
  if (!(lambda[2] > Scalar(0)) || lambda[1] < eigen_threshold * lambda[2])
    throw Error(ErrorCode::rank_deficient, "world points are collinear or coincident");

  Planarity<Scalar> result;
  if (lambda[0] >= eigen_threshold * lambda[2]) return result;  // ordinary 3D distribution

  result.planar = true;
  Mat3<Scalar> rot = eig.eigenvectors();
  if (rot.determinant() < Scalar(0)) rot.col(0) = -rot.col(0);
  result.rotation = rot;

  // The constant coordinate in the plane-aligned frame is the one with the
  // smallest spread; its mean is the plane offset.
  Vec3<Scalar> lo = Vec3<Scalar>::Constant(std::numeric_limits<Scalar>::max());
  Vec3<Scalar> hi = Vec3<Scalar>::Constant(std::numeric_limits<Scalar>::lowest());
  Vec3<Scalar> sum = Vec3<Scalar>::Zero();
  for (const auto& p : points) {
    const Vec3<Scalar> q = rot.transpose() * p;
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
    sum += q;
  }
  int axis = 0;
  (hi - lo).minCoeff(&axis);
  result.dropped_axis = axis;
  result.dropped_value = sum[axis] / Scalar(points.size());
  return result;
}

// Stacks the two tangent-space equations of every correspondence. Unknown
// ordering: row-major rotation entries, then translation. In the planar case
// the three rotation entries multiplying the constant coordinate are omitted
// and the points are shifted so that coordinate is zero.
template <typename Scalar>
LinearSystem<Scalar> build_system(std::span<const Correspondence<Scalar>> corrs,
                                  const Planarity<Scalar>& planarity, bool use_covariance) {
  const Eigen::Index n = static_cast<Eigen::Index>(corrs.size());
  const int cols = planarity.planar ? 9 : 12;

  LinearSystem<Scalar> sys;
  sys.planarity = planarity;
  sys.design.setZero(2 * n, cols);
  sys.weights.resize(corrs.size());
  sys.points.resize(corrs.size());
  sys.directions.resize(corrs.size());

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& corr = corrs[static_cast<size_t>(i)];
    Vec3<Scalar> p = corr.point;
    if (planarity.planar) {
      p = planarity.rotation.transpose() * p;
      p[planarity.dropped_axis] -= planarity.dropped_value;
    }
    sys.points[static_cast<size_t>(i)] = p;
    sys.directions[static_cast<size_t>(i)] = corr.observation.direction;
    sys.weights[static_cast<size_t>(i)] = observation_weight(corr, use_covariance);

    const Mat32<Scalar> basis = corr.observation.basis.matrix();
    for (int row_axis = 0; row_axis < 2; ++row_axis) {
      const Vec3<Scalar> b = basis.col(row_axis);
      int col = 0;
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
          if (planarity.planar && k == planarity.dropped_axis) continue;
          sys.design(2 * i + row_axis, col++) = b[j] * p[k];
        }
      }
      for (int j = 0; j < 3; ++j) sys.design(2 * i + row_axis, col++) = b[j];
    }
  }
  return sys;
}

namespace detail {

// Accumulates N = A^T P A point by point; O(I) with a fixed-size core.
template <typename Scalar>
MatX<Scalar> weighted_normal_matrix(const LinearSystem<Scalar>& sys) {
  const int cols = static_cast<int>(sys.design.cols());
  MatX<Scalar> n = MatX<Scalar>::Zero(cols, cols);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(sys.weights.size()); ++i) {
    const auto rows = sys.design.middleRows(2 * i, 2);
    n.noalias() += rows.transpose() * sys.weights[static_cast<size_t>(i)] * rows;
  }
  return MatX<Scalar>((n + n.transpose()) / Scalar(2));
}

}  // namespace detail

// Solves the homogeneous system by eigendecomposition of N = A^T P A,
// resolves the sign by cheirality, recovers the scale from the rotation
// column norms and projects onto SO(3). The planar branch reconstructs the
// unobservable rotation column by cross product and composes the result back
// into the original world frame.
template <typename Scalar>
Pose<Scalar> solve_linear(const LinearSystem<Scalar>& sys, Scalar* condition_out = nullptr) {
  const int cols = static_cast<int>(sys.design.cols());
  const MatX<Scalar> normal = detail::weighted_normal_matrix(sys);

  Eigen::SelfAdjointEigenSolver<MatX<Scalar>> eig(normal);
  const VecX<Scalar> lambda = eig.eigenvalues();  // ascending
  if (condition_out)
    *condition_out = lambda[1] > Scalar(0) ? lambda[cols - 1] / lambda[1]
                                           : std::numeric_limits<Scalar>::infinity();
  if (!sys.planarity.planar && lambda[1] < Scalar(kIllConditionedRatio) * lambda[cols - 1])
    throw Error(ErrorCode::ill_conditioned, "homogeneous solution is ambiguous");

  VecX<Scalar> u = eig.eigenvectors().col(0);

  // Cheirality: the majority of depths v^T (R p + t) must be positive.
  Mat3<Scalar> rhat = Mat3<Scalar>::Zero();
  {
    int idx = 0;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        if (sys.planarity.planar && k == sys.planarity.dropped_axis) continue;
        rhat(j, k) = u[idx++];
      }
  }
  Vec3<Scalar> that = u.template tail<3>();

  int positive = 0, negative = 0;
  for (size_t i = 0; i < sys.points.size(); ++i) {
    const Scalar depth = sys.directions[i].dot(rhat * sys.points[i] + that);
    (depth > Scalar(0) ? positive : negative)++;
  }
  if (positive < negative) {
    rhat = -rhat;
    that = -that;
  }

  // Scale: geometric mean of the estimated column norms.
  Scalar scale;
  if (sys.planarity.planar) {
    const int a = (sys.planarity.dropped_axis + 1) % 3;
    const int b = (sys.planarity.dropped_axis + 2) % 3;
    scale = std::sqrt(rhat.col(a).norm() * rhat.col(b).norm());
  } else {
    scale = std::cbrt(rhat.col(0).norm() * rhat.col(1).norm() * rhat.col(2).norm());
  }
  rhat /= scale;
  that /= scale;

  if (sys.planarity.planar) {
    // Right-handed completion of the missing column.
    const int k = sys.planarity.dropped_axis;
    const int a = (k + 1) % 3;
    const int b = (k + 2) % 3;
    rhat.col(k) = rhat.col(a).cross(rhat.col(b)).normalized();
  }

  const Mat3<Scalar> rot_aligned = nearest_rotation(rhat);

  Pose<Scalar> pose;
  if (sys.planarity.planar) {
    pose.rotation = rot_aligned * sys.planarity.rotation.transpose();
    pose.translation =
        that - sys.planarity.dropped_value * rot_aligned.col(sys.planarity.dropped_axis);
  } else {
    pose.rotation = rot_aligned;
    pose.translation = that;
  }
  return pose;
}

template <typename Scalar>
struct RefineInfo {
  int iterations = 0;
  Scalar cost = Scalar(0);
  bool converged = false;
};

// Weighted Gauss-Newton over (omega, t). Plain full steps; the returned pose
// is the iterate with the lowest weighted cost seen, so the result never
// regresses below the initialization.
template <typename Scalar>
Pose<Scalar> refine_gauss_newton(std::span<const Correspondence<Scalar>> corrs,
                                 const Pose<Scalar>& init, const SolverOptions<Scalar>& opts,
                                 RefineInfo<Scalar>* info = nullptr) {
  Vec3<Scalar> omega = matrix_to_rodrigues(init.rotation);
  Vec3<Scalar> t = init.translation;

  auto pose_at = [](const Vec3<Scalar>& w, const Vec3<Scalar>& tr) {
    return Pose<Scalar>{rodrigues_to_matrix(w), tr};
  };

  Pose<Scalar> best_pose = pose_at(omega, t);
  Scalar best_cost = weighted_cost(corrs, best_pose, opts.use_covariance);
  int iterations = 0;
  bool converged = false;

  for (int it = 0; it < opts.max_gn_iterations; ++it) {
    const ResidualExpansion<Scalar> lin = linearize_residuals(corrs, omega, t);

    Mat6<Scalar> h = Mat6<Scalar>::Zero();
    Vec6<Scalar> g = Vec6<Scalar>::Zero();
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(corrs.size()); ++i) {
      const Eigen::Matrix<Scalar, 2, 6> ji = lin.jacobian.template block<2, 6>(2 * i, 0);
      const Eigen::Matrix<Scalar, 2, 6> wji =
          observation_weight(corrs[static_cast<size_t>(i)], opts.use_covariance) * ji;
      h.noalias() += ji.transpose() * wji;
      g.noalias() += wji.transpose() * lin.residuals.template segment<2>(2 * i);
    }

    Eigen::SelfAdjointEigenSolver<Mat6<Scalar>> heig(h);
    const Scalar hmax = heig.eigenvalues().maxCoeff();
    if (!(hmax > Scalar(0)) || heig.eigenvalues().minCoeff() < Scalar(1e-14) * hmax)
      throw Error(ErrorCode::singular_normal_matrix, "Gauss-Newton normal matrix is singular");

    const Vec6<Scalar> step = h.ldlt().solve(g);
    omega -= step.template head<3>();
    t -= step.template tail<3>();
    ++iterations;

    const Pose<Scalar> candidate = pose_at(omega, t);
    const Scalar cost = weighted_cost(corrs, candidate, opts.use_covariance);
    // ties go to the later iterate, which is the better-converged one
    if (cost <= best_cost) {
      best_cost = cost;
      best_pose = candidate;
    }
    if (step.norm() < opts.gn_tolerance) {
      converged = true;
      // on the converged plateau, cost differences are float noise; prefer
      // the final iterate there
      if (cost <= best_cost + Scalar(1e-12) * (Scalar(1) + best_cost)) best_pose = candidate;
      break;
    }
  }

  if (info) {
    info->iterations = iterations;
    info->cost = best_cost;
    info->converged = converged;
  }
  return best_pose;
}

// Full pipeline: planarity detection, weighted linear estimate, Gauss-Newton
// refinement and extraction of the pose uncertainty.
template <typename Scalar>
PoseSolution<Scalar> solve(std::span<const Correspondence<Scalar>> corrs,
                           const SolverOptions<Scalar>& opts = {}) {
  const int n = static_cast<int>(corrs.size());
  if (n < 6) throw Error(ErrorCode::too_few_points, "need at least 6 correspondences");

  std::vector<Vec3<Scalar>> points(corrs.size());
  for (size_t i = 0; i < corrs.size(); ++i) points[i] = corrs[i].point;
  const Planarity<Scalar> planarity =
      detect_planarity<Scalar>(points, opts.planar_eigen_threshold);

  const LinearSystem<Scalar> sys = build_system(corrs, planarity, opts.use_covariance);
  Scalar condition(0);
  const Pose<Scalar> linear = solve_linear(sys, &condition);

  RefineInfo<Scalar> refine_info;
  PoseSolution<Scalar> solution;
  solution.pose = refine_gauss_newton(corrs, linear, opts, &refine_info);

  // one linearization at the converged pose serves the covariance, the
  // variance factor and the reported cost
  const ResidualExpansion<Scalar> lin = linearize_residuals(corrs, solution.pose);
  solution.param_cov =
      detail::invert_normal(detail::accumulate_normal(lin, corrs, opts.use_covariance));
  Scalar weighted_sum(0);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(corrs.size()); ++i) {
    const Vec2<Scalar> e = lin.residuals.template segment<2>(2 * i);
    weighted_sum += e.dot(observation_weight(corrs[static_cast<size_t>(i)], opts.use_covariance) * e);
  }
  solution.sigma0_sq = weighted_sum / Scalar(2 * n - 6);
  solution.sigmas = internal_sigmas(solution.param_cov, solution.sigma0_sq);

  solution.diagnostics.planar = planarity.planar;
  solution.diagnostics.gn_iterations = refine_info.iterations;
  solution.diagnostics.weighted_cost = refine_info.cost;
  solution.diagnostics.redundancy = 2 * n - 6;
  solution.diagnostics.linear_condition = condition;
  return solution;
}

}  // namespace mlpnp
