#pragma once

// Test-only reference implementations. These stay independent of the library
// code paths they validate: the nullspace oracle goes through a full SVD, the
// covariance oracle through sampling, the Jacobian oracle through central
// finite differences.

#include <random>

#include "mlpnp/mlpnp.hpp"

namespace mlpnp::testing {

inline Mat32<double> svd_nullspace(const Vec3<double>& v) {
  Eigen::JacobiSVD<Eigen::Matrix<double, 1, 3>> svd(v.transpose(), Eigen::ComputeFullV);
  return svd.matrixV().rightCols<2>();
}

inline Vec3<double> random_unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3<double> v(gauss(rng), gauss(rng), gauss(rng));
  return v.normalized();
}

inline Mat3<double> random_rotation_matrix(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  q.normalize();
  return q.toRotationMatrix();
}

// Empirical covariance of spherically normalized perturbations of x. The
// perturbation covariance must have a zero third row/column (normalized
// image plane), matching the observation model.
inline Mat3<double> monte_carlo_bearing_cov(const Vec3<double>& x, const Mat3<double>& cov,
                                            int n_samples, std::mt19937_64& rng) {
  const Mat2<double> block = cov.topLeftCorner<2, 2>();
  const Eigen::LLT<Mat2<double>> llt(block);
  const Mat2<double> chol = llt.matrixL();

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vec3<double>> samples(static_cast<size_t>(n_samples));
  Vec3<double> mean = Vec3<double>::Zero();
  for (auto& s : samples) {
    const Vec2<double> eps = chol * Vec2<double>(gauss(rng), gauss(rng));
    Vec3<double> xp = x;
    xp.head<2>() += eps;
    s = xp.normalized();
    mean += s;
  }
  mean /= static_cast<double>(n_samples);

  Mat3<double> out = Mat3<double>::Zero();
  for (const auto& s : samples) {
    const Vec3<double> d = s - mean;
    out += d * d.transpose();
  }
  return out / static_cast<double>(n_samples - 1);
}

// Central finite differences of the stacked tangent residuals w.r.t. the
// global (omega, t) parameters.
inline Eigen::Matrix<double, Eigen::Dynamic, 6> numeric_residual_jacobian(
    std::span<const Correspondence<double>> corrs, const Vec3<double>& omega,
    const Vec3<double>& t, double step = 1e-6) {
  const auto residuals_at = [&](const Vec3<double>& w, const Vec3<double>& tr) {
    const Pose<double> pose{rodrigues_to_matrix(w), tr};
    VecX<double> r(2 * static_cast<Eigen::Index>(corrs.size()));
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(corrs.size()); ++i)
      r.segment<2>(2 * i) = tangent_residual(corrs[static_cast<size_t>(i)], pose);
    return r;
  };

  Eigen::Matrix<double, Eigen::Dynamic, 6> jac(2 * static_cast<Eigen::Index>(corrs.size()), 6);
  for (int k = 0; k < 6; ++k) {
    Vec3<double> w_plus = omega, w_minus = omega, t_plus = t, t_minus = t;
    if (k < 3) {
      w_plus[k] += step;
      w_minus[k] -= step;
    } else {
      t_plus[k - 3] += step;
      t_minus[k - 3] -= step;
    }
    jac.col(k) = (residuals_at(w_plus, t_plus) - residuals_at(w_minus, t_minus)) / (2.0 * step);
  }
  return jac;
}

}  // namespace mlpnp::testing
