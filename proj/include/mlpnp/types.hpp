#pragma once

#include <Eigen/Dense>

namespace mlpnp {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vec6 = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Mat6 = Eigen::Matrix<Scalar, 6, 6>;
template <typename Scalar>
using Mat32 = Eigen::Matrix<Scalar, 3, 2>;
template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// 2D pixel measurement with its covariance.
template <typename Scalar>
struct ImageObservation {
  Vec2<Scalar> pixel = Vec2<Scalar>::Zero();
  Mat2<Scalar> pixel_cov = Mat2<Scalar>::Zero();
};

// Point on the normalized image plane (third component is 1) together with
// the propagated, rank-deficient 3x3 covariance (third row/column zero).
template <typename Scalar>
struct NormalizedPoint {
  Vec3<Scalar> point = Vec3<Scalar>::UnitZ();
  Mat3<Scalar> cov = Mat3<Scalar>::Zero();
};

// Orthonormal pair spanning the tangent plane of a unit vector.
template <typename Scalar>
struct NullspaceBasis {
  Vec3<Scalar> r = Vec3<Scalar>::UnitX();
  Vec3<Scalar> s = Vec3<Scalar>::UnitY();

  Mat32<Scalar> matrix() const {
    Mat32<Scalar> m;
    m.col(0) = r;
    m.col(1) = s;
    return m;
  }
};

// Unit direction toward a scene point plus the full (singular) 3x3
// covariance, its tangent basis and the nonsingular reduced 2x2 covariance.
template <typename Scalar>
struct BearingObservation {
  Vec3<Scalar> direction = Vec3<Scalar>::UnitZ();
  Mat3<Scalar> cov = Mat3<Scalar>::Zero();
  NullspaceBasis<Scalar> basis;
  Mat2<Scalar> reduced_cov = Mat2<Scalar>::Identity();
};

// World-to-camera rigid transform: depth * direction = R * p_world + t.
template <typename Scalar>
struct Pose {
  Mat3<Scalar> rotation = Mat3<Scalar>::Identity();
  Vec3<Scalar> translation = Vec3<Scalar>::Zero();

  Vec3<Scalar> transform(const Vec3<Scalar>& p_world) const {
    return rotation * p_world + translation;
  }
};

template <typename Scalar>
struct Correspondence {
  Vec3<Scalar> point = Vec3<Scalar>::Zero();  // world frame
  BearingObservation<Scalar> observation;
};

using ImageObservationd = ImageObservation<double>;
using NormalizedPointd = NormalizedPoint<double>;
using NullspaceBasisd = NullspaceBasis<double>;
using BearingObservationd = BearingObservation<double>;
using Posed = Pose<double>;
using Correspondenced = Correspondence<double>;

}  // namespace mlpnp
