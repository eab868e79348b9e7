#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "mlpnp/types.hpp"

namespace mlpnp {

// Orthonormal basis of the plane orthogonal to a unit vector v.
//
// Closed-form construction: orthogonalize the canonical axis least aligned
// with v, complete with the cross product. The gauge is fixed so that
// det([r s v]) = +1 and the largest-magnitude component of r is positive,
// which makes the result deterministic and platform-independent.
template <typename Scalar>
NullspaceBasis<Scalar> nullspace(const Vec3<Scalar>& v) {
  int k = 0;
  v.cwiseAbs().minCoeff(&k);
  Vec3<Scalar> r = Vec3<Scalar>::Unit(k) - v[k] * v;
  r.normalize();
  Vec3<Scalar> s = v.cross(r);  // unit by construction, det([r s v]) = +1

  int imax = 0;
  r.cwiseAbs().maxCoeff(&imax);
  if (r[imax] < Scalar(0)) {
    r = -r;
    s = -s;
  }
  return NullspaceBasis<Scalar>{r, s};
}

template <typename Scalar>
Vec2<Scalar> reduce_vector(const NullspaceBasis<Scalar>& basis, const Vec3<Scalar>& w) {
  return Vec2<Scalar>(basis.r.dot(w), basis.s.dot(w));
}

template <typename Scalar>
Vec3<Scalar> lift_vector(const NullspaceBasis<Scalar>& basis, const Vec2<Scalar>& q) {
  return q.x() * basis.r + q.y() * basis.s;
}

// Reduction of a 3x3 covariance to the tangent plane; nonsingular whenever
// the input has rank 2 with kernel spanned by v.
template <typename Scalar>
Mat2<Scalar> reduce_covariance(const NullspaceBasis<Scalar>& basis, const Mat3<Scalar>& cov) {
  const Mat32<Scalar> j = basis.matrix();
  Mat2<Scalar> reduced = j.transpose() * cov * j;
  return Mat2<Scalar>((reduced + reduced.transpose()) / Scalar(2));
}

// Back-projection of a 2x2 tangent-space covariance; the result has v in its
// kernel.
template <typename Scalar>
Mat3<Scalar> lift_covariance(const NullspaceBasis<Scalar>& basis, const Mat2<Scalar>& q) {
  const Mat32<Scalar> j = basis.matrix();
  Mat3<Scalar> lifted = j * q * j.transpose();
  return Mat3<Scalar>((lifted + lifted.transpose()) / Scalar(2));
}

}  // namespace mlpnp
