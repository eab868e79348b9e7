#pragma once

#include <cmath>
#include <concepts>
#include <random>

#include <Eigen/Dense>

#include "mlpnp/errors.hpp"
#include "mlpnp/tangent.hpp"
#include "mlpnp/types.hpp"

namespace mlpnp {

// Any central camera model exposing the forward projection onto the
// normalized image plane and its Jacobian can feed the solver.
template <typename M, typename Scalar>
concept CentralCameraModel = requires(const M& m, Vec2<Scalar> px, Vec3<Scalar> pc) {
  { m.unproject(px) } -> std::convertible_to<Vec3<Scalar>>;
  { m.unproject_jacobian(px) } -> std::convertible_to<Mat32<Scalar>>;
  { m.project(pc) } -> std::convertible_to<Vec2<Scalar>>;
};

template <typename Scalar>
class PinholeCamera {
 public:
  PinholeCamera(Scalar focal, const Vec2<Scalar>& principal_point = Vec2<Scalar>::Zero())
      : focal_(focal), principal_(principal_point) {
    if (!(focal_ > Scalar(0))) throw Error(ErrorCode::config_error, "focal length must be positive");
  }

  Scalar focal() const { return focal_; }
  const Vec2<Scalar>& principal_point() const { return principal_; }

  // Pixel -> normalized image plane, third component 1.
  Vec3<Scalar> unproject(const Vec2<Scalar>& pixel) const {
    return Vec3<Scalar>((pixel.x() - principal_.x()) / focal_,
                        (pixel.y() - principal_.y()) / focal_, Scalar(1));
  }

  Mat32<Scalar> unproject_jacobian(const Vec2<Scalar>&) const {
    Mat32<Scalar> j = Mat32<Scalar>::Zero();
    j(0, 0) = Scalar(1) / focal_;
    j(1, 1) = Scalar(1) / focal_;
    return j;
  }

  // Camera-frame point -> pixel. Requires positive depth.
  Vec2<Scalar> project(const Vec3<Scalar>& p_camera) const {
    if (!(p_camera.z() > Scalar(0)))
      throw Error(ErrorCode::behind_camera, "point has non-positive depth");
    return focal_ * p_camera.template head<2>() / p_camera.z() + principal_;
  }

 private:
  Scalar focal_;
  Vec2<Scalar> principal_;
};

// Pixel observation -> normalized-plane point with propagated covariance.
// The covariance keeps rank <= 2 (third row and column stay zero).
template <typename Scalar, CentralCameraModel<Scalar> Camera>
NormalizedPoint<Scalar> project_forward(const Camera& cam, const ImageObservation<Scalar>& obs) {
  NormalizedPoint<Scalar> np;
  np.point = cam.unproject(obs.pixel);
  const Mat32<Scalar> j = cam.unproject_jacobian(obs.pixel);
  np.cov = j * obs.pixel_cov * j.transpose();
  return np;
}

// Spherical normalization with first-order covariance propagation through
// J = (I - v v^T) / |x|. The reduced tangent-plane covariance must be
// invertible for maximum-likelihood weighting; a numerically singular one
// signals a zero-variance observation and is reported instead of being
// silently regularized.
template <typename Scalar>
BearingObservation<Scalar> to_bearing(const NormalizedPoint<Scalar>& np) {
  const Scalar norm = np.point.norm();
  if (!(norm > Scalar(0))) throw Error(ErrorCode::degenerate_covariance, "zero normalized point");

  BearingObservation<Scalar> obs;
  obs.direction = np.point / norm;
  const Mat3<Scalar> proj =
      (Mat3<Scalar>::Identity() - obs.direction * obs.direction.transpose()) / norm;
  obs.cov = proj * np.cov * proj.transpose();
  obs.cov = ((obs.cov + obs.cov.transpose()) / Scalar(2)).eval();
  obs.basis = nullspace(obs.direction);
  obs.reduced_cov = reduce_covariance(obs.basis, obs.cov);

  Eigen::SelfAdjointEigenSolver<Mat2<Scalar>> eig(obs.reduced_cov);
  if (eig.eigenvalues().minCoeff() < Scalar(1e-14))
    throw Error(ErrorCode::degenerate_covariance, "reduced observation covariance is singular");
  return obs;
}

// Bearing observation with unit tangent-plane weighting; used when no pixel
// covariance is available.
template <typename Scalar>
BearingObservation<Scalar> bearing_from_direction(const Vec3<Scalar>& direction) {
  BearingObservation<Scalar> obs;
  obs.direction = direction.normalized();
  obs.basis = nullspace(obs.direction);
  obs.reduced_cov = Mat2<Scalar>::Identity();
  obs.cov = lift_covariance(obs.basis, obs.reduced_cov);
  return obs;
}

// Rebinds a 3x3 direction covariance (e.g. fed back from a previous frame)
// to the tangent plane of a new direction.
template <typename Scalar>
BearingObservation<Scalar> bearing_with_covariance(const Vec3<Scalar>& direction,
                                                   const Mat3<Scalar>& cov) {
  BearingObservation<Scalar> obs;
  obs.direction = direction.normalized();
  obs.cov = cov;
  obs.basis = nullspace(obs.direction);
  obs.reduced_cov = reduce_covariance(obs.basis, cov);
  Eigen::SelfAdjointEigenSolver<Mat2<Scalar>> eig(obs.reduced_cov);
  if (eig.eigenvalues().minCoeff() < Scalar(1e-14))
    throw Error(ErrorCode::degenerate_covariance, "reduced observation covariance is singular");
  return obs;
}

// Projects a world point under the given pose and perturbs the pixel with
// isotropic Gaussian noise; the stated covariance is noise_sigma^2 * I.
template <typename Scalar, CentralCameraModel<Scalar> Camera, typename Rng>
ImageObservation<Scalar> synthesize_observation(const Camera& cam, const Vec3<Scalar>& p_world,
                                                const Pose<Scalar>& pose, Scalar noise_sigma,
                                                Rng& rng) {
  const Vec3<Scalar> p_camera = pose.transform(p_world);
  ImageObservation<Scalar> obs;
  obs.pixel = cam.project(p_camera);
  if (noise_sigma > Scalar(0)) {
    std::normal_distribution<Scalar> gauss(Scalar(0), noise_sigma);
    obs.pixel.x() += gauss(rng);
    obs.pixel.y() += gauss(rng);
  }
  obs.pixel_cov = noise_sigma * noise_sigma * Mat2<Scalar>::Identity();
  return obs;
}

}  // namespace mlpnp
