#include "atomif/rotations.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace atomif {

namespace {

Mat3 rodrigues(const Vec3& n, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 r = c * Mat3::Identity();
  r += s * generator(n);
  r += (1.0 - c) * (n * n.transpose());
  return r;
}

}  // namespace

RotationVector::RotationVector(const Vec3& n, double alpha)
    : axis(n), angle(alpha) {
  if (alpha < 0.0 || alpha >= std::numbers::pi) {
    throw std::invalid_argument("RotationVector: angle must lie in [0, pi)");
  }
  if (alpha > 0.0 && std::abs(n.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("RotationVector: axis must be a unit vector");
  }
}

Mat3 rotation_matrix(const RotationVector& rv) {
  if (rv.angle == 0.0) return Mat3::Identity();
  return rodrigues(rv.axis, rv.angle);
}

Mat3 rotation_about(const AngularVelocity& omega, double t) {
  const double rate = omega.norm();
  if (rate < kOmegaZeroThreshold) return Mat3::Identity();
  const double angle =
      std::fmod(rate * t, 2.0 * std::numbers::pi);  // sign is fine either way
  return rodrigues(omega / rate, angle);
}

Mat3 generator(const AngularVelocity& omega) {
  Mat3 m;
  m << 0.0, -omega.z(), omega.y(),
       omega.z(), 0.0, -omega.x(),
      -omega.y(), omega.x(), 0.0;
  return m;
}

Vec3 rotate_wave_vector(const Vec3& k0, const AngularVelocity& omega,
                        double t) {
  if (omega.norm() < kOmegaZeroThreshold) return k0;
  return rotation_about(omega, t) * k0;
}

Vec3 second_derivative_action(const AngularVelocity& omega, double t,
                              const Vec3& q) {
  if (omega.norm() < kOmegaZeroThreshold) return Vec3::Zero();
  const Vec3 rotated = rotation_about(omega, t) * q;
  return omega.cross(omega.cross(rotated));
}

}  // namespace atomif
