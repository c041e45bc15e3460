#pragma once

#include "atomif/types.hpp"

namespace atomif {

using AngularVelocity = Vec3;  // [rad/s]

// Rotation rates below this are treated as no rotation (null axis guard).
inline constexpr double kOmegaZeroThreshold = 1e-15;

// Axis-angle rotation vector. The angle is restricted to [0, pi) so the
// parametrization of SO(3) stays bijective; time evolution with larger
// accumulated angles goes through rotation_about instead.
struct RotationVector {
  Vec3 axis;
  double angle;  // [rad]

  // Throws std::invalid_argument for a non-unit axis (with angle > 0) or an
  // angle outside [0, pi).
  RotationVector(const Vec3& n, double alpha);
};

// Rodrigues form: cos(a) I + sin(a) [n]_x + (1 - cos(a)) n n^T.
Mat3 rotation_matrix(const RotationVector& rv);

// R_{Omega t}: rotation by |Omega| t about Omega/|Omega|. The accumulated
// angle is reduced mod 2 pi; any physical time is accepted.
Mat3 rotation_about(const AngularVelocity& omega, double t);

// Lie-algebra generator (Omega . Lambda): antisymmetric matrix with
// (Omega . Lambda) q = Omega x q.
Mat3 generator(const AngularVelocity& omega);

// Active rotation of a wave vector, k(t) = R_{Omega t} k0.
Vec3 rotate_wave_vector(const Vec3& k0, const AngularVelocity& omega, double t);

// Omega x (Omega x (R_{Omega t} q)): action of the second time derivative of
// the rotation matrix (negative centrifugal acceleration).
Vec3 second_derivative_action(const AngularVelocity& omega, double t,
                              const Vec3& q);

}  // namespace atomif
