#pragma once

#include <functional>

#include "atomif/rotations.hpp"
#include "atomif/types.hpp"

namespace atomif {

struct GravityModel {
  enum class Mode { Uniform, Central };
  Mode mode = Mode::Uniform;
  Vec3 g = Vec3::Zero();      // uniform local acceleration [m/s^2]
  Mat3 gamma = Mat3::Zero();  // uniform gradient [1/s^2], symmetric
  double gm = 0.0;            // central GM [m^3/s^2]

  static GravityModel uniform(const Vec3& g, const Mat3& gamma = Mat3::Zero());
  static GravityModel central(double gm);
};

// -GM rho/|rho|^3 for the central mode, the configured g otherwise.
Vec3 local_acceleration(const GravityModel& model, const Vec3& rho);

// Central: GM (delta_ik |rho|^2 - 3 rho_i rho_k)/|rho|^5 (symmetric, traceless).
// Uniform: the configured matrix regardless of rho.
Mat3 gravity_gradient(const GravityModel& model, const Vec3& rho);

// Expansion-point trajectory rho(t). Constant, polynomial (constant
// acceleration) and circular motion are handled analytically.
struct Trajectory {
  enum class Mode { Constant, Polynomial, Circular };
  Mode mode = Mode::Constant;
  Vec3 rho0 = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();               // polynomial
  Vec3 acceleration = Vec3::Zero();           // polynomial
  AngularVelocity orbit_omega = Vec3::Zero();  // circular: rho = R_{w t} rho0

  Vec3 position(double t) const;
  Vec3 second_derivative(double t) const;
};

struct FrameSpec {
  Trajectory trajectory;
  AngularVelocity frame_rotation = Vec3::Zero();  // S'' axes; zero for S'
  AngularVelocity laser_rotation = Vec3::Zero();  // Omega_k
};

// First- and second-order coefficients of the quadratic Hamiltonian,
// G(t) = (-m g(t), 0) and H(t) with momentum block I3/m. The scalar offset
// F(t) is identically zero.
struct CoefficientSet {
  std::function<Vec6(double)> first_order;
  std::function<Mat6(double)> second_order;
  double mass = 0.0;
  bool time_independent = false;
  Vec6 constant_first = Vec6::Zero();   // valid when time_independent
  Mat6 constant_second = Mat6::Zero();  // valid when time_independent

  // Position block of the constant H divided by the mass.
  Mat3 constant_gamma() const {
    return Mat3(constant_second.topLeftCorner<3, 3>() / mass);
  }
  // True when the constant H carries no x-p coupling blocks.
  bool coupling_free() const {
    return constant_second.topRightCorner<3, 3>().isZero(0.0) &&
           constant_second.bottomLeftCorner<3, 3>().isZero(0.0);
  }
};

// Co-moving frame S' (translationally accelerated, non-rotating axes):
// g'(t) = g(rho(t)) - rho''(t), H(t) = [[m Gamma(rho(t)), 0], [0, I/m]].
// Requires frame.frame_rotation = 0.
CoefficientSet comoving_coefficients(const GravityModel& model,
                                     const FrameSpec& frame, double mass);

// Rotating frame S'' with constant angular velocity: adds the antisymmetric
// coupling blocks +/- (Omega . Lambda) and rotates g and Gamma by R^T.
CoefficientSet rotating_frame_coefficients(const GravityModel& model,
                                           const FrameSpec& frame,
                                           double mass);

}  // namespace atomif
