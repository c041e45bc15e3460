#pragma once

#include "atomif/types.hpp"

namespace atomif {

// Inputs for the closed-form phase expansions. Angular velocities are
// 3-vectors; the evaluators promote them to Lie-algebra generators and keep
// every matrix product in the printed order.
struct ExpansionParams {
  Vec3 k0 = Vec3::Zero();        // [1/m]
  Vec3 g = Vec3::Zero();         // local (or effective g'_0) [m/s^2]
  Mat3 gamma0 = Mat3::Zero();    // [1/s^2]
  Vec3 omega = Vec3::Zero();     // laser rotation (inertial) / frame rate
  Vec3 omega_k = Vec3::Zero();   // wave-vector rotation
  Vec3 omega_g = Vec3::Zero();   // rotation of the effective acceleration
  Vec3 omega_gamma = Vec3::Zero();  // rotation of the gradient
  double T = 0.0;                // [s]
  double T1 = 0.0, T2 = 0.0, T3 = 0.0;
  Vec3 x0 = Vec3::Zero();        // initial mean position [m]
  Vec3 p0 = Vec3::Zero();        // initial mean momentum [kg m/s]
  double mass = 0.0;             // [kg]
  double laser_phase = 0.0;      // combined laser phase phi_I [rad]
};

// Total Mach-Zehnder phase to O(Gamma^2, Omega^2), symmetric timing (0, T, 2T),
// rotating lasers in an inertial frame.
double delta_phi_mz_series(const ExpansionParams& p);

// Total Butterfly phase to O(Gamma^2, Omega^2), timing (0, T, 3T, 4T).
double delta_phi_butterfly_series(const ExpansionParams& p);

// Total Mach-Zehnder phase with three independent rotations (wave vectors,
// effective acceleration, gradient), bracket terms through T^5.
double phi_mz_noninertial_series(const ExpansionParams& p);

// Atomic fountain on Earth: all three rotations equal to omega.
double phi_atomic_fountain_series(const ExpansionParams& p);

}  // namespace atomif
