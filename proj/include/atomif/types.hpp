#pragma once

#include <Eigen/Dense>

namespace atomif {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Reduced Planck constant [J s].
inline constexpr double kHbar = 1.054571817e-34;

// Boltzmann constant [J/K], used by the thermal-state shorthand.
inline constexpr double kBoltzmann = 1.380649e-23;

// Phase-space vector: position [m] stacked on canonical momentum [kg m/s].
struct PhaseVector {
  Vec3 x = Vec3::Zero();
  Vec3 p = Vec3::Zero();

  Vec6 vec() const {
    Vec6 v;
    v << x, p;
    return v;
  }
  static PhaseVector from_vec(const Vec6& v) {
    return {v.head<3>(), v.tail<3>()};
  }
  static PhaseVector zero() { return {Vec3::Zero(), Vec3::Zero()}; }
  bool all_finite() const { return x.allFinite() && p.allFinite(); }
  double norm() const { return vec().norm(); }
};

inline PhaseVector operator+(const PhaseVector& a, const PhaseVector& b) {
  return {a.x + b.x, a.p + b.p};
}
inline PhaseVector operator-(const PhaseVector& a, const PhaseVector& b) {
  return {a.x - b.x, a.p - b.p};
}
inline PhaseVector operator-(const PhaseVector& a) { return {-a.x, -a.p}; }
inline PhaseVector operator*(double s, const PhaseVector& a) {
  return {s * a.x, s * a.p};
}

// M v for a 6x6 matrix acting on a phase-space vector.
inline PhaseVector apply(const Mat6& m, const PhaseVector& v) {
  return PhaseVector::from_vec(m * v.vec());
}

}  // namespace atomif
