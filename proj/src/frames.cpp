#include "atomif/frames.hpp"

#include <stdexcept>

namespace atomif {

GravityModel GravityModel::uniform(const Vec3& g, const Mat3& gamma) {
  const double scale = std::max(1.0, gamma.cwiseAbs().maxCoeff());
  if ((gamma - gamma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("GravityModel: uniform gradient must be symmetric");
  }
  GravityModel m;
  m.mode = Mode::Uniform;
  m.g = g;
  m.gamma = gamma;
  return m;
}

GravityModel GravityModel::central(double gm) {
  if (!(gm > 0.0)) {
    throw std::invalid_argument("GravityModel: central mode requires GM > 0");
  }
  GravityModel m;
  m.mode = Mode::Central;
  m.gm = gm;
  return m;
}

Vec3 local_acceleration(const GravityModel& model, const Vec3& rho) {
  if (model.mode == GravityModel::Mode::Uniform) return model.g;
  const double r = rho.norm();
  if (r <= 0.0) {
    throw std::domain_error("local_acceleration: singular at rho = 0");
  }
  return -model.gm * rho / (r * r * r);
}

Mat3 gravity_gradient(const GravityModel& model, const Vec3& rho) {
  if (model.mode == GravityModel::Mode::Uniform) return model.gamma;
  const double r = rho.norm();
  if (r <= 0.0) {
    throw std::domain_error("gravity_gradient: singular at rho = 0");
  }
  const double r2 = r * r;
  const double r5 = r2 * r2 * r;
  return model.gm * (r2 * Mat3::Identity() - 3.0 * rho * rho.transpose()) / r5;
}

Vec3 Trajectory::position(double t) const {
  switch (mode) {
    case Mode::Constant:
      return rho0;
    case Mode::Polynomial:
      return rho0 + velocity * t + 0.5 * acceleration * t * t;
    case Mode::Circular:
      return rotation_about(orbit_omega, t) * rho0;
  }
  throw std::logic_error("Trajectory: unsupported mode");
}

Vec3 Trajectory::second_derivative(double t) const {
  switch (mode) {
    case Mode::Constant:
      return Vec3::Zero();
    case Mode::Polynomial:
      return acceleration;
    case Mode::Circular:
      return second_derivative_action(orbit_omega, t, rho0);
  }
  throw std::logic_error("Trajectory: unsupported mode");
}

namespace {

Mat6 free_momentum_block(double mass) {
  Mat6 h = Mat6::Zero();
  h.bottomRightCorner<3, 3>() = Mat3::Identity() / mass;
  return h;
}

Vec6 first_order_from_g(const Vec3& g, double mass) {
  Vec6 v = Vec6::Zero();
  v.head<3>() = -mass * g;
  return v;
}

bool trajectory_gives_constant_coeffs(const GravityModel& model,
                                      const Trajectory& traj) {
  switch (traj.mode) {
    case Trajectory::Mode::Constant:
      return true;
    case Trajectory::Mode::Polynomial:
      // Constant fictitious acceleration; g, Gamma only stay fixed for the
      // uniform model.
      return model.mode == GravityModel::Mode::Uniform;
    case Trajectory::Mode::Circular:
      return traj.orbit_omega.norm() < kOmegaZeroThreshold;
  }
  return false;
}

}  // namespace

CoefficientSet comoving_coefficients(const GravityModel& model,
                                     const FrameSpec& frame, double mass) {
  if (!(mass > 0.0)) {
    throw std::invalid_argument("comoving_coefficients: mass must be positive");
  }
  if (frame.frame_rotation.norm() >= kOmegaZeroThreshold) {
    throw std::invalid_argument(
        "comoving_coefficients: the co-moving frame S' has non-rotating axes; "
        "use rotating_frame_coefficients");
  }
  const Trajectory traj = frame.trajectory;
  const GravityModel grav = model;

  CoefficientSet set;
  set.mass = mass;
  set.first_order = [grav, traj, mass](double t) -> Vec6 {
    const Vec3 rho = traj.position(t);
    const Vec3 g_eff = local_acceleration(grav, rho) - traj.second_derivative(t);
    return first_order_from_g(g_eff, mass);
  };
  set.second_order = [grav, traj, mass](double t) -> Mat6 {
    Mat6 h = free_momentum_block(mass);
    h.topLeftCorner<3, 3>() = mass * gravity_gradient(grav, traj.position(t));
    return h;
  };
  set.time_independent = trajectory_gives_constant_coeffs(model, traj);
  if (set.time_independent) {
    set.constant_first = set.first_order(0.0);
    set.constant_second = set.second_order(0.0);
  }
  return set;
}

CoefficientSet rotating_frame_coefficients(const GravityModel& model,
                                           const FrameSpec& frame,
                                           double mass) {
  if (!(mass > 0.0)) {
    throw std::invalid_argument(
        "rotating_frame_coefficients: mass must be positive");
  }
  const Vec3 alpha = frame.frame_rotation;
  if (alpha.norm() < kOmegaZeroThreshold) {
    return comoving_coefficients(model, frame, mass);
  }
  const Trajectory traj = frame.trajectory;
  const GravityModel grav = model;
  const Mat3 coupling = generator(alpha);

  CoefficientSet set;
  set.mass = mass;
  set.first_order = [grav, traj, alpha, mass](double t) -> Vec6 {
    const Vec3 rho = traj.position(t);
    const Vec3 g_comoving =
        local_acceleration(grav, rho) - traj.second_derivative(t);
    const Mat3 r = rotation_about(alpha, t);
    return first_order_from_g(r.transpose() * g_comoving, mass);
  };
  set.second_order = [grav, traj, alpha, coupling, mass](double t) -> Mat6 {
    const Mat3 r = rotation_about(alpha, t);
    const Mat3 raw =
        r.transpose() * gravity_gradient(grav, traj.position(t)) * r;
    // Conjugation by R is symmetric analytically; enforce it bitwise.
    const Mat3 gamma_rot = 0.5 * (raw + raw.transpose());
    Mat6 h = free_momentum_block(mass);
    h.topLeftCorner<3, 3>() = mass * gamma_rot;
    h.topRightCorner<3, 3>() = coupling;
    h.bottomLeftCorner<3, 3>() = -coupling;
    return h;
  };

  // Circular orbit about the frame's own axis with central gravity keeps
  // g'' and Gamma'' fixed; the constant coupling makes H'' fully constant.
  const bool co_rotating_orbit =
      traj.mode == Trajectory::Mode::Circular &&
      (traj.orbit_omega - alpha).norm() < kOmegaZeroThreshold &&
      model.mode == GravityModel::Mode::Central;
  set.time_independent = co_rotating_orbit;
  if (set.time_independent) {
    set.constant_first = set.first_order(0.0);
    set.constant_second = set.second_order(0.0);
  }
  return set;
}

}  // namespace atomif
