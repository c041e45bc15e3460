#pragma once

#include <complex>

#include "atomif/pulses.hpp"

namespace atomif {

struct GaussianState {
  PhaseVector mean;
  Mat6 cov = Mat6::Identity();  // symmetric positive definite

  // Throws std::invalid_argument on an asymmetric or non-positive-definite
  // covariance. Uncertainty-relation compliance is deliberately not checked:
  // classical thermal covariances are legitimate inputs.
  void validate() const;
};

// Symmetric-ordered characteristic function of the Gaussian state,
// eta(chi) = exp(-(J chi)^T Sigma (J chi)/(2 hbar^2) + (i/hbar) <xi>^T J chi).
std::complex<double> characteristic_function(const GaussianState& state,
                                             const PhaseVector& chi);

// Normalized Gaussian density in 6-D phase space.
double wigner_value(const GaussianState& state, const PhaseVector& xi);

// Fringe amplitude exp(-(J chi)^T Sigma (J chi)/(2 hbar^2)).
double visibility(const GaussianState& state, const PhaseVector& chi_I);

// Phi_I + (1/hbar) [chi_0/2 + <xi_0>]^T J chi_I.
double total_phase(const GeometrySummary& summary, const GaussianState& state);

struct DetectionResult {
  double probability = 0.0;
  double visibility = 0.0;
  double total_phase = 0.0;  // [rad]
  int sign = 1;              // (-1)^n with n the index of the final pulse
};

// Ground-state exit-port probability P = (1/2)[1 + (-1)^n V cos(dPhi)] for a
// standard pi/2 - pi ... pi - pi/2 sequence.
DetectionResult detection_probability(const GeometrySummary& summary,
                                      const GaussianState& state);

// trace{O rho O^dagger} for an operator-matrix entry O = sum_a A_a D(chi_a),
// evaluated through the characteristic function. Valid for arbitrary pulse
// areas; coincides with detection_probability for standard geometries.
double detection_probability_general(const WeightedDisplacementSum& entry,
                                     const GaussianState& state);

// ---------------------------------------------------------------------------
// 1-D phase-space grid oracle (brute-force validation path, not production).
// ---------------------------------------------------------------------------

struct GridSpec {
  int points = 512;
  double extent_sigmas = 8.0;
};

// Direct Wigner integral of the ground-state probability on a 2-D (x, p)
// grid with trapezoid quadrature.
double grid_probability_1d(double phi_I, const Eigen::Vector2d& chi0,
                           const Eigen::Vector2d& chi_I,
                           const Eigen::Vector2d& mean,
                           const Eigen::Matrix2d& cov, int sign,
                           const GridSpec& grid = {});

// Grid symplectic Fourier transform of the 1-D Wigner function.
std::complex<double> grid_characteristic_1d(const Eigen::Vector2d& chi,
                                            const Eigen::Vector2d& mean,
                                            const Eigen::Matrix2d& cov,
                                            const GridSpec& grid = {});

}  // namespace atomif
