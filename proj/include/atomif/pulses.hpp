#pragma once

#include <array>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "atomif/propagation.hpp"

namespace atomif {

struct PulseSpec {
  double t = 0.0;           // pulse time [s]
  Vec3 k = Vec3::Zero();    // wave vector of the 0 -> 1 kick [1/m]
  double laser_phase = 0.0; // [rad]
  double pulse_area = 0.0;  // Theta in (0, 2 pi)
  std::optional<Vec3> k_minus;  // asymmetric beam splitter: 1 -> 0 kick
};

// Photon-recoil displacement (0, hbar k).
PhaseVector kick_vector(const Vec3& k);

struct PulseEffect {
  PhaseVector chi;  // displacement back-propagated to t0
  double phi = 0.0; // generalized phase [rad]
};

// chi_n = T(t0, t_n) (0, hbar k) and
// Phi_n = phase + (1/hbar) int_{t0}^{t_n} [T(t', t_n) (0, hbar k)]^T G(t') dt'.
PulseEffect pulse_effect(double t_pulse, const Vec3& k, double laser_phase,
                         const Propagator& prop, const CoefficientFunc& g,
                         double t0, int panels = 8, int nodes = 16);

// D(chi1) D(chi0) = D(chi1 + chi0) exp(i phase) with
// phase = chi0^T J chi1 / (2 hbar). Returns (chi1 + chi0, phase).
std::pair<PhaseVector, double> compose_displacements(const PhaseVector& chi1,
                                                     const PhaseVector& chi0);

// D(-chi_o) D(chi_m) D(-chi_o) = D(chi_m - 2 chi_o); the two bilinear phase
// corrections cancel exactly.
PhaseVector sandwich(const PhaseVector& chi_mid, const PhaseVector& chi_outer);

// Multi-loop vertex multiplicities [1, -2, 2, ..., (-1)^n] for pulses
// 0..n. Requires at least two pulses.
std::vector<int> vertex_coefficients(int n_pulses);

struct GeometrySummary {
  std::vector<int> coefficients;
  double phi_I = 0.0;           // sum c_i Phi_i
  PhaseVector chi_I;            // sum c_i chi_i
  PhaseVector chi_0;            // first-pulse displacement
  double bch_phase = 0.0;       // chi_0^T J chi_I / (2 hbar)
  int pulse_count = 0;
};

// Vertex-rule aggregates for a standard pi/2 - pi ... pi - pi/2 sequence.
GeometrySummary geometry_summary(const std::vector<PulseEffect>& pulses);

// ---------------------------------------------------------------------------
// Operator path: sums of weighted displacement operators.
// ---------------------------------------------------------------------------

struct DisplacementTerm {
  std::complex<double> amplitude;
  PhaseVector displacement;
};

// Sum_a A_a D(chi_a). Terms with coinciding displacement vectors (within a
// scale-aware 1e-12 relative tolerance per block) are merged.
class WeightedDisplacementSum {
 public:
  void add(const std::complex<double>& amplitude,
           const PhaseVector& displacement);
  const std::vector<DisplacementTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  // Operator product (this applied after rhs): every pair of terms composes
  // through the displacement composition rule.
  WeightedDisplacementSum times(const WeightedDisplacementSum& rhs) const;

 private:
  std::vector<DisplacementTerm> terms_;
};

struct PulseOperator {
  double theta = 0.0;   // pulse area
  PulseEffect plus;     // 0 -> 1 transition effect
  PulseEffect minus;    // 1 -> 0 transition effect (== plus when symmetric)

  static PulseOperator symmetric(double theta, const PulseEffect& effect) {
    return {theta, effect, effect};
  }
};

using OperatorMatrix = std::array<std::array<WeightedDisplacementSum, 2>, 2>;

// Product of generalized beam-splitter matrices, last pulse leftmost.
// Entry (i, j) propagates internal state |j> to |i>.
OperatorMatrix compose_beam_splitters(const std::vector<PulseOperator>& pulses);

}  // namespace atomif
