#include "atomif/pulses.hpp"

#include <cmath>
#include <stdexcept>

#include "atomif/quadrature.hpp"

namespace atomif {

PhaseVector kick_vector(const Vec3& k) { return {Vec3::Zero(), kHbar * k}; }

PulseEffect pulse_effect(double t_pulse, const Vec3& k, double laser_phase,
                         const Propagator& prop, const CoefficientFunc& g,
                         double t0, int panels, int nodes) {
  if (t_pulse < t0) {
    throw std::invalid_argument("pulse_effect: pulse precedes t0");
  }
  const PhaseVector kick = kick_vector(k);
  PulseEffect effect;
  effect.chi = apply(prop.evolve(t0, t_pulse), kick);

  auto integrand = [&](double u) -> double {
    const Vec6 chi_u = prop.evolve(u, t_pulse) * kick.vec();
    return chi_u.dot(g(u));
  };
  effect.phi = laser_phase +
               integrate(integrand, t0, t_pulse, panels, nodes) / kHbar;
  if (!std::isfinite(effect.phi) || !effect.chi.all_finite()) {
    throw std::runtime_error("pulse_effect: non-finite result");
  }
  return effect;
}

std::pair<PhaseVector, double> compose_displacements(const PhaseVector& chi1,
                                                     const PhaseVector& chi0) {
  const double phase =
      symplectic_sandwich(chi0, symplectic_form(), chi1) / (2.0 * kHbar);
  return {chi1 + chi0, phase};
}

PhaseVector sandwich(const PhaseVector& chi_mid, const PhaseVector& chi_outer) {
  return chi_mid - 2.0 * chi_outer;
}

std::vector<int> vertex_coefficients(int n_pulses) {
  if (n_pulses < 2) {
    throw std::invalid_argument("vertex_coefficients: need >= 2 pulses");
  }
  const int n = n_pulses - 1;  // index of the final pulse
  std::vector<int> coeffs(n_pulses);
  coeffs[0] = 1;
  for (int i = 1; i < n; ++i) coeffs[i] = (i % 2 == 0) ? 2 : -2;
  coeffs[n] = (n % 2 == 0) ? 1 : -1;
  return coeffs;
}

GeometrySummary geometry_summary(const std::vector<PulseEffect>& pulses) {
  if (pulses.size() < 3) {
    throw std::invalid_argument("geometry_summary: need >= 3 pulses");
  }
  GeometrySummary summary;
  summary.pulse_count = static_cast<int>(pulses.size());
  summary.coefficients = vertex_coefficients(summary.pulse_count);
  summary.chi_0 = pulses.front().chi;
  summary.chi_I = PhaseVector::zero();
  summary.phi_I = 0.0;
  for (size_t i = 0; i < pulses.size(); ++i) {
    const double c = summary.coefficients[i];
    summary.phi_I += c * pulses[i].phi;
    summary.chi_I = summary.chi_I + c * pulses[i].chi;
  }
  summary.bch_phase =
      symplectic_sandwich(summary.chi_0, symplectic_form(), summary.chi_I) /
      (2.0 * kHbar);
  return summary;
}

// ---------------------------------------------------------------------------
// Weighted displacement sums
// ---------------------------------------------------------------------------

namespace {

// Scale-aware equality per block: displacements agree when both the position
// and the momentum parts differ by less than 1e-12 of the larger block norm.
bool same_displacement(const PhaseVector& a, const PhaseVector& b) {
  constexpr double rel = 1e-12;
  const double x_scale = std::max(a.x.norm(), b.x.norm());
  const double p_scale = std::max(a.p.norm(), b.p.norm());
  return (a.x - b.x).norm() <= rel * x_scale + 1e-300 &&
         (a.p - b.p).norm() <= rel * p_scale + 1e-300;
}

}  // namespace

void WeightedDisplacementSum::add(const std::complex<double>& amplitude,
                                  const PhaseVector& displacement) {
  if (amplitude == std::complex<double>(0.0, 0.0)) return;
  for (DisplacementTerm& term : terms_) {
    if (same_displacement(term.displacement, displacement)) {
      term.amplitude += amplitude;
      return;
    }
  }
  terms_.push_back({amplitude, displacement});
}

WeightedDisplacementSum WeightedDisplacementSum::times(
    const WeightedDisplacementSum& rhs) const {
  WeightedDisplacementSum result;
  for (const DisplacementTerm& left : terms_) {
    for (const DisplacementTerm& right : rhs.terms_) {
      const auto [sum, phase] =
          compose_displacements(left.displacement, right.displacement);
      result.add(left.amplitude * right.amplitude *
                     std::exp(std::complex<double>(0.0, phase)),
                 sum);
    }
  }
  return result;
}

namespace {

WeightedDisplacementSum scalar_term(const std::complex<double>& amplitude) {
  WeightedDisplacementSum sum;
  sum.add(amplitude, PhaseVector::zero());
  return sum;
}

// Pulse areas hitting pi or 2 pi leave cos/sin factors at the 1e-17
// roundoff level; dropping them keeps exact mirrors and splitters sparse.
constexpr double kFactorFloor = 1e-14;

OperatorMatrix beam_splitter_matrix(const PulseOperator& pulse) {
  const double c = std::cos(0.5 * pulse.theta);
  const double s = std::sin(0.5 * pulse.theta);
  const std::complex<double> minus_i(0.0, -1.0);

  OperatorMatrix m;
  if (std::abs(c) > kFactorFloor) {
    m[0][0] = scalar_term(c);
    m[1][1] = scalar_term(c);
  }
  if (std::abs(s) > kFactorFloor) {
    // 1 -> 0 transition: -i sin(T/2) e^{-i Phi^-} D(-chi^-).
    WeightedDisplacementSum lower;
    lower.add(
        minus_i * s * std::exp(std::complex<double>(0.0, -pulse.minus.phi)),
        -pulse.minus.chi);
    m[0][1] = lower;
    // 0 -> 1 transition: -i sin(T/2) e^{+i Phi^+} D(+chi^+).
    WeightedDisplacementSum raise;
    raise.add(minus_i * s * std::exp(std::complex<double>(0.0, pulse.plus.phi)),
              pulse.plus.chi);
    m[1][0] = raise;
  }
  return m;
}

OperatorMatrix multiply(const OperatorMatrix& a, const OperatorMatrix& b) {
  OperatorMatrix out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      WeightedDisplacementSum entry = a[i][0].times(b[0][j]);
      const WeightedDisplacementSum second = a[i][1].times(b[1][j]);
      for (const DisplacementTerm& term : second.terms()) {
        entry.add(term.amplitude, term.displacement);
      }
      out[i][j] = entry;
    }
  }
  return out;
}

}  // namespace

OperatorMatrix compose_beam_splitters(const std::vector<PulseOperator>& pulses) {
  if (pulses.empty()) {
    throw std::invalid_argument("compose_beam_splitters: need >= 1 pulse");
  }
  OperatorMatrix product = beam_splitter_matrix(pulses.front());
  for (size_t i = 1; i < pulses.size(); ++i) {
    product = multiply(beam_splitter_matrix(pulses[i]), product);
  }
  return product;
}

}  // namespace atomif
