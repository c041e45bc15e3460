#include "atomif/states.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace atomif {

void GaussianState::validate() const {
  if (!mean.all_finite() || !cov.allFinite()) {
    throw std::invalid_argument("GaussianState: non-finite entries");
  }
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("GaussianState: covariance must be symmetric");
  }
  Eigen::LLT<Mat6> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument(
        "GaussianState: covariance must be positive definite");
  }
}

std::complex<double> characteristic_function(const GaussianState& state,
                                             const PhaseVector& chi) {
  const Vec6 jchi = symplectic_form() * chi.vec();
  const double damping =
      jchi.dot(state.cov * jchi) / (2.0 * kHbar * kHbar);
  const double phase = state.mean.vec().dot(jchi) / kHbar;
  return std::exp(std::complex<double>(-damping, phase));
}

double wigner_value(const GaussianState& state, const PhaseVector& xi) {
  Eigen::LLT<Mat6> llt(state.cov);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("wigner_value: singular covariance");
  }
  const Vec6 d = xi.vec() - state.mean.vec();
  const double quad = d.dot(llt.solve(d));
  double log_det = 0.0;
  for (int i = 0; i < 6; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
  const double log_norm =
      -0.5 * (6.0 * std::log(2.0 * std::numbers::pi) + log_det);
  return std::exp(log_norm - 0.5 * quad);
}

double visibility(const GaussianState& state, const PhaseVector& chi_I) {
  const Vec6 jchi = symplectic_form() * chi_I.vec();
  return std::exp(-jchi.dot(state.cov * jchi) / (2.0 * kHbar * kHbar));
}

double total_phase(const GeometrySummary& summary, const GaussianState& state) {
  const PhaseVector offset = 0.5 * summary.chi_0 + state.mean;
  return summary.phi_I +
         symplectic_sandwich(offset, symplectic_form(), summary.chi_I) / kHbar;
}

DetectionResult detection_probability(const GeometrySummary& summary,
                                      const GaussianState& state) {
  DetectionResult result;
  const int n = summary.pulse_count - 1;
  result.sign = (n % 2 == 0) ? 1 : -1;
  result.visibility = visibility(state, summary.chi_I);
  result.total_phase = total_phase(summary, state);
  result.probability =
      0.5 * (1.0 + result.sign * result.visibility * std::cos(result.total_phase));
  return result;
}

double detection_probability_general(const WeightedDisplacementSum& entry,
                                     const GaussianState& state) {
  // P = sum_{a,b} A_a conj(A_b) tr{D(-chi_b) D(chi_a) rho}; the product
  // resolves through the composition rule into a phase times eta(chi_a-chi_b).
  std::complex<double> p(0.0, 0.0);
  for (const DisplacementTerm& a : entry.terms()) {
    for (const DisplacementTerm& b : entry.terms()) {
      const auto [diff, phase] =
          compose_displacements(-b.displacement, a.displacement);
      p += a.amplitude * std::conj(b.amplitude) *
           std::exp(std::complex<double>(0.0, phase)) *
           characteristic_function(state, diff);
    }
  }
  return p.real();
}

// ---------------------------------------------------------------------------
// Grid oracle
// ---------------------------------------------------------------------------

namespace {

Eigen::Matrix2d symplectic_form_2d() {
  Eigen::Matrix2d j;
  j << 0.0, 1.0, -1.0, 0.0;
  return j;
}

// Trapezoid sum of f(x, p) W(x, p) over [mean +/- extent sigma] per axis.
template <typename F>
double wigner_grid_sum(const Eigen::Vector2d& mean, const Eigen::Matrix2d& cov,
                       const GridSpec& grid, F&& f) {
  const Eigen::Matrix2d cov_inv = cov.inverse();
  const double norm =
      1.0 / (2.0 * std::numbers::pi * std::sqrt(cov.determinant()));
  const double sx = std::sqrt(cov(0, 0));
  const double sp = std::sqrt(cov(1, 1));
  const int n = grid.points;
  const double x_lo = mean.x() - grid.extent_sigmas * sx;
  const double p_lo = mean.y() - grid.extent_sigmas * sp;
  const double dx = 2.0 * grid.extent_sigmas * sx / (n - 1);
  const double dp = 2.0 * grid.extent_sigmas * sp / (n - 1);

  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = x_lo + i * dx;
    const double wx = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    double row = 0.0;
    for (int k = 0; k < n; ++k) {
      const double p = p_lo + k * dp;
      const double wp = (k == 0 || k == n - 1) ? 0.5 : 1.0;
      Eigen::Vector2d d(x - mean.x(), p - mean.y());
      const double w = norm * std::exp(-0.5 * d.dot(cov_inv * d));
      row += wp * w * f(x, p);
    }
    sum += wx * row;
  }
  return sum * dx * dp;
}

}  // namespace

double grid_probability_1d(double phi_I, const Eigen::Vector2d& chi0,
                           const Eigen::Vector2d& chi_I,
                           const Eigen::Vector2d& mean,
                           const Eigen::Matrix2d& cov, int sign,
                           const GridSpec& grid) {
  const Eigen::Matrix2d j = symplectic_form_2d();
  const Eigen::Vector2d jchi = j * chi_I;
  const double base = phi_I + 0.5 * chi0.dot(jchi) / kHbar;
  const double integral =
      wigner_grid_sum(mean, cov, grid, [&](double x, double p) {
        const double phase = base + (x * jchi.x() + p * jchi.y()) / kHbar;
        return std::cos(phase);
      });
  return 0.5 * (1.0 + sign * integral);
}

std::complex<double> grid_characteristic_1d(const Eigen::Vector2d& chi,
                                            const Eigen::Vector2d& mean,
                                            const Eigen::Matrix2d& cov,
                                            const GridSpec& grid) {
  const Eigen::Matrix2d j = symplectic_form_2d();
  const Eigen::Vector2d jchi = j * chi;
  const double re =
      wigner_grid_sum(mean, cov, grid, [&](double x, double p) {
        return std::cos((x * jchi.x() + p * jchi.y()) / kHbar);
      });
  const double im =
      wigner_grid_sum(mean, cov, grid, [&](double x, double p) {
        return std::sin((x * jchi.x() + p * jchi.y()) / kHbar);
      });
  // eta(chi) = int exp(-(i/hbar) chi^T J xi) W(xi) dxi and
  // chi^T J xi = -xi^T J chi.
  return {re, im};
}

}  // namespace atomif
