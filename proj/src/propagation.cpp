#include "atomif/propagation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <unsupported/Eigen/MatrixFunctions>

#include "atomif/quadrature.hpp"

namespace atomif {

// ---------------------------------------------------------------------------
// Gauss-Legendre rule (declared in quadrature.hpp)
// ---------------------------------------------------------------------------

const QuadratureRule& gauss_legendre(int n) {
  static std::unordered_map<int, QuadratureRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on P_n, Chebyshev starting guesses.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

// ---------------------------------------------------------------------------
// Constant-gradient closed form
// ---------------------------------------------------------------------------

namespace {

// Scalar oscillator kernels c = cos(sqrt(ev) u) and s = sin(sqrt(ev) u)/sqrt(ev),
// continued to the hyperbolic branch for ev < 0 and to the series near zero.
void oscillator_kernels(double ev, double u, double& c, double& s) {
  const double x = ev * u * u;
  if (std::abs(x) < 1e-8) {
    c = 1.0 - x / 2.0 + x * x / 24.0;
    s = u * (1.0 - x / 6.0 + x * x / 120.0);
  } else if (ev > 0.0) {
    const double w = std::sqrt(ev);
    c = std::cos(w * u);
    s = std::sin(w * u) / w;
  } else {
    const double w = std::sqrt(-ev);
    c = std::cosh(w * u);
    s = std::sinh(w * u) / w;
  }
}

void require_symmetric(const Mat3& gamma) {
  const double scale = std::max(1.0, gamma.cwiseAbs().maxCoeff());
  if ((gamma - gamma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("evolve_constant: gradient must be symmetric");
  }
}

}  // namespace

EvolutionMatrix evolve_constant(const Mat3& gamma, double mass, double dt) {
  if (!(mass > 0.0)) {
    throw std::invalid_argument("evolve_constant: mass must be positive");
  }
  require_symmetric(gamma);

  Eigen::SelfAdjointEigenSolver<Mat3> eig(gamma);
  const Mat3 q = eig.eigenvectors();
  Mat3 cd = Mat3::Zero();
  Mat3 sd = Mat3::Zero();
  Mat3 gsd = Mat3::Zero();  // Gamma * s in the eigenbasis
  for (int i = 0; i < 3; ++i) {
    double c, s;
    const double ev = eig.eigenvalues()[i];
    oscillator_kernels(ev, dt, c, s);
    cd(i, i) = c;
    sd(i, i) = s;
    gsd(i, i) = ev * s;
  }
  const Mat3 cos_block = q * cd * q.transpose();
  const Mat3 sin_block = q * sd * q.transpose();
  const Mat3 gamma_sin = q * gsd * q.transpose();

  Mat6 t = Mat6::Zero();
  t.topLeftCorner<3, 3>() = cos_block;
  t.topRightCorner<3, 3>() = sin_block / mass;
  t.bottomLeftCorner<3, 3>() = -mass * gamma_sin;
  t.bottomRightCorner<3, 3>() = cos_block;
  return {t, 0.0, dt};
}

// ---------------------------------------------------------------------------
// Perturbative recursion
// ---------------------------------------------------------------------------

namespace {

// exp(J H dt) via Pade after balancing the position/momentum block scales.
// In SI units the momentum-coupling block carries 1/m ~ 1e25 while the
// gradient block sits near 1e-32; the raw matrix exponential loses all
// accuracy there. Conjugating with diag(r I3, I3) maps the off-diagonal
// blocks to comparable magnitudes and is undone exactly afterwards.
Mat6 balanced_exp(const Mat6& a) {
  const double top = a.topRightCorner<3, 3>().cwiseAbs().maxCoeff();
  const double bottom = a.bottomLeftCorner<3, 3>().cwiseAbs().maxCoeff();
  double r = 1.0;
  if (top > 0.0 && bottom > 0.0) {
    r = std::sqrt(bottom / top);
  } else if (top > 0.0) {
    r = 1.0 / top;
  } else if (bottom > 0.0) {
    r = bottom;
  }
  Mat6 b = a;
  b.topRightCorner<3, 3>() *= r;
  b.bottomLeftCorner<3, 3>() /= r;
  Mat6 e = b.exp();
  e.topRightCorner<3, 3>() /= r;
  e.bottomLeftCorner<3, 3>() *= r;
  return e;
}

Mat6 unperturbed(const Mat6& jh0, double dt) {
  return balanced_exp(Mat6(jh0 * dt));
}

// Partial sum S_k(a, b) = sum_{n<=k} T^(n)(a, b), built by Picard iteration:
// S_k(a,b) = T^(0)(a,b) + int_b^a T^(0)(a,u) J H_I(u) S_{k-1}(u,b) du.
Mat6 partial_sum(const Mat6& jh0, const HamiltonianFunc& hi, int k, double a,
                 double b, int nodes) {
  Mat6 result = unperturbed(jh0, a - b);
  if (k == 0) return result;
  const Mat6& j = symplectic_form();
  auto integrand = [&](double u) -> Mat6 {
    return Mat6(unperturbed(jh0, a - u) * j * hi(u) *
                partial_sum(jh0, hi, k - 1, u, b, nodes));
  };
  result += integrate(integrand, b, a, 1, nodes);
  return result;
}

}  // namespace

EvolutionMatrix evolve_perturbative(const Mat6& h0, const HamiltonianFunc& hi,
                                    int order, double t, double t0,
                                    int nodes) {
  if (order < 0) {
    throw std::invalid_argument("evolve_perturbative: order must be >= 0");
  }
  if (order > 3) {
    throw std::invalid_argument(
        "evolve_perturbative: orders above 3 are rejected (nested quadrature "
        "cost grows as nodes^order)");
  }
  if (nodes < 8) {
    throw std::invalid_argument("evolve_perturbative: need >= 8 nodes");
  }
  const Mat6 jh0 = symplectic_form() * h0;
  const Mat6 t_matrix = partial_sum(jh0, hi, order, t, t0, nodes);
  if (!t_matrix.allFinite()) {
    throw std::runtime_error("evolve_perturbative: quadrature produced "
                             "non-finite entries");
  }
  return {t_matrix, t0, t};
}

// ---------------------------------------------------------------------------
// RK4 oracle
// ---------------------------------------------------------------------------

EvolutionMatrix ode_oracle(const HamiltonianFunc& h, double t, double t0,
                           double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("ode_oracle: step must be positive");
  }
  Mat6 t_matrix = Mat6::Identity();
  if (t == t0) return {t_matrix, t0, t};

  const double span = t - t0;
  long n_steps = static_cast<long>(std::ceil(std::abs(span) / step));
  if (n_steps < 10) n_steps = 10;
  const double dh = span / static_cast<double>(n_steps);
  const Mat6& j = symplectic_form();

  double u = t0;
  for (long i = 0; i < n_steps; ++i) {
    const Mat6 a1 = j * h(u);
    const Mat6 a2 = j * h(u + 0.5 * dh);
    const Mat6 a4 = j * h(u + dh);
    const Mat6 k1 = a1 * t_matrix;
    const Mat6 k2 = a2 * (t_matrix + 0.5 * dh * k1);
    const Mat6 k3 = a2 * (t_matrix + 0.5 * dh * k2);
    const Mat6 k4 = a4 * (t_matrix + dh * k3);
    t_matrix += (dh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    u = t0 + (i + 1) * dh;
  }
  if (!t_matrix.allFinite()) {
    throw std::runtime_error("ode_oracle: non-finite evolution matrix");
  }
  return {t_matrix, t0, t};
}

// ---------------------------------------------------------------------------
// Propagator implementations
// ---------------------------------------------------------------------------

ConstantGradientPropagator::ConstantGradientPropagator(const Mat3& gamma,
                                                       double mass)
    : gamma_(gamma), mass_(mass) {
  require_symmetric(gamma);
  if (!(mass > 0.0)) {
    throw std::invalid_argument(
        "ConstantGradientPropagator: mass must be positive");
  }
}

Mat6 ConstantGradientPropagator::evolve(double to, double from) const {
  return evolve_constant(gamma_, mass_, to - from).T;
}

ConstantHamiltonianPropagator::ConstantHamiltonianPropagator(const Mat6& h)
    : jh_(symplectic_form() * h) {}

Mat6 ConstantHamiltonianPropagator::evolve(double to, double from) const {
  return balanced_exp(Mat6(jh_ * (to - from)));
}

PerturbativePropagator::PerturbativePropagator(const Mat6& h0,
                                               HamiltonianFunc hi, int order,
                                               int nodes)
    : h0_(h0), hi_(std::move(hi)), order_(order), nodes_(nodes) {
  if (order < 0 || order > 3) {
    throw std::invalid_argument("PerturbativePropagator: order must be 0..3");
  }
}

Mat6 PerturbativePropagator::evolve(double to, double from) const {
  return evolve_perturbative(h0_, hi_, order_, to, from, nodes_).T;
}

OdePropagator::OdePropagator(HamiltonianFunc h, double step)
    : h_(std::move(h)), step_(step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("OdePropagator: step must be positive");
  }
}

Mat6 OdePropagator::evolve(double to, double from) const {
  return ode_oracle(h_, to, from, step_).T;
}

// ---------------------------------------------------------------------------
// Inhomogeneous part
// ---------------------------------------------------------------------------

PhaseVector particular_drift(const Propagator& prop, const CoefficientFunc& g,
                             double t, double t0, int panels, int nodes) {
  const Mat6& j = symplectic_form();
  auto integrand = [&](double u) -> Vec6 {
    const Mat6 t_u = prop.evolve(u, t0);
    // The symplecticity-defect roundoff grows with the squared entry scale
    // (the dt/m block reaches ~1e24 at atomic masses); keep the rejection
    // threshold a safe factor above that floor.
    const double scale = t_u.cwiseAbs().maxCoeff();
    const double tol = std::max(1e-6, scale * scale * 1e-12);
    return Vec6(symplectic_inverse(t_u, tol) * (j * g(u)));
  };
  const Vec6 integral = integrate(integrand, t0, t, panels, nodes);
  if (!integral.allFinite()) {
    throw std::runtime_error("particular_drift: quadrature failure");
  }
  return PhaseVector::from_vec(prop.evolve(t, t0) * integral);
}

PhaseVector general_solution(const Mat6& t_matrix, const PhaseVector& drift,
                             const PhaseVector& xi0) {
  return apply(t_matrix, xi0) + drift;
}

PhaseVector ode_trajectory(const HamiltonianFunc& h, const CoefficientFunc& g,
                           const PhaseVector& xi0, double t, double t0,
                           double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("ode_trajectory: step must be positive");
  }
  Vec6 xi = xi0.vec();
  if (t == t0) return xi0;

  const double span = t - t0;
  long n_steps = static_cast<long>(std::ceil(std::abs(span) / step));
  if (n_steps < 10) n_steps = 10;
  const double dh = span / static_cast<double>(n_steps);
  const Mat6& j = symplectic_form();

  auto rhs = [&](double u, const Vec6& y) -> Vec6 {
    return Vec6(j * (h(u) * y + g(u)));
  };
  double u = t0;
  for (long i = 0; i < n_steps; ++i) {
    const Vec6 k1 = rhs(u, xi);
    const Vec6 k2 = rhs(u + 0.5 * dh, Vec6(xi + 0.5 * dh * k1));
    const Vec6 k3 = rhs(u + 0.5 * dh, Vec6(xi + 0.5 * dh * k2));
    const Vec6 k4 = rhs(u + dh, Vec6(xi + dh * k3));
    xi += (dh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    u = t0 + (i + 1) * dh;
  }
  return PhaseVector::from_vec(xi);
}

}  // namespace atomif
