#pragma once

#include <functional>
#include <memory>

#include "atomif/symplectic.hpp"
#include "atomif/types.hpp"

namespace atomif {

using HamiltonianFunc = std::function<Mat6(double)>;   // H(t)
using CoefficientFunc = std::function<Vec6(double)>;   // G(t)

struct EvolutionMatrix {
  Mat6 T;
  double t0;
  double t;
};

// Closed-form evolution for a constant symmetric gradient Gamma:
// blockwise cos(sqrt(Gamma) dt), sin(sqrt(Gamma) dt)/(m sqrt(Gamma)),
// -m Gamma sin(...)/sqrt(Gamma), cos(...), via the spectral decomposition.
// Negative eigenvalues follow the hyperbolic branch; eigenvalues with
// |ev| dt^2 < 1e-8 use the Taylor series to stay continuous through zero.
EvolutionMatrix evolve_constant(const Mat3& gamma, double mass, double dt);

// Perturbative propagator: T = sum_n T^(n) with T^(0)(a,b) = exp(J H0 (a-b))
// and T^(n) from the nested integral of T^(0) J H_I T^(n-1).
// Orders above 3 are rejected (nested-quadrature cost grows as nodes^order).
EvolutionMatrix evolve_perturbative(const Mat6& h0, const HamiltonianFunc& hi,
                                    int order, double t, double t0,
                                    int nodes = 32);

// Fixed-step RK4 integration of dT/dt = J H(t) T from the identity.
// `step` is a magnitude; integration direction follows sign(t - t0).
EvolutionMatrix ode_oracle(const HamiltonianFunc& h, double t, double t0,
                           double step);

// ---------------------------------------------------------------------------
// Propagator interface: T(to, from) for arbitrary time stamps.
// ---------------------------------------------------------------------------

class Propagator {
 public:
  virtual ~Propagator() = default;
  virtual Mat6 evolve(double to, double from) const = 0;
};

class ConstantGradientPropagator final : public Propagator {
 public:
  ConstantGradientPropagator(const Mat3& gamma, double mass);
  Mat6 evolve(double to, double from) const override;

 private:
  Mat3 gamma_;
  double mass_;
};

// T = exp(J H dt) for a constant full coefficient matrix (e.g. a rotating
// frame with constant coupling blocks).
class ConstantHamiltonianPropagator final : public Propagator {
 public:
  explicit ConstantHamiltonianPropagator(const Mat6& h);
  Mat6 evolve(double to, double from) const override;

 private:
  Mat6 jh_;
};

class PerturbativePropagator final : public Propagator {
 public:
  PerturbativePropagator(const Mat6& h0, HamiltonianFunc hi, int order,
                         int nodes = 32);
  Mat6 evolve(double to, double from) const override;

 private:
  Mat6 h0_;
  HamiltonianFunc hi_;
  int order_;
  int nodes_;
};

class OdePropagator final : public Propagator {
 public:
  OdePropagator(HamiltonianFunc h, double step);
  Mat6 evolve(double to, double from) const override;

 private:
  HamiltonianFunc h_;
  double step_;
};

// ---------------------------------------------------------------------------
// Inhomogeneous part and full solution.
// ---------------------------------------------------------------------------

// Variation-of-constants drift T(t,t0) \int_{t0}^{t} T^{-1}(t',t0) J G(t') dt'.
PhaseVector particular_drift(const Propagator& prop, const CoefficientFunc& g,
                             double t, double t0, int panels = 8,
                             int nodes = 16);

// T xi0 + drift: classical-trajectory form of the Heisenberg solution.
PhaseVector general_solution(const Mat6& t_matrix, const PhaseVector& drift,
                             const PhaseVector& xi0);

// RK4 on the full inhomogeneous system d xi/dt = J H xi + J G (cross-check
// path for the drift and the frame transformations).
PhaseVector ode_trajectory(const HamiltonianFunc& h, const CoefficientFunc& g,
                           const PhaseVector& xi0, double t, double t0,
                           double step);

}  // namespace atomif
