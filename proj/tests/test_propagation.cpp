#include <doctest.h>

#include <cmath>
#include <random>

#include "atomif/propagation.hpp"
#include "atomif/rotations.hpp"

using namespace atomif;

namespace {

Mat6 gradient_hamiltonian(const Mat3& gamma, double mass) {
  Mat6 h = Mat6::Zero();
  h.topLeftCorner<3, 3>() = mass * gamma;
  h.bottomRightCorner<3, 3>() = Mat3::Identity() / mass;
  return h;
}

Mat6 free_h0(double mass) { return gradient_hamiltonian(Mat3::Zero(), mass); }

}  // namespace

TEST_CASE("evolve_constant closed forms") {
  const double m = 1.7;
  SUBCASE("vanishing gradient gives the free block matrix") {
    const double dt = 0.8;
    const Mat6 t = evolve_constant(Mat3::Zero(), m, dt).T;
    Mat6 expected = Mat6::Identity();
    expected.topRightCorner<3, 3>() = (dt / m) * Mat3::Identity();
    CHECK((t - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("isotropic positive gradient oscillates") {
    const double gamma = 2.3, dt = 0.6;
    const Mat6 t = evolve_constant(Mat3(gamma * Mat3::Identity()), m, dt).T;
    const double w = std::sqrt(gamma);
    CHECK(t(0, 0) == doctest::Approx(std::cos(w * dt)).epsilon(1e-14));
    CHECK(t(0, 3) == doctest::Approx(std::sin(w * dt) / (m * w)).epsilon(1e-14));
    CHECK(t(3, 0) ==
          doctest::Approx(-m * w * std::sin(w * dt)).epsilon(1e-14));
  }
  SUBCASE("negative eigenvalues run on the hyperbolic branch") {
    const double gamma = -1.9, dt = 0.5;
    const Mat6 t = evolve_constant(Mat3(gamma * Mat3::Identity()), m, dt).T;
    const double w = std::sqrt(-gamma);
    CHECK(t(0, 0) == doctest::Approx(std::cosh(w * dt)).epsilon(1e-14));
    CHECK(t(0, 3) ==
          doctest::Approx(std::sinh(w * dt) / (m * w)).epsilon(1e-14));
  }
  SUBCASE("rejects asymmetric gradients") {
    Mat3 bad = Mat3::Zero();
    bad(0, 1) = 1e-3;
    CHECK_THROWS_AS(evolve_constant(bad, m, 1.0), std::invalid_argument);
  }
  SUBCASE("continuous through zero eigenvalues") {
    const double dt = 1.3, eps = 1e-8;
    const Mat6 above = evolve_constant(Mat3(eps * Mat3::Identity()), m, dt).T;
    const Mat6 below = evolve_constant(Mat3(-eps * Mat3::Identity()), m, dt).T;
    CHECK((above - below).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("evolve_constant vs RK4 oracle at Earth-like gradient") {
  const double gamma = 1.54e-6;
  const Mat3 g_earth = Vec3(gamma, gamma, -2.0 * gamma).asDiagonal();
  const double m = 1.4431608951791763e-25;
  const Mat6 h = gradient_hamiltonian(g_earth, m);
  const Mat6 exact = evolve_constant(g_earth, m, 1.0).T;
  const Mat6 rk4 = ode_oracle([&](double) { return h; }, 1.0, 0.0, 1e-4).T;
  double max_rel = 0.0;
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) {
      if (std::abs(exact(r, c)) > 1e-300) {
        max_rel = std::max(max_rel,
                           std::abs(rk4(r, c) - exact(r, c)) /
                               std::abs(exact(r, c)));
      }
    }
  }
  CHECK(max_rel < 1e-8);
}

TEST_CASE("RK4 oracle shows fourth-order convergence") {
  // Measured on an O(1)-frequency system so truncation dominates roundoff.
  const Mat3 gamma = Vec3(1.0, 2.0, -0.5).asDiagonal();
  const double m = 1.0;
  const Mat6 h = gradient_hamiltonian(gamma, m);
  const Mat6 exact = evolve_constant(gamma, m, 1.0).T;
  auto hf = [&](double) { return h; };
  const double err_h =
      (ode_oracle(hf, 1.0, 0.0, 0.05).T - exact).cwiseAbs().maxCoeff();
  const double err_h2 =
      (ode_oracle(hf, 1.0, 0.0, 0.025).T - exact).cwiseAbs().maxCoeff();
  CHECK(err_h / err_h2 == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("ode_oracle basics") {
  SUBCASE("zero Hamiltonian returns the identity") {
    const Mat6 t =
        ode_oracle([](double) { return Mat6::Zero(); }, 2.0, 0.0, 0.01).T;
    CHECK((t - Mat6::Identity()).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("backward integration inverts forward") {
    const Mat3 gamma = Vec3(0.8, -0.3, 0.1).asDiagonal();
    const Mat6 h = gradient_hamiltonian(gamma, 1.0);
    auto hf = [&](double) { return h; };
    const Mat6 fwd = ode_oracle(hf, 1.0, 0.0, 1e-3).T;
    const Mat6 bwd = ode_oracle(hf, 0.0, 1.0, 1e-3).T;
    CHECK((bwd * fwd - Mat6::Identity()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("perturbative recursion") {
  const double m = 1.3;
  const Mat6 h0 = free_h0(m);

  SUBCASE("order 0 reduces to exp(J H0 dt)") {
    const double dt = 0.7;
    const Mat6 t = evolve_perturbative(
                       h0, [](double) { return Mat6::Identity(); }, 0, dt, 0.0)
                       .T;
    Mat6 expected = Mat6::Identity();
    expected.topRightCorner<3, 3>() = (dt / m) * Mat3::Identity();
    CHECK((t - expected).cwiseAbs().maxCoeff() < 1e-13);
  }

  SUBCASE("constant gradient at order 1 matches the closed first-order blocks") {
    const Mat3 gamma = Vec3(0.31, -0.12, 0.07).asDiagonal();
    Mat6 hi = Mat6::Zero();
    hi.topLeftCorner<3, 3>() = m * gamma;
    const double dt = 0.9;
    const Mat6 t =
        evolve_perturbative(h0, [&](double) { return hi; }, 1, dt, 0.0).T;

    Mat6 expected = Mat6::Identity();
    expected.topRightCorner<3, 3>() = (dt / m) * Mat3::Identity();
    expected.topLeftCorner<3, 3>() -= 0.5 * dt * dt * gamma;
    expected.topRightCorner<3, 3>() -= dt * dt * dt / (6.0 * m) * gamma;
    expected.bottomLeftCorner<3, 3>() -= m * dt * gamma;
    expected.bottomRightCorner<3, 3>() -= 0.5 * dt * dt * gamma;
    CHECK((t - expected).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("rotating gradient at order 1 matches the commutator blocks") {
    // H_I from the linearized rotating gradient
    // Gamma(t) = Gamma0 + t (W Gamma0 - Gamma0 W); the integrands are
    // polynomials, so the quadrature is exact and the first-order blocks
    // with the t^3 (Gamma0 W - W Gamma0)/6 structure come out to machine
    // precision.
    const Mat3 gamma0 = Vec3(0.21, 0.21, -0.42).asDiagonal();
    const Vec3 omega_vec(0.0, 0.4, 0.3);
    const Mat3 w = generator(omega_vec);
    const Mat3 comm = Mat3(gamma0 * w - w * gamma0);
    auto hi = [&](double t) {
      Mat6 h = Mat6::Zero();
      h.topLeftCorner<3, 3>() =
          m * Mat3(gamma0 + t * (w * gamma0 - gamma0 * w));
      return h;
    };
    const double t = 0.8;
    const Mat6 got = evolve_perturbative(h0, hi, 1, t, 0.0).T;

    Mat6 expected = Mat6::Identity();
    expected.topRightCorner<3, 3>() = (t / m) * Mat3::Identity();
    expected.topLeftCorner<3, 3>() +=
        -0.5 * t * t * gamma0 + (t * t * t / 6.0) * comm;
    expected.topRightCorner<3, 3>() +=
        -(t * t * t / (6.0 * m)) * gamma0 + (t * t * t * t / (12.0 * m)) * comm;
    expected.bottomLeftCorner<3, 3>() +=
        -m * t * gamma0 + (m * t * t / 2.0) * comm;
    expected.bottomRightCorner<3, 3>() +=
        -0.5 * t * t * gamma0 + (t * t * t / 3.0) * comm;
    CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-13);
  }

  SUBCASE("residual vs exact scales as Gamma^(order+1)") {
    const double dt = 1.0;
    for (int order = 1; order <= 2; ++order) {
      auto residual = [&](double scale) {
        const Mat3 gamma =
            scale * Vec3(0.20, 0.15, -0.35).asDiagonal().toDenseMatrix();
        Mat6 hi = Mat6::Zero();
        hi.topLeftCorner<3, 3>() = m * gamma;
        const Mat6 pert =
            evolve_perturbative(h0, [&](double) { return hi; }, order, dt, 0.0)
                .T;
        const Mat6 exact = evolve_constant(gamma, m, dt).T;
        return (pert - exact).cwiseAbs().maxCoeff();
      };
      const double exponent = std::log2(residual(0.2) / residual(0.1));
      CHECK(exponent > order + 1 - 0.3);
    }
  }

  SUBCASE("symplecticity violation scales as Gamma^(order+1)") {
    const Mat6& j = symplectic_form();
    for (int order = 1; order <= 2; ++order) {
      auto violation = [&](double scale) {
        const Mat3 gamma =
            scale * Vec3(0.25, -0.10, 0.18).asDiagonal().toDenseMatrix();
        Mat6 hi = Mat6::Zero();
        hi.topLeftCorner<3, 3>() = m * gamma;
        const Mat6 t =
            evolve_perturbative(h0, [&](double) { return hi; }, order, 1.0, 0.0)
                .T;
        return (t.transpose() * j * t - j).cwiseAbs().maxCoeff();
      };
      const double exponent = std::log2(violation(0.2) / violation(0.1));
      CHECK(exponent > order + 1 - 0.3);
    }
  }

  SUBCASE("orders above 3 are rejected") {
    CHECK_THROWS_AS(
        evolve_perturbative(h0, [](double) { return Mat6::Zero(); }, 4, 1.0,
                            0.0),
        std::invalid_argument);
  }
}

TEST_CASE("evolution matrices compose and stay symplectic") {
  const Mat3 gamma = Vec3(0.9, -0.4, 0.2).asDiagonal();
  const double m = 2.1;
  const Mat6 t10 = evolve_constant(gamma, m, 0.4).T;
  const Mat6 t21 = evolve_constant(gamma, m, 0.9).T;
  const Mat6 t20 = evolve_constant(gamma, m, 1.3).T;
  CHECK((t21 * t10 - t20).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(is_symplectic(t10, 1e-10));
  CHECK(is_symplectic(t20, 1e-10));
}

TEST_CASE("particular_drift") {
  const double m = 1.9;
  const Vec3 g(0.0, 0.0, -9.81);
  Vec6 g_vec = Vec6::Zero();
  g_vec.head<3>() = -m * g;
  const CoefficientFunc g_func = [g_vec](double) { return g_vec; };

  SUBCASE("zero inhomogeneity gives a zero drift") {
    const ConstantGradientPropagator prop(Mat3::Zero(), m);
    const PhaseVector drift = particular_drift(
        prop, [](double) { return Vec6::Zero(); }, 1.0, 0.0);
    CHECK(drift.norm() == 0.0);
  }
  SUBCASE("free fall: x = g dt^2 / 2, p = m g dt") {
    const double dt = 0.7;
    const ConstantGradientPropagator prop(Mat3::Zero(), m);
    const PhaseVector drift = particular_drift(prop, g_func, dt, 0.0);
    CHECK((drift.x - 0.5 * g * dt * dt).norm() < 1e-14 * drift.x.norm());
    CHECK((drift.p - m * g * dt).norm() < 1e-14 * drift.p.norm());
  }
  SUBCASE("atomic-mass free fall") {
    // The inverse inside the quadrature must tolerate the 1/m entry scale.
    const double m_rb = 1.4431608951791763e-25;
    Vec6 gv = Vec6::Zero();
    gv.head<3>() = -m_rb * g;
    const ConstantGradientPropagator prop(Mat3::Zero(), m_rb);
    const double dt = 0.2;
    const PhaseVector drift =
        particular_drift(prop, [gv](double) { return gv; }, dt, 0.0);
    CHECK((drift.x - 0.5 * g * dt * dt).norm() < 1e-12 * drift.x.norm());
    CHECK((drift.p - m_rb * g * dt).norm() < 1e-12 * drift.p.norm());
  }
  SUBCASE("constant gradient vs inhomogeneous RK4") {
    const Mat3 gamma = Vec3(0.6, 0.6, -1.2).asDiagonal();
    const Mat6 h = gradient_hamiltonian(gamma, m);
    const ConstantGradientPropagator prop(gamma, m);
    const double dt = 1.0;
    const PhaseVector drift = particular_drift(prop, g_func, dt, 0.0, 12, 16);
    const PhaseVector rk4 =
        ode_trajectory([&](double) { return h; }, g_func, PhaseVector::zero(),
                       dt, 0.0, 1e-4);
    CHECK((drift.x - rk4.x).norm() < 1e-8 * rk4.x.norm());
    CHECK((drift.p - rk4.p).norm() < 1e-8 * rk4.p.norm());
  }
}

TEST_CASE("general_solution") {
  const double m = 1.1;
  SUBCASE("zero initial state with no drift stays at zero") {
    const Mat6 t = evolve_constant(Mat3::Zero(), m, 1.0).T;
    CHECK(general_solution(t, PhaseVector::zero(), PhaseVector::zero())
              .norm() == 0.0);
  }
  SUBCASE("free particle moves as x0 + p0 t / m") {
    const double dt = 0.9;
    const Mat6 t = evolve_constant(Mat3::Zero(), m, dt).T;
    const PhaseVector xi0{{1.0, -2.0, 0.5}, {0.3, 0.1, -0.7}};
    const PhaseVector out = general_solution(t, PhaseVector::zero(), xi0);
    CHECK((out.x - (xi0.x + xi0.p * dt / m)).norm() < 1e-14);
    CHECK((out.p - xi0.p).norm() == 0.0);
  }
  SUBCASE("harmonic oscillation follows the closed trajectory") {
    const double gamma = 1.7, dt = 1.2, w = std::sqrt(gamma);
    const Mat6 t = evolve_constant(Mat3(gamma * Mat3::Identity()), m, dt).T;
    const PhaseVector xi0{{0.4, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    const PhaseVector out = general_solution(t, PhaseVector::zero(), xi0);
    CHECK(out.x[0] == doctest::Approx(0.4 * std::cos(w * dt)).epsilon(1e-10));
    CHECK(out.p[0] ==
          doctest::Approx(-0.4 * m * w * std::sin(w * dt)).epsilon(1e-10));
  }
}
