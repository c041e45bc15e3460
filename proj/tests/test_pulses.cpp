#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "atomif/pulses.hpp"
#include "atomif/rotations.hpp"

using namespace atomif;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMass = 1.4431608951791763e-25;

CoefficientFunc uniform_g(const Vec3& g, double mass) {
  Vec6 v = Vec6::Zero();
  v.head<3>() = -mass * g;
  return [v](double) { return v; };
}

// Pulse effects for a constant-coefficient sequence with optional laser
// rotation.
std::vector<PulseEffect> make_effects(const std::vector<double>& times,
                                      const Vec3& k0, const Vec3& g,
                                      const Mat3& gamma, const Vec3& omega,
                                      const std::vector<double>& phases) {
  const ConstantGradientPropagator prop(gamma, kMass);
  const CoefficientFunc g_func = uniform_g(g, kMass);
  std::vector<PulseEffect> effects;
  for (size_t i = 0; i < times.size(); ++i) {
    const Vec3 k = rotate_wave_vector(k0, omega, times[i]);
    const double phase = i < phases.size() ? phases[i] : 0.0;
    effects.push_back(
        pulse_effect(times[i], k, phase, prop, g_func, 0.0, 12, 16));
  }
  return effects;
}

double wrap_phase(double x) {
  return std::remainder(x, 2.0 * kPi);
}

}  // namespace

TEST_CASE("pulse_effect") {
  const Vec3 k(0.0, 0.0, 1.61e7);
  SUBCASE("free drift: chi = (-hbar k dt/m, hbar k), Phi = laser phase") {
    const double dt = 0.25, phase = 0.37;
    const ConstantGradientPropagator prop(Mat3::Zero(), kMass);
    const PulseEffect eff = pulse_effect(
        dt, k, phase, prop, uniform_g(Vec3::Zero(), kMass), 0.0);
    CHECK((eff.chi.x + (kHbar * dt / kMass) * k).norm() < 1e-15 * eff.chi.x.norm());
    CHECK((eff.chi.p - kHbar * k).norm() == 0.0);
    CHECK(eff.phi == doctest::Approx(phase).epsilon(1e-15));
  }
  SUBCASE("constant gradient rotates the displacement in phase space") {
    const double gamma = 2.5e-2, dt = 0.8, w = std::sqrt(gamma);
    const ConstantGradientPropagator prop(Mat3(gamma * Mat3::Identity()),
                                          kMass);
    const PulseEffect eff =
        pulse_effect(dt, k, 0.0, prop, uniform_g(Vec3::Zero(), kMass), 0.0);
    const Vec3 expected_x = -(std::sin(w * dt) / (kMass * w)) * (kHbar * k);
    const Vec3 expected_p = std::cos(w * dt) * (kHbar * k);
    CHECK((eff.chi.x - expected_x).norm() < 1e-13 * expected_x.norm());
    CHECK((eff.chi.p - expected_p).norm() < 1e-13 * expected_p.norm());
  }
  SUBCASE("generalized phase: closed gradient form and its free limit") {
    const Vec3 g(0.0, 0.0, -9.81);
    const double dt = 0.3, phase = 0.11;
    const double gamma = 3.2e-2;
    const ConstantGradientPropagator prop(Mat3(gamma * Mat3::Identity()),
                                          kMass);
    const PulseEffect eff =
        pulse_effect(dt, k, phase, prop, uniform_g(g, kMass), 0.0, 12, 16);
    const double expected =
        phase - g.dot(k) * (std::cos(std::sqrt(gamma) * dt) - 1.0) / gamma;
    CHECK(eff.phi == doctest::Approx(expected).epsilon(1e-12));

    const ConstantGradientPropagator free_prop(Mat3::Zero(), kMass);
    const PulseEffect free_eff =
        pulse_effect(dt, k, phase, free_prop, uniform_g(g, kMass), 0.0);
    CHECK(free_eff.phi ==
          doctest::Approx(phase + 0.5 * k.dot(g) * dt * dt).epsilon(1e-13));
  }
}

TEST_CASE("compose_displacements") {
  SUBCASE("composing with zero adds nothing") {
    const PhaseVector chi{{1e-6, 0, 0}, {0, 2e-27, 0}};
    const auto [sum, phase] = compose_displacements(chi, PhaseVector::zero());
    CHECK((sum - chi).norm() == 0.0);
    CHECK(phase == 0.0);
  }
  SUBCASE("momentum kick after position offset picks up k.d/2") {
    const Vec3 k(3.1e6, -1.2e6, 0.5e6);
    const Vec3 d(2e-6, 1e-6, -3e-6);
    const PhaseVector chi1 = kick_vector(k);
    const PhaseVector chi0{d, Vec3::Zero()};
    const auto [sum, phase] = compose_displacements(chi1, chi0);
    CHECK((sum - (chi1 + chi0)).norm() == 0.0);
    // chi0^T J chi1 = hbar k.d, so the phase is +k.d/2.
    CHECK(phase == doctest::Approx(0.5 * k.dot(d)).epsilon(1e-14));
  }
  SUBCASE("parallel displacements commute") {
    const PhaseVector chi{{1e-6, -2e-6, 0}, {1e-27, 0, 2e-27}};
    const auto [sum, phase] = compose_displacements(chi, 0.7 * chi);
    CHECK(phase == 0.0);
    CHECK((sum - 1.7 * chi).norm() < 1e-21);
  }
}

TEST_CASE("sandwich rule") {
  // Magnitudes chosen so the bilinear phases stay below a radian; the
  // cancellation check then resolves 1e-15 absolute.
  const PhaseVector mid{{2e-7, 0, 1e-7}, {0, 3e-28, 0}};
  const PhaseVector outer{{-1e-7, 1e-7, 0}, {2e-28, 0, -1e-28}};
  SUBCASE("zero outer leaves the middle") {
    CHECK((sandwich(mid, PhaseVector::zero()) - mid).norm() == 0.0);
  }
  SUBCASE("equal arguments flip the sign") {
    CHECK((sandwich(outer, outer) + outer).norm() == 0.0);
  }
  SUBCASE("bilinear phases cancel through the double composition") {
    // D(-o) D(m) D(-o): compose right-to-left and track the phases.
    const auto [inner_sum, inner_phase] = compose_displacements(mid, -outer);
    const auto [total_sum, outer_phase] =
        compose_displacements(-outer, inner_sum);
    CHECK((total_sum - sandwich(mid, outer)).norm() < 1e-21);
    CHECK(std::abs(inner_phase + outer_phase) < 1e-15);
  }
}

TEST_CASE("vertex_coefficients") {
  CHECK(vertex_coefficients(3) == std::vector<int>{1, -2, 1});
  CHECK(vertex_coefficients(4) == std::vector<int>{1, -2, 2, -1});
  CHECK(vertex_coefficients(5) == std::vector<int>{1, -2, 2, -2, 1});
  CHECK(vertex_coefficients(2) == std::vector<int>{1, -1});
  CHECK_THROWS_AS(vertex_coefficients(1), std::invalid_argument);
}

TEST_CASE("geometry_summary: Mach-Zehnder") {
  const Vec3 k(0.0, 0.0, -1.61e7);
  const Vec3 g(0.0, 0.0, -9.81);
  const double T = 0.1;

  SUBCASE("closed symmetric geometry") {
    const auto effects = make_effects({0.0, T, 2.0 * T}, k, g, Mat3::Zero(),
                                      Vec3::Zero(), {0.2, -0.1, 0.4});
    const GeometrySummary s = geometry_summary(effects);
    CHECK(s.chi_I.norm() < 1e-12 * s.chi_0.norm());
    const double phi_laser = 0.2 - 2.0 * (-0.1) + 0.4;
    CHECK(s.phi_I ==
          doctest::Approx(phi_laser + k.dot(g) * T * T).epsilon(1e-12));
    CHECK(std::abs(s.bch_phase) < 1e-9);
  }
  SUBCASE("time asymmetry opens the interferometer in position only") {
    const double T1 = 0.1, T2 = 0.13;
    const auto effects = make_effects({0.0, T1, T1 + T2}, k, g, Mat3::Zero(),
                                      Vec3::Zero(), {});
    const GeometrySummary s = geometry_summary(effects);
    const Vec3 expected_x = (kHbar / kMass) * k * (T1 - T2);
    CHECK((s.chi_I.x - expected_x).norm() < 1e-12 * expected_x.norm());
    CHECK(s.chi_I.p.norm() < 1e-12 * (kHbar * k.norm()));
  }
  SUBCASE("gradient opens both components at first order") {
    const double gamma = 1e-6;
    auto chi_of = [&](double sign) {
      const auto effects =
          make_effects({0.0, T, 2.0 * T}, k, g,
                       Mat3(sign * gamma * Mat3::Identity()), Vec3::Zero(), {});
      return geometry_summary(effects).chi_I;
    };
    const PhaseVector hi = chi_of(1.0), lo = chi_of(-1.0);
    const Vec3 dx = (hi.x - lo.x) / (2.0 * gamma);
    const Vec3 dp = (hi.p - lo.p) / (2.0 * gamma);
    const Vec3 expected_dx = (kHbar / kMass) * k * T * T * T;
    const Vec3 expected_dp = -kHbar * k * T * T;
    CHECK((dx - expected_dx).norm() < 1e-6 * expected_dx.norm());
    CHECK((dp - expected_dp).norm() < 1e-6 * expected_dp.norm());
  }
}

TEST_CASE("geometry_summary: Butterfly") {
  const Vec3 k(0.0, 0.0, -1.61e7);
  const Vec3 g(0.3, -0.2, -9.81);
  const double T = 0.1;
  const std::vector<double> times{0.0, T, 3.0 * T, 4.0 * T};

  SUBCASE("gradient displacement carries hbar") {
    // First-order coefficient of chi_x in the gradient: -2 hbar k T^3 / m
    // (dimensional analysis requires the hbar).
    const double gamma = 1e-6;
    auto chi_of = [&](double sign) {
      const auto effects =
          make_effects(times, k, Vec3::Zero(),
                       Mat3(sign * gamma * Mat3::Identity()), Vec3::Zero(), {});
      return geometry_summary(effects).chi_I;
    };
    const PhaseVector hi = chi_of(1.0), lo = chi_of(-1.0);
    const Vec3 dx = (hi.x - lo.x) / (2.0 * gamma);
    const Vec3 dp = (hi.p - lo.p) / (2.0 * gamma);
    const Vec3 expected_dx = -2.0 * (kHbar / kMass) * k * T * T * T;
    CHECK((dx - expected_dx).norm() < 1e-6 * expected_dx.norm());
    CHECK(dp.norm() < 1e-6 * (kHbar * k.norm() * T * T));
  }
  SUBCASE("gradient phase slope is +4 k^T Gamma g T^4") {
    const double gamma = 1e-6;
    auto phi_of = [&](double sign) {
      const auto effects = make_effects(
          times, k, g, Mat3(sign * gamma * Mat3::Identity()), Vec3::Zero(), {});
      return geometry_summary(effects).phi_I;
    };
    const double slope = (phi_of(1.0) - phi_of(-1.0)) / (2.0 * gamma);
    const double expected = 4.0 * k.dot(g) * T * T * T * T;
    CHECK(slope == doctest::Approx(expected).epsilon(1e-6));
  }
  SUBCASE("acceleration drops out at zeroth order") {
    const auto effects =
        make_effects(times, k, g, Mat3::Zero(), Vec3::Zero(), {});
    const GeometrySummary s = geometry_summary(effects);
    CHECK(std::abs(s.phi_I) < 1e-12 * std::abs(k.dot(g) * T * T));
    CHECK(s.chi_I.norm() < 1e-12 * s.chi_0.norm());
  }
}

TEST_CASE("compose_beam_splitters") {
  const Vec3 k(0.0, 0.0, 1.61e7);
  const Vec3 g(0.0, 0.0, -9.81);

  SUBCASE("single pi/2 pulse splits the ground state") {
    PulseEffect eff;
    eff.chi = kick_vector(k);
    eff.phi = 0.63;
    const OperatorMatrix m =
        compose_beam_splitters({PulseOperator::symmetric(kPi / 2, eff)});
    REQUIRE(m[0][0].terms().size() == 1);
    REQUIRE(m[1][0].terms().size() == 1);
    CHECK(m[0][0].terms()[0].amplitude.real() ==
          doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(m[0][0].terms()[0].displacement.norm() == 0.0);
    const std::complex<double> expected =
        std::complex<double>(0.0, -1.0) / std::sqrt(2.0) *
        std::exp(std::complex<double>(0.0, eff.phi));
    CHECK(std::abs(m[1][0].terms()[0].amplitude - expected) < 1e-15);
    CHECK((m[1][0].terms()[0].displacement - eff.chi).norm() == 0.0);
  }

  SUBCASE("pi pulse inverts the populations") {
    PulseEffect eff;
    eff.chi = kick_vector(k);
    eff.phi = -0.2;
    const OperatorMatrix m =
        compose_beam_splitters({PulseOperator::symmetric(kPi, eff)});
    CHECK(m[0][0].empty());
    CHECK(m[1][1].empty());
    REQUIRE(m[1][0].terms().size() == 1);
    CHECK(std::abs(std::abs(m[1][0].terms()[0].amplitude) - 1.0) < 1e-15);
  }

  SUBCASE("Mach-Zehnder ground-state entry matches the vertex rule") {
    // The identity is exact operator algebra; a small wave vector and
    // micro-g acceleration keep every phase (including the recoil-scale
    // bilinear terms) at O(1) rad so the 1e-12 comparison is meaningful.
    const double T = 0.1, gamma = 2e-4;
    const Vec3 k_small(0.0, 0.0, 1e5);
    const Vec3 g_small(3e-4, -2e-4, -9.81e-4);
    const std::vector<double> times{0.0, T, 2.0 * T};
    const auto effects =
        make_effects(times, k_small, g_small, Mat3(gamma * Mat3::Identity()),
                     Vec3(0.0, 1e-3, 0.0), {0.1, 0.7, -0.4});
    const GeometrySummary s = geometry_summary(effects);

    std::vector<PulseOperator> ops;
    for (size_t i = 0; i < effects.size(); ++i) {
      const bool edge = (i == 0 || i + 1 == effects.size());
      ops.push_back(PulseOperator::symmetric(edge ? kPi / 2 : kPi, effects[i]));
    }
    const OperatorMatrix m = compose_beam_splitters(ops);
    REQUIRE(m[0][0].terms().size() == 2);

    // Identify upper (chi0 - chi1) and lower (chi1 - chi2) path terms.
    const PhaseVector d_up_expected = effects[0].chi - effects[1].chi;
    DisplacementTerm up = m[0][0].terms()[0];
    DisplacementTerm low = m[0][0].terms()[1];
    if ((up.displacement - d_up_expected).norm() >
        (low.displacement - d_up_expected).norm()) {
      std::swap(up, low);
    }
    CHECK(std::abs(std::abs(up.amplitude) - 0.5) < 1e-14);
    CHECK(std::abs(std::abs(low.amplitude) - 0.5) < 1e-14);

    // Relative displacement equals chi_I, compared blockwise (position and
    // momentum carry different units).
    const PhaseVector rel = up.displacement - low.displacement;
    const double x_scale = effects[0].chi.x.norm() + effects[1].chi.x.norm();
    const double p_scale = effects[0].chi.p.norm();
    CHECK((rel.x - s.chi_I.x).norm() < 1e-12 * x_scale);
    CHECK((rel.p - s.chi_I.p).norm() < 1e-12 * p_scale);

    // Relative operator phase equals Phi_I plus the BCH correction. The
    // operator quotient D(-d_low) D(d_up) contributes its own composition
    // phase on top of the amplitude ratio.
    const double quotient_phase =
        std::arg(up.amplitude * std::conj(low.amplitude)) -
        symplectic_sandwich(up.displacement, symplectic_form(),
                            low.displacement) /
            (2.0 * kHbar);
    CHECK(std::abs(wrap_phase(quotient_phase - (s.phi_I + s.bch_phase))) <
          1e-12);
  }

  SUBCASE("Butterfly ground-state entry matches the vertex rule") {
    const double T = 0.08, gamma = 3e-4;
    const std::vector<double> times{0.0, T, 3.0 * T, 4.0 * T};
    const Vec3 k_small(0.0, 0.0, 1e5);
    const Vec3 g_small(3e-4, -2e-4, -9.81e-4);
    const auto effects =
        make_effects(times, k_small, g_small, Mat3(gamma * Mat3::Identity()),
                     Vec3(1e-3, 0.0, 0.0), {0.3, -0.2, 0.5, 0.1});
    const GeometrySummary s = geometry_summary(effects);

    std::vector<PulseOperator> ops;
    for (size_t i = 0; i < effects.size(); ++i) {
      const bool edge = (i == 0 || i + 1 == effects.size());
      ops.push_back(PulseOperator::symmetric(edge ? kPi / 2 : kPi, effects[i]));
    }
    const OperatorMatrix m = compose_beam_splitters(ops);
    REQUIRE(m[0][0].terms().size() == 2);

    // Upper path crosses all four vertices: displacement
    // chi0 - chi1 + chi2 - chi3.
    const PhaseVector d_up_expected = effects[0].chi - effects[1].chi +
                                      effects[2].chi - effects[3].chi;
    DisplacementTerm up = m[0][0].terms()[0];
    DisplacementTerm low = m[0][0].terms()[1];
    if ((up.displacement - d_up_expected).norm() >
        (low.displacement - d_up_expected).norm()) {
      std::swap(up, low);
    }
    const PhaseVector rel = up.displacement - low.displacement;
    const double x_scale = effects[0].chi.x.norm() + effects[1].chi.x.norm() +
                           effects[2].chi.x.norm() + effects[3].chi.x.norm();
    const double p_scale = effects[0].chi.p.norm();
    CHECK((rel.x - s.chi_I.x).norm() < 1e-12 * x_scale);
    CHECK((rel.p - s.chi_I.p).norm() < 1e-12 * p_scale);

    // With two pi-pulses the paths differ by two extra vertices, so the
    // relative operator is -1 times the generalized displacement operator.
    const double quotient_phase =
        std::arg(up.amplitude * std::conj(low.amplitude)) -
        symplectic_sandwich(up.displacement, symplectic_form(),
                            low.displacement) /
            (2.0 * kHbar);
    CHECK(std::abs(wrap_phase(quotient_phase - (s.phi_I + s.bch_phase + kPi))) <
          1e-12);
  }

  SUBCASE("asymmetric kicks route through the matching entries") {
    PulseEffect plus;
    plus.chi = kick_vector(Vec3(0, 0, 1.2e7));
    plus.phi = 0.4;
    PulseEffect minus;
    minus.chi = kick_vector(Vec3(0, 0, 0.9e7));
    minus.phi = -0.1;
    const OperatorMatrix m = compose_beam_splitters({{kPi / 2, plus, minus}});
    REQUIRE(m[1][0].terms().size() == 1);
    REQUIRE(m[0][1].terms().size() == 1);
    CHECK((m[1][0].terms()[0].displacement - plus.chi).norm() == 0.0);
    CHECK((m[0][1].terms()[0].displacement + minus.chi).norm() == 0.0);
    CHECK(std::arg(m[0][1].terms()[0].amplitude) ==
          doctest::Approx(-kPi / 2 - minus.phi).epsilon(1e-12));
  }

  SUBCASE("impure areas keep the term count within 2^(n-1)") {
    const double T = 0.05;
    const std::vector<double> times{0.0, T, 2.0 * T, 3.0 * T};
    const auto effects =
        make_effects(times, k, g, Mat3::Zero(), Vec3::Zero(), {});
    std::vector<PulseOperator> ops;
    for (const PulseEffect& eff : effects) {
      ops.push_back(PulseOperator::symmetric(kPi / 2 + 0.1, eff));
    }
    const OperatorMatrix m = compose_beam_splitters(ops);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        CHECK(m[i][j].terms().size() <= 8);
      }
    }
  }
}
