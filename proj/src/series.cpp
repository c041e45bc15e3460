#include "atomif/series.hpp"

#include "atomif/rotations.hpp"

namespace atomif {

// The evaluators below follow the printed expansions line by line. Matrix
// products of the gradient and the rotation generators never get reordered.

double delta_phi_mz_series(const ExpansionParams& p) {
  const Vec3& k0 = p.k0;
  const Vec3 w1 = p.omega.cross(k0);             // Omega x k0
  const Vec3 w2 = p.omega.cross(p.omega.cross(k0));
  const Mat3& gamma = p.gamma0;
  const double T = p.T;
  const double T2 = T * T;
  const Vec3 recoil = (kHbar / (2.0 * p.mass)) * k0 + p.p0 / p.mass;

  double phi = p.laser_phase;
  phi += Vec3(k0 + 3.0 * w1 * T + 3.5 * w2 * T2).dot(p.g) * T2;
  phi -= Vec3(7.0 * k0 + 15.0 * w1 * T + 15.5 * w2 * T2)
             .dot((gamma / 12.0) * p.g) * T2 * T2;
  phi += Vec3(31.0 * k0 + 63.0 * w1 * T + 63.5 * w2 * T2)
             .dot((gamma * gamma / 360.0) * p.g) * T2 * T2 * T2;

  phi += p.x0.dot(
      w2 * T2
      - gamma * Vec3(k0 + 3.0 * w1 * T + 3.5 * w2 * T2) * T2
      + (gamma * gamma / 12.0) *
            Vec3(7.0 * k0 + 15.0 * w1 * T + 15.5 * w2 * T2) * T2 * T2);

  phi += recoil.dot(
      2.0 * Vec3(w1 * T + 1.5 * w2 * T2) * T
      - (gamma / 3.0) * Vec3(3.0 * k0 + 7.0 * w1 * T + 7.5 * w2 * T2) * T2 * T
      + (2.0 * gamma * gamma / 120.0) *
            Vec3(15.0 * k0 + 31.0 * w1 * T + 31.5 * w2 * T2) * T2 * T2 * T);
  return phi;
}

double delta_phi_butterfly_series(const ExpansionParams& p) {
  const Vec3& k0 = p.k0;
  const Vec3 w1 = p.omega.cross(k0);
  const Vec3 w2 = p.omega.cross(p.omega.cross(k0));
  const Mat3& gamma = p.gamma0;
  const double T = p.T;
  const double T2 = T * T;
  const Vec3 recoil = (kHbar / (2.0 * p.mass)) * k0 + p.p0 / p.mass;

  double phi = p.laser_phase;
  phi -= Vec3(6.0 * w1 * T + 24.0 * w2 * T2).dot(p.g) * T2;
  phi += Vec3(4.0 * k0 + 22.5 * w1 * T + 55.0 * w2 * T2)
             .dot(gamma * p.g) * T2 * T2;
  phi -= Vec3((11.0 / 3.0) * k0 + (1001.0 / 60.0) * w1 * T +
              (182.0 / 5.0) * w2 * T2)
             .dot(gamma * gamma * p.g) * T2 * T2 * T2;

  phi += p.x0.dot(
      gamma * Vec3(6.0 * w1 * T + 24.0 * w2 * T2) * T2
      - gamma * gamma * Vec3(4.0 * k0 + 22.5 * w1 * T + 55.0 * w2 * T2) *
            T2 * T2);

  phi -= recoil.dot(
      6.0 * w2 * T2 * T
      - gamma * Vec3(2.0 * k0 + 16.0 * w1 * T + 45.0 * w2 * T2) * T2 * T
      + gamma * gamma *
            Vec3(4.5 * k0 + 22.0 * w1 * T + (1001.0 / 20.0) * w2 * T2) *
            T2 * T2 * T);
  return phi;
}

double phi_mz_noninertial_series(const ExpansionParams& p) {
  const Vec3& k0 = p.k0;
  const Mat3 G = p.gamma0;                 // Gamma_0
  const Mat3 K = generator(p.omega_k);     // Omega_k
  const Mat3 A = generator(p.omega_g);     // Omega_g
  const Mat3 B = generator(p.omega_gamma); // Omega_Gamma
  const Mat3 I = Mat3::Identity();
  const double T = p.T;
  const double T2 = T * T;
  const double T3 = T2 * T;
  const double T4 = T2 * T2;
  const double T5 = T4 * T;
  const Vec3 recoil = (kHbar / (2.0 * p.mass)) * k0 + p.p0 / p.mass;

  // g'_0 block.
  Mat3 bracket_g = -I;
  bracket_g += (3.0 * K - A) * T;
  bracket_g += (7.0 / 12.0) *
               (G + 4.0 * K * A - A * A - 6.0 * K * K) * T2;
  bracket_g += 0.25 *
               (3.0 * B * G - 3.0 * G * B + G * A + 5.0 * K * A * A -
                10.0 * K * K * A - A * A * A - 5.0 * K * G + 10.0 * K * K * K) *
               T3;
  bracket_g -= (31.0 / 360.0) *
               (12.0 * B * G * B - 6.0 * G * B * B - 6.0 * B * B * G + G * G -
                G * A * A + 4.0 * G * B * A - 4.0 * B * G * A +
                6.0 * K * G * A - 6.0 * K * A * A * A +
                15.0 * K * K * A * A - 20.0 * K * K * K * A +
                A * A * A * A - 15.0 * K * K * G - 18.0 * K * G * B +
                18.0 * K * B * G + 15.0 * K * K * K * K) *
               T4;
  bracket_g += (1.0 / 40.0) *
               (26.0 * G * B * G - 10.0 * G * B * B * B - 9.0 * G * G * B -
                17.0 * B * G * G + 10.0 * B * B * B * G +
                30.0 * B * G * B * B - 30.0 * B * B * G * B + G * A * A * A -
                G * G * A - 5.0 * G * B * A * A + 10.0 * G * B * B * A +
                5.0 * B * G * A * A + 10.0 * B * B * G * A -
                20.0 * B * G * B * A - 7.0 * K * G * A * A +
                21.0 * K * K * G * A + 28.0 * K * G * B * A -
                28.0 * K * B * G * A + 7.0 * K * A * A * A * A -
                21.0 * K * K * A * A * A + 35.0 * K * K * K * A * A -
                35.0 * K * K * K * K * A - A * A * A * A * A + 7.0 * K * G * G -
                35.0 * K * K * K * G - 42.0 * K * G * B * B -
                42.0 * K * B * B * G - 63.0 * K * K * G * B +
                63.0 * K * K * B * G + 84.0 * K * B * G * B +
                21.0 * K * K * K * K * K) *
               T5;

  double phi = p.laser_phase - k0.dot(bracket_g * p.g) * T2;

  // <x_0> block.
  Mat3 bracket_x = (K * K - G) * T2;
  bracket_x += (G * B - B * G + 3.0 * K * G - K * K * K) * T3;
  bracket_x += (7.0 / 12.0) *
               (2.0 * B * G * B - G * B * B - B * B * G + G * G -
                6.0 * K * K * G - 4.0 * K * G * B + 4.0 * K * B * G +
                K * K * K * K) *
               T4;
  bracket_x += 0.25 *
               (G * B * B * B - G * G * B + 3.0 * B * G * G - B * B * B * G -
                2.0 * G * B * G - 3.0 * B * G * B * B + 3.0 * B * B * G * B -
                5.0 * K * G * G + 10.0 * K * K * K * G + 5.0 * K * G * B * B +
                5.0 * K * B * B * G + 10.0 * K * K * G * B -
                10.0 * K * K * B * G - 10.0 * K * B * G * B -
                K * K * K * K * K) *
               T5;
  phi += k0.dot(bracket_x * p.x0);

  // Recoil / initial-momentum block.
  Mat3 bracket_p = -2.0 * K * T;
  bracket_p += (3.0 * K * K - G) * T2;
  bracket_p += (7.0 / 6.0) * (G * B - B * G + 2.0 * K * G - 2.0 * K * K * K) *
               T3;
  bracket_p += 0.25 *
               (6.0 * B * G * B + G * G - 3.0 * G * B * B - 3.0 * B * B * G -
                10.0 * K * K * G - 10.0 * K * G * B + 10.0 * K * B * G +
                5.0 * K * K * K * K) *
               T4;
  bracket_p -= (31.0 / 180.0) *
               (G * B * G - 2.0 * G * B * B * B + G * G * B - 2.0 * B * G * G +
                2.0 * B * B * B * G + 6.0 * B * G * B * B -
                6.0 * B * B * G * B + 3.0 * K * G * G - 10.0 * K * K * K * G -
                9.0 * K * G * B * B - 9.0 * K * B * B * G -
                15.0 * K * K * G * B + 15.0 * K * K * B * G +
                18.0 * K * B * G * B + 3.0 * K * K * K * K * K) *
               T5;
  phi += k0.dot(bracket_p * recoil) * T;
  return phi;
}

double phi_atomic_fountain_series(const ExpansionParams& p) {
  const Vec3& k0 = p.k0;
  const Mat3 G = p.gamma0;
  const Mat3 W = generator(p.omega);
  const Mat3 I = Mat3::Identity();
  const double T = p.T;
  const double T2 = T * T;
  const double T3 = T2 * T;
  const double T4 = T2 * T2;
  const double T5 = T4 * T;
  const Vec3 recoil = (kHbar / (2.0 * p.mass)) * k0 + p.p0 / p.mass;

  Mat3 bracket_g = -I + 2.0 * W * T;
  bracket_g += (7.0 / 12.0) * (G - 3.0 * W * W) * T2;
  bracket_g += 0.5 * (2.0 * W * W * W - W * G - G * W) * T3;
  bracket_g += (31.0 / 360.0) *
               (3.0 * W * W * G + 3.0 * G * W * W + 4.0 * W * G * W - G * G -
                5.0 * W * W * W * W) *
               T4;
  bracket_g += (1.0 / 20.0) *
               (3.0 * W * W * W * W * W - 2.0 * W * W * W * G -
                2.0 * G * W * W * W - 3.0 * W * G * W * W -
                3.0 * W * W * G * W - 5.0 * W * G * G - 5.0 * G * G * W +
                13.0 * G * W * G) *
               T5;
  double phi = p.laser_phase - k0.dot(bracket_g * p.g) * T2;

  Mat3 bracket_x = (W * W - G) * T2;
  bracket_x += (2.0 * W * G + G * W - W * W * W) * T3;
  bracket_x += (7.0 / 12.0) *
               (W * W * W * W - 3.0 * W * W * G - G * W * W - 2.0 * W * G * W +
                G * G) *
               T4;
  bracket_x += 0.25 *
               (4.0 * W * W * W * G + G * W * W * W + 2.0 * W * G * W * W +
                3.0 * W * W * G * W - 2.0 * W * G * G - G * G * W -
                2.0 * G * W * G - W * W * W * W * W) *
               T5;
  phi += k0.dot(bracket_x * p.x0);

  Mat3 bracket_p = -2.0 * W * T + (3.0 * W * W - G) * T2;
  bracket_p += (7.0 / 6.0) * (W * G + G * W - 2.0 * W * W * W) * T3;
  bracket_p += 0.25 *
               (5.0 * W * W * W * W - 3.0 * W * W * G - 4.0 * W * G * W +
                G * G - 3.0 * G * W * W) *
               T4;
  bracket_p -= (31.0 / 180.0) *
               (3.0 * W * W * W * W * W + G * W * G + G * G * W + W * G * G -
                2.0 * G * W * W * W - 2.0 * W * W * W * G -
                3.0 * W * W * G * W - 3.0 * W * G * W * W) *
               T5;
  phi += k0.dot(bracket_p * recoil) * T;
  return phi;
}

}  // namespace atomif
