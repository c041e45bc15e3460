#include "atomif/symplectic.hpp"

#include <stdexcept>

namespace atomif {

const Mat6& symplectic_form() {
  static const Mat6 j = [] {
    Mat6 m = Mat6::Zero();
    m.topRightCorner<3, 3>() = Mat3::Identity();
    m.bottomLeftCorner<3, 3>() = -Mat3::Identity();
    return m;
  }();
  return j;
}

bool is_symplectic(const Mat6& m, double tol) {
  if (!m.allFinite()) return false;
  const Mat6& j = symplectic_form();
  const Mat6 residual = m.transpose() * j * m - j;
  return residual.cwiseAbs().maxCoeff() <= tol;
}

Mat6 symplectic_inverse(const Mat6& s, double check_tol) {
  if (!is_symplectic(s, check_tol)) {
    throw std::invalid_argument(
        "symplectic_inverse: matrix is not symplectic within tolerance");
  }
  const Mat6& j = symplectic_form();
  return j * s.transpose() * j.transpose();
}

double symplectic_sandwich(const PhaseVector& a, const Mat6& m,
                           const PhaseVector& b) {
  return a.vec().dot(m * b.vec());
}

}  // namespace atomif
