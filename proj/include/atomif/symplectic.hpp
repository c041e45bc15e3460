#pragma once

#include "atomif/types.hpp"

namespace atomif {

// The symplectic form J = [[0, I3], [-I3, 0]].
// J^T = -J = J^{-1} and J J = -I6.
const Mat6& symplectic_form();

// True iff ||M^T J M - J||_max <= tol. Non-finite entries fail the test.
bool is_symplectic(const Mat6& m, double tol = 1e-10);

// Inverse of a symplectic matrix, S^{-1} = J S^T J^T.
// Throws std::invalid_argument when S fails is_symplectic at check_tol.
Mat6 symplectic_inverse(const Mat6& s, double check_tol = 1e-6);

// Bilinear form a^T M b on phase-space vectors.
double symplectic_sandwich(const PhaseVector& a, const Mat6& m,
                           const PhaseVector& b);

}  // namespace atomif
