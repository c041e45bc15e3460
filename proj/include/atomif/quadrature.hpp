#pragma once

#include <vector>

namespace atomif {

// N-point Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes/weights computed once per order via Newton iteration on P_n.
const QuadratureRule& gauss_legendre(int n);

// Composite Gauss-Legendre integral of f over [a, b]; works for a > b
// (the linear map carries the sign). f may return double, Vec3/6 or Mat6.
template <typename F>
auto integrate(F&& f, double a, double b, int panels, int nodes)
    -> decltype(f(a)) {
  const QuadratureRule& rule = gauss_legendre(nodes);
  using Result = decltype(f(a));
  Result sum = Result(f(a) * 0.0);
  const double panel_width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * panel_width;
    const double mid = lo + 0.5 * panel_width;
    const double half = 0.5 * panel_width;
    for (int i = 0; i < nodes; ++i) {
      sum += Result(f(mid + half * rule.nodes[i]) * (half * rule.weights[i]));
    }
  }
  return sum;
}

}  // namespace atomif
