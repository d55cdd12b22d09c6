#pragma once
#include <array>
#include <functional>
#include <vector>

#include "common.hpp"

namespace fi::quad {

// 21-point Kronrod rule with its embedded 10-point Gauss rule, on [-1, 1]
struct GK21 {
  std::array<double, 21> x{}, wk{}, wg{};
  static const GK21& get();
};

// Gauss-Legendre nodes and weights on [-1, 1]
struct GaussRule {
  std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int n);

struct VecResult {
  std::vector<cd> value;
  double err = 0;
  int intervals = 0;
  long evals = 0;
  bool converged = false;
};

// Vector-valued adaptive Gauss-Kronrod. The integrand fills dim outputs at t.
// Error control is global over all components (max norm), so one subdivision
// serves the whole vector.
using VecIntegrand = std::function<void(double t, cd* out)>;
VecResult adaptive(const VecIntegrand& f, const std::vector<double>& breaks, std::size_t dim,
                   double abs_tol, double rel_tol, int max_intervals = 4000);

}  // namespace fi::quad
