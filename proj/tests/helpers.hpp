#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "swarmrl/nn.hpp"

namespace testhelpers {

// Central finite differences of f over the flat parameters of net.
// Independent of the backward pass it is used to check.
inline std::vector<double> finite_difference_grad(
    swarmrl::Network& net, const std::function<double()>& f, double h = 1e-5) {
  auto params = net.flatten();
  std::vector<double> grad(params.values.size(), 0.0);
  for (std::size_t i = 0; i < params.values.size(); ++i) {
    const double saved = params.values[i];
    params.values[i] = saved + h;
    net.unflatten(params);
    const double fp = f();
    params.values[i] = saved - h;
    net.unflatten(params);
    const double fm = f();
    params.values[i] = saved;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  net.unflatten(params);
  return grad;
}

// Relative-error check with an absolute floor, the tolerance shape used for
// every gradient-exactness assertion in this suite.
inline bool close_rel(double got, double want, double rel = 1e-4,
                      double abs_floor = 1e-7) {
  const double diff = std::fabs(got - want);
  if (diff <= abs_floor) return true;
  return diff <= rel * std::max(std::fabs(got), std::fabs(want));
}

inline double max_grad_mismatch(const std::vector<double>& got,
                                const std::vector<double>& want,
                                double abs_floor = 1e-7) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double diff = std::fabs(got[i] - want[i]);
    if (diff <= abs_floor) continue;
    const double denom = std::max(std::fabs(got[i]), std::fabs(want[i]));
    worst = std::max(worst, diff / denom);
  }
  return worst;
}

}  // namespace testhelpers
