#include "swarmrl/hybrid.hpp"

#include <cmath>

namespace swarmrl {

AttractionRMode attraction_r_mode_from_name(std::string_view name) {
  if (name == "per-dim") return AttractionRMode::kPerDim;
  if (name == "scalar") return AttractionRMode::kScalar;
  throw ConfigError("unknown attraction_r_mode: " + std::string(name));
}

double schedule_weight(std::int64_t x, std::int64_t b, double divisor) {
  if (x < 0) throw NumericError("schedule_weight: x must be nonnegative");
  if (b < 1) throw NumericError("schedule_weight: b must be positive");
  return std::atan(static_cast<double>(x) / (divisor * static_cast<double>(b)));
}

namespace {

void check_finite_inputs(const ParamVector& v, double alpha, double c,
                         const char* where) {
  if (!std::isfinite(alpha) || !std::isfinite(c))
    throw NumericError(std::string(where) + ": non-finite alpha or c");
  for (double x : v.values)
    if (!std::isfinite(x)) throw NumericError(std::string(where) + ": non-finite parameter");
}

void add_attraction(std::vector<double>& out, const std::vector<double>& pre,
                    const std::vector<double>& star, double c, Rng& rng,
                    AttractionRMode mode) {
  if (c == 0.0) return;
  if (mode == AttractionRMode::kScalar) {
    const double r = uniform01(rng);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] += c * r * (star[i] - pre[i]);
  } else {
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] += c * uniform01(rng) * (star[i] - pre[i]);
  }
}

}  // namespace

ParamVector hybrid_step(const ParamVector& theta_old, const ParamGrad& descent_dir,
                        const ParamVector& theta_star, double alpha, double c,
                        Rng& rng, AttractionRMode mode) {
  check_same_layout(theta_old.layout, descent_dir.layout, "hybrid_step");
  check_same_layout(theta_old.layout, theta_star.layout, "hybrid_step");
  check_finite_inputs(theta_old, alpha, c, "hybrid_step");
  for (double g : descent_dir.values)
    if (!std::isfinite(g)) throw NumericError("hybrid_step: non-finite direction");

  ParamVector out = theta_old;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] += alpha * descent_dir.values[i];
  add_attraction(out.values, theta_old.values, theta_star.values, c, rng, mode);
  return out;
}

void hybrid_step_with_optimizer(Network& net, const ParamGrad& loss_grad,
                                const ParamVector* theta_star, Optimizer& opt,
                                double c, Rng& rng, AttractionRMode mode) {
  check_same_layout(net.layout(), loss_grad.layout, "hybrid_step_with_optimizer");
  const std::size_t n = net.param_count();
  if (loss_grad.values.size() != n)
    throw ShapeError("hybrid_step_with_optimizer: gradient size mismatch");
  for (double g : loss_grad.values)
    if (!std::isfinite(g))
      throw NumericError("hybrid_step_with_optimizer: non-finite gradient component");

  const bool attract = theta_star != nullptr && c != 0.0;
  if (attract)
    check_same_layout(net.layout(), theta_star->layout, "hybrid_step_with_optimizer");
  const double scalar_r = attract && mode == AttractionRMode::kScalar
                              ? uniform01(rng)
                              : 0.0;

  // One in-place pass: optimizer increment plus the attraction term measured
  // from the pre-step value of each parameter.
  auto es = opt.begin_step(n);
  const double* g = loss_grad.values.data();
  const double* star = attract ? theta_star->values.data() : nullptr;
  std::size_t idx = 0;
  auto apply_span = [&](double* p, std::size_t len) {
    if (!attract && es.kind == Optimizer::Kind::kAdam) {
      // Plain Adam over a contiguous block, written so it vectorizes.
      double* m = es.m + idx;
      double* v = es.v + idx;
      const double* gp = g + idx;
      for (std::size_t i = 0; i < len; ++i) {
        m[i] = es.beta1 * m[i] + (1.0 - es.beta1) * gp[i];
        v[i] = es.beta2 * v[i] + (1.0 - es.beta2) * gp[i] * gp[i];
        const double mhat = m[i] / es.bc1;
        const double vhat = v[i] / es.bc2;
        p[i] -= es.lr * mhat / (std::sqrt(vhat) + es.eps);
      }
      idx += len;
      return;
    }
    for (std::size_t i = 0; i < len; ++i) {
      const double pre = p[i];
      double next = pre + es.delta(idx, g[idx]);
      if (attract) {
        const double r = mode == AttractionRMode::kScalar ? scalar_r : uniform01(rng);
        next += c * r * (star[idx] - pre);
      }
      p[i] = next;
      ++idx;
    }
  };
  for (auto& layer : net.layers()) {
    apply_span(layer.w.data(), layer.w.size());
    apply_span(layer.b.data(), layer.b.size());
  }
}

}  // namespace swarmrl
