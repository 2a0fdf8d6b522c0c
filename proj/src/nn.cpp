#include "swarmrl/nn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace swarmrl {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
  }
  return "?";
}

Activation activation_from_name(std::string_view name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw ConfigError("unknown activation: " + std::string(name));
}

std::size_t layout_size(const Layout& layout) {
  std::size_t n = 0;
  for (const auto& s : layout) n += static_cast<std::size_t>(s.out) * s.in + s.out;
  return n;
}

std::string layout_to_string(const Layout& layout) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (i) os << " ";
    os << layout[i].in << "x" << layout[i].out << ":" << activation_name(layout[i].act);
  }
  os << "]";
  return os.str();
}

ParamGrad zero_grad(const Layout& layout) {
  return ParamGrad{std::vector<double>(layout_size(layout), 0.0), layout};
}

void check_same_layout(const Layout& a, const Layout& b, const char* where) {
  if (a != b) {
    throw ShapeError(std::string(where) + ": layout mismatch " +
                     layout_to_string(a) + " vs " + layout_to_string(b));
  }
}

namespace {

// Dot product with a fixed reassociation (8 partial sums) so the compiler
// can vectorize it while results stay bit-deterministic.
inline double dot(const double* a, const double* b, int n) {
  double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  int j = 0;
  for (; j + 8 <= n; j += 8)
    for (int k = 0; k < 8; ++k) acc[k] += a[j + k] * b[j + k];
  double tail = 0.0;
  for (; j < n; ++j) tail += a[j] * b[j];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) +
         ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

// Register-blocked dense kernels for the batched passes. BLK accumulators
// stay in vector registers across the whole j loop, so each FMA costs one
// load instead of a read-modify-write of the output row.
template <int BLK>
inline void matvec_block(const double* w, int in, double bias, const double* x,
                         std::size_t stride, double* out) {
  double acc[BLK];
  for (int s = 0; s < BLK; ++s) acc[s] = bias;
  for (int j = 0; j < in; ++j) {
    const double wj = w[j];
    const double* xrow = x + static_cast<std::size_t>(j) * stride;
    for (int s = 0; s < BLK; ++s) acc[s] += wj * xrow[s];
  }
  for (int s = 0; s < BLK; ++s) out[s] = acc[s];
}

// out[j][s-block] = sum_i w[i][j] * d[i][s-block], w column-strided.
template <int BLK>
inline void matvec_t_block(const double* w, int out_dim, int in_dim, int j,
                           const double* d, std::size_t stride, double* out) {
  double acc[BLK];
  for (int s = 0; s < BLK; ++s) acc[s] = 0.0;
  for (int i = 0; i < out_dim; ++i) {
    const double wij = w[static_cast<std::size_t>(i) * in_dim + j];
    const double* drow = d + static_cast<std::size_t>(i) * stride;
    for (int s = 0; s < BLK; ++s) acc[s] += wij * drow[s];
  }
  for (int s = 0; s < BLK; ++s) out[s] = acc[s];
}

// Branch-free tanh accurate to a few ulp (Cephes exp core). libm's scalar
// tanh dominates training cost otherwise; this form vectorizes in the
// activation loops and is deterministic.
inline double fast_tanh(double x) {
  const double y = std::min(2.0 * std::fabs(x), 40.0);
  const double n = std::floor(y * 1.4426950408889634073599 + 0.5);
  double r = y - n * 6.93145751953125e-1;
  r -= n * 1.42860682030941723212e-6;
  const double r2 = r * r;
  double p = 1.26177193074810590878e-4;
  p = p * r2 + 3.02994407707441961300e-2;
  p = p * r2 + 9.99999999999999999910e-1;
  p *= r;
  double q = 3.00198505138664455042e-6;
  q = q * r2 + 2.52448340349684104192e-3;
  q = q * r2 + 2.27265548208155028766e-1;
  q = q * r2 + 2.00000000000000000005e0;
  const double er = 1.0 + 2.0 * p / (q - p);
  const double scale =
      std::bit_cast<double>((static_cast<std::int64_t>(n) + 1023) << 52);
  const double e2a = er * scale;
  const double t = 1.0 - 2.0 / (e2a + 1.0);
  return std::copysign(t, x);
}

inline double apply_act(Activation a, double z) {
  switch (a) {
    case Activation::kIdentity: return z;
    case Activation::kRelu: return z > 0.0 ? z : 0.0;
    case Activation::kTanh: return fast_tanh(z);
  }
  return z;
}

// Derivative expressed through the post-activation value y = act(z).
inline double act_deriv_from_output(Activation a, double y) {
  switch (a) {
    case Activation::kIdentity: return 1.0;
    case Activation::kRelu: return y > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh: return 1.0 - y * y;
  }
  return 1.0;
}

}  // namespace

Network::Network(const std::vector<int>& sizes, const std::vector<Activation>& acts) {
  if (sizes.size() < 2) throw ShapeError("Network: need at least one layer");
  if (acts.size() != sizes.size() - 1)
    throw ShapeError("Network: one activation per layer required");
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    if (sizes[k] <= 0 || sizes[k + 1] <= 0)
      throw ShapeError("Network: layer sizes must be positive");
    DenseLayer layer;
    layer.in = sizes[k];
    layer.out = sizes[k + 1];
    layer.act = acts[k];
    layer.w.assign(static_cast<std::size_t>(layer.out) * layer.in, 0.0);
    layer.b.assign(layer.out, 0.0);
    layers_.push_back(std::move(layer));
    layout_.push_back({sizes[k], sizes[k + 1], acts[k]});
  }
  std::size_t off = 0;
  for (const auto& layer : layers_) {
    offsets_.push_back(off);
    off += layer.w.size() + layer.b.size();
  }
}

Network Network::mlp(int in, const std::vector<int>& hidden, int out,
                     Activation hidden_act, Activation out_act) {
  std::vector<int> sizes;
  sizes.push_back(in);
  for (int h : hidden) sizes.push_back(h);
  sizes.push_back(out);
  std::vector<Activation> acts(hidden.size(), hidden_act);
  acts.push_back(out_act);
  return Network(sizes, acts);
}

int Network::input_size() const { return layers_.empty() ? 0 : layers_.front().in; }
int Network::output_size() const { return layers_.empty() ? 0 : layers_.back().out; }

std::size_t Network::param_count() const { return layout_size(layout_); }

void Network::init_uniform(Rng& rng) {
  for (auto& layer : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    for (auto& w : layer.w) w = uniform_range(rng, -bound, bound);
    for (auto& b : layer.b) b = uniform_range(rng, -bound, bound);
  }
}

std::vector<double> Network::forward(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != input_size())
    throw ShapeError("forward: input size " + std::to_string(input.size()) +
                     " != " + std::to_string(input_size()));
  std::vector<double> cur(input.begin(), input.end());
  std::vector<double> next;
  for (const auto& layer : layers_) {
    next.assign(layer.out, 0.0);
    for (int i = 0; i < layer.out; ++i) {
      const double* row = layer.w.data() + static_cast<std::size_t>(i) * layer.in;
      next[i] = apply_act(layer.act, layer.b[i] + dot(row, cur.data(), layer.in));
    }
    cur.swap(next);
  }
  return cur;
}

std::vector<double> Network::forward_tape(std::span<const double> input,
                                          ForwardTape& tape) const {
  if (static_cast<int>(input.size()) != input_size())
    throw ShapeError("forward: input size mismatch");
  if (tape.activ.size() < layers_.size()) tape.activ.resize(layers_.size());
  std::span<const double> cur = input;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& layer = layers_[k];
    tape.activ[k].assign(layer.out, 0.0);
    for (int i = 0; i < layer.out; ++i) {
      const double* row = layer.w.data() + static_cast<std::size_t>(i) * layer.in;
      tape.activ[k][i] =
          apply_act(layer.act, layer.b[i] + dot(row, cur.data(), layer.in));
    }
    cur = tape.activ[k];
  }
  return tape.activ[layers_.size() - 1];
}

void Network::backward_tape(const ForwardTape& tape, std::span<const double> input,
                            std::span<const double> upstream, ParamGrad& acc,
                            std::vector<double>* input_grad) const {
  if (static_cast<int>(input.size()) != input_size())
    throw ShapeError("backward: input size mismatch");
  if (static_cast<int>(upstream.size()) != output_size())
    throw ShapeError("backward: upstream size mismatch");
  check_same_layout(acc.layout, layout_, "backward");

  thread_local std::vector<double> delta;
  thread_local std::vector<double> prev_delta;
  delta.assign(upstream.begin(), upstream.end());
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const auto& layer = layers_[k];
    const auto& out_act = tape.activ[k];
    // delta currently holds d<upstream,out>/d(post-activation of layer k).
    for (int i = 0; i < layer.out; ++i)
      delta[i] *= act_deriv_from_output(layer.act, out_act[i]);

    std::span<const double> below =
        k == 0 ? input : std::span<const double>(tape.activ[k - 1]);
    double* wg = acc.values.data() + offsets_[k];
    double* bg = wg + static_cast<std::size_t>(layer.out) * layer.in;
    for (int i = 0; i < layer.out; ++i) {
      const double d = delta[i];
      double* wrow = wg + static_cast<std::size_t>(i) * layer.in;
      for (int j = 0; j < layer.in; ++j) wrow[j] += d * below[j];
      bg[i] += d;
    }

    if (k > 0 || input_grad != nullptr) {
      prev_delta.assign(layer.in, 0.0);
      for (int i = 0; i < layer.out; ++i) {
        const double d = delta[i];
        const double* wrow = layer.w.data() + static_cast<std::size_t>(i) * layer.in;
        for (int j = 0; j < layer.in; ++j) prev_delta[j] += d * wrow[j];
      }
      delta.swap(prev_delta);
    }
  }
  if (input_grad != nullptr) *input_grad = delta;
}

void Network::backward_accumulate(std::span<const double> input,
                                  std::span<const double> upstream,
                                  ParamGrad& acc,
                                  std::vector<double>* input_grad) const {
  thread_local ForwardTape tape;
  (void)forward_tape(input, tape);
  backward_tape(tape, input, upstream, acc, input_grad);
}

void Network::forward_batch(const double* xs, int batch, BatchTape& tape) const {
  if (tape.activ.size() < layers_.size()) tape.activ.resize(layers_.size());
  tape.batch = batch;
  const std::size_t b = static_cast<std::size_t>(batch);
  const double* cur = xs;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& layer = layers_[k];
    auto& out = tape.activ[k];
    out.assign(static_cast<std::size_t>(layer.out) * b, 0.0);
    for (int i = 0; i < layer.out; ++i) {
      double* zrow = out.data() + static_cast<std::size_t>(i) * b;
      const double bias = layer.b[i];
      const double* wrow = layer.w.data() + static_cast<std::size_t>(i) * layer.in;
      int s0 = 0;
      for (; s0 + 32 <= batch; s0 += 32)
        matvec_block<32>(wrow, layer.in, bias, cur + s0, b, zrow + s0);
      for (; s0 + 8 <= batch; s0 += 8)
        matvec_block<8>(wrow, layer.in, bias, cur + s0, b, zrow + s0);
      for (; s0 < batch; ++s0)
        matvec_block<1>(wrow, layer.in, bias, cur + s0, b, zrow + s0);
      switch (layer.act) {
        case Activation::kIdentity:
          break;
        case Activation::kRelu:
          for (int s = 0; s < batch; ++s) zrow[s] = zrow[s] > 0.0 ? zrow[s] : 0.0;
          break;
        case Activation::kTanh:
          for (int s = 0; s < batch; ++s) zrow[s] = fast_tanh(zrow[s]);
          break;
      }
    }
    cur = out.data();
  }
}

void Network::backward_batch(const double* xs, int batch, const BatchTape& tape,
                             const double* upstream, ParamGrad& acc,
                             double* input_grad) const {
  check_same_layout(acc.layout, layout_, "backward_batch");
  if (tape.batch != batch) throw ShapeError("backward_batch: tape batch mismatch");
  const std::size_t b = static_cast<std::size_t>(batch);
  thread_local std::vector<double> delta;
  thread_local std::vector<double> prev_delta;
  delta.assign(upstream, upstream + static_cast<std::size_t>(output_size()) * b);
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const auto& layer = layers_[k];
    const auto& out_act = tape.activ[k];
    for (int i = 0; i < layer.out; ++i) {
      double* drow = delta.data() + static_cast<std::size_t>(i) * b;
      const double* arow = out_act.data() + static_cast<std::size_t>(i) * b;
      switch (layer.act) {
        case Activation::kIdentity:
          break;
        case Activation::kRelu:
          for (int s = 0; s < batch; ++s) drow[s] = arow[s] > 0.0 ? drow[s] : 0.0;
          break;
        case Activation::kTanh:
          for (int s = 0; s < batch; ++s) drow[s] *= 1.0 - arow[s] * arow[s];
          break;
      }
    }

    const double* below = k == 0 ? xs : tape.activ[k - 1].data();
    double* wg = acc.values.data() + offsets_[k];
    double* bg = wg + static_cast<std::size_t>(layer.out) * layer.in;
    for (int i = 0; i < layer.out; ++i) {
      const double* drow = delta.data() + static_cast<std::size_t>(i) * b;
      double* wgrow = wg + static_cast<std::size_t>(i) * layer.in;
      for (int j = 0; j < layer.in; ++j)
        wgrow[j] += dot(drow, below + static_cast<std::size_t>(j) * b, batch);
      double dsum = 0.0;
      for (int s = 0; s < batch; ++s) dsum += drow[s];
      bg[i] += dsum;
    }

    if (k > 0 || input_grad != nullptr) {
      prev_delta.assign(static_cast<std::size_t>(layer.in) * b, 0.0);
      for (int j = 0; j < layer.in; ++j) {
        double* prow = prev_delta.data() + static_cast<std::size_t>(j) * b;
        int s0 = 0;
        for (; s0 + 32 <= batch; s0 += 32)
          matvec_t_block<32>(layer.w.data(), layer.out, layer.in, j,
                             delta.data() + s0, b, prow + s0);
        for (; s0 + 8 <= batch; s0 += 8)
          matvec_t_block<8>(layer.w.data(), layer.out, layer.in, j,
                            delta.data() + s0, b, prow + s0);
        for (; s0 < batch; ++s0)
          matvec_t_block<1>(layer.w.data(), layer.out, layer.in, j,
                            delta.data() + s0, b, prow + s0);
      }
      delta.swap(prev_delta);
    }
  }
  if (input_grad != nullptr)
    std::copy_n(delta.data(), static_cast<std::size_t>(input_size()) * b, input_grad);
}

void Network::input_gradient_batch(const double* xs, int batch,
                                   const BatchTape& tape, const double* upstream,
                                   double* input_grad) const {
  (void)xs;
  if (tape.batch != batch)
    throw ShapeError("input_gradient_batch: tape batch mismatch");
  const std::size_t b = static_cast<std::size_t>(batch);
  thread_local std::vector<double> delta;
  thread_local std::vector<double> prev_delta;
  delta.assign(upstream, upstream + static_cast<std::size_t>(output_size()) * b);
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const auto& layer = layers_[k];
    const auto& out_act = tape.activ[k];
    for (int i = 0; i < layer.out; ++i) {
      double* drow = delta.data() + static_cast<std::size_t>(i) * b;
      const double* arow = out_act.data() + static_cast<std::size_t>(i) * b;
      switch (layer.act) {
        case Activation::kIdentity:
          break;
        case Activation::kRelu:
          for (int s = 0; s < batch; ++s) drow[s] = arow[s] > 0.0 ? drow[s] : 0.0;
          break;
        case Activation::kTanh:
          for (int s = 0; s < batch; ++s) drow[s] *= 1.0 - arow[s] * arow[s];
          break;
      }
    }
    prev_delta.assign(static_cast<std::size_t>(layer.in) * b, 0.0);
    for (int j = 0; j < layer.in; ++j) {
      double* prow = prev_delta.data() + static_cast<std::size_t>(j) * b;
      int s0 = 0;
      for (; s0 + 32 <= batch; s0 += 32)
        matvec_t_block<32>(layer.w.data(), layer.out, layer.in, j,
                           delta.data() + s0, b, prow + s0);
      for (; s0 + 8 <= batch; s0 += 8)
        matvec_t_block<8>(layer.w.data(), layer.out, layer.in, j,
                          delta.data() + s0, b, prow + s0);
      for (; s0 < batch; ++s0)
        matvec_t_block<1>(layer.w.data(), layer.out, layer.in, j,
                          delta.data() + s0, b, prow + s0);
    }
    delta.swap(prev_delta);
  }
  std::copy_n(delta.data(), static_cast<std::size_t>(input_size()) * b, input_grad);
}

std::vector<double> Network::forward_input_gradient(
    std::span<const double> input, std::span<const double> upstream,
    std::vector<double>& input_grad) const {
  thread_local ForwardTape tape;
  std::vector<double> out = forward_tape(input, tape);
  if (static_cast<int>(upstream.size()) != output_size())
    throw ShapeError("forward_input_gradient: upstream size mismatch");

  thread_local std::vector<double> delta;
  thread_local std::vector<double> prev_delta;
  delta.assign(upstream.begin(), upstream.end());
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const auto& layer = layers_[k];
    const auto& out_act = tape.activ[k];
    for (int i = 0; i < layer.out; ++i)
      delta[i] *= act_deriv_from_output(layer.act, out_act[i]);
    prev_delta.assign(layer.in, 0.0);
    for (int i = 0; i < layer.out; ++i) {
      const double d = delta[i];
      const double* wrow = layer.w.data() + static_cast<std::size_t>(i) * layer.in;
      for (int j = 0; j < layer.in; ++j) prev_delta[j] += d * wrow[j];
    }
    delta.swap(prev_delta);
  }
  input_grad = delta;
  return out;
}

Network::BackwardResult Network::backward(std::span<const double> input,
                                          std::span<const double> upstream) const {
  BackwardResult result;
  result.params = zero_grad(layout_);
  backward_accumulate(input, upstream, result.params, &result.input);
  return result;
}

ParamVector Network::flatten() const {
  ParamVector v;
  v.layout = layout_;
  v.values.reserve(param_count());
  for (const auto& layer : layers_) {
    v.values.insert(v.values.end(), layer.w.begin(), layer.w.end());
    v.values.insert(v.values.end(), layer.b.begin(), layer.b.end());
  }
  return v;
}

void Network::unflatten(const ParamVector& v) {
  check_same_layout(v.layout, layout_, "unflatten");
  if (v.values.size() != param_count())
    throw ShapeError("unflatten: value count mismatch");
  std::size_t off = 0;
  for (auto& layer : layers_) {
    const std::size_t wn = layer.w.size();
    std::copy_n(v.values.begin() + off, wn, layer.w.begin());
    off += wn;
    std::copy_n(v.values.begin() + off, layer.b.size(), layer.b.begin());
    off += layer.b.size();
  }
}

namespace {

void check_finite(const ParamGrad& g, const char* where) {
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    if (!std::isfinite(g.values[i]))
      throw NumericError(std::string(where) + ": non-finite gradient component at index " +
                         std::to_string(i));
  }
}

}  // namespace

ParamVector sgd_step(const ParamVector& v, const ParamGrad& g, double lr) {
  check_same_layout(v.layout, g.layout, "sgd_step");
  check_finite(g, "sgd_step");
  ParamVector out = v;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] -= lr * g.values[i];
  return out;
}

ParamVector adam_step(const ParamVector& v, const ParamGrad& g, double lr,
                      AdamState& state) {
  check_same_layout(v.layout, g.layout, "adam_step");
  check_finite(g, "adam_step");
  if (state.m.size() != v.values.size() || state.v.size() != v.values.size())
    throw ShapeError("adam_step: state size mismatch");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  ParamVector out = v;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g.values[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g.values[i] * g.values[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    out.values[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
  }
  return out;
}

Optimizer Optimizer::sgd(double lr) {
  Optimizer o;
  o.kind_ = Kind::kSgd;
  o.lr_ = lr;
  return o;
}

Optimizer Optimizer::adam(double lr, double b1, double b2, double eps) {
  Optimizer o;
  o.kind_ = Kind::kAdam;
  o.lr_ = lr;
  o.beta1_ = b1;
  o.beta2_ = b2;
  o.eps_ = eps;
  return o;
}

ParamVector Optimizer::step(const ParamVector& v, const ParamGrad& g) {
  if (kind_ == Kind::kSgd) return sgd_step(v, g, lr_);
  if (!state_ready_) {
    state_ = AdamState(v.values.size(), beta1_, beta2_, eps_);
    state_ready_ = true;
  }
  return adam_step(v, g, lr_, state_);
}

Optimizer::ElementStep Optimizer::begin_step(std::size_t n) {
  ElementStep es;
  es.kind = kind_;
  es.lr = lr_;
  es.beta1 = beta1_;
  es.beta2 = beta2_;
  es.eps = eps_;
  es.bc1 = es.bc2 = 1.0;
  if (kind_ == Kind::kAdam) {
    if (!state_ready_) {
      state_ = AdamState(n, beta1_, beta2_, eps_);
      state_ready_ = true;
    }
    if (state_.m.size() != n) throw ShapeError("Optimizer: state size mismatch");
    state_.t += 1;
    es.bc1 = 1.0 - std::pow(beta1_, static_cast<double>(state_.t));
    es.bc2 = 1.0 - std::pow(beta2_, static_cast<double>(state_.t));
    es.m = state_.m.data();
    es.v = state_.v.data();
  }
  return es;
}

void save_checkpoint(const Network& net, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint for writing: " + path);
  std::ostringstream header;
  header << "layout: [";
  const auto& layout = net.layout();
  header << layout.front().in;
  for (const auto& s : layout) header << "," << s.out;
  header << "] activations: [";
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (i) header << ",";
    header << activation_name(layout[i].act);
  }
  header << "]\n";
  f << header.str();
  ParamVector v = net.flatten();
  for (double x : v.values) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    unsigned char buf[8];
    for (int k = 0; k < 8; ++k) buf[k] = static_cast<unsigned char>(bits >> (8 * k));
    f.write(reinterpret_cast<const char*>(buf), 8);
  }
  if (!f) throw IoError("short write on checkpoint: " + path);
}

namespace {

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

Network load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint: " + path);
  std::string header;
  std::getline(f, header);
  const std::string layout_tag = "layout: [";
  const std::string act_tag = "] activations: [";
  auto lpos = header.find(layout_tag);
  auto apos = header.find(act_tag);
  if (lpos != 0 || apos == std::string::npos || header.back() != ']')
    throw IoError("malformed checkpoint header: " + header);
  std::string sizes_str = header.substr(layout_tag.size(), apos - layout_tag.size());
  std::string acts_str = header.substr(apos + act_tag.size(),
                                       header.size() - apos - act_tag.size() - 1);
  std::vector<int> sizes;
  for (const auto& tok : split_csv_list(sizes_str)) sizes.push_back(std::stoi(tok));
  std::vector<Activation> acts;
  for (const auto& tok : split_csv_list(acts_str)) acts.push_back(activation_from_name(tok));
  Network net(sizes, acts);
  ParamVector v;
  v.layout = net.layout();
  v.values.resize(net.param_count());
  for (auto& x : v.values) {
    unsigned char buf[8];
    f.read(reinterpret_cast<char*>(buf), 8);
    if (!f) throw IoError("truncated checkpoint: " + path);
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
    std::memcpy(&x, &bits, sizeof x);
  }
  net.unflatten(v);
  return net;
}

}  // namespace swarmrl
