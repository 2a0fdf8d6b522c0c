#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swarmrl/common.hpp"

namespace swarmrl {

enum class Activation { kIdentity, kRelu, kTanh };

const char* activation_name(Activation a);
Activation activation_from_name(std::string_view name);

struct LayerShape {
  int in = 0;
  int out = 0;
  Activation act = Activation::kIdentity;
  bool operator==(const LayerShape&) const = default;
};

// Layer shapes in network order; the layout descriptor carried by every flat
// parameter vector so mismatched unflatten/arithmetic is caught at runtime.
using Layout = std::vector<LayerShape>;

std::size_t layout_size(const Layout& layout);
std::string layout_to_string(const Layout& layout);

// Flat view of all weights and biases of one network, in layer order:
// layer 0 weights (row-major), layer 0 biases, layer 1 weights, ...
struct ParamVector {
  std::vector<double> values;
  Layout layout;
};

// Same layout as the ParamVector it was computed from.
struct ParamGrad {
  std::vector<double> values;
  Layout layout;
};

ParamGrad zero_grad(const Layout& layout);
void check_same_layout(const Layout& a, const Layout& b, const char* where);

struct DenseLayer {
  int in = 0;
  int out = 0;
  Activation act = Activation::kIdentity;
  std::vector<double> w;  // out rows of in, row-major
  std::vector<double> b;  // out
};

// Minimal dense MLP with exact manual backpropagation. A Network is owned by
// exactly one worker; parameter exchange goes through ParamVector snapshots.
class Network {
 public:
  Network() = default;
  // sizes = [in, h1, ..., out]; acts has one entry per layer.
  Network(const std::vector<int>& sizes, const std::vector<Activation>& acts);

  static Network mlp(int in, const std::vector<int>& hidden, int out,
                     Activation hidden_act, Activation out_act);

  int input_size() const;
  int output_size() const;
  const Layout& layout() const { return layout_; }
  std::size_t param_count() const;
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  // Weights and biases uniform in +-1/sqrt(fan_in), one layer at a time.
  void init_uniform(Rng& rng);

  std::vector<double> forward(std::span<const double> input) const;

  // Post-activation values per layer from one forward pass, reusable by
  // backward_tape to avoid recomputing the forward.
  struct ForwardTape {
    std::vector<std::vector<double>> activ;
  };

  std::vector<double> forward_tape(std::span<const double> input,
                                   ForwardTape& tape) const;

  // Exact gradient of <upstream, forward(input)> given the tape of that
  // forward pass, accumulated into acc.
  void backward_tape(const ForwardTape& tape, std::span<const double> input,
                     std::span<const double> upstream, ParamGrad& acc,
                     std::vector<double>* input_grad = nullptr) const;

  // Convenience: forward + backward in one call.
  void backward_accumulate(std::span<const double> input,
                           std::span<const double> upstream, ParamGrad& acc,
                           std::vector<double>* input_grad = nullptr) const;

  // Forward returning the output, plus the gradient of <upstream, output>
  // with respect to the input only; parameter gradients are not formed.
  std::vector<double> forward_input_gradient(std::span<const double> input,
                                             std::span<const double> upstream,
                                             std::vector<double>& input_grad) const;

  // Batched passes over B samples in feature-major layout: element (feature
  // j, sample s) lives at [j*B + s]. These carry the minibatch learning
  // loops, where the per-sample path wastes the SIMD lanes.
  struct BatchTape {
    std::vector<std::vector<double>> activ;  // per layer, out*B
    int batch = 0;
  };

  void forward_batch(const double* xs, int batch, BatchTape& tape) const;

  // Exact parameter gradient of sum_s <upstream[., s], output[., s]>,
  // accumulated into acc; optionally the input gradient, same layout as xs.
  void backward_batch(const double* xs, int batch, const BatchTape& tape,
                      const double* upstream, ParamGrad& acc,
                      double* input_grad = nullptr) const;

  // Input gradient only; parameter gradients are not formed.
  void input_gradient_batch(const double* xs, int batch, const BatchTape& tape,
                            const double* upstream, double* input_grad) const;

  struct BackwardResult {
    ParamGrad params;
    std::vector<double> input;
  };
  BackwardResult backward(std::span<const double> input,
                          std::span<const double> upstream) const;

  ParamVector flatten() const;
  void unflatten(const ParamVector& v);

 private:
  std::vector<DenseLayer> layers_;
  Layout layout_;
  std::vector<std::size_t> offsets_;  // flat offset of each layer's block
};

// Optimizer steps use the loss-gradient convention: the returned vector
// descends g. Callers maximizing an objective pass the negated gradient.
ParamVector sgd_step(const ParamVector& v, const ParamGrad& g, double lr);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  explicit AdamState(std::size_t n, double b1 = 0.9, double b2 = 0.999,
                     double e = 1e-8)
      : m(n, 0.0), v(n, 0.0), beta1(b1), beta2(b2), eps(e) {}
};

// Bias-corrected Adam. Mutates state (moments and step counter).
ParamVector adam_step(const ParamVector& v, const ParamGrad& g, double lr,
                      AdamState& state);

// SGD or Adam behind one interface so learners can be configured either way.
class Optimizer {
 public:
  enum class Kind { kSgd, kAdam };

  static Optimizer sgd(double lr);
  static Optimizer adam(double lr, double b1 = 0.9, double b2 = 0.999,
                        double eps = 1e-8);

  ParamVector step(const ParamVector& v, const ParamGrad& g);
  double lr() const { return lr_; }
  Kind kind() const { return kind_; }

  // Element-wise view of one optimizer step for fused in-place update loops.
  // begin_step advances the Adam counter; delta(i, g_i) then returns the
  // parameter increment, with exactly the same arithmetic as step().
  struct ElementStep {
    Kind kind;
    double lr;
    double beta1, beta2, eps;
    double bc1, bc2;
    double* m = nullptr;
    double* v = nullptr;

    double delta(std::size_t i, double g) const {
      if (kind == Kind::kSgd) return -lr * g;
      m[i] = beta1 * m[i] + (1.0 - beta1) * g;
      v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      return -lr * mhat / (std::sqrt(vhat) + eps);
    }
  };
  ElementStep begin_step(std::size_t n);

 private:
  Kind kind_ = Kind::kSgd;
  double lr_ = 0.0;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  AdamState state_;
  bool state_ready_ = false;
};

// Checkpoint file: one text header line
//   layout: [in,h1,...,out] activations: [a1,...]
// followed by the flat parameter vector as little-endian 64-bit floats.
void save_checkpoint(const Network& net, const std::string& path);
Network load_checkpoint(const std::string& path);

}  // namespace swarmrl
