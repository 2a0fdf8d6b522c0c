#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"
#include "swarmrl/nn.hpp"

using namespace swarmrl;

TEST_CASE("nn: zero-weight relu net maps everything to zero") {
  Network net = Network::mlp(3, {5}, 2, Activation::kRelu, Activation::kIdentity);
  const auto out = net.forward(std::vector<double>{0.7, -1.2, 3.0});
  for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("nn: identity layer with identity weights reproduces the input") {
  Network net({3, 3}, {Activation::kIdentity});
  auto& layer = net.layers()[0];
  for (int i = 0; i < 3; ++i) layer.w[i * 3 + i] = 1.0;
  const std::vector<double> in{0.25, -4.0, 9.5};
  CHECK(net.forward(in) == in);
}

TEST_CASE("nn: forward matches an independent matrix-vector recomputation") {
  Network net = Network::mlp(3, {4}, 2, Activation::kTanh, Activation::kIdentity);
  Rng rng = make_rng(42, 0);
  net.init_uniform(rng);
  const std::vector<double> in{0.3, -0.8, 1.1};

  // Brute-force recomputation straight from the layer arrays.
  const auto& l0 = net.layers()[0];
  const auto& l1 = net.layers()[1];
  std::vector<double> h(4), out_expected(2);
  for (int i = 0; i < 4; ++i) {
    double z = l0.b[i];
    for (int j = 0; j < 3; ++j) z += l0.w[i * 3 + j] * in[j];
    h[i] = std::tanh(z);
  }
  for (int i = 0; i < 2; ++i) {
    double z = l1.b[i];
    for (int j = 0; j < 4; ++j) z += l1.w[i * 4 + j] * h[j];
    out_expected[i] = z;
  }

  const auto out = net.forward(in);
  REQUIRE(out.size() == 2);
  CHECK(out[0] == doctest::Approx(out_expected[0]).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(out_expected[1]).epsilon(1e-12));
}

TEST_CASE("nn: forward is deterministic") {
  Network net = Network::mlp(4, {8, 8}, 3, Activation::kTanh, Activation::kIdentity);
  Rng rng = make_rng(7, 0);
  net.init_uniform(rng);
  const std::vector<double> in{0.1, 0.2, 0.3, 0.4};
  const auto a = net.forward(in);
  const auto b = net.forward(in);
  CHECK(a == b);
}

TEST_CASE("nn: forward rejects mismatched input size") {
  Network net = Network::mlp(3, {4}, 2, Activation::kRelu, Activation::kIdentity);
  CHECK_THROWS_AS((void)net.forward(std::vector<double>{1.0, 2.0}), ShapeError);
}

TEST_CASE("nn: backward with zero upstream is a zero gradient") {
  Network net = Network::mlp(3, {6}, 2, Activation::kTanh, Activation::kIdentity);
  Rng rng = make_rng(3, 0);
  net.init_uniform(rng);
  const auto res = net.backward(std::vector<double>{1.0, -2.0, 0.5},
                                std::vector<double>{0.0, 0.0});
  for (double g : res.params.values) CHECK(g == 0.0);
  for (double g : res.input) CHECK(g == 0.0);
}

TEST_CASE("nn: single linear layer, upstream e_i picks out row i") {
  Network net({3, 2}, {Activation::kIdentity});
  Rng rng = make_rng(11, 0);
  net.init_uniform(rng);
  const std::vector<double> in{0.4, -1.5, 2.5};
  const auto res = net.backward(in, std::vector<double>{0.0, 1.0});
  // d<e_1, Wx+b>/dW = e_1 x^T: row 1 equals input, row 0 zero.
  const auto& g = res.params.values;
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
  CHECK(g[2] == 0.0);
  CHECK(g[3] == doctest::Approx(in[0]));
  CHECK(g[4] == doctest::Approx(in[1]));
  CHECK(g[5] == doctest::Approx(in[2]));
  // biases: [0, 1]
  CHECK(g[6] == 0.0);
  CHECK(g[7] == 1.0);
}

TEST_CASE("nn: backward matches central finite differences on a random net") {
  for (int trial = 0; trial < 5; ++trial) {
    Network net = Network::mlp(4, {7, 5}, 3,
                               trial % 2 == 0 ? Activation::kTanh : Activation::kRelu,
                               Activation::kIdentity);
    Rng rng = make_rng(100 + trial, 0);
    net.init_uniform(rng);
    std::vector<double> in(4), upstream(3);
    for (auto& v : in) v = uniform_range(rng, -1.0, 1.0);
    for (auto& v : upstream) v = uniform_range(rng, -1.0, 1.0);

    const auto res = net.backward(in, upstream);
    const auto fd = testhelpers::finite_difference_grad(net, [&]() {
      const auto out = net.forward(in);
      double acc = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) acc += upstream[i] * out[i];
      return acc;
    });
    CHECK(testhelpers::max_grad_mismatch(res.params.values, fd) < 1e-4);
  }
}

TEST_CASE("nn: flatten/unflatten round trip is the identity") {
  Network net = Network::mlp(4, {8}, 2, Activation::kTanh, Activation::kTanh);
  Rng rng = make_rng(5, 0);
  net.init_uniform(rng);
  const auto before = net.flatten();
  net.unflatten(before);
  const auto after = net.flatten();
  CHECK(before.values == after.values);
  CHECK(before.layout == after.layout);
}

TEST_CASE("nn: unflatten of all-zeros gives the bias-only map") {
  Network net = Network::mlp(2, {3}, 2, Activation::kIdentity, Activation::kIdentity);
  Rng rng = make_rng(6, 0);
  net.init_uniform(rng);
  ParamVector zeros{std::vector<double>(net.param_count(), 0.0), net.layout()};
  net.unflatten(zeros);
  const auto out = net.forward(std::vector<double>{3.0, -2.0});
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
}

TEST_CASE("nn: flatten length for a 4->8->2 tanh net counts weights plus biases") {
  Network net = Network::mlp(4, {8}, 2, Activation::kTanh, Activation::kIdentity);
  CHECK(net.param_count() == 4 * 8 + 8 + 8 * 2 + 2);
  CHECK(net.flatten().values.size() == 58);
}

TEST_CASE("nn: unflatten rejects a mismatched layout") {
  Network a = Network::mlp(4, {8}, 2, Activation::kTanh, Activation::kIdentity);
  Network b = Network::mlp(4, {9}, 2, Activation::kTanh, Activation::kIdentity);
  CHECK_THROWS_AS(a.unflatten(b.flatten()), ShapeError);
}

TEST_CASE("nn: optimizer steps leave parameters unchanged at zero gradient") {
  Network net = Network::mlp(3, {4}, 2, Activation::kTanh, Activation::kIdentity);
  Rng rng = make_rng(8, 0);
  net.init_uniform(rng);
  const auto v = net.flatten();
  const auto g = zero_grad(net.layout());

  const auto sgd = sgd_step(v, g, 0.5);
  CHECK(sgd.values == v.values);

  AdamState st(v.values.size());
  const auto adam = adam_step(v, g, 0.5, st);
  CHECK(adam.values == v.values);
}

TEST_CASE("nn: sgd arithmetic example") {
  const Layout layout{{1, 2, Activation::kIdentity}};
  ParamVector v{{1.0, 1.0, 0.0, 0.0}, layout};
  ParamGrad g{{2.0, -2.0, 0.0, 0.0}, layout};
  const auto out = sgd_step(v, g, 0.1);
  CHECK(out.values[0] == doctest::Approx(0.8));
  CHECK(out.values[1] == doctest::Approx(1.2));
}

TEST_CASE("nn: adam first step against hand-computed bias-corrected moments") {
  const Layout layout{{1, 2, Activation::kIdentity}};
  ParamVector v{{1.0, -1.0, 0.5, 0.0}, layout};
  ParamGrad g{{0.3, -0.2, 0.1, 0.4}, layout};
  const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  AdamState st(v.values.size(), b1, b2, eps);
  const auto out = adam_step(v, g, lr, st);
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    // After one step: m_hat = g, v_hat = g^2, so the update direction is
    // -lr * g / (|g| + eps) = -lr * sign(g) up to the eps correction.
    const double m_hat = (1.0 - b1) * g.values[i] / (1.0 - b1);
    const double v_hat = (1.0 - b2) * g.values[i] * g.values[i] / (1.0 - b2);
    const double expect = v.values[i] - lr * m_hat / (std::sqrt(v_hat) + eps);
    CHECK(out.values[i] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(std::fabs((out.values[i] - v.values[i]) + lr * (g.values[i] > 0 ? 1.0 : -1.0)) <
          1e-6);
  }
  CHECK(st.t == 1);
}

TEST_CASE("nn: optimizers reject non-finite gradients") {
  const Layout layout{{1, 1, Activation::kIdentity}};
  ParamVector v{{1.0, 0.0}, layout};
  ParamGrad g{{std::nan(""), 0.0}, layout};
  CHECK_THROWS_AS((void)sgd_step(v, g, 0.1), NumericError);
  AdamState st(2);
  CHECK_THROWS_AS((void)adam_step(v, g, 0.1, st), NumericError);
}

TEST_CASE("nn: checkpoint round trip is bit-exact") {
  Network net = Network::mlp(4, {8}, 2, Activation::kTanh, Activation::kIdentity);
  Rng rng = make_rng(21, 0);
  net.init_uniform(rng);
  const std::string path = std::filesystem::temp_directory_path() /
                           "swarmrl_ckpt_test.bin";
  save_checkpoint(net, path);
  Network loaded = load_checkpoint(path);
  CHECK(loaded.layout() == net.layout());
  CHECK(loaded.flatten().values == net.flatten().values);
  std::filesystem::remove(path);
}

TEST_CASE("nn: gradient exactness property over random small nets") {
  // Every net at or below 200 parameters matches finite differences.
  Rng meta = make_rng(777, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const int in = 2 + static_cast<int>(uniform_index(meta, 4));
    const int hid = 2 + static_cast<int>(uniform_index(meta, 8));
    const int out = 1 + static_cast<int>(uniform_index(meta, 3));
    Network net = Network::mlp(in, {hid}, out,
                               trial % 3 == 0 ? Activation::kRelu : Activation::kTanh,
                               Activation::kIdentity);
    if (net.param_count() > 200) continue;
    Rng rng = make_rng(900 + trial, 0);
    net.init_uniform(rng);
    std::vector<double> x(in), up(out);
    for (auto& v : x) v = uniform_range(rng, -1.0, 1.0);
    for (auto& v : up) v = uniform_range(rng, -1.0, 1.0);
    const auto res = net.backward(x, up);
    const auto fd = testhelpers::finite_difference_grad(net, [&]() {
      const auto o = net.forward(x);
      double acc = 0.0;
      for (std::size_t i = 0; i < o.size(); ++i) acc += up[i] * o[i];
      return acc;
    });
    CHECK(testhelpers::max_grad_mismatch(res.params.values, fd) < 1e-4);
  }
}
