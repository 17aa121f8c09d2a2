#include <doctest.h>

#include <cmath>
#include <random>

#include "kanhar/kan.hpp"
#include "kanhar/optim.hpp"
#include "oracles.hpp"

using kanhar::ForwardTrace;
using kanhar::KanLayer;
using kanhar::KanNetwork;
using kanhar::NetworkGradients;
using kanhar::SplineGrid;

namespace {

void randomize_layer(KanLayer& layer, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& p : layer.parameters()) p = dist(rng);
}

void randomize_network(KanNetwork& net, std::mt19937_64& rng) {
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    randomize_layer(net.layer(l), rng);
  }
}

std::vector<double> oracle_layer_forward(const KanLayer& layer,
                                         std::span<const double> x) {
  const int nb = layer.grid().num_basis();
  const int d_in = layer.d_in();
  const int d_out = layer.d_out();
  std::vector<double> coeffs;
  std::vector<double> w_base;
  std::vector<double> w_spline;
  std::vector<double> gate;
  for (int p = 0; p < d_in; ++p) {
    for (int q = 0; q < d_out; ++q) {
      const auto e = layer.edge(p, q);
      coeffs.insert(coeffs.end(), e.spline_coeffs.begin(), e.spline_coeffs.end());
      w_base.push_back(e.w_base);
      w_spline.push_back(e.w_spline);
      gate.push_back(e.gate);
    }
  }
  std::vector<double> bias(layer.bias().begin(), layer.bias().end());
  (void)nb;
  return oracle::layer_forward(d_in, d_out, layer.grid().grid_size(),
                               layer.grid().order(), layer.grid().range_lo(),
                               layer.grid().range_hi(), coeffs, w_base,
                               w_spline, gate, bias, x);
}

}  // namespace

TEST_CASE("silu matches its closed form") {
  CHECK(kanhar::silu(0.0) == 0.0);
  CHECK(kanhar::silu(1.0) == doctest::Approx(0.7310585786300049).epsilon(1e-15));
  CHECK(kanhar::silu(-1.0) ==
        doctest::Approx(-0.2689414213699951).epsilon(1e-15));
  // Large-|x| limits stay finite.
  CHECK(kanhar::silu(100.0) == doctest::Approx(100.0));
  CHECK(std::abs(kanhar::silu(-100.0)) < 1e-40);
}

TEST_CASE("silu_grad matches finite differences") {
  for (double x : {-3.0, -1.2, 0.0, 0.4, 2.7}) {
    const double fd = oracle::central_diff(
        [](double t) { return oracle::silu(t); }, x, 1e-6);
    CHECK(kanhar::silu_grad(x) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("edge activation composes SiLU and spline parts") {
  const SplineGrid grid(5, 3, -2.0, 2.0);
  std::vector<double> coeffs(static_cast<std::size_t>(grid.num_basis()), 1.0);

  SUBCASE("silu-only edge vanishes at zero") {
    kanhar::EdgeView e{coeffs, 1.0, 0.0, 1.0};
    CHECK(kanhar::edge_activation(grid, e, 0.0) == 0.0);
  }
  SUBCASE("spline-only edge with unit coefficients is the unit constant") {
    kanhar::EdgeView e{coeffs, 0.0, 1.0, 1.0};
    CHECK(kanhar::edge_activation(grid, e, 0.7) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("random edge equals the composed oracles") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& c : coeffs) c = dist(rng);
    const double wb = dist(rng);
    const double ws = dist(rng);
    kanhar::EdgeView e{coeffs, wb, ws, 1.0};
    const auto basis = oracle::basis_vector(5, 3, -2.0, 2.0, 0.5);
    double spline = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      spline += coeffs[i] * basis[i];
    }
    const double want = wb * oracle::silu(0.5) + ws * spline;
    CHECK(kanhar::edge_activation(grid, e, 0.5) ==
          doctest::Approx(want).epsilon(1e-13));
  }
  SUBCASE("with gate = 1 the blend is recovered bit for bit") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& c : coeffs) c = dist(rng);
    const double wb = dist(rng);
    const double ws = dist(rng);
    const double x = 0.3;
    kanhar::EdgeView e{coeffs, wb, ws, 1.0};
    const double direct =
        wb * kanhar::silu(x) + ws * kanhar::spline_eval(grid, coeffs, x);
    CHECK(kanhar::edge_activation(grid, e, x) == direct);
  }
}

TEST_CASE("layer forward: degenerate shapes and the double-loop oracle") {
  const SplineGrid grid(5, 3, -2.0, 2.0);

  SUBCASE("all-zero parameters give a zero vector") {
    KanLayer layer(3, 2, grid);
    std::vector<double> y(2, 1.0);
    const std::vector<double> x = {0.3, -0.4, 1.1};
    layer.forward(x, y);
    CHECK(y[0] == 0.0);
    CHECK(y[1] == 0.0);
  }

  SUBCASE("1x1 layer with zero bias equals its single edge activation") {
    KanLayer layer(1, 1, grid);
    std::mt19937_64 rng(11);
    randomize_layer(layer, rng);
    layer.bias()[0] = 0.0;
    const std::vector<double> x = {0.62};
    std::vector<double> y(1);
    layer.forward(x, y);
    CHECK(y[0] == kanhar::edge_activation(grid, layer.edge(0, 0), 0.62));
  }

  SUBCASE("2x3 random layer matches the double-loop oracle") {
    KanLayer layer(2, 3, grid);
    std::mt19937_64 rng(12);
    randomize_layer(layer, rng);
    const std::vector<double> x = {0.15, -0.85};
    std::vector<double> y(3);
    layer.forward(x, y);
    const auto want = oracle_layer_forward(layer, x);
    for (std::size_t q = 0; q < 3; ++q) {
      CHECK(y[q] == doctest::Approx(want[q]).epsilon(1e-12));
    }
  }

  SUBCASE("dimension mismatches are contract violations") {
    KanLayer layer(2, 3, grid);
    std::vector<double> y(3);
    const std::vector<double> bad_x = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(layer.forward(bad_x, y), std::invalid_argument);
  }
}

TEST_CASE("parameter count law") {
  const SplineGrid g53(5, 3, -2.0, 2.0);

  SUBCASE("36 -> 64 with G=5, K=3 stores 25408 scalars") {
    KanLayer layer(36, 64, g53);
    CHECK(layer.parameter_count() == 25408);
    CHECK(layer.parameters().size() == 25408);
  }
  SUBCASE("1 -> 1 with G=1, K=0 stores 5 scalars") {
    KanLayer layer(1, 1, SplineGrid(1, 0, -2.0, 2.0));
    CHECK(layer.parameter_count() == 5);
    CHECK(layer.parameters().size() == 5);
  }
  SUBCASE("doubling d_out doubles both terms") {
    const auto count = [&](int d_out) {
      return KanLayer::parameter_count(7, d_out, 5, 3);
    };
    CHECK(count(10) * 2 == count(20));
  }
  SUBCASE("random shapes store exactly the closed-form count") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> dim(1, 40);
    std::uniform_int_distribution<int> gs(1, 8);
    std::uniform_int_distribution<int> ord(0, 3);
    for (int rep = 0; rep < 25; ++rep) {
      const int d_in = dim(rng);
      const int d_out = dim(rng);
      const int grid_size = gs(rng);
      const int order = ord(rng);
      KanLayer layer(d_in, d_out, SplineGrid(grid_size, order, -2.0, 2.0));
      const std::size_t want =
          static_cast<std::size_t>(d_in) * static_cast<std::size_t>(d_out) *
              static_cast<std::size_t>(grid_size + order + 3) +
          static_cast<std::size_t>(d_out);
      CHECK(layer.parameter_count() == want);
      CHECK(layer.parameters().size() == want);
    }
  }
}

TEST_CASE("network forward composes layers") {
  const SplineGrid grid(5, 3, -2.0, 2.0);
  std::mt19937_64 rng(31);

  SUBCASE("a single-layer network is exactly layer_forward") {
    const std::vector<int> dims = {4, 3};
    KanNetwork net(dims, grid, 1);
    randomize_network(net, rng);
    const std::vector<double> x = {0.1, -0.2, 0.3, 0.9};
    std::vector<double> y(3);
    net.layer(0).forward(x, y);
    const auto got = net.forward(x);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(got[i] == y[i]);
  }

  SUBCASE("all-zero parameters give zero scores") {
    const std::vector<int> dims = {4, 3, 2};
    KanNetwork net(dims, grid, 1);
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
      for (double& p : net.layer(l).parameters()) p = 0.0;
    }
    const std::vector<double> x = {0.1, -0.2, 0.3, 0.9};
    for (double v : net.forward(x)) CHECK(v == 0.0);
  }

  SUBCASE("two layers equal the manual two-step composition") {
    const std::vector<int> dims = {3, 5, 2};
    KanNetwork net(dims, grid, 17);
    randomize_network(net, rng);
    const std::vector<double> x = {0.4, -1.2, 0.05};
    std::vector<double> mid(5);
    net.layer(0).forward(x, mid);
    std::vector<double> out(2);
    net.layer(1).forward(mid, out);
    const auto got = net.forward(x);
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(got[i] == doctest::Approx(out[i]).epsilon(1e-14));
    }
  }

  SUBCASE("input size is checked") {
    const std::vector<int> dims = {3, 2};
    KanNetwork net(dims, grid, 1);
    const std::vector<double> bad = {1.0};
    CHECK_THROWS_AS(net.forward(bad), std::invalid_argument);
  }
}

TEST_CASE("forward and backward are deterministic") {
  const SplineGrid grid(5, 3, -2.0, 2.0);
  const std::vector<int> dims = {6, 5, 3};
  KanNetwork net(dims, grid, 2024);
  const std::vector<double> x = {0.3, -0.8, 1.4, 0.0, -2.5, 0.9};
  const std::vector<double> up = {0.2, -1.0, 0.5};

  ForwardTrace t1, t2;
  net.forward_traced(x, t1);
  net.forward_traced(x, t2);
  for (std::size_t i = 0; i < t1.output.size(); ++i) {
    CHECK(t1.output[i] == t2.output[i]);
  }

  auto g1 = NetworkGradients::zeros_like(net);
  auto g2 = NetworkGradients::zeros_like(net);
  net.backward(t1, up, g1);
  net.backward(t2, up, g2);
  for (std::size_t l = 0; l < g1.by_layer.size(); ++l) {
    for (std::size_t i = 0; i < g1.by_layer[l].size(); ++i) {
      CHECK(g1.by_layer[l][i] == g2.by_layer[l][i]);
    }
  }
}

TEST_CASE("backward gradients") {
  const SplineGrid grid(5, 3, -2.0, 2.0);
  const std::vector<int> dims = {5, 4, 3};
  KanNetwork net(dims, grid, 7);
  std::mt19937_64 rng(41);
  // Keep parameters moderate so finite differences stay well conditioned.
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    std::uniform_real_distribution<double> dist(-0.8, 0.8);
    for (double& p : net.layer(l).parameters()) p = dist(rng);
  }
  const std::vector<double> x = {0.3, -0.6, 1.1, -1.7, 0.2};

  SUBCASE("zero upstream gives zero gradients") {
    ForwardTrace trace;
    net.forward_traced(x, trace);
    auto grads = NetworkGradients::zeros_like(net);
    const std::vector<double> up(3, 0.0);
    net.backward(trace, up, grads);
    for (const auto& layer : grads.by_layer) {
      for (double g : layer) CHECK(g == 0.0);
    }
  }

  SUBCASE("last-layer bias gradient is the upstream signal") {
    ForwardTrace trace;
    net.forward_traced(x, trace);
    auto grads = NetworkGradients::zeros_like(net);
    const std::vector<double> up = {0.25, -0.75, 2.0};
    net.backward(trace, up, grads);
    const auto& last = grads.by_layer.back();
    // Bias block is the tail of the layout.
    const std::size_t off = last.size() - up.size();
    for (std::size_t q = 0; q < up.size(); ++q) {
      CHECK(last[off + q] == up[q]);
    }
  }

  SUBCASE("parameter and input gradients match finite differences") {
    ForwardTrace trace;
    net.forward_traced(x, trace);
    const std::vector<double> up = {0.7, -0.3, 0.45};
    auto grads = NetworkGradients::zeros_like(net);
    std::vector<double> x_grad;
    net.backward(trace, up, grads, &x_grad);

    const auto objective = [&](void) {
      const auto y = net.forward(x);
      double dot = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) dot += up[i] * y[i];
      return dot;
    };
    const double h = 1e-6;
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
      auto params = net.layer(l).parameters();
      // Stride through the parameters for speed; every block is covered.
      for (std::size_t i = 0; i < params.size(); i += 7) {
        const double saved = params[i];
        params[i] = saved + h;
        const double hi_v = objective();
        params[i] = saved - h;
        const double lo_v = objective();
        params[i] = saved;
        const double fd = (hi_v - lo_v) / (2.0 * h);
        const double a = grads.by_layer[l][i];
        const double denom = std::max({std::abs(a), std::abs(fd), 1e-6});
        CHECK(std::abs(a - fd) / denom < 1e-4);
      }
    }

    std::vector<double> xv(x.begin(), x.end());
    for (std::size_t p = 0; p < xv.size(); ++p) {
      const double saved = xv[p];
      xv[p] = saved + h;
      const auto y_hi = net.forward(xv);
      xv[p] = saved - h;
      const auto y_lo = net.forward(xv);
      xv[p] = saved;
      double fd = 0.0;
      for (std::size_t i = 0; i < up.size(); ++i) {
        fd += up[i] * (y_hi[i] - y_lo[i]) / (2.0 * h);
      }
      const double denom = std::max({std::abs(x_grad[p]), std::abs(fd), 1e-6});
      CHECK(std::abs(x_grad[p] - fd) / denom < 1e-4);
    }
  }

  SUBCASE("backward without a forward trace is a state error") {
    ForwardTrace stale;
    auto grads = NetworkGradients::zeros_like(net);
    const std::vector<double> up = {1.0, 0.0, 0.0};
    CHECK_THROWS_AS(net.backward(stale, up, grads), std::logic_error);
  }
}

TEST_CASE("initialization starts near the plain SiLU blend") {
  const SplineGrid grid(5, 3, -2.0, 2.0);
  const std::vector<int> dims = {3, 2};
  KanNetwork net(dims, grid, 99);
  const auto& layer = net.layer(0);
  for (int p = 0; p < 3; ++p) {
    for (int q = 0; q < 2; ++q) {
      const auto e = layer.edge(p, q);
      CHECK(e.w_base == 1.0);
      CHECK(e.w_spline == 1.0);
      CHECK(e.gate == 1.0);
      for (double c : e.spline_coeffs) {
        CHECK(std::abs(c) <= 0.1 / grid.num_basis());
      }
    }
  }
  for (double b : layer.bias()) CHECK(b == 0.0);

  // Same seed, same parameters.
  KanNetwork again(dims, grid, 99);
  for (std::size_t i = 0; i < layer.parameters().size(); ++i) {
    CHECK(layer.parameters()[i] == again.layer(0).parameters()[i]);
  }
}

TEST_CASE("batch forward matches the per-sample path bitwise") {
  const SplineGrid grid(5, 3, -2.0, 2.0);
  const std::vector<int> dims = {4, 6, 3};
  KanNetwork net(dims, grid, 5);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  kanhar::Matrix inputs(33, 4);
  for (double& v : inputs.data) v = dist(rng);

  kanhar::Matrix serial_scores, parallel_scores;
  kanhar::batch_forward(net, inputs, serial_scores, /*parallel=*/false);
  kanhar::batch_forward(net, inputs, parallel_scores, /*parallel=*/true);
  REQUIRE(serial_scores.rows == 33);
  REQUIRE(serial_scores.cols == 3);
  for (std::size_t i = 0; i < inputs.rows; ++i) {
    const auto direct = net.forward(inputs.row_span(i));
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(serial_scores.at(i, j) == direct[j]);
      CHECK(parallel_scores.at(i, j) == direct[j]);
    }
  }
}
