#include <doctest.h>

#include <cmath>
#include <random>

#include "kanhar/spline.hpp"
#include "oracles.hpp"

using kanhar::SplineGrid;

TEST_CASE("grid construction validates its inputs") {
  CHECK_THROWS_AS(SplineGrid(0, 3, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SplineGrid(5, -1, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SplineGrid(5, 3, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SplineGrid(5, 3, 2.0, -2.0), std::invalid_argument);
}

TEST_CASE("knot vector is uniform, extended and strictly increasing") {
  const SplineGrid g(5, 3, -1.0, 1.0);
  const auto knots = g.knots();
  REQUIRE(knots.size() == 5 + 2 * 3 + 1);
  CHECK(g.num_basis() == 8);
  const double h = 2.0 / 5.0;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    CHECK(knots[i] == doctest::Approx(-1.0 + (static_cast<int>(i) - 3) * h)
                          .epsilon(1e-15));
    if (i > 0) CHECK(knots[i - 1] < knots[i]);
  }
}

TEST_CASE("order-0 basis is an interval indicator") {
  const SplineGrid g(4, 0, 0.0, 1.0);
  const auto v = kanhar::basis_values(g, 0.1);
  REQUIRE(v.size() == 4);
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 0.0);
  CHECK(v[2] == 0.0);
  CHECK(v[3] == 0.0);
}

TEST_CASE("cubic basis at the domain center matches the recursive oracle") {
  const SplineGrid g(5, 3, -1.0, 1.0);
  const auto v = kanhar::basis_values(g, 0.0);
  REQUIRE(v.size() == 8);
  // Exact values for the uniform cubic grid: [0,0,1/48,23/48,23/48,1/48,0,0].
  CHECK(v[0] == 0.0);
  CHECK(v[1] == 0.0);
  CHECK(v[2] == doctest::Approx(1.0 / 48.0).epsilon(1e-13));
  CHECK(v[3] == doctest::Approx(23.0 / 48.0).epsilon(1e-13));
  CHECK(v[4] == doctest::Approx(23.0 / 48.0).epsilon(1e-13));
  CHECK(v[5] == doctest::Approx(1.0 / 48.0).epsilon(1e-13));
  CHECK(v[6] == 0.0);
  CHECK(v[7] == 0.0);

  const auto ref = oracle::basis_vector(5, 3, -1.0, 1.0, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(v[i] == doctest::Approx(ref[i]).epsilon(1e-14));
  }
}

TEST_CASE("basis values agree with the oracle across grids and points") {
  std::mt19937_64 rng(1234);
  for (int grid_size : {1, 2, 3, 5, 8}) {
    for (int order : {0, 1, 2, 3}) {
      const SplineGrid g(grid_size, order, -2.0, 2.0);
      std::uniform_real_distribution<double> dist(-2.5, 2.5);  // incl. clamps
      for (int rep = 0; rep < 50; ++rep) {
        const double x = dist(rng);
        const auto got = kanhar::basis_values(g, x);
        const auto want = oracle::basis_vector(grid_size, order, -2.0, 2.0, x);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
          CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("partition of unity, non-negativity and local support") {
  std::mt19937_64 rng(99);
  const SplineGrid g(5, 3, -1.0, 1.0);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double x = dist(rng);
    const auto v = kanhar::basis_values(g, x);
    double sum = 0.0;
    int nonzero = 0;
    for (double b : v) {
      CHECK(b >= 0.0);
      sum += b;
      if (b != 0.0) ++nonzero;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nonzero <= g.order() + 1);
  }
  // Boundary points included.
  for (double x : {-1.0, 1.0}) {
    const auto v = kanhar::basis_values(g, x);
    double sum = 0.0;
    for (double b : v) sum += b;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("derivatives sum to zero and match finite differences") {
  std::mt19937_64 rng(7);
  for (int grid_size : {2, 5, 8}) {
    for (int order : {1, 2, 3}) {
      const SplineGrid g(grid_size, order, -1.0, 1.0);
      std::uniform_real_distribution<double> dist(-0.99, 0.99);
      for (int rep = 0; rep < 40; ++rep) {
        double x = dist(rng);
        // Stay clear of knots so the finite difference does not straddle a
        // continuity breakpoint of low-order splines.
        bool near_knot = false;
        for (double t : g.knots()) {
          if (std::abs(x - t) < 1e-4) near_knot = true;
        }
        if (near_knot) continue;

        const auto d = kanhar::basis_derivatives(g, x);
        double sum = 0.0;
        for (double v : d) sum += v;
        CHECK(std::abs(sum) < 1e-10);

        const auto lo = kanhar::basis_values(g, x - 1e-6);
        const auto hi = kanhar::basis_values(g, x + 1e-6);
        for (std::size_t i = 0; i < d.size(); ++i) {
          const double fd = (hi[i] - lo[i]) / 2e-6;
          const double denom = std::max({std::abs(d[i]), std::abs(fd), 1e-6});
          CHECK(std::abs(d[i] - fd) / denom < 1e-5);
        }
      }
    }
  }
}

TEST_CASE("order-0 derivatives are identically zero") {
  const SplineGrid g(4, 0, 0.0, 1.0);
  for (double x : {0.05, 0.3, 0.77, 0.99}) {
    for (double v : kanhar::basis_derivatives(g, x)) CHECK(v == 0.0);
  }
}

TEST_CASE("spline_eval reduces to partition of unity and dot products") {
  const SplineGrid g(5, 3, -1.0, 1.0);
  const std::vector<double> ones(static_cast<std::size_t>(g.num_basis()), 1.0);
  const std::vector<double> zeros(static_cast<std::size_t>(g.num_basis()), 0.0);
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const double x = dist(rng);
    CHECK(kanhar::spline_eval(g, ones, x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(kanhar::spline_eval(g, zeros, x) == 0.0);
  }

  std::vector<double> coeffs(static_cast<std::size_t>(g.num_basis()));
  for (double& c : coeffs) c = dist(rng);
  const auto basis = oracle::basis_vector(5, 3, -1.0, 1.0, 0.25);
  double want = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) want += coeffs[i] * basis[i];
  CHECK(kanhar::spline_eval(g, coeffs, 0.25) ==
        doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("spline_eval is linear in the coefficients") {
  const SplineGrid g(6, 2, -2.0, 2.0);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> c1(static_cast<std::size_t>(g.num_basis()));
    std::vector<double> c2(c1.size());
    std::vector<double> mix(c1.size());
    const double a = dist(rng);
    const double b = dist(rng);
    for (std::size_t i = 0; i < c1.size(); ++i) {
      c1[i] = dist(rng);
      c2[i] = dist(rng);
      mix[i] = a * c1[i] + b * c2[i];
    }
    const double x = dist(rng) * 2.0;
    const double lhs = kanhar::spline_eval(g, mix, x);
    const double rhs =
        a * kanhar::spline_eval(g, c1, x) + b * kanhar::spline_eval(g, c2, x);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("spline_eval rejects mismatched coefficient lengths") {
  const SplineGrid g(5, 3, -1.0, 1.0);
  const std::vector<double> short_coeffs(3, 1.0);
  CHECK_THROWS_AS(kanhar::spline_eval(g, short_coeffs, 0.0),
                  std::invalid_argument);
}

TEST_CASE("out-of-range inputs clamp to the boundary") {
  const SplineGrid g(5, 3, -1.0, 1.0);
  const auto at_hi = kanhar::basis_values(g, 1.0);
  const auto beyond = kanhar::basis_values(g, 42.0);
  for (std::size_t i = 0; i < at_hi.size(); ++i) {
    CHECK(at_hi[i] == beyond[i]);
  }
  const auto at_lo = kanhar::basis_values(g, -1.0);
  const auto below = kanhar::basis_values(g, -1e9);
  for (std::size_t i = 0; i < at_lo.size(); ++i) {
    CHECK(at_lo[i] == below[i]);
  }
}
