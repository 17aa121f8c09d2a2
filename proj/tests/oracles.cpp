#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

double bspline_recursive(std::span<const double> knots, int i, int k, double x,
                         double domain_hi) {
  if (k == 0) {
    if (x >= domain_hi) {
      // Closed right end: the interval ending exactly at the domain boundary
      // owns boundary points.
      return (knots[static_cast<std::size_t>(i)] < domain_hi &&
              knots[static_cast<std::size_t>(i + 1)] >= domain_hi &&
              knots[static_cast<std::size_t>(i)] <= x)
                 ? 1.0
                 : 0.0;
    }
    return (knots[static_cast<std::size_t>(i)] <= x &&
            x < knots[static_cast<std::size_t>(i + 1)])
               ? 1.0
               : 0.0;
  }
  const double t_i = knots[static_cast<std::size_t>(i)];
  const double t_ik = knots[static_cast<std::size_t>(i + k)];
  const double t_i1 = knots[static_cast<std::size_t>(i + 1)];
  const double t_ik1 = knots[static_cast<std::size_t>(i + k + 1)];
  double left = 0.0;
  if (t_ik != t_i) {
    left = (x - t_i) / (t_ik - t_i) * bspline_recursive(knots, i, k - 1, x, domain_hi);
  }
  double right = 0.0;
  if (t_ik1 != t_i1) {
    right = (t_ik1 - x) / (t_ik1 - t_i1) *
            bspline_recursive(knots, i + 1, k - 1, x, domain_hi);
  }
  return left + right;
}

std::vector<double> basis_vector(int grid_size, int order, double lo, double hi,
                                 double x) {
  const double h = (hi - lo) / grid_size;
  std::vector<double> knots(static_cast<std::size_t>(grid_size + 2 * order + 1));
  for (int i = 0; i < static_cast<int>(knots.size()); ++i) {
    knots[static_cast<std::size_t>(i)] = lo + (i - order) * h;
  }
  const double xc = std::min(std::max(x, lo), hi);
  std::vector<double> out(static_cast<std::size_t>(grid_size + order));
  for (int i = 0; i < grid_size + order; ++i) {
    out[static_cast<std::size_t>(i)] = bspline_recursive(knots, i, order, xc, hi);
  }
  return out;
}

double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double silu(double x) { return x / (1.0 + std::exp(-x)); }

std::vector<double> layer_forward(int d_in, int d_out, int grid_size, int order,
                                  double lo, double hi,
                                  std::span<const double> coeffs,
                                  std::span<const double> w_base,
                                  std::span<const double> w_spline,
                                  std::span<const double> gate,
                                  std::span<const double> bias,
                                  std::span<const double> x) {
  const int num_basis = grid_size + order;
  std::vector<double> y(static_cast<std::size_t>(d_out));
  for (int q = 0; q < d_out; ++q) {
    double acc = bias[static_cast<std::size_t>(q)];
    for (int p = 0; p < d_in; ++p) {
      const std::size_t e = static_cast<std::size_t>(p * d_out + q);
      const auto basis = basis_vector(grid_size, order, lo, hi,
                                      x[static_cast<std::size_t>(p)]);
      double spline = 0.0;
      for (int i = 0; i < num_basis; ++i) {
        spline += coeffs[e * static_cast<std::size_t>(num_basis) +
                         static_cast<std::size_t>(i)] *
                  basis[static_cast<std::size_t>(i)];
      }
      acc += gate[e] * (w_base[e] * silu(x[static_cast<std::size_t>(p)]) +
                        w_spline[e] * spline);
    }
    y[static_cast<std::size_t>(q)] = acc;
  }
  return y;
}

std::array<double, 12> axis_features(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  double sum = 0.0, abs_sum = 0.0, sq_sum = 0.0, sqrt_sum = 0.0;
  double mn = v[0], mx = v[0], max_abs = 0.0;
  for (double s : v) {
    sum += s;
    abs_sum += std::abs(s);
    sq_sum += s * s;
    sqrt_sum += std::sqrt(std::abs(s));
    mn = std::min(mn, s);
    mx = std::max(mx, s);
    max_abs = std::max(max_abs, std::abs(s));
  }
  const double mean = sum / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double s : v) {
    const double d = s - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const double sigma = std::sqrt(m2);
  const double mav = abs_sum / n;
  const double rms = std::sqrt(sq_sum / n);
  const double p2p = mx - mn;
  const double clearance = (sqrt_sum / n) * (sqrt_sum / n);

  double skew = 0.0, kurt = 0.0;
  if (sigma > 0.0) {
    skew = m3 / (sigma * sigma * sigma);
    kurt = m4 / (m2 * m2) - 3.0;
  }

  double entropy = 0.0;
  if (p2p > 0.0) {
    constexpr int kBins = 16;
    int counts[kBins] = {0};
    for (double s : v) {
      int b = static_cast<int>(std::floor((s - mn) / p2p * kBins));
      b = std::min(std::max(b, 0), kBins - 1);
      ++counts[b];
    }
    for (int c : counts) {
      if (c > 0) {
        const double p = c / n;
        entropy -= p * std::log(p);
      }
    }
  }

  double crest, shape, impulse;
  if (p2p == 0.0) {
    const bool zero = (mx == 0.0 && mn == 0.0);
    crest = shape = impulse = zero ? 0.0 : 1.0;
  } else {
    crest = max_abs / rms;
    shape = rms / mav;
    impulse = max_abs / mav;
  }

  return {mav, sigma, skew, kurt, entropy, rms, max_abs, p2p, crest, clearance,
          shape, impulse};
}

}  // namespace oracle
