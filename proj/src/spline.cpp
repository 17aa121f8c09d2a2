#include "kanhar/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kanhar {

SplineGrid::SplineGrid(int grid_size, int order, double range_lo,
                       double range_hi)
    : grid_size_(grid_size),
      order_(order),
      range_lo_(range_lo),
      range_hi_(range_hi) {
  if (grid_size < 1) {
    throw std::invalid_argument("SplineGrid: grid_size must be >= 1, got " +
                                std::to_string(grid_size));
  }
  if (order < 0) {
    throw std::invalid_argument("SplineGrid: order must be >= 0, got " +
                                std::to_string(order));
  }
  if (!(range_lo < range_hi) || !std::isfinite(range_lo) ||
      !std::isfinite(range_hi)) {
    throw std::invalid_argument("SplineGrid: need range_lo < range_hi");
  }
  spacing_ = (range_hi - range_lo) / grid_size;
  knots_.resize(static_cast<std::size_t>(grid_size + 2 * order + 1));
  for (int i = 0; i < static_cast<int>(knots_.size()); ++i) {
    knots_[static_cast<std::size_t>(i)] = range_lo + (i - order) * spacing_;
  }
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i - 1] < knots_[i])) {
      throw std::invalid_argument("SplineGrid: knots not strictly increasing");
    }
  }
}

double SplineGrid::clamp(double x) const {
  return std::min(std::max(x, range_lo_), range_hi_);
}

int SplineGrid::find_span(double x) const {
  const double xc = clamp(x);
  int cell = static_cast<int>(std::floor((xc - range_lo_) / spacing_));
  cell = std::min(std::max(cell, 0), grid_size_ - 1);
  // Rounding in the division can land one cell off; nudge so that
  // knots[span] <= xc (< knots[span+1] except at the right boundary).
  int span = order_ + cell;
  while (span > order_ && xc < knots_[static_cast<std::size_t>(span)]) --span;
  while (span < order_ + grid_size_ - 1 &&
         xc >= knots_[static_cast<std::size_t>(span + 1)])
    ++span;
  return span;
}

// Triangular Cox-de Boor scheme for the order+1 nonzero values at one span.
static void nonzero_values(std::span<const double> knots, int span, int k,
                           double x, std::span<double> out) {
  out[0] = 1.0;
  std::vector<double> left(static_cast<std::size_t>(k) + 1);
  std::vector<double> right(static_cast<std::size_t>(k) + 1);
  for (int j = 1; j <= k; ++j) {
    left[static_cast<std::size_t>(j)] =
        x - knots[static_cast<std::size_t>(span + 1 - j)];
    right[static_cast<std::size_t>(j)] =
        knots[static_cast<std::size_t>(span + j)] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[static_cast<std::size_t>(r + 1)] +
                           left[static_cast<std::size_t>(j - r)];
      const double temp = out[static_cast<std::size_t>(r)] / denom;
      out[static_cast<std::size_t>(r)] =
          saved + right[static_cast<std::size_t>(r + 1)] * temp;
      saved = left[static_cast<std::size_t>(j - r)] * temp;
    }
    out[static_cast<std::size_t>(j)] = saved;
  }
}

void SplineGrid::basis_nonzero(double x, int span, std::span<double> out) const {
  nonzero_values(knots_, span, order_, clamp(x), out);
}

void SplineGrid::basis_derivative_nonzero(double x, int span,
                                          std::span<double> out) const {
  const int k = order_;
  if (k == 0) {
    out[0] = 0.0;
    return;
  }
  // dB_{i,K}/dx = K * (B_{i,K-1}/(t_{i+K}-t_i) - B_{i+1,K-1}/(t_{i+K+1}-t_{i+1}))
  // where the order K-1 values on this span cover indices span-K+1 .. span.
  const double xc = clamp(x);
  std::vector<double> low(static_cast<std::size_t>(k));
  nonzero_values(knots_, span, k - 1, xc, low);
  for (int m = 0; m <= k; ++m) {
    const int i = span - k + m;
    const double a =
        (m >= 1) ? low[static_cast<std::size_t>(m - 1)] /
                       (knots_[static_cast<std::size_t>(i + k)] -
                        knots_[static_cast<std::size_t>(i)])
                 : 0.0;
    const double b =
        (m <= k - 1) ? low[static_cast<std::size_t>(m)] /
                           (knots_[static_cast<std::size_t>(i + k + 1)] -
                            knots_[static_cast<std::size_t>(i + 1)])
                     : 0.0;
    out[static_cast<std::size_t>(m)] = k * (a - b);
  }
}

std::vector<double> basis_values(const SplineGrid& grid, double x) {
  std::vector<double> full(static_cast<std::size_t>(grid.num_basis()), 0.0);
  const int span = grid.find_span(x);
  std::vector<double> local(static_cast<std::size_t>(grid.order()) + 1);
  grid.basis_nonzero(x, span, local);
  for (int m = 0; m <= grid.order(); ++m) {
    full[static_cast<std::size_t>(span - grid.order() + m)] =
        local[static_cast<std::size_t>(m)];
  }
  return full;
}

std::vector<double> basis_derivatives(const SplineGrid& grid, double x) {
  std::vector<double> full(static_cast<std::size_t>(grid.num_basis()), 0.0);
  const int span = grid.find_span(x);
  std::vector<double> local(static_cast<std::size_t>(grid.order()) + 1);
  grid.basis_derivative_nonzero(x, span, local);
  for (int m = 0; m <= grid.order(); ++m) {
    full[static_cast<std::size_t>(span - grid.order() + m)] =
        local[static_cast<std::size_t>(m)];
  }
  return full;
}

double spline_eval(const SplineGrid& grid, std::span<const double> coeffs,
                   double x) {
  if (static_cast<int>(coeffs.size()) != grid.num_basis()) {
    throw std::invalid_argument(
        "spline_eval: coefficient count " + std::to_string(coeffs.size()) +
        " does not match basis count " + std::to_string(grid.num_basis()));
  }
  const int span = grid.find_span(x);
  double local[16];  // order is small in practice; fall back below if not
  std::vector<double> heap;
  std::span<double> vals;
  if (grid.order() + 1 <= 16) {
    vals = std::span<double>(local, static_cast<std::size_t>(grid.order()) + 1);
  } else {
    heap.resize(static_cast<std::size_t>(grid.order()) + 1);
    vals = heap;
  }
  grid.basis_nonzero(x, span, vals);
  double acc = 0.0;
  for (int m = 0; m <= grid.order(); ++m) {
    acc += coeffs[static_cast<std::size_t>(span - grid.order() + m)] *
           vals[static_cast<std::size_t>(m)];
  }
  return acc;
}

double spline_derivative(const SplineGrid& grid, std::span<const double> coeffs,
                         double x) {
  if (static_cast<int>(coeffs.size()) != grid.num_basis()) {
    throw std::invalid_argument("spline_derivative: coefficient count mismatch");
  }
  const int span = grid.find_span(x);
  std::vector<double> vals(static_cast<std::size_t>(grid.order()) + 1);
  grid.basis_derivative_nonzero(x, span, vals);
  double acc = 0.0;
  for (int m = 0; m <= grid.order(); ++m) {
    acc += coeffs[static_cast<std::size_t>(span - grid.order() + m)] *
           vals[static_cast<std::size_t>(m)];
  }
  return acc;
}

}  // namespace kanhar
