#pragma once

#include <span>
#include <vector>

namespace kanhar {

// Uniform B-spline grid: G intervals over [range_lo, range_hi] with spline
// order K. The knot vector has G + 2K + 1 strictly increasing entries, the
// interior ones uniformly spaced and K extra knots continued at the same
// spacing past each boundary. Such a grid supports exactly G + K basis
// functions whose sum is 1 everywhere on [range_lo, range_hi].
//
// Evaluation points outside the domain are clamped to the nearest boundary.
// Immutable after construction; safe to share across threads.
class SplineGrid {
 public:
  SplineGrid(int grid_size, int order, double range_lo, double range_hi);

  int grid_size() const { return grid_size_; }
  int order() const { return order_; }
  int num_basis() const { return grid_size_ + order_; }
  double range_lo() const { return range_lo_; }
  double range_hi() const { return range_hi_; }
  double spacing() const { return spacing_; }
  std::span<const double> knots() const { return knots_; }

  double clamp(double x) const;

  // Index of the knot span containing clamp(x), in [K, G+K-1]. The basis
  // functions B_{span-K} .. B_{span} are the only ones that can be nonzero.
  int find_span(double x) const;

  // Writes the order+1 possibly nonzero basis values at clamp(x) into `out`
  // (slot j holds B_{span-K+j}). `out` must hold order()+1 doubles.
  void basis_nonzero(double x, int span, std::span<double> out) const;

  // Same but first derivatives. Order-0 grids have zero derivative almost
  // everywhere, so `out` is zero-filled for them.
  void basis_derivative_nonzero(double x, int span, std::span<double> out) const;

 private:
  int grid_size_;
  int order_;
  double range_lo_;
  double range_hi_;
  double spacing_;
  std::vector<double> knots_;
};

// Full basis vector [B_1(x), ..., B_{G+K}(x)] via the Cox-de Boor recursion.
std::vector<double> basis_values(const SplineGrid& grid, double x);

// Full vector of first derivatives dB_i/dx at clamp(x).
std::vector<double> basis_derivatives(const SplineGrid& grid, double x);

// Sum_i coeffs[i] * B_i(x). coeffs.size() must equal grid.num_basis().
double spline_eval(const SplineGrid& grid, std::span<const double> coeffs,
                   double x);

// Sum_i coeffs[i] * dB_i/dx(x); zero where x is clamped would be the caller's
// concern (the value is the one-sided derivative at the boundary).
double spline_derivative(const SplineGrid& grid, std::span<const double> coeffs,
                         double x);

}  // namespace kanhar
