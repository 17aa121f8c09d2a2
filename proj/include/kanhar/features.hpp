#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "kanhar/matrix.hpp"

namespace kanhar {

inline constexpr int kAxes = 3;
inline constexpr int kFeaturesPerAxis = 12;
inline constexpr int kFeatureDim = kAxes * kFeaturesPerAxis;

// One fixed-rate tri-axial accelerometer window with its labels.
struct SignalWindow {
  std::array<std::vector<double>, kAxes> axes;
  double sample_rate = 50.0;
  int subject_id = 0;
  int activity = 0;

  std::size_t length() const { return axes[0].size(); }
};

// 36 time-domain features, axis-major: the 12 per-axis statistics of axis x
// first, then y, then z. Per-axis order: mav, std, skew, kurt, entropy, rms,
// max_abs, p2p, crest, clearance, shape, impulse.
struct FeatureVector {
  std::array<double, kFeatureDim> values{};
  int subject_id = 0;
  int activity = 0;
};

// Column names in the fixed export order ("x_mav", ..., "z_impulse").
std::span<const std::string> feature_names();

// The 12 per-axis statistics for one channel. Throws on fewer than 2 samples
// or non-finite input. Constant windows take the documented degenerate
// values (crest/shape/impulse 1 for nonzero constants, 0 for the zero
// signal; skew/kurt/entropy 0).
std::array<double, kFeaturesPerAxis> axis_features(std::span<const double> samples);

FeatureVector extract_features(const SignalWindow& window);

// Windows are independent; rows land in input order either way.
std::vector<FeatureVector> extract_features_batch(
    std::span<const SignalWindow> windows, bool parallel = true);

// Per-column standardization: (x - mean) / std with population std fitted on
// training data only. Zero-variance columns keep std = 1 so they pass
// through centered.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> std_dev;

  std::size_t dim() const { return mean.size(); }
};

Standardizer fit_standardizer(std::span<const FeatureVector> train_features);
Standardizer fit_standardizer(const Matrix& columns);

FeatureVector apply_standardizer(const Standardizer& s, const FeatureVector& f);
void apply_standardizer(const Standardizer& s, Matrix& columns);

}  // namespace kanhar
