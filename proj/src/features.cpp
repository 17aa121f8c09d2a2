#include "kanhar/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace kanhar {

namespace {

constexpr int kEntropyBins = 16;

const std::array<std::string, kFeaturesPerAxis> kPerAxisNames = {
    "mav",  "std",   "skew",      "kurt",  "entropy", "rms",
    "max_abs", "p2p", "crest", "clearance", "shape",   "impulse"};

std::array<std::string, kFeatureDim> build_names() {
  const std::array<std::string, kAxes> axis = {"x", "y", "z"};
  std::array<std::string, kFeatureDim> out;
  for (int a = 0; a < kAxes; ++a) {
    for (int f = 0; f < kFeaturesPerAxis; ++f) {
      out[static_cast<std::size_t>(a * kFeaturesPerAxis + f)] =
          axis[static_cast<std::size_t>(a)] + "_" +
          kPerAxisNames[static_cast<std::size_t>(f)];
    }
  }
  return out;
}

}  // namespace

std::span<const std::string> feature_names() {
  static const std::array<std::string, kFeatureDim> names = build_names();
  return names;
}

std::array<double, kFeaturesPerAxis> axis_features(
    std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) {
    throw std::invalid_argument("axis_features: need at least 2 samples, got " +
                                std::to_string(n));
  }
  double mn = samples[0];
  double mx = samples[0];
  for (double s : samples) {
    if (!std::isfinite(s)) {
      throw std::invalid_argument("axis_features: non-finite sample");
    }
    mn = std::min(mn, s);
    mx = std::max(mx, s);
  }
  const double dn = static_cast<double>(n);

  if (mx == mn) {
    // Constant window: take the exact limiting values instead of letting
    // rounding in the running sums leak into skew/kurt/entropy.
    const double c = std::abs(mn);
    const double ratio = (mn == 0.0) ? 0.0 : 1.0;
    return {c, 0.0, 0.0, 0.0, 0.0, c, c, 0.0, ratio, c, ratio, ratio};
  }

  double sum = 0.0;
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  double sqrt_sum = 0.0;
  double max_abs = 0.0;
  for (double s : samples) {
    sum += s;
    abs_sum += std::abs(s);
    sq_sum += s * s;
    sqrt_sum += std::sqrt(std::abs(s));
    max_abs = std::max(max_abs, std::abs(s));
  }
  const double mean = sum / dn;
  const double mav = abs_sum / dn;
  const double rms = std::sqrt(sq_sum / dn);
  const double mean_sqrt = sqrt_sum / dn;
  const double clearance = mean_sqrt * mean_sqrt;
  const double p2p = mx - mn;

  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  for (double s : samples) {
    const double d = s - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= dn;
  m3 /= dn;
  m4 /= dn;
  const double sigma = std::sqrt(m2);
  const double skew = sigma > 0.0 ? m3 / (sigma * sigma * sigma) : 0.0;
  const double kurt = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;

  std::array<std::int64_t, kEntropyBins> counts{};
  for (double s : samples) {
    int b = static_cast<int>(std::floor((s - mn) / p2p * kEntropyBins));
    b = std::min(std::max(b, 0), kEntropyBins - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  double entropy = 0.0;
  for (std::int64_t c : counts) {
    if (c > 0) {
      const double p = static_cast<double>(c) / dn;
      entropy -= p * std::log(p);
    }
  }

  const double crest = max_abs / rms;
  const double shape = rms / mav;
  const double impulse = max_abs / mav;

  return {mav, sigma,    skew,  kurt,  entropy, rms,
          max_abs, p2p, crest, clearance, shape, impulse};
}

FeatureVector extract_features(const SignalWindow& window) {
  const std::size_t n = window.length();
  for (const auto& axis : window.axes) {
    if (axis.size() != n) {
      throw std::invalid_argument("extract_features: ragged axes");
    }
  }
  FeatureVector out;
  out.subject_id = window.subject_id;
  out.activity = window.activity;
  for (int a = 0; a < kAxes; ++a) {
    const auto f = axis_features(window.axes[static_cast<std::size_t>(a)]);
    for (int j = 0; j < kFeaturesPerAxis; ++j) {
      out.values[static_cast<std::size_t>(a * kFeaturesPerAxis + j)] =
          f[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

std::vector<FeatureVector> extract_features_batch(
    std::span<const SignalWindow> windows, bool parallel) {
  std::vector<FeatureVector> out(windows.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(windows.size()); ++i) {
    out[static_cast<std::size_t>(i)] =
        extract_features(windows[static_cast<std::size_t>(i)]);
  }
  return out;
}

Standardizer fit_standardizer(const Matrix& columns) {
  if (columns.rows == 0) {
    throw std::invalid_argument("fit_standardizer: empty training set");
  }
  Standardizer s;
  s.mean.assign(columns.cols, 0.0);
  s.std_dev.assign(columns.cols, 1.0);
  const double m = static_cast<double>(columns.rows);
  for (std::size_t j = 0; j < columns.cols; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < columns.rows; ++i) sum += columns.at(i, j);
    const double mu = sum / m;
    double var = 0.0;
    for (std::size_t i = 0; i < columns.rows; ++i) {
      const double d = columns.at(i, j) - mu;
      var += d * d;
    }
    var /= m;
    const double sd = std::sqrt(var);
    s.mean[j] = mu;
    s.std_dev[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Standardizer fit_standardizer(std::span<const FeatureVector> train_features) {
  Matrix m(train_features.size(), kFeatureDim);
  for (std::size_t i = 0; i < train_features.size(); ++i) {
    for (std::size_t j = 0; j < kFeatureDim; ++j) {
      m.at(i, j) = train_features[i].values[j];
    }
  }
  return fit_standardizer(m);
}

FeatureVector apply_standardizer(const Standardizer& s, const FeatureVector& f) {
  if (s.dim() != kFeatureDim) {
    throw std::invalid_argument("apply_standardizer: dimension mismatch");
  }
  FeatureVector out = f;
  for (std::size_t j = 0; j < kFeatureDim; ++j) {
    out.values[j] = (f.values[j] - s.mean[j]) / s.std_dev[j];
  }
  return out;
}

void apply_standardizer(const Standardizer& s, Matrix& columns) {
  if (s.dim() != columns.cols) {
    throw std::invalid_argument("apply_standardizer: dimension mismatch");
  }
  for (std::size_t i = 0; i < columns.rows; ++i) {
    for (std::size_t j = 0; j < columns.cols; ++j) {
      columns.at(i, j) = (columns.at(i, j) - s.mean[j]) / s.std_dev[j];
    }
  }
}

}  // namespace kanhar
