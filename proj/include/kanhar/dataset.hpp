#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kanhar/activity.hpp"
#include "kanhar/features.hpp"
#include "kanhar/matrix.hpp"

namespace kanhar {

// One accelerometer trial of one subject.
struct Recording {
  int subject_id = 0;
  Activity activity = Activity::kDownstairs;
  int trial_id = 0;
  std::array<std::vector<double>, kAxes> axes;
  double sample_rate = 50.0;
  std::size_t dropped_rows = 0;
  std::string source_path;

  std::size_t length() const { return axes[0].size(); }
};

// Which columns of the per-trial tables hold the three acceleration channels.
struct ChannelConfig {
  char delimiter = ',';
  std::array<std::string, kAxes> columns = {
      "userAcceleration.x", "userAcceleration.y", "userAcceleration.z"};
  double sample_rate = 50.0;
};

struct LoadStats {
  std::size_t files = 0;
  std::size_t dropped_rows = 0;
  std::vector<std::string> warnings;
};

// Loads a MotionSense-style tree: <root>/<activity>_<trial>/sub_<id>.csv.
// Directory entries are visited in lexicographic order; rows with non-finite
// values in the configured channels are dropped and counted. Unknown activity
// prefixes, missing channels and unreadable files raise errors naming the
// offending path.
std::vector<Recording> load_recordings(const std::filesystem::path& root,
                                       const ChannelConfig& config,
                                       LoadStats* stats = nullptr);

// Sliding windows inside each recording; never crosses recording boundaries
// and drops trailing partial windows. A recording shorter than window_len
// yields no windows.
std::vector<SignalWindow> make_windows(std::span<const Recording> recordings,
                                       int window_len, int stride);

struct SplitConfig {
  std::set<int> train_subjects;
  std::set<int> test_subjects;

  static SplitConfig motionsense_default();  // train {1..19}, test {20..24}
  void validate() const;                     // throws on overlap
};

// Routes windows by subject; windows of subjects in neither set are excluded.
std::pair<std::vector<SignalWindow>, std::vector<SignalWindow>> split_by_subject(
    std::span<const SignalWindow> windows, const SplitConfig& config);

// Synthetic desk-scale stand-in: each class is a distinct two-harmonic
// sinusoid family with additive Gaussian noise, windows round-robined over
// the given subject ids. Same seed, same output, bit for bit.
struct SyntheticConfig {
  int class_count = 6;
  int windows_per_class = 48;
  std::vector<int> subjects = {1, 2, 3, 4, 5, 6, 7, 8};
  int window_len = 128;
  double sample_rate = 50.0;
  double noise_std = 0.05;
  std::uint64_t seed = 42;
};

std::vector<SignalWindow> generate_synthetic(const SyntheticConfig& config);

// Feature matrix plus aligned labels and subject ids.
struct LabeledDataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<int> subjects;

  std::size_t size() const { return labels.size(); }
  void validate() const;
};

LabeledDataset dataset_from_features(std::span<const FeatureVector> features);

// extract_features_batch + dataset assembly in one step.
LabeledDataset featurize(std::span<const SignalWindow> windows,
                         bool parallel = true);

// Delimiter-separated feature matrix with a header row: the 36 feature names
// in fixed order, then subject_id and activity (class name). Values are
// written in shortest-round-trip decimal form, so save/load is lossless.
void write_feature_matrix(const std::filesystem::path& path,
                          const LabeledDataset& data, char delim = ',');
LabeledDataset read_feature_matrix(const std::filesystem::path& path,
                                   char delim = ',');

void write_standardizer(const std::filesystem::path& path,
                        const Standardizer& s, char delim = ',');
Standardizer read_standardizer(const std::filesystem::path& path,
                               char delim = ',');

}  // namespace kanhar
