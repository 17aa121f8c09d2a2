#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "kanhar/dataset.hpp"
#include "kanhar/optim.hpp"

namespace kanhar {

// Flat "key = value" document: one pair per line, '#' starts a comment,
// whitespace around keys and values is ignored, later keys win.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig parse_file(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value);

  // Applies "key=value" (as given on the command line).
  void apply_override(const std::string& assignment);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  long get_long(const std::string& key, long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated integers; "a-b" tokens expand to inclusive ranges.
  std::vector<int> get_int_list(const std::string& key,
                                const std::vector<int>& fallback) const;
  std::vector<std::string> get_string_list(
      const std::string& key, const std::vector<std::string>& fallback) const;

  std::string serialize() const;  // sorted keys, reparseable
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Everything one experiment needs, resolved to typed values.
struct PipelineConfig {
  // dataset
  std::string dataset_root = "data/motionsense";
  ChannelConfig channels;
  int window_len = 128;
  int stride = 64;
  SplitConfig split = SplitConfig::motionsense_default();

  // network
  std::vector<int> hidden = {64};
  int num_classes = kNumActivities;
  int grid_size = 5;
  int spline_order = 3;
  double grid_lo = -2.0;
  double grid_hi = 2.0;

  // training
  TrainConfig train;

  // synthetic mode
  SyntheticConfig synth;

  std::uint64_t seed = 42;
  std::string out_dir = "out";

  // Reads recognized keys; rejects unknown ones so typos fail loudly.
  static PipelineConfig from_kv(const KeyValueConfig& kv);
  KeyValueConfig to_kv() const;

  std::vector<int> network_dims(int input_dim) const;
  SplineGrid make_grid() const;
};

}  // namespace kanhar
