#include "kanhar/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "kanhar/table.hpp"

namespace kanhar {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v[i];
  }
  return os.str();
}

std::string join_strings(const std::vector<std::string>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v[i];
  }
  return os.str();
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value, got '" + stripped +
                                  "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key");
    }
    cfg.values_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

void KeyValueConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("override must be key=value, got '" +
                                assignment + "'");
  }
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty()) {
    throw std::invalid_argument("override has empty key: '" + assignment + "'");
  }
  values_[key] = value;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

long KeyValueConfig::get_long(const std::string& key, long fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return parse_long(it->second, "config key '" + key + "'");
}

double KeyValueConfig::get_double(const std::string& key,
                                  double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return parse_double(it->second, "config key '" + key + "'");
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config key '" + key + "': not a boolean: '" +
                              v + "'");
}

std::vector<int> KeyValueConfig::get_int_list(
    const std::string& key, const std::vector<int>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int> out;
  for (const auto field : split_fields(it->second, ',')) {
    const std::string token = trim(field);
    if (token.empty()) continue;
    const auto dash = token.find('-', 1);  // allow leading minus sign
    if (dash != std::string::npos) {
      const long lo = parse_long(token.substr(0, dash), "config key '" + key + "'");
      const long hi = parse_long(token.substr(dash + 1), "config key '" + key + "'");
      if (hi < lo) {
        throw std::invalid_argument("config key '" + key + "': bad range '" +
                                    token + "'");
      }
      for (long v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
    } else {
      out.push_back(static_cast<int>(parse_long(token, "config key '" + key + "'")));
    }
  }
  return out;
}

std::vector<std::string> KeyValueConfig::get_string_list(
    const std::string& key, const std::vector<std::string>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<std::string> out;
  for (const auto field : split_fields(it->second, ',')) {
    const std::string token = trim(field);
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

std::string KeyValueConfig::serialize() const {
  std::ostringstream os;
  for (const auto& [key, value] : values_) {
    os << key << " = " << value << '\n';
  }
  return os.str();
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "dataset.root",          "dataset.delimiter",
      "dataset.channels",      "dataset.sample_rate",
      "window.length",         "window.stride",
      "split.train_subjects",  "split.test_subjects",
      "net.hidden",            "net.classes",
      "grid.size",             "grid.order",
      "grid.lo",               "grid.hi",
      "train.pretrain_epochs", "train.finetune_epochs",
      "train.batch_size",      "train.lr_pretrain",
      "train.lr_finetune",     "train.weight_decay",
      "train.beta1",           "train.beta2",
      "train.epsilon",         "train.shuffle",
      "synth.classes",         "synth.windows_per_class",
      "synth.subjects",        "synth.noise_std",
      "synth.window_len",      "seed",
      "out.dir",
  };
  return keys;
}

}  // namespace

PipelineConfig PipelineConfig::from_kv(const KeyValueConfig& kv) {
  for (const auto& [key, value] : kv.values()) {
    if (known_keys().count(key) == 0) {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  PipelineConfig cfg;
  cfg.dataset_root = kv.get_string("dataset.root", cfg.dataset_root);
  const std::string delim = kv.get_string("dataset.delimiter", ",");
  if (delim.size() != 1) {
    throw std::invalid_argument("dataset.delimiter must be one character");
  }
  cfg.channels.delimiter = delim[0];
  const auto channels = kv.get_string_list(
      "dataset.channels", {cfg.channels.columns.begin(), cfg.channels.columns.end()});
  if (channels.size() != kAxes) {
    throw std::invalid_argument("dataset.channels must name exactly 3 columns");
  }
  std::copy(channels.begin(), channels.end(), cfg.channels.columns.begin());
  cfg.channels.sample_rate =
      kv.get_double("dataset.sample_rate", cfg.channels.sample_rate);

  cfg.window_len = static_cast<int>(kv.get_long("window.length", cfg.window_len));
  cfg.stride = static_cast<int>(kv.get_long("window.stride", cfg.stride));

  const auto train_subjects = kv.get_int_list(
      "split.train_subjects",
      {cfg.split.train_subjects.begin(), cfg.split.train_subjects.end()});
  const auto test_subjects = kv.get_int_list(
      "split.test_subjects",
      {cfg.split.test_subjects.begin(), cfg.split.test_subjects.end()});
  cfg.split.train_subjects = {train_subjects.begin(), train_subjects.end()};
  cfg.split.test_subjects = {test_subjects.begin(), test_subjects.end()};

  cfg.hidden = kv.get_int_list("net.hidden", cfg.hidden);
  cfg.num_classes = static_cast<int>(kv.get_long("net.classes", cfg.num_classes));
  cfg.grid_size = static_cast<int>(kv.get_long("grid.size", cfg.grid_size));
  cfg.spline_order = static_cast<int>(kv.get_long("grid.order", cfg.spline_order));
  cfg.grid_lo = kv.get_double("grid.lo", cfg.grid_lo);
  cfg.grid_hi = kv.get_double("grid.hi", cfg.grid_hi);

  cfg.train.pretrain_epochs = static_cast<int>(
      kv.get_long("train.pretrain_epochs", cfg.train.pretrain_epochs));
  cfg.train.finetune_epochs = static_cast<int>(
      kv.get_long("train.finetune_epochs", cfg.train.finetune_epochs));
  cfg.train.batch_size =
      static_cast<int>(kv.get_long("train.batch_size", cfg.train.batch_size));
  cfg.train.lr_pretrain = kv.get_double("train.lr_pretrain", cfg.train.lr_pretrain);
  cfg.train.lr_finetune = kv.get_double("train.lr_finetune", cfg.train.lr_finetune);
  cfg.train.weight_decay =
      kv.get_double("train.weight_decay", cfg.train.weight_decay);
  cfg.train.beta1 = kv.get_double("train.beta1", cfg.train.beta1);
  cfg.train.beta2 = kv.get_double("train.beta2", cfg.train.beta2);
  cfg.train.epsilon = kv.get_double("train.epsilon", cfg.train.epsilon);
  cfg.train.shuffle = kv.get_bool("train.shuffle", cfg.train.shuffle);

  cfg.synth.class_count =
      static_cast<int>(kv.get_long("synth.classes", cfg.synth.class_count));
  cfg.synth.windows_per_class = static_cast<int>(
      kv.get_long("synth.windows_per_class", cfg.synth.windows_per_class));
  cfg.synth.subjects = kv.get_int_list("synth.subjects", cfg.synth.subjects);
  cfg.synth.noise_std = kv.get_double("synth.noise_std", cfg.synth.noise_std);
  cfg.synth.window_len =
      static_cast<int>(kv.get_long("synth.window_len", cfg.window_len));
  cfg.synth.sample_rate = cfg.channels.sample_rate;

  cfg.seed = static_cast<std::uint64_t>(kv.get_long("seed", static_cast<long>(cfg.seed)));
  cfg.train.seed = cfg.seed;
  cfg.synth.seed = cfg.seed;
  cfg.out_dir = kv.get_string("out.dir", cfg.out_dir);
  return cfg;
}

KeyValueConfig PipelineConfig::to_kv() const {
  KeyValueConfig kv;
  kv.set("dataset.root", dataset_root);
  kv.set("dataset.delimiter", std::string(1, channels.delimiter));
  kv.set("dataset.channels",
         join_strings({channels.columns.begin(), channels.columns.end()}));
  kv.set("dataset.sample_rate", std::to_string(channels.sample_rate));
  kv.set("window.length", std::to_string(window_len));
  kv.set("window.stride", std::to_string(stride));
  kv.set("split.train_subjects",
         join_ints({split.train_subjects.begin(), split.train_subjects.end()}));
  kv.set("split.test_subjects",
         join_ints({split.test_subjects.begin(), split.test_subjects.end()}));
  kv.set("net.hidden", join_ints(hidden));
  kv.set("net.classes", std::to_string(num_classes));
  kv.set("grid.size", std::to_string(grid_size));
  kv.set("grid.order", std::to_string(spline_order));
  kv.set("grid.lo", std::to_string(grid_lo));
  kv.set("grid.hi", std::to_string(grid_hi));
  kv.set("train.pretrain_epochs", std::to_string(train.pretrain_epochs));
  kv.set("train.finetune_epochs", std::to_string(train.finetune_epochs));
  kv.set("train.batch_size", std::to_string(train.batch_size));
  kv.set("train.lr_pretrain", std::to_string(train.lr_pretrain));
  kv.set("train.lr_finetune", std::to_string(train.lr_finetune));
  kv.set("train.weight_decay", std::to_string(train.weight_decay));
  kv.set("train.beta1", std::to_string(train.beta1));
  kv.set("train.beta2", std::to_string(train.beta2));
  kv.set("train.epsilon", std::to_string(train.epsilon));
  kv.set("train.shuffle", train.shuffle ? "true" : "false");
  kv.set("synth.classes", std::to_string(synth.class_count));
  kv.set("synth.windows_per_class", std::to_string(synth.windows_per_class));
  kv.set("synth.subjects", join_ints(synth.subjects));
  kv.set("synth.noise_std", std::to_string(synth.noise_std));
  kv.set("synth.window_len", std::to_string(synth.window_len));
  kv.set("seed", std::to_string(seed));
  kv.set("out.dir", out_dir);
  return kv;
}

std::vector<int> PipelineConfig::network_dims(int input_dim) const {
  std::vector<int> dims;
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(num_classes);
  return dims;
}

SplineGrid PipelineConfig::make_grid() const {
  return SplineGrid(grid_size, spline_order, grid_lo, grid_hi);
}

}  // namespace kanhar
