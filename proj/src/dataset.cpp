#include "kanhar/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "kanhar/table.hpp"

namespace fs = std::filesystem;

namespace kanhar {

namespace {

// Shortest decimal that round-trips a double.
std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct TrialDir {
  Activity activity;
  int trial_id;
  fs::path path;
};

TrialDir parse_trial_dir(const fs::path& dir) {
  const std::string name = dir.filename().string();
  const auto underscore = name.find('_');
  if (underscore == std::string::npos) {
    throw std::runtime_error("load_recordings: directory '" + dir.string() +
                             "' is not <activity>_<trial>");
  }
  const auto activity = activity_from_prefix(name.substr(0, underscore));
  if (!activity) {
    throw std::runtime_error("load_recordings: unknown activity prefix in '" +
                             dir.string() + "'");
  }
  const int trial = static_cast<int>(
      parse_long(name.substr(underscore + 1), "load_recordings: " + dir.string()));
  return {*activity, trial, dir};
}

int parse_subject_file(const fs::path& file) {
  const std::string stem = file.stem().string();
  if (stem.rfind("sub_", 0) != 0) {
    throw std::runtime_error("load_recordings: file '" + file.string() +
                             "' is not sub_<id>");
  }
  return static_cast<int>(
      parse_long(stem.substr(4), "load_recordings: " + file.string()));
}

}  // namespace

std::vector<Recording> load_recordings(const fs::path& root,
                                       const ChannelConfig& config,
                                       LoadStats* stats) {
  if (!fs::exists(root) || !fs::is_directory(root)) {
    throw std::runtime_error("load_recordings: dataset directory not found: " +
                             root.string());
  }
  LoadStats local;
  LoadStats& st = stats ? *stats : local;

  std::vector<fs::path> trial_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) trial_dirs.push_back(entry.path());
  }
  std::sort(trial_dirs.begin(), trial_dirs.end());
  if (trial_dirs.empty()) {
    st.warnings.push_back("no trial directories under " + root.string());
  }

  std::vector<Recording> out;
  for (const auto& dir : trial_dirs) {
    const TrialDir trial = parse_trial_dir(dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      Recording rec;
      rec.subject_id = parse_subject_file(file);
      rec.activity = trial.activity;
      rec.trial_id = trial.trial_id;
      rec.sample_rate = config.sample_rate;
      rec.source_path = file.string();

      std::array<std::size_t, kAxes> col_idx{};
      bool header_checked = false;
      const auto header = for_each_row(
          file, config.delimiter,
          [&](const std::vector<std::string_view>& fields) {
            std::array<double, kAxes> v{};
            bool finite = true;
            for (int a = 0; a < kAxes; ++a) {
              const std::size_t c = col_idx[static_cast<std::size_t>(a)];
              if (c >= fields.size()) {
                throw std::runtime_error("load_recordings: short row in " +
                                         file.string());
              }
              v[static_cast<std::size_t>(a)] =
                  parse_double(fields[c], "load_recordings: " + file.string());
              finite = finite && std::isfinite(v[static_cast<std::size_t>(a)]);
            }
            if (!finite) {
              ++rec.dropped_rows;
              return;
            }
            for (int a = 0; a < kAxes; ++a) {
              rec.axes[static_cast<std::size_t>(a)].push_back(
                  v[static_cast<std::size_t>(a)]);
            }
          },
          // resolve column indices from the header before the first row
          [&](const std::vector<std::string>& hdr) {
            for (int a = 0; a < kAxes; ++a) {
              const auto& name = config.columns[static_cast<std::size_t>(a)];
              const auto it = std::find(hdr.begin(), hdr.end(), name);
              if (it == hdr.end()) {
                throw std::runtime_error("load_recordings: column '" + name +
                                         "' missing in " + file.string());
              }
              col_idx[static_cast<std::size_t>(a)] =
                  static_cast<std::size_t>(it - hdr.begin());
            }
            header_checked = true;
          });
      (void)header;
      (void)header_checked;
      ++st.files;
      st.dropped_rows += rec.dropped_rows;
      if (rec.dropped_rows > 0) {
        st.warnings.push_back(file.string() + ": dropped " +
                              std::to_string(rec.dropped_rows) +
                              " non-finite rows");
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

std::vector<SignalWindow> make_windows(std::span<const Recording> recordings,
                                       int window_len, int stride) {
  if (window_len < 2) {
    throw std::invalid_argument("make_windows: window_len must be >= 2");
  }
  if (stride < 1) {
    throw std::invalid_argument("make_windows: stride must be >= 1");
  }
  std::vector<SignalWindow> out;
  for (const auto& rec : recordings) {
    const std::size_t n = rec.length();
    if (n < static_cast<std::size_t>(window_len)) continue;
    const std::size_t count =
        (n - static_cast<std::size_t>(window_len)) /
            static_cast<std::size_t>(stride) +
        1;
    for (std::size_t w = 0; w < count; ++w) {
      const std::size_t start = w * static_cast<std::size_t>(stride);
      SignalWindow win;
      win.sample_rate = rec.sample_rate;
      win.subject_id = rec.subject_id;
      win.activity = static_cast<int>(rec.activity);
      for (int a = 0; a < kAxes; ++a) {
        const auto& src = rec.axes[static_cast<std::size_t>(a)];
        win.axes[static_cast<std::size_t>(a)].assign(
            src.begin() + static_cast<std::ptrdiff_t>(start),
            src.begin() + static_cast<std::ptrdiff_t>(start) + window_len);
      }
      out.push_back(std::move(win));
    }
  }
  return out;
}

SplitConfig SplitConfig::motionsense_default() {
  SplitConfig c;
  for (int s = 1; s <= 19; ++s) c.train_subjects.insert(s);
  for (int s = 20; s <= 24; ++s) c.test_subjects.insert(s);
  return c;
}

void SplitConfig::validate() const {
  for (int s : train_subjects) {
    if (test_subjects.count(s) > 0) {
      throw std::invalid_argument(
          "SplitConfig: subject " + std::to_string(s) +
          " appears in both train and test sets");
    }
  }
}

std::pair<std::vector<SignalWindow>, std::vector<SignalWindow>> split_by_subject(
    std::span<const SignalWindow> windows, const SplitConfig& config) {
  config.validate();
  std::vector<SignalWindow> train;
  std::vector<SignalWindow> test;
  for (const auto& w : windows) {
    if (config.train_subjects.count(w.subject_id) > 0) {
      train.push_back(w);
    } else if (config.test_subjects.count(w.subject_id) > 0) {
      test.push_back(w);
    }
  }
  return {std::move(train), std::move(test)};
}

std::vector<SignalWindow> generate_synthetic(const SyntheticConfig& config) {
  if (config.class_count < 1 || config.class_count > kNumActivities) {
    throw std::invalid_argument("generate_synthetic: class_count must be 1..6");
  }
  if (config.subjects.empty()) {
    throw std::invalid_argument("generate_synthetic: need at least one subject");
  }
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * M_PI);
  std::normal_distribution<double> noise_dist(0.0, 1.0);

  std::vector<SignalWindow> out;
  out.reserve(static_cast<std::size_t>(config.class_count) *
              static_cast<std::size_t>(config.windows_per_class));
  const double dt = 1.0 / config.sample_rate;
  int counter = 0;
  for (int cls = 0; cls < config.class_count; ++cls) {
    const double freq = 0.8 + 0.6 * cls;
    const double amp = 0.4 + 0.35 * cls;
    for (int w = 0; w < config.windows_per_class; ++w) {
      SignalWindow win;
      win.sample_rate = config.sample_rate;
      win.activity = cls;
      win.subject_id =
          config.subjects[static_cast<std::size_t>(counter) % config.subjects.size()];
      ++counter;
      // Mild per-subject gain so inter-person variability exists without
      // swamping the class signal.
      const double subject_gain = 1.0 + 0.03 * (win.subject_id % 5);
      for (int a = 0; a < kAxes; ++a) {
        const double axis_gain = 0.6 + 0.2 * a;
        const double phase = phase_dist(rng);
        const double phase2 = phase_dist(rng);
        auto& axis = win.axes[static_cast<std::size_t>(a)];
        axis.resize(static_cast<std::size_t>(config.window_len));
        for (int i = 0; i < config.window_len; ++i) {
          const double t = i * dt;
          double v = amp * axis_gain * subject_gain *
                         std::sin(2.0 * M_PI * freq * t + phase) +
                     0.3 * amp * axis_gain *
                         std::sin(4.0 * M_PI * freq * t + phase2);
          if (config.noise_std > 0.0) {
            v += config.noise_std * noise_dist(rng);
          }
          axis[static_cast<std::size_t>(i)] = v;
        }
      }
      out.push_back(std::move(win));
    }
  }
  return out;
}

void LabeledDataset::validate() const {
  if (features.rows != labels.size() || features.rows != subjects.size()) {
    throw std::invalid_argument("LabeledDataset: row counts disagree");
  }
}

LabeledDataset dataset_from_features(std::span<const FeatureVector> features) {
  LabeledDataset ds;
  ds.features = Matrix(features.size(), kFeatureDim);
  ds.labels.resize(features.size());
  ds.subjects.resize(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (std::size_t j = 0; j < kFeatureDim; ++j) {
      ds.features.at(i, j) = features[i].values[j];
    }
    ds.labels[i] = features[i].activity;
    ds.subjects[i] = features[i].subject_id;
  }
  return ds;
}

LabeledDataset featurize(std::span<const SignalWindow> windows, bool parallel) {
  const auto vecs = extract_features_batch(windows, parallel);
  return dataset_from_features(vecs);
}

void write_feature_matrix(const fs::path& path, const LabeledDataset& data,
                          char delim) {
  data.validate();
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path.string());
  }
  const auto names = feature_names();
  for (std::size_t j = 0; j < names.size(); ++j) {
    out << names[j] << delim;
  }
  out << "subject_id" << delim << "activity" << '\n';
  for (std::size_t i = 0; i < data.features.rows; ++i) {
    for (std::size_t j = 0; j < data.features.cols; ++j) {
      out << format_double(data.features.at(i, j)) << delim;
    }
    out << data.subjects[i] << delim
        << activity_name(static_cast<Activity>(data.labels[i])) << '\n';
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

LabeledDataset read_feature_matrix(const fs::path& path, char delim) {
  LabeledDataset ds;
  std::vector<std::array<double, kFeatureDim>> rows;
  std::vector<int> labels;
  std::vector<int> subjects;
  bool header_ok = false;
  for_each_row(
      path, delim,
      [&](const std::vector<std::string_view>& fields) {
        if (fields.size() != kFeatureDim + 2) {
          throw std::runtime_error("read_feature_matrix: bad row width in " +
                                   path.string());
        }
        std::array<double, kFeatureDim> row{};
        for (std::size_t j = 0; j < kFeatureDim; ++j) {
          row[j] = parse_double(fields[j], "read_feature_matrix: " + path.string());
        }
        rows.push_back(row);
        subjects.push_back(static_cast<int>(parse_long(
            fields[kFeatureDim], "read_feature_matrix: " + path.string())));
        const auto act = activity_from_name(fields[kFeatureDim + 1]);
        if (!act) {
          throw std::runtime_error("read_feature_matrix: unknown activity '" +
                                   std::string(fields[kFeatureDim + 1]) +
                                   "' in " + path.string());
        }
        labels.push_back(static_cast<int>(*act));
      },
      [&](const std::vector<std::string>& hdr) {
        const auto names = feature_names();
        if (hdr.size() != names.size() + 2) {
          throw std::runtime_error("read_feature_matrix: bad header in " +
                                   path.string());
        }
        header_ok = true;
      });
  (void)header_ok;
  ds.features = Matrix(rows.size(), kFeatureDim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < kFeatureDim; ++j) {
      ds.features.at(i, j) = rows[i][j];
    }
  }
  ds.labels = std::move(labels);
  ds.subjects = std::move(subjects);
  return ds;
}

void write_standardizer(const fs::path& path, const Standardizer& s,
                        char delim) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path.string());
  }
  out << "column" << delim << "mean" << delim << "std" << '\n';
  const auto names = feature_names();
  for (std::size_t j = 0; j < s.dim(); ++j) {
    const std::string name =
        j < names.size() ? names[j] : "col" + std::to_string(j);
    out << name << delim << format_double(s.mean[j]) << delim
        << format_double(s.std_dev[j]) << '\n';
  }
}

Standardizer read_standardizer(const fs::path& path, char delim) {
  Standardizer s;
  for_each_row(path, delim, [&](const std::vector<std::string_view>& fields) {
    if (fields.size() != 3) {
      throw std::runtime_error("read_standardizer: bad row in " + path.string());
    }
    s.mean.push_back(parse_double(fields[1], "read_standardizer"));
    s.std_dev.push_back(parse_double(fields[2], "read_standardizer"));
  });
  return s;
}

}  // namespace kanhar
