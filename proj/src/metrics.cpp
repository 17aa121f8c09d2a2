#include "kanhar/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "kanhar/table.hpp"

namespace kanhar {

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

EvalReport report_from_confusion(
    const std::vector<std::vector<std::int64_t>>& confusion) {
  const std::size_t c = confusion.size();
  for (const auto& row : confusion) {
    if (row.size() != c) {
      throw std::invalid_argument("report_from_confusion: matrix not square");
    }
  }
  EvalReport r;
  r.confusion = confusion;
  r.precision.assign(c, 0.0);
  r.recall.assign(c, 0.0);
  r.f1.assign(c, 0.0);
  r.support.assign(c, 0);

  std::int64_t trace = 0;
  std::vector<std::int64_t> col_sum(c, 0);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      r.total += confusion[i][j];
      r.support[i] += confusion[i][j];
      col_sum[j] += confusion[i][j];
    }
    trace += confusion[i][i];
  }
  if (r.total > 0) {
    r.accuracy = static_cast<double>(trace) / static_cast<double>(r.total);
  }

  for (std::size_t i = 0; i < c; ++i) {
    const std::int64_t tp = confusion[i][i];
    if (col_sum[i] > 0) {
      r.precision[i] = static_cast<double>(tp) / static_cast<double>(col_sum[i]);
    }
    if (r.support[i] > 0) {
      r.recall[i] = static_cast<double>(tp) / static_cast<double>(r.support[i]);
    }
    if (r.precision[i] + r.recall[i] > 0.0) {
      r.f1[i] = 2.0 * r.precision[i] * r.recall[i] /
                (r.precision[i] + r.recall[i]);
    }
  }

  for (std::size_t i = 0; i < c; ++i) {
    r.macro_precision += r.precision[i];
    r.macro_recall += r.recall[i];
    r.macro_f1 += r.f1[i];
    const double w = static_cast<double>(r.support[i]);
    r.weighted_precision += w * r.precision[i];
    r.weighted_recall += w * r.recall[i];
    r.weighted_f1 += w * r.f1[i];
  }
  if (c > 0) {
    r.macro_precision /= static_cast<double>(c);
    r.macro_recall /= static_cast<double>(c);
    r.macro_f1 /= static_cast<double>(c);
  }
  if (r.total > 0) {
    r.weighted_precision /= static_cast<double>(r.total);
    r.weighted_recall /= static_cast<double>(r.total);
    r.weighted_f1 /= static_cast<double>(r.total);
  }
  return r;
}

EvalReport evaluate(const KanNetwork& net, const LabeledDataset& test_set,
                    bool parallel) {
  test_set.validate();
  if (test_set.size() == 0) {
    throw std::invalid_argument("evaluate: empty test set");
  }
  if (static_cast<int>(test_set.features.cols) != net.input_dim()) {
    throw std::invalid_argument("evaluate: feature dimension mismatch");
  }
  const std::size_t c = static_cast<std::size_t>(net.output_dim());
  for (int label : test_set.labels) {
    if (label < 0 || label >= static_cast<int>(c)) {
      throw std::invalid_argument("evaluate: label outside class range");
    }
  }

  std::vector<int> predicted(test_set.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(test_set.size()); ++i) {
    const auto scores = net.forward(
        test_set.features.row_span(static_cast<std::size_t>(i)));
    int best = 0;
    for (int j = 1; j < static_cast<int>(scores.size()); ++j) {
      if (scores[static_cast<std::size_t>(j)] >
          scores[static_cast<std::size_t>(best)]) {
        best = j;
      }
    }
    predicted[static_cast<std::size_t>(i)] = best;
  }

  std::vector<std::vector<std::int64_t>> confusion(
      c, std::vector<std::int64_t>(c, 0));
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    confusion[static_cast<std::size_t>(test_set.labels[i])]
             [static_cast<std::size_t>(predicted[i])] += 1;
  }
  return report_from_confusion(confusion);
}

std::string render_report(const EvalReport& report,
                          std::span<const std::string_view> class_names) {
  const std::size_t c = report.num_classes();
  if (class_names.size() != c) {
    throw std::invalid_argument("render_report: class name count mismatch");
  }
  std::size_t width = 7;
  for (const auto& name : class_names) width = std::max(width, name.size());
  for (const auto& row : report.confusion) {
    for (std::int64_t v : row) {
      width = std::max(width, std::to_string(v).size());
    }
  }
  const int w = static_cast<int>(width) + 2;

  std::ostringstream os;
  os << "Confusion matrix (rows = true, columns = predicted)\n";
  os << std::setw(w) << "";
  for (const auto& name : class_names) os << std::setw(w) << name;
  os << '\n';
  for (std::size_t i = 0; i < c; ++i) {
    os << std::setw(w) << class_names[i];
    for (std::size_t j = 0; j < c; ++j) {
      os << std::setw(w) << report.confusion[i][j];
    }
    os << '\n';
  }
  os << '\n';
  os << "Samples: " << report.total << '\n';
  os << "Accuracy: " << std::fixed << std::setprecision(4) << report.accuracy
     << '\n';
  os << '\n';
  os << std::setw(w) << "class" << std::setw(12) << "precision" << std::setw(12)
     << "recall" << std::setw(12) << "f1" << std::setw(12) << "support" << '\n';
  for (std::size_t i = 0; i < c; ++i) {
    os << std::setw(w) << class_names[i] << std::setw(12) << report.precision[i]
       << std::setw(12) << report.recall[i] << std::setw(12) << report.f1[i]
       << std::setw(12) << report.support[i] << '\n';
  }
  os << std::setw(w) << "macro" << std::setw(12) << report.macro_precision
     << std::setw(12) << report.macro_recall << std::setw(12) << report.macro_f1
     << std::setw(12) << report.total << '\n';
  os << std::setw(w) << "weighted" << std::setw(12) << report.weighted_precision
     << std::setw(12) << report.weighted_recall << std::setw(12)
     << report.weighted_f1 << std::setw(12) << report.total << '\n';
  return os.str();
}

std::string metrics_csv(const EvalReport& report,
                        std::span<const std::string_view> class_names) {
  const std::size_t c = report.num_classes();
  if (class_names.size() != c) {
    throw std::invalid_argument("metrics_csv: class name count mismatch");
  }
  std::ostringstream os;
  os << "metric,class,value\n";
  os << "accuracy,," << format_double(report.accuracy) << '\n';
  os << "total,," << report.total << '\n';
  for (std::size_t i = 0; i < c; ++i) {
    os << "precision," << class_names[i] << ','
       << format_double(report.precision[i]) << '\n';
    os << "recall," << class_names[i] << ',' << format_double(report.recall[i])
       << '\n';
    os << "f1," << class_names[i] << ',' << format_double(report.f1[i]) << '\n';
    os << "support," << class_names[i] << ',' << report.support[i] << '\n';
  }
  os << "macro_precision,," << format_double(report.macro_precision) << '\n';
  os << "macro_recall,," << format_double(report.macro_recall) << '\n';
  os << "macro_f1,," << format_double(report.macro_f1) << '\n';
  os << "weighted_precision,," << format_double(report.weighted_precision)
     << '\n';
  os << "weighted_recall,," << format_double(report.weighted_recall) << '\n';
  os << "weighted_f1,," << format_double(report.weighted_f1) << '\n';
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      os << "confusion," << class_names[i] << ':' << class_names[j] << ','
         << report.confusion[i][j] << '\n';
    }
  }
  return os.str();
}

EvalReport parse_metrics_csv(const std::filesystem::path& path) {
  // Reconstructs the report from the confusion cells; scalar rows are
  // redundant but validated for presence.
  std::vector<std::string> classes;
  std::vector<std::tuple<std::string, std::string, std::int64_t>> cells;
  bool saw_accuracy = false;
  for_each_row(path, ',', [&](const std::vector<std::string_view>& fields) {
    if (fields.size() != 3) {
      throw std::runtime_error("parse_metrics_csv: bad row in " + path.string());
    }
    const std::string metric(fields[0]);
    const std::string cls(fields[1]);
    if (metric == "accuracy") saw_accuracy = true;
    if (metric == "support") classes.push_back(cls);
    if (metric == "confusion") {
      const auto colon = cls.find(':');
      if (colon == std::string::npos) {
        throw std::runtime_error("parse_metrics_csv: bad confusion key");
      }
      cells.emplace_back(cls.substr(0, colon), cls.substr(colon + 1),
                         parse_long(fields[2], "parse_metrics_csv"));
    }
  });
  if (!saw_accuracy || classes.empty()) {
    throw std::runtime_error("parse_metrics_csv: missing fields in " +
                             path.string());
  }
  const auto index_of = [&](const std::string& name) {
    const auto it = std::find(classes.begin(), classes.end(), name);
    if (it == classes.end()) {
      throw std::runtime_error("parse_metrics_csv: unknown class " + name);
    }
    return static_cast<std::size_t>(it - classes.begin());
  };
  std::vector<std::vector<std::int64_t>> confusion(
      classes.size(), std::vector<std::int64_t>(classes.size(), 0));
  for (const auto& [t, p, v] : cells) {
    confusion[index_of(t)][index_of(p)] = v;
  }
  return report_from_confusion(confusion);
}

}  // namespace kanhar
