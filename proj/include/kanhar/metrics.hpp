#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "kanhar/dataset.hpp"
#include "kanhar/kan.hpp"

namespace kanhar {

// Confusion matrix (rows = true class, columns = predicted) with the derived
// rates. Zero-support or zero-denominator classes score 0.
struct EvalReport {
  std::vector<std::vector<std::int64_t>> confusion;
  std::int64_t total = 0;
  double accuracy = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  std::vector<std::int64_t> support;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;

  std::size_t num_classes() const { return confusion.size(); }
};

// Derives every rate from raw confusion counts.
EvalReport report_from_confusion(
    const std::vector<std::vector<std::int64_t>>& confusion);

// Argmax predictions (lowest index wins ties) against an immutable network.
// The parallel path only fills the per-sample prediction slots, so results
// are independent of the thread count.
EvalReport evaluate(const KanNetwork& net, const LabeledDataset& test_set,
                    bool parallel = true);

// Aligned human-readable confusion table plus a metric summary block.
std::string render_report(const EvalReport& report,
                          std::span<const std::string_view> class_names);

// Machine-readable form: "metric,class,value" rows; confusion cells appear
// as metric=confusion, class=<true>:<predicted>. Lossless round trip.
std::string metrics_csv(const EvalReport& report,
                        std::span<const std::string_view> class_names);
EvalReport parse_metrics_csv(const std::filesystem::path& path);

}  // namespace kanhar
