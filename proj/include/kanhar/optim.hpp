#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kanhar/dataset.hpp"
#include "kanhar/kan.hpp"

namespace kanhar {

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;  // softmax(scores) - one_hot(label)
};

// Numerically stabilized softmax cross-entropy over raw class scores.
LossResult cross_entropy_loss(std::span<const double> scores, int label);

enum class OptimizerKind { kAdam, kAdamW };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;  // applied only by AdamW, decoupled from moments
};

// Adam / AdamW over parameter groups. Moment accumulators cover the
// concatenation of all groups, so the group list must present the same
// scalars in the same order on every step.
class Optimizer {
 public:
  struct ParamGroup {
    std::span<double> params;
    std::span<const double> grads;
  };

  Optimizer(OptimizerConfig config, std::size_t scalar_count);

  void step(std::span<const ParamGroup> groups);
  void step(KanNetwork& net, const NetworkGradients& grads);

  std::int64_t step_count() const { return step_count_; }
  const OptimizerConfig& config() const { return config_; }

 private:
  OptimizerConfig config_;
  std::int64_t step_count_ = 0;
  std::vector<double> first_moment_;
  std::vector<double> second_moment_;
};

struct TrainConfig {
  int pretrain_epochs = 60;
  int finetune_epochs = 40;
  int batch_size = 64;
  double lr_pretrain = 1e-3;
  double lr_finetune = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 1e-4;
  std::uint64_t seed = 42;
  bool shuffle = true;
};

struct EpochStats {
  int epoch = 0;
  std::string phase;  // "pretrain" or "finetune"
  double mean_loss = 0.0;
  double accuracy = 0.0;
};

using TrainHistory = std::vector<EpochStats>;

struct BatchResult {
  double loss_sum = 0.0;
  std::size_t correct = 0;
};

// Sums per-sample cross-entropy gradients over `indices` into `grads`
// (which must be zeroed, zeros_like(net)). Samples are processed in fixed
// 16-sample blocks whose partial sums are reduced in block order, so the
// result does not depend on the thread count and the parallel path is
// bitwise identical to the serial one.
BatchResult accumulate_batch_gradient(const KanNetwork& net,
                                      const Matrix& features,
                                      std::span<const int> labels,
                                      std::span<const std::size_t> indices,
                                      NetworkGradients& grads,
                                      bool parallel = true);

// Two-phase training: Adam for pretrain_epochs, then AdamW with fresh
// optimizer state for finetune_epochs, same data and objective. Mini-batches
// are drawn with seeded shuffling; the run is a pure function of
// (net, data, config).
TrainHistory train(KanNetwork& net, const LabeledDataset& data,
                   const TrainConfig& config, bool parallel = true);

void write_history(const std::filesystem::path& path,
                   const TrainHistory& history, char delim = ',');

struct GradCheckReport {
  double max_rel_error = 0.0;
  double mean_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t worst_layer = 0;
  std::size_t worst_index = 0;

  bool passed(double tolerance) const { return max_rel_error < tolerance; }
};

// Compares analytic loss gradients against central finite differences for
// every trainable scalar. `fault_injection`, when nonzero, is added to one
// analytic bias gradient so harness failures are detectable.
GradCheckReport grad_check(KanNetwork& net, std::span<const double> sample,
                           int label, double step = 1e-6,
                           double fault_injection = 0.0);

}  // namespace kanhar
