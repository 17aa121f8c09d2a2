#include "kanhar/optim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace kanhar {

namespace {

constexpr std::size_t kGradBlock = 16;

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

LossResult cross_entropy_loss(std::span<const double> scores, int label) {
  const int c = static_cast<int>(scores.size());
  if (label < 0 || label >= c) {
    throw std::invalid_argument("cross_entropy_loss: label " +
                                std::to_string(label) + " out of range 0.." +
                                std::to_string(c - 1));
  }
  std::size_t max_idx = argmax(scores);
  const double m = scores[max_idx];
  // exp(scores[max_idx] - m) contributes exactly 1; feeding the rest through
  // log1p keeps tiny losses accurate.
  double rest = 0.0;
  double denom = 1.0;
  LossResult out;
  out.grad.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i == max_idx) continue;
    const double e = std::exp(scores[i] - m);
    out.grad[i] = e;
    rest += e;
    denom += e;
  }
  out.grad[max_idx] = 1.0;
  for (double& g : out.grad) g /= denom;
  out.grad[static_cast<std::size_t>(label)] -= 1.0;
  out.loss = std::log1p(rest) + (m - scores[static_cast<std::size_t>(label)]);
  return out;
}

Optimizer::Optimizer(OptimizerConfig config, std::size_t scalar_count)
    : config_(config),
      first_moment_(scalar_count, 0.0),
      second_moment_(scalar_count, 0.0) {}

void Optimizer::step(std::span<const ParamGroup> groups) {
  std::size_t total = 0;
  for (const auto& g : groups) {
    if (g.params.size() != g.grads.size()) {
      throw std::invalid_argument("Optimizer::step: param/grad size mismatch");
    }
    total += g.params.size();
  }
  if (total != first_moment_.size()) {
    throw std::invalid_argument("Optimizer::step: scalar count mismatch");
  }
  ++step_count_;
  const double bc1 =
      1.0 - std::pow(config_.beta1, static_cast<double>(step_count_));
  const double bc2 =
      1.0 - std::pow(config_.beta2, static_cast<double>(step_count_));
  const bool decay = config_.kind == OptimizerKind::kAdamW &&
                     config_.weight_decay != 0.0;
  std::size_t off = 0;
  for (const auto& grp : groups) {
    for (std::size_t i = 0; i < grp.params.size(); ++i) {
      double& p = grp.params[i];
      const double g = grp.grads[i];
      if (decay) {
        p -= config_.learning_rate * config_.weight_decay * p;
      }
      double& m = first_moment_[off + i];
      double& v = second_moment_[off + i];
      m = config_.beta1 * m + (1.0 - config_.beta1) * g;
      v = config_.beta2 * v + (1.0 - config_.beta2) * g * g;
      const double m_hat = m / bc1;
      const double v_hat = v / bc2;
      p -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
    off += grp.params.size();
  }
}

void Optimizer::step(KanNetwork& net, const NetworkGradients& grads) {
  std::vector<ParamGroup> groups;
  groups.reserve(net.num_layers());
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    groups.push_back({net.layer(l).parameters(), grads.by_layer[l]});
  }
  step(groups);
}

BatchResult accumulate_batch_gradient(const KanNetwork& net,
                                      const Matrix& features,
                                      std::span<const int> labels,
                                      std::span<const std::size_t> indices,
                                      NetworkGradients& grads, bool parallel) {
  const std::size_t m = indices.size();
  const std::size_t nblocks = (m + kGradBlock - 1) / kGradBlock;
  std::vector<NetworkGradients> block_grads(nblocks);
  std::vector<double> block_loss(nblocks, 0.0);
  std::vector<std::size_t> block_correct(nblocks, 0);

#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(nblocks); ++b) {
    const std::size_t ub = static_cast<std::size_t>(b);
    block_grads[ub] = NetworkGradients::zeros_like(net);
    ForwardTrace trace;
    const std::size_t lo = ub * kGradBlock;
    const std::size_t hi = std::min(lo + kGradBlock, m);
    for (std::size_t i = lo; i < hi; ++i) {
      const std::size_t row = indices[i];
      net.forward_traced(features.row_span(row), trace);
      const int label = labels[row];
      auto lr = cross_entropy_loss(trace.output, label);
      block_loss[ub] += lr.loss;
      if (argmax(trace.output) == static_cast<std::size_t>(label)) {
        ++block_correct[ub];
      }
      net.backward(trace, lr.grad, block_grads[ub]);
    }
  }

  BatchResult result;
  for (std::size_t b = 0; b < nblocks; ++b) {
    grads.add(block_grads[b]);
    result.loss_sum += block_loss[b];
    result.correct += block_correct[b];
  }
  return result;
}

TrainHistory train(KanNetwork& net, const LabeledDataset& data,
                   const TrainConfig& config, bool parallel) {
  data.validate();
  if (data.size() == 0) {
    throw std::invalid_argument("train: empty dataset");
  }
  if (static_cast<int>(data.features.cols) != net.input_dim()) {
    throw std::invalid_argument(
        "train: feature dimension " + std::to_string(data.features.cols) +
        " does not match network input " + std::to_string(net.input_dim()));
  }
  for (int label : data.labels) {
    if (label < 0 || label >= net.output_dim()) {
      throw std::invalid_argument("train: label " + std::to_string(label) +
                                  " outside network output range");
    }
  }
  if (config.batch_size < 1) {
    throw std::invalid_argument("train: batch_size must be >= 1");
  }

  const std::size_t m = data.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);

  TrainHistory history;
  NetworkGradients grads = NetworkGradients::zeros_like(net);

  const auto run_phase = [&](int epochs, const OptimizerConfig& ocfg,
                             const std::string& phase, int epoch_base) {
    Optimizer opt(ocfg, net.parameter_count());
    for (int e = 0; e < epochs; ++e) {
      if (config.shuffle) {
        std::shuffle(order.begin(), order.end(), rng);
      }
      double loss_sum = 0.0;
      std::size_t correct = 0;
      for (std::size_t start = 0; start < m;
           start += static_cast<std::size_t>(config.batch_size)) {
        const std::size_t count = std::min(
            static_cast<std::size_t>(config.batch_size), m - start);
        const std::span<const std::size_t> batch(order.data() + start, count);
        grads.zero();
        const BatchResult res = accumulate_batch_gradient(
            net, data.features, data.labels, batch, grads, parallel);
        grads.scale(1.0 / static_cast<double>(count));
        opt.step(net, grads);
        loss_sum += res.loss_sum;
        correct += res.correct;
      }
      history.push_back({epoch_base + e, phase,
                         loss_sum / static_cast<double>(m),
                         static_cast<double>(correct) / static_cast<double>(m)});
    }
  };

  OptimizerConfig adam;
  adam.kind = OptimizerKind::kAdam;
  adam.learning_rate = config.lr_pretrain;
  adam.beta1 = config.beta1;
  adam.beta2 = config.beta2;
  adam.epsilon = config.epsilon;
  run_phase(config.pretrain_epochs, adam, "pretrain", 0);

  OptimizerConfig adamw = adam;
  adamw.kind = OptimizerKind::kAdamW;
  adamw.learning_rate = config.lr_finetune;
  adamw.weight_decay = config.weight_decay;
  run_phase(config.finetune_epochs, adamw, "finetune", config.pretrain_epochs);

  return history;
}

void write_history(const std::filesystem::path& path,
                   const TrainHistory& history, char delim) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path.string());
  }
  out << "epoch" << delim << "phase" << delim << "mean_loss" << delim
      << "train_accuracy" << '\n';
  out.precision(17);
  for (const auto& e : history) {
    out << e.epoch << delim << e.phase << delim << e.mean_loss << delim
        << e.accuracy << '\n';
  }
}

GradCheckReport grad_check(KanNetwork& net, std::span<const double> sample,
                           int label, double step, double fault_injection) {
  if (step <= 0.0) {
    throw std::invalid_argument("grad_check: step must be positive");
  }
  ForwardTrace trace;
  net.forward_traced(sample, trace);
  auto lr = cross_entropy_loss(trace.output, label);
  NetworkGradients analytic = NetworkGradients::zeros_like(net);
  net.backward(trace, lr.grad, analytic);

  if (fault_injection != 0.0) {
    // Corrupt one bias gradient of the last layer.
    auto& last = analytic.by_layer.back();
    last.back() += fault_injection;
  }

  const auto loss_at = [&](void) {
    const auto scores = net.forward(sample);
    return cross_entropy_loss(scores, label).loss;
  };

  GradCheckReport report;
  double rel_sum = 0.0;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    auto params = net.layer(l).parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double saved = params[i];
      params[i] = saved + step;
      const double up = loss_at();
      params[i] = saved - step;
      const double down = loss_at();
      params[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic.by_layer[l][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
      const double rel = std::abs(a - numeric) / denom;
      rel_sum += rel;
      ++report.checked;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_layer = l;
        report.worst_index = i;
      }
    }
  }
  report.mean_rel_error =
      report.checked > 0 ? rel_sum / static_cast<double>(report.checked) : 0.0;
  return report;
}

}  // namespace kanhar
