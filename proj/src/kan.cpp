#include "kanhar/kan.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kanhar {

double silu(double x) { return x / (1.0 + std::exp(-x)); }

double silu_grad(double x) {
  const double s = 1.0 / (1.0 + std::exp(-x));
  return s * (1.0 + x * (1.0 - s));
}

double edge_activation(const SplineGrid& grid, const EdgeView& edge, double x) {
  return edge.gate * (edge.w_base * silu(x) +
                      edge.w_spline * spline_eval(grid, edge.spline_coeffs, x));
}

KanLayer::KanLayer(int d_in, int d_out, SplineGrid grid)
    : d_in_(d_in), d_out_(d_out), grid_(std::move(grid)) {
  if (d_in < 1 || d_out < 1) {
    throw std::invalid_argument("KanLayer: dimensions must be positive");
  }
  params_.assign(parameter_count(), 0.0);
}

std::size_t KanLayer::parameter_count(int d_in, int d_out, int grid_size,
                                      int order) {
  return static_cast<std::size_t>(d_in) * static_cast<std::size_t>(d_out) *
             static_cast<std::size_t>(grid_size + order + 3) +
         static_cast<std::size_t>(d_out);
}

std::size_t KanLayer::parameter_count() const {
  return parameter_count(d_in_, d_out_, grid_.grid_size(), grid_.order());
}

std::size_t KanLayer::w_base_offset() const {
  return static_cast<std::size_t>(d_in_) * static_cast<std::size_t>(d_out_) *
         static_cast<std::size_t>(grid_.num_basis());
}
std::size_t KanLayer::w_spline_offset() const {
  return w_base_offset() +
         static_cast<std::size_t>(d_in_) * static_cast<std::size_t>(d_out_);
}
std::size_t KanLayer::gate_offset() const {
  return w_spline_offset() +
         static_cast<std::size_t>(d_in_) * static_cast<std::size_t>(d_out_);
}
std::size_t KanLayer::bias_offset() const {
  return gate_offset() +
         static_cast<std::size_t>(d_in_) * static_cast<std::size_t>(d_out_);
}

void KanLayer::init_parameters(std::mt19937_64& rng) {
  const double span = 0.1 / grid_.num_basis();
  std::uniform_real_distribution<double> coeff_dist(-span, span);
  const std::size_t n_coeffs = w_base_offset();
  for (std::size_t i = 0; i < n_coeffs; ++i) params_[i] = coeff_dist(rng);
  const std::size_t edges =
      static_cast<std::size_t>(d_in_) * static_cast<std::size_t>(d_out_);
  for (std::size_t e = 0; e < edges; ++e) {
    params_[w_base_offset() + e] = 1.0;
    params_[w_spline_offset() + e] = 1.0;
    params_[gate_offset() + e] = 1.0;
  }
  for (std::size_t q = 0; q < static_cast<std::size_t>(d_out_); ++q) {
    params_[bias_offset() + q] = 0.0;
  }
}

EdgeView KanLayer::edge(int p, int q) const {
  const std::size_t e = edge_index(p, q);
  return EdgeView{
      std::span<const double>(params_.data() + coeff_offset(p, q),
                              static_cast<std::size_t>(grid_.num_basis())),
      params_[w_base_offset() + e], params_[w_spline_offset() + e],
      params_[gate_offset() + e]};
}

std::span<double> KanLayer::spline_coeffs(int p, int q) {
  return {params_.data() + coeff_offset(p, q),
          static_cast<std::size_t>(grid_.num_basis())};
}
std::span<const double> KanLayer::spline_coeffs(int p, int q) const {
  return {params_.data() + coeff_offset(p, q),
          static_cast<std::size_t>(grid_.num_basis())};
}
double& KanLayer::w_base(int p, int q) {
  return params_[w_base_offset() + edge_index(p, q)];
}
double& KanLayer::w_spline(int p, int q) {
  return params_[w_spline_offset() + edge_index(p, q)];
}
double& KanLayer::gate(int p, int q) {
  return params_[gate_offset() + edge_index(p, q)];
}
std::span<double> KanLayer::bias() {
  return {params_.data() + bias_offset(), static_cast<std::size_t>(d_out_)};
}
std::span<const double> KanLayer::bias() const {
  return {params_.data() + bias_offset(), static_cast<std::size_t>(d_out_)};
}

void KanLayer::forward(std::span<const double> x, std::span<double> y) const {
  if (static_cast<int>(x.size()) != d_in_) {
    throw std::invalid_argument("KanLayer::forward: input size " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(d_in_));
  }
  if (static_cast<int>(y.size()) != d_out_) {
    throw std::invalid_argument("KanLayer::forward: output size mismatch");
  }
  const int k = grid_.order();
  const int nb = grid_.num_basis();
  for (int q = 0; q < d_out_; ++q) y[static_cast<std::size_t>(q)] = params_[bias_offset() + static_cast<std::size_t>(q)];

  std::vector<double> bv(static_cast<std::size_t>(k) + 1);
  const double* wb = params_.data() + w_base_offset();
  const double* ws = params_.data() + w_spline_offset();
  const double* gt = params_.data() + gate_offset();
  for (int p = 0; p < d_in_; ++p) {
    const double xp = x[static_cast<std::size_t>(p)];
    const double s = silu(xp);
    const int span = grid_.find_span(xp);
    grid_.basis_nonzero(xp, span, bv);
    const int base = span - k;
    const double* coeff_row =
        params_.data() + static_cast<std::size_t>(p) *
                             static_cast<std::size_t>(d_out_) *
                             static_cast<std::size_t>(nb);
    const std::size_t erow = static_cast<std::size_t>(p) * static_cast<std::size_t>(d_out_);
    for (int q = 0; q < d_out_; ++q) {
      const double* c = coeff_row + static_cast<std::size_t>(q) * static_cast<std::size_t>(nb);
      double spline = 0.0;
      for (int m = 0; m <= k; ++m) {
        spline += c[base + m] * bv[static_cast<std::size_t>(m)];
      }
      const std::size_t e = erow + static_cast<std::size_t>(q);
      y[static_cast<std::size_t>(q)] += gt[e] * (wb[e] * s + ws[e] * spline);
    }
  }
}

void KanLayer::backward(std::span<const double> x,
                        std::span<const double> upstream,
                        std::span<double> param_grads,
                        std::span<double> x_grad) const {
  if (static_cast<int>(x.size()) != d_in_ ||
      static_cast<int>(upstream.size()) != d_out_) {
    throw std::invalid_argument("KanLayer::backward: dimension mismatch");
  }
  if (param_grads.size() != params_.size()) {
    throw std::invalid_argument("KanLayer::backward: gradient buffer size");
  }
  const bool want_x = !x_grad.empty();
  if (want_x && static_cast<int>(x_grad.size()) != d_in_) {
    throw std::invalid_argument("KanLayer::backward: x_grad size");
  }

  for (int q = 0; q < d_out_; ++q) {
    param_grads[bias_offset() + static_cast<std::size_t>(q)] +=
        upstream[static_cast<std::size_t>(q)];
  }

  const int k = grid_.order();
  const int nb = grid_.num_basis();
  std::vector<double> bv(static_cast<std::size_t>(k) + 1);
  std::vector<double> dbv(static_cast<std::size_t>(k) + 1);
  const double* wb = params_.data() + w_base_offset();
  const double* ws = params_.data() + w_spline_offset();
  const double* gt = params_.data() + gate_offset();
  double* gwb = param_grads.data() + w_base_offset();
  double* gws = param_grads.data() + w_spline_offset();
  double* ggt = param_grads.data() + gate_offset();

  for (int p = 0; p < d_in_; ++p) {
    const double xp = x[static_cast<std::size_t>(p)];
    const double s = silu(xp);
    const int span = grid_.find_span(xp);
    grid_.basis_nonzero(xp, span, bv);
    // Clamped inputs see a constant spline, so only the SiLU term moves.
    const bool interior = xp >= grid_.range_lo() && xp <= grid_.range_hi();
    double sg = 0.0;
    if (want_x) {
      sg = silu_grad(xp);
      if (interior) grid_.basis_derivative_nonzero(xp, span, dbv);
    }
    const int base = span - k;
    const std::size_t erow =
        static_cast<std::size_t>(p) * static_cast<std::size_t>(d_out_);
    const double* coeff_row = params_.data() + erow * static_cast<std::size_t>(nb);
    double* gcoeff_row = param_grads.data() + erow * static_cast<std::size_t>(nb);
    double x_acc = 0.0;
    for (int q = 0; q < d_out_; ++q) {
      const std::size_t e = erow + static_cast<std::size_t>(q);
      const double* c = coeff_row + static_cast<std::size_t>(q) * static_cast<std::size_t>(nb);
      double* gc = gcoeff_row + static_cast<std::size_t>(q) * static_cast<std::size_t>(nb);
      double spline = 0.0;
      for (int m = 0; m <= k; ++m) {
        spline += c[base + m] * bv[static_cast<std::size_t>(m)];
      }
      const double u = upstream[static_cast<std::size_t>(q)];
      gwb[e] += u * gt[e] * s;
      gws[e] += u * gt[e] * spline;
      ggt[e] += u * (wb[e] * s + ws[e] * spline);
      const double cw = u * gt[e] * ws[e];
      for (int m = 0; m <= k; ++m) {
        gc[base + m] += cw * bv[static_cast<std::size_t>(m)];
      }
      if (want_x) {
        double dspline = 0.0;
        if (interior) {
          for (int m = 0; m <= k; ++m) {
            dspline += c[base + m] * dbv[static_cast<std::size_t>(m)];
          }
        }
        x_acc += u * gt[e] * (wb[e] * sg + ws[e] * dspline);
      }
    }
    if (want_x) x_grad[static_cast<std::size_t>(p)] = x_acc;
  }
}

KanNetwork::KanNetwork(std::span<const int> dims, const SplineGrid& grid,
                       std::uint64_t seed)
    : seed_(seed) {
  if (dims.size() < 2) {
    throw std::invalid_argument("KanNetwork: need at least input and output dims");
  }
  layers_.reserve(dims.size() - 1);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    layers_.emplace_back(dims[l], dims[l + 1], grid);
  }
  std::mt19937_64 rng(seed);
  for (auto& layer : layers_) layer.init_parameters(rng);
}

std::size_t KanNetwork::parameter_count() const {
  std::size_t total = 0;
  for (const auto& layer : layers_) total += layer.parameter_count();
  return total;
}

std::vector<double> KanNetwork::forward(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim()) {
    throw std::invalid_argument("KanNetwork::forward: input size " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(input_dim()));
  }
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  for (const auto& layer : layers_) {
    next.assign(static_cast<std::size_t>(layer.d_out()), 0.0);
    layer.forward(cur, next);
    cur.swap(next);
  }
  return cur;
}

void KanNetwork::forward_traced(std::span<const double> x,
                                ForwardTrace& trace) const {
  if (static_cast<int>(x.size()) != input_dim()) {
    throw std::invalid_argument("KanNetwork::forward_traced: input size mismatch");
  }
  trace.layer_inputs.resize(layers_.size());
  std::vector<double> cur(x.begin(), x.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    trace.layer_inputs[l] = cur;
    std::vector<double> next(static_cast<std::size_t>(layers_[l].d_out()), 0.0);
    layers_[l].forward(cur, next);
    cur.swap(next);
  }
  trace.output = std::move(cur);
  trace.valid = true;
}

void KanNetwork::backward(const ForwardTrace& trace,
                          std::span<const double> upstream,
                          NetworkGradients& grads,
                          std::vector<double>* input_grad) const {
  if (!trace.valid || trace.layer_inputs.size() != layers_.size()) {
    throw std::logic_error(
        "KanNetwork::backward: no matching forward_traced pass");
  }
  if (static_cast<int>(upstream.size()) != output_dim()) {
    throw std::invalid_argument("KanNetwork::backward: upstream size mismatch");
  }
  if (grads.by_layer.size() != layers_.size()) {
    throw std::invalid_argument("KanNetwork::backward: gradient layer count");
  }
  std::vector<double> up(upstream.begin(), upstream.end());
  std::vector<double> down;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const bool need_down = l > 0 || input_grad != nullptr;
    down.assign(need_down ? static_cast<std::size_t>(layers_[l].d_in()) : 0, 0.0);
    layers_[l].backward(trace.layer_inputs[l], up, grads.by_layer[l], down);
    if (need_down) up.swap(down);
  }
  if (input_grad != nullptr) *input_grad = std::move(up);
}

NetworkGradients NetworkGradients::zeros_like(const KanNetwork& net) {
  NetworkGradients g;
  g.by_layer.resize(net.num_layers());
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    g.by_layer[l].assign(net.layer(l).parameters().size(), 0.0);
  }
  return g;
}

void NetworkGradients::zero() {
  for (auto& layer : by_layer) layer.assign(layer.size(), 0.0);
}

void NetworkGradients::add(const NetworkGradients& other) {
  for (std::size_t l = 0; l < by_layer.size(); ++l) {
    for (std::size_t i = 0; i < by_layer[l].size(); ++i) {
      by_layer[l][i] += other.by_layer[l][i];
    }
  }
}

void NetworkGradients::scale(double factor) {
  for (auto& layer : by_layer) {
    for (double& g : layer) g *= factor;
  }
}

std::size_t NetworkGradients::scalar_count() const {
  std::size_t total = 0;
  for (const auto& layer : by_layer) total += layer.size();
  return total;
}

void batch_forward(const KanNetwork& net, const Matrix& inputs, Matrix& scores,
                   bool parallel) {
  scores = Matrix(inputs.rows, static_cast<std::size_t>(net.output_dim()));
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(inputs.rows); ++i) {
    const auto row = inputs.row_span(static_cast<std::size_t>(i));
    const auto y = net.forward(row);
    auto out = scores.row_span(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = y[j];
  }
}

}  // namespace kanhar
