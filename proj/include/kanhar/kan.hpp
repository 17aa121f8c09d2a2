#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "kanhar/matrix.hpp"
#include "kanhar/spline.hpp"

namespace kanhar {

// x * sigmoid(x)
double silu(double x);
double silu_grad(double x);

// One edge's trainable scalars, viewed in place inside the owning layer.
struct EdgeView {
  std::span<const double> spline_coeffs;
  double w_base;
  double w_spline;
  double gate;
};

// gate * (w_base * SiLU(x) + w_spline * Spline(x)); with gate = 1 this is the
// plain SiLU/spline blend.
double edge_activation(const SplineGrid& grid, const EdgeView& edge, double x);

// A KAN layer: d_in * d_out learnable edge activations plus an output bias.
// Every trainable scalar lives in one flat vector laid out as
//   [spline coefficients | w_base | w_spline | gate | bias]
// with edges ordered input-major (edge (p, q) at index p * d_out + q) and the
// coefficients of one edge contiguous. The flat size always equals
// (d_in * d_out) * (G + K + 3) + d_out.
class KanLayer {
 public:
  KanLayer(int d_in, int d_out, SplineGrid grid);

  int d_in() const { return d_in_; }
  int d_out() const { return d_out_; }
  const SplineGrid& grid() const { return grid_; }

  // Trainable scalar count by the closed-form law; always equals
  // parameters().size().
  std::size_t parameter_count() const;
  static std::size_t parameter_count(int d_in, int d_out, int grid_size,
                                     int order);

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  // Near-SiLU start: small random spline coefficients, unit base/spline
  // weights and gates, zero bias.
  void init_parameters(std::mt19937_64& rng);

  EdgeView edge(int p, int q) const;
  std::span<double> spline_coeffs(int p, int q);
  std::span<const double> spline_coeffs(int p, int q) const;
  double& w_base(int p, int q);
  double& w_spline(int p, int q);
  double& gate(int p, int q);
  std::span<double> bias();
  std::span<const double> bias() const;

  // y_q = bias_q + sum_p edge_activation(edge(p, q), x_p). x.size() must be
  // d_in, y.size() d_out.
  void forward(std::span<const double> x, std::span<double> y) const;

  // Accumulates (+=) parameter gradients of <upstream, forward(x)> into
  // `param_grads` (same layout and size as parameters()). When `x_grad` is
  // non-empty it is *assigned* the gradient with respect to x. Inputs that
  // were clamped by the grid contribute no spline term to x_grad.
  void backward(std::span<const double> x, std::span<const double> upstream,
                std::span<double> param_grads, std::span<double> x_grad) const;

 private:
  std::size_t edge_index(int p, int q) const {
    return static_cast<std::size_t>(p) * static_cast<std::size_t>(d_out_) +
           static_cast<std::size_t>(q);
  }
  std::size_t coeff_offset(int p, int q) const {
    return edge_index(p, q) * static_cast<std::size_t>(grid_.num_basis());
  }
  std::size_t w_base_offset() const;
  std::size_t w_spline_offset() const;
  std::size_t gate_offset() const;
  std::size_t bias_offset() const;

  int d_in_;
  int d_out_;
  SplineGrid grid_;
  std::vector<double> params_;
};

// Cached activations from one traced forward pass, consumed by backward.
struct ForwardTrace {
  std::vector<std::vector<double>> layer_inputs;
  std::vector<double> output;
  bool valid = false;
};

class KanNetwork;

// Per-layer gradient buffers mirroring each layer's parameter layout.
struct NetworkGradients {
  std::vector<std::vector<double>> by_layer;

  static NetworkGradients zeros_like(const KanNetwork& net);
  void zero();
  void add(const NetworkGradients& other);
  void scale(double factor);
  std::size_t scalar_count() const;
};

// Stacked KAN layers; layer l maps dims[l] -> dims[l+1]. The same grid
// configuration is shared by every layer and the output is raw class scores
// (no softmax). Forward passes on a fixed parameter set are thread-safe.
class KanNetwork {
 public:
  KanNetwork(std::span<const int> dims, const SplineGrid& grid,
             std::uint64_t seed);

  int input_dim() const { return layers_.front().d_in(); }
  int output_dim() const { return layers_.back().d_out(); }
  std::size_t num_layers() const { return layers_.size(); }
  KanLayer& layer(std::size_t l) { return layers_[l]; }
  const KanLayer& layer(std::size_t l) const { return layers_[l]; }
  std::uint64_t seed() const { return seed_; }

  std::size_t parameter_count() const;

  std::vector<double> forward(std::span<const double> x) const;
  void forward_traced(std::span<const double> x, ForwardTrace& trace) const;

  // Accumulates gradients of <upstream, forward(x)> into `grads`. Requires a
  // trace produced by forward_traced on this network. `input_grad`, when
  // non-null, receives d<upstream, y>/dx.
  void backward(const ForwardTrace& trace, std::span<const double> upstream,
                NetworkGradients& grads,
                std::vector<double>* input_grad = nullptr) const;

 private:
  std::vector<KanLayer> layers_;
  std::uint64_t seed_;
};

// Row-wise network forward over a batch; scores is resized to
// inputs.rows x output_dim. Rows are independent, so the parallel path is
// bitwise identical to the serial one.
void batch_forward(const KanNetwork& net, const Matrix& inputs, Matrix& scores,
                   bool parallel = true);

}  // namespace kanhar
