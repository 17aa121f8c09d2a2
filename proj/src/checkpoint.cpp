#include "kanhar/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kanhar {

namespace {

constexpr const char* kMagic = "kanhar-checkpoint";
constexpr int kVersion = 1;

std::string hex_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

class TokenReader {
 public:
  explicit TokenReader(const std::filesystem::path& path) : in_(path) {
    if (!in_) {
      throw std::runtime_error("cannot open checkpoint: " + path.string());
    }
    path_ = path.string();
  }

  std::string next() {
    std::string tok;
    if (!(in_ >> tok)) {
      throw std::runtime_error("checkpoint truncated: " + path_);
    }
    return tok;
  }

  void expect(const std::string& want) {
    const std::string got = next();
    if (got != want) {
      throw std::runtime_error("checkpoint " + path_ + ": expected '" + want +
                               "', got '" + got + "'");
    }
  }

  long next_long() {
    const std::string tok = next();
    char* end = nullptr;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0') {
      throw std::runtime_error("checkpoint " + path_ + ": bad integer '" + tok +
                               "'");
    }
    return v;
  }

  unsigned long long next_ull() {
    const std::string tok = next();
    char* end = nullptr;
    const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0') {
      throw std::runtime_error("checkpoint " + path_ + ": bad integer '" + tok +
                               "'");
    }
    return v;
  }

  double next_double() {
    const std::string tok = next();
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') {
      throw std::runtime_error("checkpoint " + path_ + ": bad number '" + tok +
                               "'");
    }
    return v;
  }

 private:
  std::ifstream in_;
  std::string path_;
};

void write_block(std::ostream& out, const char* name,
                 std::span<const double> values) {
  out << name << ' ' << values.size() << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << hex_double(values[i]);
    out << ((i % 8 == 7 || i + 1 == values.size()) ? '\n' : ' ');
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const KanNetwork& net) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write checkpoint: " + path.string());
  }
  out << kMagic << " v" << kVersion << '\n';
  out << "seed " << net.seed() << '\n';
  out << "layers " << net.num_layers() << '\n';
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto& layer = net.layer(l);
    const auto& grid = layer.grid();
    out << "layer " << l << ' ' << layer.d_in() << ' ' << layer.d_out() << '\n';
    out << "grid " << grid.grid_size() << ' ' << grid.order() << ' '
        << hex_double(grid.range_lo()) << ' ' << hex_double(grid.range_hi())
        << '\n';
    const auto params = layer.parameters();
    const std::size_t edges = static_cast<std::size_t>(layer.d_in()) *
                              static_cast<std::size_t>(layer.d_out());
    const std::size_t nb = static_cast<std::size_t>(grid.num_basis());
    std::size_t off = 0;
    write_block(out, "coeffs", params.subspan(off, edges * nb));
    off += edges * nb;
    write_block(out, "w_base", params.subspan(off, edges));
    off += edges;
    write_block(out, "w_spline", params.subspan(off, edges));
    off += edges;
    write_block(out, "gate", params.subspan(off, edges));
    off += edges;
    write_block(out, "bias",
                params.subspan(off, static_cast<std::size_t>(layer.d_out())));
  }
  out << "end\n";
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

KanNetwork load_checkpoint(const std::filesystem::path& path) {
  TokenReader r(path);
  r.expect(kMagic);
  r.expect("v" + std::to_string(kVersion));
  r.expect("seed");
  const std::uint64_t seed = r.next_ull();
  r.expect("layers");
  const long num_layers = r.next_long();
  if (num_layers < 1) {
    throw std::runtime_error("checkpoint " + path.string() + ": no layers");
  }

  struct LayerData {
    int d_in, d_out, grid_size, order;
    double lo, hi;
    std::vector<double> params;
  };
  std::vector<LayerData> layers;
  for (long l = 0; l < num_layers; ++l) {
    r.expect("layer");
    if (r.next_long() != l) {
      throw std::runtime_error("checkpoint " + path.string() +
                               ": layer index out of order");
    }
    LayerData d;
    d.d_in = static_cast<int>(r.next_long());
    d.d_out = static_cast<int>(r.next_long());
    r.expect("grid");
    d.grid_size = static_cast<int>(r.next_long());
    d.order = static_cast<int>(r.next_long());
    d.lo = r.next_double();
    d.hi = r.next_double();
    const std::size_t edges = static_cast<std::size_t>(d.d_in) *
                              static_cast<std::size_t>(d.d_out);
    const std::size_t nb = static_cast<std::size_t>(d.grid_size + d.order);
    const auto read_block = [&](const char* name, std::size_t expected) {
      r.expect(name);
      const std::size_t n = static_cast<std::size_t>(r.next_long());
      if (n != expected) {
        throw std::runtime_error("checkpoint " + path.string() + ": block '" +
                                 name + "' has " + std::to_string(n) +
                                 " values, expected " +
                                 std::to_string(expected));
      }
      for (std::size_t i = 0; i < n; ++i) d.params.push_back(r.next_double());
    };
    read_block("coeffs", edges * nb);
    read_block("w_base", edges);
    read_block("w_spline", edges);
    read_block("gate", edges);
    read_block("bias", static_cast<std::size_t>(d.d_out));
    layers.push_back(std::move(d));
  }
  r.expect("end");

  std::vector<int> dims;
  dims.push_back(layers.front().d_in);
  for (const auto& d : layers) {
    if (d.d_in != dims.back()) {
      throw std::runtime_error("checkpoint " + path.string() +
                               ": layer dimensions do not chain");
    }
    if (d.grid_size != layers.front().grid_size ||
        d.order != layers.front().order || d.lo != layers.front().lo ||
        d.hi != layers.front().hi) {
      throw std::runtime_error("checkpoint " + path.string() +
                               ": per-layer grids differ");
    }
    dims.push_back(d.d_out);
  }
  const SplineGrid grid(layers.front().grid_size, layers.front().order,
                        layers.front().lo, layers.front().hi);
  KanNetwork net(dims, grid, seed);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto params = net.layer(l).parameters();
    if (params.size() != layers[l].params.size()) {
      throw std::runtime_error("checkpoint " + path.string() +
                               ": parameter count mismatch");
    }
    std::copy(layers[l].params.begin(), layers[l].params.end(), params.begin());
  }
  return net;
}

}  // namespace kanhar
