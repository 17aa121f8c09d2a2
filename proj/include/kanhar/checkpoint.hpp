#pragma once

#include <filesystem>

#include "kanhar/kan.hpp"

namespace kanhar {

// Text checkpoint: format version, network shape, grid configuration, seed,
// then the flat parameter blocks of each layer (coefficients in input-major
// edge order, then w_base, w_spline, gate, bias). Numbers are written as C99
// hexadecimal floats, so load(save(net)) reproduces every bit.
void save_checkpoint(const std::filesystem::path& path, const KanNetwork& net);
KanNetwork load_checkpoint(const std::filesystem::path& path);

}  // namespace kanhar
