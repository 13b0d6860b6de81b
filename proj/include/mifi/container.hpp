#pragma once

#include <filesystem>

#include "mifi/tensor.hpp"

namespace mifi {

// Binary feature container, bit-exact across platforms:
//   bytes 0-3   magic "MIFI" (4D 49 46 49)
//   byte  4     version = 1
//   byte  5     ndim (1..8)
//   bytes 6-7   reserved, zero
//   then ndim little-endian u32 extents
//   header zero-padded to a 16-byte boundary
//   then product(dims) little-endian f32 values, row-major
std::size_t container_header_size(std::size_t ndim);

void save_features(const Tensor& tensor, const std::filesystem::path& path);
Tensor load_features(const std::filesystem::path& path);

} // namespace mifi
