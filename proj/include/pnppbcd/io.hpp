#pragma once

// Binary containers.
//   HSI1: "HSI1", u32 n1, n2, n3 (little endian), then n1*n2*n3 f64 (little
//         endian) in the Tensor3 layout.
//   MSK1: "MSK1", u32 n1, n2, then n1*n2 bytes in {0, 1}, column-major.
// Loaders throw FormatError on bad magic, short payloads, trailing bytes or
// dimensions that overflow.

#include <filesystem>

#include "pnppbcd/detector.hpp"
#include "pnppbcd/tensor.hpp"

namespace pnppbcd {

void save_hsi(const std::filesystem::path& path, const Tensor3& t);
Tensor3 load_hsi(const std::filesystem::path& path);

void save_mask(const std::filesystem::path& path, const Mask& m);
Mask load_mask(const std::filesystem::path& path);

}  // namespace pnppbcd
