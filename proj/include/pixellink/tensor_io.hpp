#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pixellink/tensor.hpp"

namespace pixellink::io {

// PLNK layout, all integers little-endian:
//   "PLNK" | u8 version (1) | u8 dtype (1 = f32) | u8 ndim | ndim x u32 dims | f32 payload
inline constexpr std::uint8_t kTensorVersion = 1;
inline constexpr std::uint8_t kDtypeF32 = 1;

std::vector<std::uint8_t> encode_tensor(const Tensor& t);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

Tensor load_tensor(const std::filesystem::path& path);
void save_tensor(const Tensor& t, const std::filesystem::path& path);

/// Binary netpbm only: P5 (gray) or P6 (RGB) with maxval 255.
ImageBuffer load_netpbm(const std::filesystem::path& path);
void save_netpbm(const ImageBuffer& img, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary and renames it over `path`, so readers
/// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace pixellink::io
