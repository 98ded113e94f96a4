#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pansharp/image.hpp"

namespace pansharp::cli {

/// Decodes 1/2/4/8/16-bit gray, gray+alpha, RGB, RGBA or palette PNG into [0,1].
/// Alpha is dropped; palette and low bit depths are expanded.
Raster decode_png(std::span<const std::uint8_t> bytes);

/// Encodes a 1- or 3-channel raster as an 8- or 16-bit PNG, clamping to [0,1].
std::vector<std::uint8_t> encode_png(const Raster& image, int bit_depth = 16);

/// Reads `.png` or `.rten` (RAWTEN) files, dispatching on the extension.
Raster read_image(const std::filesystem::path& path);

/// Writes `.png` (quantized to `bit_depth`) or `.rten` (lossless) files.
void write_image(const std::filesystem::path& path, const Raster& image, int bit_depth = 16);

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

} // namespace pansharp::cli
