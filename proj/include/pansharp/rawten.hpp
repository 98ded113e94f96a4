#pragma once

// RAWTEN: lossless float tensor files.
//   "RTEN1\0\0\0" | u32 channels | u32 height | u32 width | f32 payload (c, h, w), little-endian

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string_view>
#include <vector>

#include "pansharp/binary.hpp"
#include "pansharp/error.hpp"
#include "pansharp/image.hpp"

namespace pansharp {

inline constexpr std::string_view rawten_magic{"RTEN1\0\0\0", 8};

inline std::vector<std::uint8_t> encode_rawten(const Raster& tensor)
{
    binary::Writer out;
    out.bytes(rawten_magic);
    out.u32(static_cast<std::uint32_t>(tensor.channels()));
    out.u32(static_cast<std::uint32_t>(tensor.height()));
    out.u32(static_cast<std::uint32_t>(tensor.width()));
    for (float v : tensor.data()) {
        out.f32(v);
    }
    return std::move(out).take();
}

inline Raster decode_rawten(std::span<const std::uint8_t> bytes)
{
    binary::Reader in(bytes, "RAWTEN");
    in.expect_magic(rawten_magic);
    const std::uint32_t c = in.u32("channels");
    const std::uint32_t h = in.u32("height");
    const std::uint32_t w = in.u32("width");
    if (c == 0 || h == 0 || w == 0) {
        throw FormatError("RAWTEN: zero dimension");
    }
    const std::uint64_t count = std::uint64_t{c} * h * w;
    in.need_words(count, "payload");
    std::vector<float> data(static_cast<std::size_t>(count));
    for (float& v : data) {
        v = in.f32("payload");
    }
    if (!in.at_end()) {
        throw FormatError("RAWTEN: trailing bytes");
    }
    return Raster(w, h, c, std::move(data));
}

inline void write_rawten(const std::filesystem::path& path, const Raster& tensor)
{
    const auto bytes = encode_rawten(tensor);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("write failed for " + path.string());
    }
}

inline Raster read_rawten(const std::filesystem::path& path)
{
    const auto bytes = binary::read_file_bytes(path);
    return decode_rawten(bytes);
}

} // namespace pansharp
