#include "image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <string>

#include "pansharp/binary.hpp"
#include "pansharp/error.hpp"
#include "pansharp/rawten.hpp"

namespace pansharp::cli {

namespace {

struct ReadCursor {
    std::span<const std::uint8_t> data;
    std::size_t pos = 0;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t length)
{
    auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
    if (cursor->data.size() - cursor->pos < length) {
        png_error(png, "unexpected end of PNG data");
    }
    std::memcpy(out, cursor->data.data() + cursor->pos, length);
    cursor->pos += length;
}

void write_to_memory(png_structp png, png_bytep data, png_size_t length)
{
    auto* buf = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    buf->insert(buf->end(), data, data + length);
}

void flush_noop(png_structp) {}

void warning_noop(png_structp, png_const_charp) {}

std::string lower_extension(const std::filesystem::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return ext;
}

} // namespace

Raster decode_png(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
        throw FormatError("not a PNG file");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, warning_noop);
    if (png == nullptr) {
        throw Error("png_create_read_struct failed");
    }
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("png_create_info_struct failed");
    }

    // Every object with a destructor lives before setjmp so a libpng longjmp never skips one.
    ReadCursor cursor{bytes, 0};
    std::vector<std::uint8_t> pixels;
    std::vector<png_bytep> rows;
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int depth = 0;
    int channels = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("corrupt PNG data");
    }
    png_set_read_fn(png, &cursor, read_from_memory);
    png_read_info(png, info);

    const int color_type = png_get_color_type(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    }
    if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS)) {
        png_set_tRNS_to_alpha(png);
    }
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    depth = png_get_bit_depth(png, info);
    channels = png_get_channels(png, info);
    const png_size_t stride = png_get_rowbytes(png, info);
    pixels.resize(stride * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) {
        rows[y] = pixels.data() + y * stride;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (channels != 1 && channels != 3) {
        throw FormatError("unsupported PNG channel count " + std::to_string(channels));
    }
    Raster out(width, height, static_cast<std::size_t>(channels));
    const auto nc = static_cast<std::size_t>(channels);
    for (std::size_t y = 0; y < height; ++y) {
        const std::uint8_t* row = pixels.data() + y * stride;
        for (std::size_t x = 0; x < width; ++x) {
            for (std::size_t c = 0; c < nc; ++c) {
                const std::size_t i = x * nc + c;
                if (depth == 16) {
                    const unsigned v = (static_cast<unsigned>(row[2 * i]) << 8) | row[2 * i + 1];
                    out(c, y, x) = static_cast<float>(v) / 65535.0f;
                } else {
                    out(c, y, x) = static_cast<float>(row[i]) / 255.0f;
                }
            }
        }
    }
    return out;
}

std::vector<std::uint8_t> encode_png(const Raster& image, int bit_depth)
{
    if (bit_depth != 8 && bit_depth != 16) {
        throw ArgumentError("PNG bit depth must be 8 or 16");
    }
    if (image.channels() != 1 && image.channels() != 3) {
        throw ShapeError("PNG output needs 1 or 3 channels, got " + image.shape_string() + " (use .rten)");
    }
    const std::size_t w = image.width();
    const std::size_t h = image.height();
    const std::size_t nc = image.channels();
    const std::size_t bytes_per_sample = bit_depth / 8;
    const double scale = bit_depth == 16 ? 65535.0 : 255.0;

    std::vector<std::uint8_t> pixels(w * h * nc * bytes_per_sample);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            for (std::size_t c = 0; c < nc; ++c) {
                const double v = std::clamp(static_cast<double>(image(c, y, x)), 0.0, 1.0);
                const auto q = static_cast<unsigned>(std::lround(v * scale));
                const std::size_t i = ((y * w + x) * nc + c) * bytes_per_sample;
                if (bit_depth == 16) {
                    pixels[i] = static_cast<std::uint8_t>(q >> 8);
                    pixels[i + 1] = static_cast<std::uint8_t>(q & 0xff);
                } else {
                    pixels[i] = static_cast<std::uint8_t>(q);
                }
            }
        }
    }

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, warning_noop);
    if (png == nullptr) {
        throw Error("png_create_write_struct failed");
    }
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("png_create_info_struct failed");
    }
    std::vector<std::uint8_t> encoded;
    std::vector<png_bytep> rows(h);
    for (std::size_t y = 0; y < h; ++y) {
        rows[y] = pixels.data() + y * w * nc * bytes_per_sample;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("PNG encoding failed");
    }
    png_set_write_fn(png, &encoded, write_to_memory, flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bit_depth,
                 nc == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return encoded;
}

Raster read_image(const std::filesystem::path& path)
{
    const std::string ext = lower_extension(path);
    const auto bytes = binary::read_file_bytes(path);
    try {
        if (ext == ".rten") {
            return decode_rawten(bytes);
        }
        if (ext == ".png") {
            return decode_png(bytes);
        }
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
    throw ArgumentError("unsupported image extension '" + ext + "' for " + path.string());
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("write failed for " + path.string());
    }
}

void write_image(const std::filesystem::path& path, const Raster& image, int bit_depth)
{
    const std::string ext = lower_extension(path);
    if (ext == ".rten") {
        write_rawten(path, image);
    } else if (ext == ".png") {
        write_bytes(path, encode_png(image, bit_depth));
    } else {
        throw ArgumentError("unsupported output extension '" + ext + "' for " + path.string());
    }
}

} // namespace pansharp::cli
