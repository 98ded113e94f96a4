#pragma once

// Little-endian byte packing shared by the FBANK1 and RAWTEN codecs.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pansharp/error.hpp"

namespace pansharp::binary {

class Writer {
public:
    void bytes(std::string_view raw)
    {
        for (char ch : raw) {
            buf_.push_back(static_cast<std::uint8_t>(ch));
        }
    }
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i) {
            buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

    [[nodiscard]] std::vector<std::uint8_t> take() && { return std::move(buf_); }

private:
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    Reader(std::span<const std::uint8_t> data, std::string context) : data_(data), context_(std::move(context)) {}

    void expect_magic(std::string_view magic)
    {
        need(magic.size(), "magic");
        for (std::size_t i = 0; i < magic.size(); ++i) {
            if (data_[pos_ + i] != static_cast<std::uint8_t>(magic[i])) {
                throw FormatError(context_ + ": bad magic");
            }
        }
        pos_ += magic.size();
    }
    std::uint8_t u8(const char* what)
    {
        need(1, what);
        return data_[pos_++];
    }
    std::uint32_t u32(const char* what)
    {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(data_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
        }
        pos_ += 4;
        return v;
    }
    float f32(const char* what) { return std::bit_cast<float>(u32(what)); }

    /// Fails early when `count` 4-byte values cannot possibly fit in the rest of the payload.
    void need_words(std::uint64_t count, const char* what)
    {
        if (count > (data_.size() - pos_) / 4) {
            throw FormatError(context_ + ": truncated payload reading " + what);
        }
    }

    [[nodiscard]] bool at_end() const noexcept { return pos_ == data_.size(); }
    [[nodiscard]] std::size_t remaining() const noexcept { return data_.size() - pos_; }

private:
    void need(std::size_t n, const char* what)
    {
        if (data_.size() - pos_ < n) {
            throw FormatError(context_ + ": truncated payload reading " + what);
        }
    }

    std::span<const std::uint8_t> data_;
    std::string context_;
    std::size_t pos_ = 0;
};

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace pansharp::binary
