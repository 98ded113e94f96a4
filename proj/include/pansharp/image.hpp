#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pansharp/error.hpp"

namespace pansharp {

/// Planar multi-channel image: channel-major, then row-major.
///
/// Values nominally live in [0,1] for pixel data; feature tensors reuse the
/// same container with an unbounded range. A default-constructed image is
/// empty and only useful as a placeholder.
template <std::floating_point T>
class Image {
public:
    using value_type = T;

    Image() = default;

    Image(std::size_t width, std::size_t height, std::size_t channels, T fill = T{0})
        : width_(width), height_(height), channels_(channels)
    {
        if (width == 0 || height == 0 || channels == 0) {
            throw ShapeError("image dimensions must be >= 1 (got " + std::to_string(width) + "x" +
                             std::to_string(height) + "x" + std::to_string(channels) + ")");
        }
        data_.assign(width * height * channels, fill);
    }

    Image(std::size_t width, std::size_t height, std::size_t channels, std::vector<T> data)
        : width_(width), height_(height), channels_(channels), data_(std::move(data))
    {
        if (width == 0 || height == 0 || channels == 0) {
            throw ShapeError("image dimensions must be >= 1");
        }
        if (data_.size() != width * height * channels) {
            throw ShapeError("data length " + std::to_string(data_.size()) + " does not match " +
                             std::to_string(width) + "x" + std::to_string(height) + "x" +
                             std::to_string(channels));
        }
    }

    [[nodiscard]] std::size_t width() const noexcept { return width_; }
    [[nodiscard]] std::size_t height() const noexcept { return height_; }
    [[nodiscard]] std::size_t channels() const noexcept { return channels_; }
    [[nodiscard]] std::size_t pixel_count() const noexcept { return width_ * height_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    [[nodiscard]] std::span<T> data() noexcept { return data_; }
    [[nodiscard]] std::span<const T> data() const noexcept { return data_; }

    [[nodiscard]] std::span<T> plane(std::size_t c) noexcept
    {
        return std::span<T>(data_).subspan(c * pixel_count(), pixel_count());
    }
    [[nodiscard]] std::span<const T> plane(std::size_t c) const noexcept
    {
        return std::span<const T>(data_).subspan(c * pixel_count(), pixel_count());
    }

    T& operator()(std::size_t c, std::size_t y, std::size_t x) noexcept
    {
        return data_[(c * height_ + y) * width_ + x];
    }
    const T& operator()(std::size_t c, std::size_t y, std::size_t x) const noexcept
    {
        return data_[(c * height_ + y) * width_ + x];
    }

    [[nodiscard]] bool same_shape(const Image& other) const noexcept
    {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }
    [[nodiscard]] bool same_extent(const Image& other) const noexcept
    {
        return width_ == other.width_ && height_ == other.height_;
    }

    [[nodiscard]] bool all_finite() const noexcept
    {
        for (T v : data_) {
            if (!std::isfinite(v)) {
                return false;
            }
        }
        return true;
    }

    [[nodiscard]] std::string shape_string() const
    {
        return std::to_string(width_) + "x" + std::to_string(height_) + "x" + std::to_string(channels_);
    }

    template <std::floating_point U>
    [[nodiscard]] Image<U> cast() const
    {
        std::vector<U> out(data_.begin(), data_.end());
        return Image<U>(width_, height_, channels_, std::move(out));
    }

    friend bool operator==(const Image& a, const Image& b) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::size_t channels_ = 0;
    std::vector<T> data_;
};

/// The universal 32-bit pixel container.
using Raster = Image<float>;

namespace detail {

template <std::floating_point T>
void require_same_shape(const Image<T>& a, const Image<T>& b, const char* what)
{
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(what) + ": " + a.shape_string() + " vs " + b.shape_string());
    }
}

template <std::floating_point T>
void require_channels(const Image<T>& img, std::size_t channels, const char* what)
{
    if (img.channels() != channels) {
        throw ShapeError(std::string(what) + ": expected " + std::to_string(channels) +
                         " channels, got " + std::to_string(img.channels()));
    }
}

} // namespace detail

} // namespace pansharp
