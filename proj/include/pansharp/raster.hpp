#pragma once

// Pixel-level primitives shared by the re-colorization, loss and metric code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "pansharp/error.hpp"
#include "pansharp/image.hpp"
#include "pansharp/parallel.hpp"

namespace pansharp {

/// Bilinear upscaling with half-pixel centers and border clamping.
///
/// Output pixel (x, y) samples the source at ((x + 0.5) / factor - 0.5, (y + 0.5) / factor - 0.5).
/// `factor == 1` returns an exact copy.
template <std::floating_point T>
Image<T> upscale_bilinear(const Image<T>& src, std::size_t factor, const Parallelism& par = {})
{
    if (factor == 0) {
        throw ArgumentError("upscale factor must be >= 1");
    }
    if (factor == 1) {
        return src;
    }
    const std::size_t sw = src.width();
    const std::size_t sh = src.height();
    const std::size_t ow = sw * factor;
    const std::size_t oh = sh * factor;

    struct Tap {
        std::size_t i0, i1;
        double t;
    };
    auto taps = [factor](std::size_t out_len, std::size_t src_len) {
        std::vector<Tap> result(out_len);
        const double max_pos = static_cast<double>(src_len - 1);
        for (std::size_t o = 0; o < out_len; ++o) {
            double pos = (static_cast<double>(o) + 0.5) / static_cast<double>(factor) - 0.5;
            pos = std::clamp(pos, 0.0, max_pos);
            const auto i0 = static_cast<std::size_t>(pos);
            const std::size_t i1 = std::min(i0 + 1, src_len - 1);
            result[o] = {i0, i1, pos - static_cast<double>(i0)};
        }
        return result;
    };
    const std::vector<Tap> xs = taps(ow, sw);
    const std::vector<Tap> ys = taps(oh, sh);

    Image<T> out(ow, oh, src.channels());
    const std::size_t rows = oh * src.channels();
    parallel_for(rows, par, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const std::size_t c = r / oh;
            const std::size_t y = r % oh;
            const Tap& ty = ys[y];
            for (std::size_t x = 0; x < ow; ++x) {
                const Tap& tx = xs[x];
                const double a0 = src(c, ty.i0, tx.i0);
                const double b0 = src(c, ty.i0, tx.i1);
                const double a1 = src(c, ty.i1, tx.i0);
                const double b1 = src(c, ty.i1, tx.i1);
                const double top = a0 + tx.t * (b0 - a0);
                const double bottom = a1 + tx.t * (b1 - a1);
                out(c, y, x) = static_cast<T>(top + ty.t * (bottom - top));
            }
        }
    });
    return out;
}

/// Area (block-mean) downscaling by an integer factor.
template <std::floating_point T>
Image<T> downscale_area(const Image<T>& src, std::size_t factor)
{
    if (factor == 0) {
        throw ArgumentError("downscale factor must be >= 1");
    }
    if (src.width() % factor != 0 || src.height() % factor != 0) {
        throw ShapeError("downscale: " + src.shape_string() + " is not divisible by " + std::to_string(factor));
    }
    if (factor == 1) {
        return src;
    }
    const std::size_t ow = src.width() / factor;
    const std::size_t oh = src.height() / factor;
    const double inv_area = 1.0 / static_cast<double>(factor * factor);
    Image<T> out(ow, oh, src.channels());
    for (std::size_t c = 0; c < src.channels(); ++c) {
        for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t x = 0; x < ow; ++x) {
                double sum = 0.0;
                for (std::size_t dy = 0; dy < factor; ++dy) {
                    for (std::size_t dx = 0; dx < factor; ++dx) {
                        sum += src(c, y * factor + dy, x * factor + dx);
                    }
                }
                out(c, y, x) = static_cast<T>(sum * inv_area);
            }
        }
    }
    return out;
}

namespace detail {

inline void require_odd_size(std::size_t size, const char* what)
{
    if (size == 0 || size % 2 == 0) {
        throw ArgumentError(std::string(what) + " size must be odd and >= 1 (got " + std::to_string(size) + ")");
    }
}

inline std::size_t clamp_index(std::ptrdiff_t i, std::size_t len)
{
    if (i < 0) {
        return 0;
    }
    return std::min(static_cast<std::size_t>(i), len - 1);
}

} // namespace detail

/// Per-channel size x size mean filter with edge replication.
template <std::floating_point T>
Image<T> box_filter(const Image<T>& src, std::size_t size, const Parallelism& par = {})
{
    detail::require_odd_size(size, "box filter");
    if (size == 1) {
        return src;
    }
    const std::size_t w = src.width();
    const std::size_t h = src.height();
    const auto radius = static_cast<std::ptrdiff_t>(size / 2);
    const double inv_area = 1.0 / static_cast<double>(size * size);

    // Horizontal window sums, kept in double so the vertical pass sees exact partial sums.
    std::vector<double> rowsum(src.size());
    const std::size_t rows = h * src.channels();
    parallel_for(rows, par, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const T* in = src.data().data() + r * w;
            double* acc = rowsum.data() + r * w;
            for (std::size_t x = 0; x < w; ++x) {
                double s = 0.0;
                for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
                    s += in[detail::clamp_index(static_cast<std::ptrdiff_t>(x) + k, w)];
                }
                acc[x] = s;
            }
        }
    });

    Image<T> out(w, h, src.channels());
    parallel_for(rows, par, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const std::size_t c = r / h;
            const std::size_t y = r % h;
            const double* base = rowsum.data() + c * h * w;
            T* dst = out.plane(c).data() + y * w;
            for (std::size_t x = 0; x < w; ++x) {
                double s = 0.0;
                for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
                    s += base[detail::clamp_index(static_cast<std::ptrdiff_t>(y) + k, h) * w + x];
                }
                dst[x] = static_cast<T>(s * inv_area);
            }
        }
    });
    return out;
}

/// Elementwise a - b.
template <std::floating_point T>
Image<T> subtract(const Image<T>& a, const Image<T>& b)
{
    detail::require_same_shape(a, b, "subtract");
    Image<T> out = a;
    auto o = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] -= bd[i];
    }
    return out;
}

/// Elementwise a + b.
template <std::floating_point T>
Image<T> add(const Image<T>& a, const Image<T>& b)
{
    detail::require_same_shape(a, b, "add");
    Image<T> out = a;
    auto o = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] += bd[i];
    }
    return out;
}

/// High-frequency residual: src - box_filter(src, size). Values may be negative.
template <std::floating_point T>
Image<T> high_freq(const Image<T>& src, std::size_t size, const Parallelism& par = {})
{
    return subtract(src, box_filter(src, size, par));
}

/// Grayscale-inverted image 1 - (R + G + B) / 3 of an RGB image.
template <std::floating_point T>
Image<T> gray_inverted(const Image<T>& rgb)
{
    detail::require_channels(rgb, 3, "gray_inverted");
    Image<T> out(rgb.width(), rgb.height(), 1);
    auto r = rgb.plane(0);
    auto g = rgb.plane(1);
    auto b = rgb.plane(2);
    auto o = out.plane(0);
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = static_cast<T>(1.0 - (static_cast<double>(r[i]) + g[i] + b[i]) / 3.0);
    }
    return out;
}

/// Fraction of pixel locations whose channels are all exactly zero.
template <std::floating_point T>
double zero_fraction(const Image<T>& src)
{
    if (src.empty()) {
        return 0.0;
    }
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < src.pixel_count(); ++i) {
        bool all_zero = true;
        for (std::size_t c = 0; c < src.channels() && all_zero; ++c) {
            all_zero = src.plane(c)[i] == T{0};
        }
        zeros += all_zero ? 1 : 0;
    }
    return static_cast<double>(zeros) / static_cast<double>(src.pixel_count());
}

/// Repeats a single-channel image `channels` times.
template <std::floating_point T>
Image<T> replicate_channels(const Image<T>& gray, std::size_t channels)
{
    detail::require_channels(gray, 1, "replicate_channels");
    Image<T> out(gray.width(), gray.height(), channels);
    for (std::size_t c = 0; c < channels; ++c) {
        std::copy(gray.data().begin(), gray.data().end(), out.plane(c).begin());
    }
    return out;
}

template <std::floating_point T>
Image<T> extract_channel(const Image<T>& src, std::size_t channel)
{
    if (channel >= src.channels()) {
        throw ShapeError("channel " + std::to_string(channel) + " out of range for " + src.shape_string());
    }
    Image<T> out(src.width(), src.height(), 1);
    std::copy(src.plane(channel).begin(), src.plane(channel).end(), out.data().begin());
    return out;
}

/// Stacks images with equal extent along the channel axis.
template <std::floating_point T>
Image<T> concat_channels(std::initializer_list<const Image<T>*> parts)
{
    if (parts.size() == 0) {
        throw ArgumentError("concat_channels needs at least one image");
    }
    const Image<T>& first = **parts.begin();
    std::size_t channels = 0;
    for (const Image<T>* p : parts) {
        if (!p->same_extent(first)) {
            throw ShapeError("concat_channels: " + p->shape_string() + " vs " + first.shape_string());
        }
        channels += p->channels();
    }
    std::vector<T> data;
    data.reserve(first.pixel_count() * channels);
    for (const Image<T>* p : parts) {
        data.insert(data.end(), p->data().begin(), p->data().end());
    }
    return Image<T>(first.width(), first.height(), channels, std::move(data));
}

} // namespace pansharp
