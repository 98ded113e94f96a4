#pragma once

// Sequential convolution / activation / max-pool stacks loaded from FBANK1
// files, used as the feature extractor behind the perceptual losses.
//
// FBANK1 layout (little-endian):
//   "FBANK1\0\0" | u32 input_channels | 3 x f32 mean | 3 x f32 std
//   | u32 stage_count | u32 tap_count | tap_count x u32 tap index
//   | per stage: u32 in_ch, u32 out_ch, u32 k, u8 activation (0 identity, 1 relu),
//     u8 has_pool [, u32 pool_size, u32 pool_stride],
//     f32 weights (out, in, kh, kw), f32 bias (out)

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pansharp/binary.hpp"
#include "pansharp/error.hpp"
#include "pansharp/image.hpp"
#include "pansharp/parallel.hpp"
#include "pansharp/raster.hpp"

namespace pansharp {

inline constexpr std::string_view fbank_magic{"FBANK1\0\0", 8};

enum class Activation : std::uint8_t { identity = 0, relu = 1 };

struct PoolSpec {
    std::uint32_t size = 2;
    std::uint32_t stride = 2;

    friend bool operator==(const PoolSpec&, const PoolSpec&) = default;
};

struct ConvStage {
    std::uint32_t in_channels = 0;
    std::uint32_t out_channels = 0;
    std::uint32_t kernel = 1;
    Activation activation = Activation::identity;
    std::optional<PoolSpec> pool;
    /// (out, in, kh, kw), row-major.
    std::vector<float> weights;
    std::vector<float> bias;

    [[nodiscard]] float weight(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) const
    {
        return weights[((o * in_channels + i) * kernel + ky) * kernel + kx];
    }

    friend bool operator==(const ConvStage&, const ConvStage&) = default;
};

struct FeatureBank {
    std::uint32_t input_channels = 3;
    std::array<float, 3> mean{0.0f, 0.0f, 0.0f};
    std::array<float, 3> stddev{1.0f, 1.0f, 1.0f};
    std::vector<ConvStage> stages;
    /// Stage indices whose outputs are the feature taps, strictly increasing.
    std::vector<std::uint32_t> taps;

    [[nodiscard]] std::size_t tap_count() const noexcept { return taps.size(); }
    [[nodiscard]] std::size_t tap_channels(std::size_t l) const { return stages.at(taps.at(l)).out_channels; }

    /// Throws FormatError when any structural invariant is violated.
    void validate() const
    {
        if (input_channels != 3) {
            throw FormatError("input_channels must be 3, got " + std::to_string(input_channels));
        }
        for (std::size_t c = 0; c < 3; ++c) {
            if (!std::isfinite(mean[c]) || !std::isfinite(stddev[c])) {
                throw FormatError("non-finite normalization constant");
            }
            if (!(stddev[c] > 0.0f)) {
                throw FormatError("std values must be > 0");
            }
        }
        if (stages.empty()) {
            throw FormatError("bank has no stages");
        }
        if (taps.empty()) {
            throw FormatError("bank has no taps");
        }
        for (std::size_t i = 0; i < taps.size(); ++i) {
            if (taps[i] >= stages.size()) {
                throw FormatError("tap index " + std::to_string(taps[i]) + " out of range");
            }
            if (i > 0 && taps[i] <= taps[i - 1]) {
                throw FormatError("tap indices must be strictly increasing");
            }
        }
        std::uint32_t expected_in = input_channels;
        for (std::size_t s = 0; s < stages.size(); ++s) {
            const ConvStage& st = stages[s];
            const std::string where = "stage " + std::to_string(s) + ": ";
            if (st.in_channels != expected_in) {
                throw FormatError(where + "inconsistent channel chain (expects " + std::to_string(expected_in) +
                                  " inputs, declares " + std::to_string(st.in_channels) + ")");
            }
            if (st.out_channels == 0) {
                throw FormatError(where + "zero output channels");
            }
            if (st.kernel == 0 || st.kernel % 2 == 0) {
                throw FormatError(where + "kernel size must be odd");
            }
            if (st.activation != Activation::identity && st.activation != Activation::relu) {
                throw FormatError(where + "unknown activation");
            }
            if (st.pool && (st.pool->size == 0 || st.pool->stride == 0)) {
                throw FormatError(where + "pool size and stride must be >= 1");
            }
            const std::size_t wcount = std::size_t{st.out_channels} * st.in_channels * st.kernel * st.kernel;
            if (st.weights.size() != wcount || st.bias.size() != st.out_channels) {
                throw FormatError(where + "weight or bias count mismatch");
            }
            for (float v : st.weights) {
                if (!std::isfinite(v)) {
                    throw FormatError(where + "non-finite weight");
                }
            }
            for (float v : st.bias) {
                if (!std::isfinite(v)) {
                    throw FormatError(where + "non-finite bias");
                }
            }
            expected_in = st.out_channels;
        }
    }

    friend bool operator==(const FeatureBank&, const FeatureBank&) = default;
};

/// Per-tap activation tensors, channels x height x width.
struct FeatureMaps {
    std::vector<Raster> taps;
};

inline FeatureBank load_bank(std::span<const std::uint8_t> bytes)
{
    binary::Reader in(bytes, "FBANK1");
    in.expect_magic(fbank_magic);
    FeatureBank bank;
    bank.input_channels = in.u32("input_channels");
    for (float& m : bank.mean) {
        m = in.f32("mean");
    }
    for (float& s : bank.stddev) {
        s = in.f32("std");
    }
    const std::uint32_t stage_count = in.u32("stage_count");
    const std::uint32_t tap_count = in.u32("tap_count");
    in.need_words(tap_count, "taps");
    bank.taps.resize(tap_count);
    for (auto& t : bank.taps) {
        t = in.u32("tap index");
    }
    // Each stage needs at least 14 bytes; reject absurd counts before allocating.
    if (stage_count > in.remaining() / 14 + 1) {
        throw FormatError("FBANK1: truncated payload reading stages");
    }
    bank.stages.resize(stage_count);
    for (ConvStage& st : bank.stages) {
        st.in_channels = in.u32("in_ch");
        st.out_channels = in.u32("out_ch");
        st.kernel = in.u32("k");
        const std::uint8_t act = in.u8("activation");
        if (act > 1) {
            throw FormatError("FBANK1: unknown activation code " + std::to_string(act));
        }
        st.activation = static_cast<Activation>(act);
        const std::uint8_t has_pool = in.u8("has_pool");
        if (has_pool > 1) {
            throw FormatError("FBANK1: has_pool must be 0 or 1");
        }
        if (has_pool == 1) {
            PoolSpec pool;
            pool.size = in.u32("pool_size");
            pool.stride = in.u32("pool_stride");
            st.pool = pool;
        }
        // Checked product so hostile headers cannot overflow the size computation.
        std::uint64_t wcount = 1;
        for (std::uint32_t factor : {st.out_channels, st.in_channels, st.kernel, st.kernel}) {
            if (factor != 0 && wcount > in.remaining() / factor) {
                throw FormatError("FBANK1: truncated payload reading weights");
            }
            wcount *= factor;
        }
        in.need_words(wcount + st.out_channels, "weights");
        st.weights.resize(static_cast<std::size_t>(wcount));
        for (float& v : st.weights) {
            v = in.f32("weights");
        }
        st.bias.resize(st.out_channels);
        for (float& v : st.bias) {
            v = in.f32("bias");
        }
    }
    if (!in.at_end()) {
        throw FormatError("FBANK1: " + std::to_string(in.remaining()) + " trailing bytes");
    }
    bank.validate();
    return bank;
}

inline std::vector<std::uint8_t> save_bank(const FeatureBank& bank)
{
    bank.validate();
    binary::Writer out;
    out.bytes(fbank_magic);
    out.u32(bank.input_channels);
    for (float m : bank.mean) {
        out.f32(m);
    }
    for (float s : bank.stddev) {
        out.f32(s);
    }
    out.u32(static_cast<std::uint32_t>(bank.stages.size()));
    out.u32(static_cast<std::uint32_t>(bank.taps.size()));
    for (auto t : bank.taps) {
        out.u32(t);
    }
    for (const ConvStage& st : bank.stages) {
        out.u32(st.in_channels);
        out.u32(st.out_channels);
        out.u32(st.kernel);
        out.u8(static_cast<std::uint8_t>(st.activation));
        out.u8(st.pool ? 1 : 0);
        if (st.pool) {
            out.u32(st.pool->size);
            out.u32(st.pool->stride);
        }
        for (float v : st.weights) {
            out.f32(v);
        }
        for (float v : st.bias) {
            out.f32(v);
        }
    }
    return std::move(out).take();
}

inline FeatureBank load_bank_file(const std::filesystem::path& path)
{
    const auto bytes = binary::read_file_bytes(path);
    return load_bank(bytes);
}

/// Channelwise sliding-window maximum over the valid region (no padding).
inline Raster max_pool(const Raster& map, std::size_t size, std::size_t stride)
{
    if (size == 0 || stride == 0) {
        throw ArgumentError("max_pool size and stride must be >= 1");
    }
    if (map.width() < size || map.height() < size) {
        throw ShapeError("max_pool window " + std::to_string(size) + " larger than " + map.shape_string());
    }
    if (size == 1 && stride == 1) {
        return map;
    }
    const std::size_t ow = (map.width() - size) / stride + 1;
    const std::size_t oh = (map.height() - size) / stride + 1;
    Raster out(ow, oh, map.channels());
    for (std::size_t c = 0; c < map.channels(); ++c) {
        for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t x = 0; x < ow; ++x) {
                float m = map(c, y * stride, x * stride);
                for (std::size_t dy = 0; dy < size; ++dy) {
                    for (std::size_t dx = 0; dx < size; ++dx) {
                        m = std::max(m, map(c, y * stride + dy, x * stride + dx));
                    }
                }
                out(c, y, x) = m;
            }
        }
    }
    return out;
}

/// Size-preserving stride-1 convolution with edge-replication padding, then the
/// stage activation and optional pool.
inline Raster forward_stage(const ConvStage& stage, const Raster& input, const Parallelism& par = {})
{
    if (input.channels() != stage.in_channels) {
        throw ShapeError("stage expects " + std::to_string(stage.in_channels) + " channels, got " +
                         input.shape_string());
    }
    const std::size_t w = input.width();
    const std::size_t h = input.height();
    const std::size_t k = stage.kernel;
    const std::size_t r = k / 2;
    const std::size_t pw = w + 2 * r;
    const std::size_t ph = h + 2 * r;

    std::vector<float> padded(stage.in_channels * pw * ph);
    for (std::size_t c = 0; c < stage.in_channels; ++c) {
        for (std::size_t y = 0; y < ph; ++y) {
            const std::size_t sy = detail::clamp_index(static_cast<std::ptrdiff_t>(y) - static_cast<std::ptrdiff_t>(r), h);
            for (std::size_t x = 0; x < pw; ++x) {
                const std::size_t sx =
                    detail::clamp_index(static_cast<std::ptrdiff_t>(x) - static_cast<std::ptrdiff_t>(r), w);
                padded[(c * ph + y) * pw + x] = input(c, sy, sx);
            }
        }
    }

    Raster out(w, h, stage.out_channels);
    parallel_for(stage.out_channels, par, [&](std::size_t begin, std::size_t end) {
        std::vector<double> acc(w * h);
        for (std::size_t o = begin; o < end; ++o) {
            std::fill(acc.begin(), acc.end(), static_cast<double>(stage.bias[o]));
            for (std::size_t i = 0; i < stage.in_channels; ++i) {
                const float* src = padded.data() + i * ph * pw;
                for (std::size_t ky = 0; ky < k; ++ky) {
                    for (std::size_t kx = 0; kx < k; ++kx) {
                        const double wv = stage.weight(o, i, ky, kx);
                        if (wv == 0.0) {
                            continue;
                        }
                        for (std::size_t y = 0; y < h; ++y) {
                            const float* row = src + (y + ky) * pw + kx;
                            double* dst = acc.data() + y * w;
                            for (std::size_t x = 0; x < w; ++x) {
                                dst[x] += wv * row[x];
                            }
                        }
                    }
                }
            }
            const bool relu = stage.activation == Activation::relu;
            std::span<float> plane = out.plane(o);
            for (std::size_t n = 0; n < plane.size(); ++n) {
                plane[n] = static_cast<float>(relu ? std::max(acc[n], 0.0) : acc[n]);
            }
        }
    });
    if (stage.pool) {
        return max_pool(out, stage.pool->size, stage.pool->stride);
    }
    return out;
}

/// Runs the bank on `image` and returns the tap outputs.
///
/// Single-channel images are replicated to three channels first. The first
/// stage sees (x - mean) / std.
inline FeatureMaps extract(const FeatureBank& bank, const Raster& image, const Parallelism& par = {})
{
    Raster x = image.channels() == 1 && bank.input_channels != 1 ? replicate_channels(image, bank.input_channels)
                                                                  : image;
    if (x.channels() != bank.input_channels) {
        throw ShapeError("bank expects " + std::to_string(bank.input_channels) + " input channels, got " +
                         image.shape_string());
    }
    for (std::size_t c = 0; c < x.channels(); ++c) {
        const float m = bank.mean[c];
        const float s = bank.stddev[c];
        for (float& v : x.plane(c)) {
            v = (v - m) / s;
        }
    }
    FeatureMaps maps;
    maps.taps.reserve(bank.taps.size());
    std::size_t next_tap = 0;
    const std::size_t last = bank.taps.back();
    for (std::size_t s = 0; s <= last; ++s) {
        x = forward_stage(bank.stages[s], x, par);
        if (s == bank.taps[next_tap]) {
            maps.taps.push_back(x);
            ++next_tap;
        }
    }
    return maps;
}

/// One 1x1 identity-activation stage copying input channel `channel` into a single tap.
inline FeatureBank identity_bank(std::size_t channel = 0)
{
    FeatureBank bank;
    ConvStage st;
    st.in_channels = 3;
    st.out_channels = 1;
    st.kernel = 1;
    st.weights = {0.0f, 0.0f, 0.0f};
    st.weights.at(channel) = 1.0f;
    st.bias = {0.0f};
    bank.stages.push_back(std::move(st));
    bank.taps = {0};
    return bank;
}

} // namespace pansharp
