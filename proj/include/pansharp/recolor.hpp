#pragma once

// Guided re-colorization: every pan-sharpened pixel takes the closest real
// color found in a local window of the up-scaled multi-spectral image, with
// optional luma or high-frequency guidance to restore detail.

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <vector>

#include "pansharp/color.hpp"
#include "pansharp/error.hpp"
#include "pansharp/image.hpp"
#include "pansharp/parallel.hpp"
#include "pansharp/raster.hpp"

namespace pansharp {

struct RecolorParams {
    /// Search window side w (odd).
    std::size_t window = 3;
    /// Averaging filter side used by the high-frequency guidance (odd).
    std::size_t hf_filter_size = 5;

    void validate() const
    {
        detail::require_odd_size(window, "recolor window");
        detail::require_odd_size(hf_filter_size, "high-frequency filter");
    }
};

namespace detail {

struct WindowOffset {
    std::ptrdiff_t dy;
    std::ptrdiff_t dx;
};

/// Window offsets ordered by Chebyshev ring, then row-major inside each ring.
/// Scanning in this order with a strict `<` yields the documented tie-break.
inline std::vector<WindowOffset> ring_ordered_offsets(std::size_t window)
{
    const auto r = static_cast<std::ptrdiff_t>(window / 2);
    std::vector<WindowOffset> offsets;
    offsets.reserve(window * window);
    for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
        for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
            offsets.push_back({dy, dx});
        }
    }
    std::stable_sort(offsets.begin(), offsets.end(), [](const WindowOffset& a, const WindowOffset& b) {
        return std::max(std::abs(a.dy), std::abs(a.dx)) < std::max(std::abs(b.dy), std::abs(b.dx));
    });
    return offsets;
}

} // namespace detail

/// Replaces each pixel of `ps` with the color of `ms_up` inside the w x w window
/// (clipped to the image) that is closest in Euclidean distance over all channels.
///
/// Ties go to the candidate nearest the window center (Chebyshev), then to the
/// first in row-major order. Output pixels are always colors present in `ms_up`.
template <std::floating_point T>
Image<T> recolorize(const Image<T>& ps, const Image<T>& ms_up, const RecolorParams& params,
                    const Parallelism& par = {})
{
    params.validate();
    detail::require_same_shape(ps, ms_up, "recolorize");
    if (params.window == 1) {
        return ms_up;
    }
    const std::size_t w = ps.width();
    const std::size_t h = ps.height();
    const std::size_t channels = ps.channels();
    const std::size_t plane = ps.pixel_count();
    const std::vector<detail::WindowOffset> offsets = detail::ring_ordered_offsets(params.window);
    const T* ps_data = ps.data().data();
    const T* ms_data = ms_up.data().data();

    Image<T> out(w, h, channels);
    T* out_data = out.data().data();
    parallel_for(h, par, [&](std::size_t begin, std::size_t end) {
        std::vector<double> target(channels);
        for (std::size_t y = begin; y < end; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                const std::size_t p = y * w + x;
                for (std::size_t c = 0; c < channels; ++c) {
                    target[c] = ps_data[c * plane + p];
                }
                double best = std::numeric_limits<double>::infinity();
                std::size_t best_index = p;
                for (const auto& off : offsets) {
                    const std::ptrdiff_t qy = static_cast<std::ptrdiff_t>(y) + off.dy;
                    const std::ptrdiff_t qx = static_cast<std::ptrdiff_t>(x) + off.dx;
                    if (qy < 0 || qx < 0 || qy >= static_cast<std::ptrdiff_t>(h) ||
                        qx >= static_cast<std::ptrdiff_t>(w)) {
                        continue;
                    }
                    const std::size_t q = static_cast<std::size_t>(qy) * w + static_cast<std::size_t>(qx);
                    double d = 0.0;
                    for (std::size_t c = 0; c < channels; ++c) {
                        const double diff = static_cast<double>(ms_data[c * plane + q]) - target[c];
                        d += diff * diff;
                    }
                    if (d < best) {
                        best = d;
                        best_index = q;
                        if (d == 0.0) {
                            break; // later candidates can only tie, and ties lose
                        }
                    }
                }
                for (std::size_t c = 0; c < channels; ++c) {
                    out_data[c * plane + p] = ms_data[c * plane + best_index];
                }
            }
        }
    });
    return out;
}

/// Keeps the chroma (Cb, Cr) of `rc` and takes the luma (Y) from `ps`.
template <std::floating_point T>
Image<T> luma_guided(const Image<T>& rc, const Image<T>& ps)
{
    detail::require_channels(rc, 3, "luma_guided rc");
    detail::require_same_shape(rc, ps, "luma_guided");
    Image<T> ycc = to_ycbcr(rc);
    const Image<T> ps_ycc = to_ycbcr(ps);
    std::copy(ps_ycc.plane(0).begin(), ps_ycc.plane(0).end(), ycc.plane(0).begin());
    return from_ycbcr(ycc);
}

/// ps - box(ps) + box(rc): high frequencies of `ps` on top of the low frequencies of `rc`.
template <std::floating_point T>
Image<T> hf_guided(const Image<T>& rc, const Image<T>& ps, const RecolorParams& params,
                   const Parallelism& par = {})
{
    params.validate();
    detail::require_same_shape(rc, ps, "hf_guided");
    return add(high_freq(ps, params.hf_filter_size, par), box_filter(rc, params.hf_filter_size, par));
}

/// Inputs of the refinement stage that follows the first pan-sharpening pass.
template <std::floating_point T>
struct RcStageInputs {
    Image<T> rc0;
    Image<T> ms_up;
    Image<T> hf;

    /// Channel-stacked [rc0 | ms_up | hf] tensor, the layout a network consumes.
    [[nodiscard]] Image<T> stacked() const { return concat_channels<T>({&rc0, &ms_up, &hf}); }
};

template <std::floating_point T>
RcStageInputs<T> rc_stage_inputs(const Image<T>& ps0, const Image<T>& ms_up, const RecolorParams& params,
                                 const Parallelism& par = {})
{
    detail::require_same_shape(ps0, ms_up, "rc_stage_inputs");
    return {recolorize(ps0, ms_up, params, par), ms_up, high_freq(ps0, params.hf_filter_size, par)};
}

} // namespace pansharp
