#pragma once

// BT.601 full-range YCbCr in the [0,1] domain, chroma offset +0.5.

#include "pansharp/image.hpp"

namespace pansharp {

namespace bt601 {
inline constexpr double kr = 0.299;
inline constexpr double kg = 0.587;
inline constexpr double kb = 0.114;
inline constexpr double cb_scale = 2.0 * (1.0 - kb); // 1.772
inline constexpr double cr_scale = 2.0 * (1.0 - kr); // 1.402
} // namespace bt601

template <std::floating_point T>
Image<T> to_ycbcr(const Image<T>& rgb)
{
    detail::require_channels(rgb, 3, "to_ycbcr");
    Image<T> out(rgb.width(), rgb.height(), 3);
    auto r = rgb.plane(0);
    auto g = rgb.plane(1);
    auto b = rgb.plane(2);
    auto yo = out.plane(0);
    auto cbo = out.plane(1);
    auto cro = out.plane(2);
    for (std::size_t i = 0; i < yo.size(); ++i) {
        const double rv = r[i];
        const double gv = g[i];
        const double bv = b[i];
        const double y = bt601::kr * rv + bt601::kg * gv + bt601::kb * bv;
        yo[i] = static_cast<T>(y);
        cbo[i] = static_cast<T>(0.5 + (bv - y) / bt601::cb_scale);
        cro[i] = static_cast<T>(0.5 + (rv - y) / bt601::cr_scale);
    }
    return out;
}

/// Inverse of to_ycbcr. Results are not clamped; out-of-gamut combinations
/// produce values outside [0,1].
template <std::floating_point T>
Image<T> from_ycbcr(const Image<T>& ycc)
{
    detail::require_channels(ycc, 3, "from_ycbcr");
    Image<T> out(ycc.width(), ycc.height(), 3);
    auto yi = ycc.plane(0);
    auto cbi = ycc.plane(1);
    auto cri = ycc.plane(2);
    auto r = out.plane(0);
    auto g = out.plane(1);
    auto b = out.plane(2);
    for (std::size_t i = 0; i < yi.size(); ++i) {
        const double y = yi[i];
        const double rv = y + bt601::cr_scale * (static_cast<double>(cri[i]) - 0.5);
        const double bv = y + bt601::cb_scale * (static_cast<double>(cbi[i]) - 0.5);
        const double gv = (y - bt601::kr * rv - bt601::kb * bv) / bt601::kg;
        r[i] = static_cast<T>(rv);
        g[i] = static_cast<T>(gv);
        b[i] = static_cast<T>(bv);
    }
    return out;
}

} // namespace pansharp
