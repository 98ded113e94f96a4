#pragma once

// Color-aware perceptual (CAP) weighting and the loss terms built on it.
//
// All norms are normalized to per-element means so magnitudes do not depend
// on resolution or channel count.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "pansharp/error.hpp"
#include "pansharp/featbank.hpp"
#include "pansharp/image.hpp"
#include "pansharp/parallel.hpp"
#include "pansharp/raster.hpp"
#include "pansharp/recolor.hpp"

namespace pansharp {

/// Per-layer, per-channel weights in (0, 1].
struct CapWeights {
    std::vector<std::vector<double>> layers;
};

struct LossParams {
    double gamma = 4.0;
    double alpha_cap = 0.9;
    double alpha_ms = 0.01;
    double alpha_l1 = 1.0;
    std::vector<std::size_t> pool_sizes{7, 5, 3};
    /// PAN-to-MS resolution ratio.
    std::size_t downscale_factor = 4;

    void validate(const FeatureBank& bank) const
    {
        if (!(gamma >= 0.0) || !(alpha_cap >= 0.0) || !(alpha_ms >= 0.0) || !(alpha_l1 >= 0.0)) {
            throw ArgumentError("gamma and alpha weights must be non-negative");
        }
        if (pool_sizes.size() != bank.tap_count()) {
            throw ArgumentError("pool_sizes has " + std::to_string(pool_sizes.size()) + " entries, bank has " +
                                std::to_string(bank.tap_count()) + " taps");
        }
        for (std::size_t m : pool_sizes) {
            if (m == 0) {
                throw ArgumentError("pool sizes must be >= 1");
            }
        }
        if (downscale_factor == 0) {
            throw ArgumentError("downscale factor must be >= 1");
        }
    }
};

struct LossReport {
    double cap = 0.0;
    double perceptual_ms = 0.0;
    double l1_ms = 0.0;
    double fidelity = 0.0;
    double rc = 0.0;
    double total = 0.0;
};

namespace detail {

inline void require_matching_maps(const FeatureMaps& a, const FeatureMaps& b, const char* what)
{
    if (a.taps.size() != b.taps.size()) {
        throw ShapeError(std::string(what) + ": tap count mismatch");
    }
    for (std::size_t l = 0; l < a.taps.size(); ++l) {
        require_same_shape(a.taps[l], b.taps[l], what);
    }
}

} // namespace detail

/// Sum over layers of the mean squared feature difference.
inline double perceptual_loss(const FeatureMaps& fa, const FeatureMaps& fb)
{
    detail::require_matching_maps(fa, fb, "perceptual_loss");
    double total = 0.0;
    for (std::size_t l = 0; l < fa.taps.size(); ++l) {
        auto a = fa.taps[l].data();
        auto b = fb.taps[l].data();
        double sum = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = static_cast<double>(a[i]) - b[i];
            sum += d * d;
        }
        total += sum / static_cast<double>(a.size());
    }
    return total;
}

/// Mean absolute error over all elements.
template <std::floating_point T>
double l1_loss(const Image<T>& a, const Image<T>& b)
{
    detail::require_same_shape(a, b, "l1_loss");
    auto ad = a.data();
    auto bd = b.data();
    double sum = 0.0;
    for (std::size_t i = 0; i < ad.size(); ++i) {
        sum += std::abs(static_cast<double>(ad[i]) - bd[i]);
    }
    return sum / static_cast<double>(ad.size());
}

/// Channel weights exp(-gamma * mean_n |phi(gray_inverted(ms)) - phi(ms)|).
///
/// Channels whose response moves most when color is removed and brightness is
/// inverted get the smallest weights. gamma = 0 gives exactly 1 everywhere.
/// Weights that would underflow are held at the smallest normal double so they
/// stay strictly positive.
inline CapWeights cap_weights(const FeatureBank& bank, const Raster& ms, double gamma, const Parallelism& par = {})
{
    detail::require_channels(ms, 3, "cap_weights ms");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw ArgumentError("gamma must be finite and >= 0");
    }
    for (float v : ms.data()) {
        if (!(v >= 0.0f && v <= 1.0f)) {
            throw ArgumentError("cap_weights: MS values must lie in [0,1]");
        }
    }
    const Raster inverted = replicate_channels(gray_inverted(ms), 3);
    const FeatureMaps f_inv = extract(bank, inverted, par);
    const FeatureMaps f_ms = extract(bank, ms, par);

    CapWeights weights;
    weights.layers.resize(f_ms.taps.size());
    for (std::size_t l = 0; l < f_ms.taps.size(); ++l) {
        const Raster& a = f_inv.taps[l];
        const Raster& b = f_ms.taps[l];
        auto& layer = weights.layers[l];
        layer.resize(a.channels());
        for (std::size_t c = 0; c < a.channels(); ++c) {
            auto pa = a.plane(c);
            auto pb = b.plane(c);
            double sum = 0.0;
            for (std::size_t n = 0; n < pa.size(); ++n) {
                sum += std::abs(static_cast<double>(pa[n]) - pb[n]);
            }
            const double mean_diff = sum / static_cast<double>(pa.size());
            layer[c] = std::max(std::exp(-gamma * mean_diff), std::numeric_limits<double>::min());
        }
    }
    return weights;
}

/// Weighted, max-pooled l1 feature distance between the PAN image and the PS image.
///
/// PAN is replicated to three channels; PS is fed as-is. Pools are stride 1 over
/// the valid region and applied to both sides.
inline double cap_loss(const FeatureBank& bank, const CapWeights& weights, const Raster& pan, const Raster& ps,
                       std::span<const std::size_t> pool_sizes, const Parallelism& par = {})
{
    detail::require_channels(pan, 1, "cap_loss pan");
    if (!pan.same_extent(ps)) {
        throw ShapeError("cap_loss: pan " + pan.shape_string() + " vs ps " + ps.shape_string());
    }
    if (weights.layers.size() != bank.tap_count() || pool_sizes.size() != bank.tap_count()) {
        throw ShapeError("cap_loss: weights/pool sizes do not match the bank's tap count");
    }
    const FeatureMaps f_pan = extract(bank, pan, par);
    const FeatureMaps f_ps = extract(bank, ps, par);
    double total = 0.0;
    for (std::size_t l = 0; l < f_pan.taps.size(); ++l) {
        const auto& layer_w = weights.layers[l];
        if (layer_w.size() != f_pan.taps[l].channels()) {
            throw ShapeError("cap_loss: layer " + std::to_string(l) + " has " +
                             std::to_string(f_pan.taps[l].channels()) + " channels but " +
                             std::to_string(layer_w.size()) + " weights");
        }
        const Raster a = max_pool(f_pan.taps[l], pool_sizes[l], 1);
        const Raster b = max_pool(f_ps.taps[l], pool_sizes[l], 1);
        double sum = 0.0;
        for (std::size_t c = 0; c < a.channels(); ++c) {
            auto pa = a.plane(c);
            auto pb = b.plane(c);
            double channel_sum = 0.0;
            for (std::size_t n = 0; n < pa.size(); ++n) {
                channel_sum += std::abs(static_cast<double>(pa[n]) - pb[n]);
            }
            sum += layer_w[c] * channel_sum;
        }
        total += sum / static_cast<double>(a.size());
    }
    return total;
}

/// Fidelity loss with externally supplied CAP weights; `rc` and `total` equal to the fidelity.
inline LossReport fidelity_loss(const FeatureBank& bank, const CapWeights& weights, const Raster& pan,
                                const Raster& ps, const Raster& ms, const LossParams& params,
                                const Parallelism& par = {})
{
    params.validate(bank);
    const std::size_t r = params.downscale_factor;
    if (ps.width() != ms.width() * r || ps.height() != ms.height() * r) {
        throw ShapeError("fidelity_loss: ps " + ps.shape_string() + " is not " + std::to_string(r) + "x ms " +
                         ms.shape_string());
    }
    const Raster ps_down = downscale_area(ps, r);
    LossReport report;
    report.cap = cap_loss(bank, weights, pan, ps, params.pool_sizes, par);
    report.perceptual_ms = perceptual_loss(extract(bank, ms, par), extract(bank, ps_down, par));
    report.l1_ms = l1_loss(ms, ps_down);
    report.fidelity =
        params.alpha_cap * report.cap + params.alpha_ms * report.perceptual_ms + params.alpha_l1 * report.l1_ms;
    report.rc = 0.0;
    report.total = report.fidelity;
    return report;
}

/// Fidelity loss with CAP weights derived from `ms` at `params.gamma`.
inline LossReport fidelity_loss(const FeatureBank& bank, const Raster& pan, const Raster& ps, const Raster& ms,
                                const LossParams& params, const Parallelism& par = {})
{
    params.validate(bank);
    return fidelity_loss(bank, cap_weights(bank, ms, params.gamma, par), pan, ps, ms, params, par);
}

/// Mean |ps - luma_guided(recolorize(ps, ms_up), ps)|.
inline double rc_loss(const Raster& ps, const Raster& ms_up, const RecolorParams& params,
                      const Parallelism& par = {})
{
    detail::require_channels(ps, 3, "rc_loss ps");
    detail::require_same_shape(ps, ms_up, "rc_loss");
    const Raster yrc = luma_guided(recolorize(ps, ms_up, params, par), ps);
    return l1_loss(ps, yrc);
}

/// Fidelity plus RC loss. MS is up-scaled bilinearly by the downscale factor for the RC term.
inline LossReport total_loss(const FeatureBank& bank, const CapWeights& weights, const Raster& pan,
                             const Raster& ps, const Raster& ms, const LossParams& params,
                             const RecolorParams& rc_params, const Parallelism& par = {})
{
    LossReport report = fidelity_loss(bank, weights, pan, ps, ms, params, par);
    const Raster ms_up = upscale_bilinear(ms, params.downscale_factor, par);
    report.rc = rc_loss(ps, ms_up, rc_params, par);
    report.total = report.fidelity + report.rc;
    return report;
}

} // namespace pansharp
