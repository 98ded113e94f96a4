#pragma once

// Pan-sharpening quality metrics: ERGAS (spectral), SCC (spatial) and the
// no-reference QNR with its spectral/spatial distortion terms.
//
// Everything accumulates in double. Reductions run in a fixed order.

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pansharp/error.hpp"
#include "pansharp/image.hpp"
#include "pansharp/raster.hpp"

namespace pansharp {

/// 100 * ratio * sqrt(mean_k(RMSE_k^2 / mu_k^2)), mu_k the mean of reference band k.
///
/// `ratio` is the high/low resolution pixel-size ratio (1/4 for a 4x PAN/MS pair).
template <std::floating_point T>
double ergas(const Image<T>& reference, const Image<T>& test, double ratio)
{
    detail::require_same_shape(reference, test, "ergas");
    const std::size_t n = reference.pixel_count();
    double acc = 0.0;
    for (std::size_t k = 0; k < reference.channels(); ++k) {
        auto ref = reference.plane(k);
        auto tst = test.plane(k);
        double mean = 0.0;
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean += ref[i];
            const double d = static_cast<double>(ref[i]) - tst[i];
            sq += d * d;
        }
        mean /= static_cast<double>(n);
        if (mean == 0.0) {
            throw NumericError("ergas: reference band " + std::to_string(k) + " has zero mean");
        }
        const double mse = sq / static_cast<double>(n);
        acc += mse / (mean * mean);
    }
    return 100.0 * ratio * std::sqrt(acc / static_cast<double>(reference.channels()));
}

namespace detail {

/// 3x3 Laplacian (center 4, 4-neighbors -1) of one plane, edge-replicated.
template <std::floating_point T>
std::vector<double> laplacian(std::span<const T> plane, std::size_t w, std::size_t h)
{
    std::vector<double> out(w * h);
    auto at = [&](std::ptrdiff_t y, std::ptrdiff_t x) {
        return static_cast<double>(plane[clamp_index(y, h) * w + clamp_index(x, w)]);
    };
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const auto iy = static_cast<std::ptrdiff_t>(y);
            const auto ix = static_cast<std::ptrdiff_t>(x);
            out[y * w + x] =
                4.0 * at(iy, ix) - at(iy - 1, ix) - at(iy + 1, ix) - at(iy, ix - 1) - at(iy, ix + 1);
        }
    }
    return out;
}

inline double pearson(std::span<const double> a, std::span<const double> b)
{
    const auto n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) {
        throw NumericError("correlation of a zero-variance high-pass plane");
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

} // namespace detail

/// Mean over PS bands of the correlation between the Laplacian high-pass of
/// each band and that of the PAN image.
template <std::floating_point T>
double scc(const Image<T>& pan, const Image<T>& ps)
{
    detail::require_channels(pan, 1, "scc pan");
    if (!pan.same_extent(ps)) {
        throw ShapeError("scc: pan " + pan.shape_string() + " vs ps " + ps.shape_string());
    }
    const std::vector<double> hp_pan = detail::laplacian(pan.plane(0), pan.width(), pan.height());
    double sum = 0.0;
    for (std::size_t k = 0; k < ps.channels(); ++k) {
        const std::vector<double> hp = detail::laplacian(ps.plane(k), ps.width(), ps.height());
        sum += detail::pearson(hp, hp_pan);
    }
    return sum / static_cast<double>(ps.channels());
}

/// Universal image-quality index averaged over non-overlapping block x block tiles.
///
/// A tile whose denominator vanishes counts as 1 when both planes are equal on
/// it and is skipped otherwise. Partial tiles at the right/bottom edge are ignored.
template <std::floating_point T>
double uiq_planes(std::span<const T> a, std::span<const T> b, std::size_t width, std::size_t height,
                  std::size_t block)
{
    if (block == 0) {
        throw ArgumentError("uiq block must be >= 1");
    }
    if (width < block || height < block) {
        throw ShapeError("uiq: " + std::to_string(width) + "x" + std::to_string(height) +
                         " image is smaller than one " + std::to_string(block) + " block");
    }
    const double n = static_cast<double>(block * block);
    double q_sum = 0.0;
    std::size_t tiles = 0;
    for (std::size_t ty = 0; ty + block <= height; ty += block) {
        for (std::size_t tx = 0; tx + block <= width; tx += block) {
            double ma = 0.0;
            double mb = 0.0;
            for (std::size_t y = ty; y < ty + block; ++y) {
                for (std::size_t x = tx; x < tx + block; ++x) {
                    ma += a[y * width + x];
                    mb += b[y * width + x];
                }
            }
            ma /= n;
            mb /= n;
            double vab = 0.0;
            double vaa = 0.0;
            double vbb = 0.0;
            bool identical = true;
            bool a_flat = true;
            bool b_flat = true;
            const double a0 = a[ty * width + tx];
            const double b0 = b[ty * width + tx];
            for (std::size_t y = ty; y < ty + block; ++y) {
                for (std::size_t x = tx; x < tx + block; ++x) {
                    const double av = a[y * width + x];
                    const double bv = b[y * width + x];
                    identical = identical && av == bv;
                    a_flat = a_flat && av == a0;
                    b_flat = b_flat && bv == b0;
                    vab += (av - ma) * (bv - mb);
                    vaa += (av - ma) * (av - ma);
                    vbb += (bv - mb) * (bv - mb);
                }
            }
            // A constant tile has zero variance even when its rounded mean is inexact.
            if (a_flat) {
                ma = a0;
                vaa = 0.0;
                vab = 0.0;
            }
            if (b_flat) {
                mb = b0;
                vbb = 0.0;
                vab = 0.0;
            }
            vab /= n;
            vaa /= n;
            vbb /= n;
            const double denom = (vaa + vbb) * (ma * ma + mb * mb);
            if (denom == 0.0) {
                if (identical) {
                    q_sum += 1.0;
                    ++tiles;
                }
                continue;
            }
            q_sum += 4.0 * vab * ma * mb / denom;
            ++tiles;
        }
    }
    if (tiles == 0) {
        throw NumericError("uiq: every tile is degenerate");
    }
    return q_sum / static_cast<double>(tiles);
}

template <std::floating_point T>
double uiq(const Image<T>& a, const Image<T>& b, std::size_t block)
{
    detail::require_channels(a, 1, "uiq a");
    detail::require_same_shape(a, b, "uiq");
    return uiq_planes(a.plane(0), b.plane(0), a.width(), a.height(), block);
}

struct QnrParams {
    std::size_t q_block = 32;
    double p = 1.0;
    double q = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
};

struct QnrResult {
    double d_lambda = 0.0;
    double d_s = 0.0;
    double qnr = 0.0;
    /// Tile size actually used after fitting to the low-resolution image.
    std::size_t block = 0;
};

/// `requested` when it fits in `min_dim`, else the largest power of two that does.
inline std::size_t fit_block(std::size_t requested, std::size_t min_dim)
{
    if (requested <= min_dim) {
        return requested;
    }
    std::size_t b = 1;
    while (b * 2 <= min_dim) {
        b *= 2;
    }
    return b;
}

/// QNR = (1 - D_lambda)^alpha * (1 - D_s)^beta.
///
/// D_lambda compares inter-band UIQ of PS against MS; D_s compares UIQ of each
/// PS band with PAN against UIQ of each MS band with the area-downscaled PAN.
/// The same tile size is used at both resolutions.
template <std::floating_point T>
QnrResult qnr(const Image<T>& ps, const Image<T>& ms, const Image<T>& pan, std::size_t ratio,
              const QnrParams& params = {})
{
    detail::require_channels(pan, 1, "qnr pan");
    if (ratio == 0) {
        throw ArgumentError("qnr ratio must be >= 1");
    }
    if (!pan.same_extent(ps) || ps.width() != ms.width() * ratio || ps.height() != ms.height() * ratio ||
        ps.channels() != ms.channels()) {
        throw ShapeError("qnr: inconsistent resolutions ps " + ps.shape_string() + ", ms " + ms.shape_string() +
                         ", pan " + pan.shape_string() + " at ratio " + std::to_string(ratio));
    }
    const std::size_t bands = ps.channels();
    if (bands < 2) {
        throw ShapeError("qnr needs at least two bands");
    }
    if (!(params.p > 0.0) || !(params.q > 0.0)) {
        throw ArgumentError("qnr exponents p and q must be > 0");
    }
    const std::size_t block = fit_block(params.q_block, std::min(ms.width(), ms.height()));
    const Image<T> pan_low = downscale_area(pan, ratio);

    auto q_ps = [&](std::size_t i, std::size_t j) {
        return uiq_planes(ps.plane(i), ps.plane(j), ps.width(), ps.height(), block);
    };
    auto q_ms = [&](std::size_t i, std::size_t j) {
        return uiq_planes(ms.plane(i), ms.plane(j), ms.width(), ms.height(), block);
    };

    double lambda_sum = 0.0;
    for (std::size_t i = 0; i < bands; ++i) {
        for (std::size_t j = i + 1; j < bands; ++j) {
            // uiq is symmetric, so each unordered pair stands for both orderings.
            lambda_sum += 2.0 * std::pow(std::abs(q_ps(i, j) - q_ms(i, j)), params.p);
        }
    }
    double spatial_sum = 0.0;
    for (std::size_t i = 0; i < bands; ++i) {
        const double q_high = uiq_planes(ps.plane(i), pan.plane(0), ps.width(), ps.height(), block);
        const double q_low = uiq_planes(ms.plane(i), pan_low.plane(0), ms.width(), ms.height(), block);
        spatial_sum += std::pow(std::abs(q_high - q_low), params.q);
    }

    QnrResult result;
    result.block = block;
    result.d_lambda =
        std::pow(lambda_sum / static_cast<double>(bands * (bands - 1)), 1.0 / params.p);
    result.d_s = std::pow(spatial_sum / static_cast<double>(bands), 1.0 / params.q);
    result.qnr = std::pow(1.0 - result.d_lambda, params.alpha) * std::pow(1.0 - result.d_s, params.beta);
    return result;
}

struct MetricsParams {
    /// PAN/MS resolution factor (integer, e.g. 4).
    std::size_t ratio = 4;
    QnrParams qnr;
};

inline constexpr const char* scc_kernel_name = "laplacian3x3";

/// Full metric suite for one evaluated image. Metrics whose preconditions fail
/// are left empty and described in `errors`.
struct MetricsReport {
    std::optional<double> ergas;
    std::optional<double> scc;
    std::optional<double> qnr;
    std::optional<double> d_lambda;
    std::optional<double> d_s;
    MetricsParams params;
    std::size_t q_block_used = 0;
    /// "reference" when an explicit reference was given, else "ms-vs-downscaled-ps".
    std::string ergas_protocol;
    std::map<std::string, std::string> errors;
};

/// Evaluates ERGAS, SCC and QNR.
///
/// ERGAS compares `ps` with `reference` when one is given; otherwise it compares
/// `ms` with `ps` area-downscaled to MS resolution. Either way the ERGAS ratio is
/// 1 / params.ratio.
template <std::floating_point T>
MetricsReport evaluate_metrics(const Image<T>& ps, const Image<T>& ms, const Image<T>& pan,
                               const Image<T>* reference, const MetricsParams& params)
{
    MetricsReport report;
    report.params = params;
    const double ergas_ratio = params.ratio == 0 ? 0.0 : 1.0 / static_cast<double>(params.ratio);
    try {
        if (reference != nullptr) {
            report.ergas_protocol = "reference";
            report.ergas = ergas(*reference, ps, ergas_ratio);
        } else {
            report.ergas_protocol = "ms-vs-downscaled-ps";
            if (params.ratio == 0) {
                throw ArgumentError("ratio must be >= 1");
            }
            report.ergas = ergas(ms, downscale_area(ps, params.ratio), ergas_ratio);
        }
    } catch (const Error& e) {
        report.errors["ergas"] = e.what();
    }
    try {
        report.scc = scc(pan, ps);
    } catch (const Error& e) {
        report.errors["scc"] = e.what();
    }
    try {
        const QnrResult q = qnr(ps, ms, pan, params.ratio, params.qnr);
        report.qnr = q.qnr;
        report.d_lambda = q.d_lambda;
        report.d_s = q.d_s;
        report.q_block_used = q.block;
    } catch (const Error& e) {
        report.errors["qnr"] = e.what();
    }
    return report;
}

} // namespace pansharp
