#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pansharp/raster.hpp"

using namespace pansharp;

namespace {

float max_abs_diff(const Raster& a, const Raster& b)
{
    float m = 0.0f;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    }
    return m;
}

} // namespace

TEST(Image, RejectsZeroDimensionsAndBadDataLength)
{
    EXPECT_THROW(Raster(0, 1, 1), ShapeError);
    EXPECT_THROW(Raster(2, 2, 1, std::vector<float>(3)), ShapeError);
    Raster r(2, 3, 4);
    EXPECT_EQ(r.size(), 24u);
    EXPECT_EQ(r.plane(3).size(), 6u);
}

TEST(UpscaleBilinear, ConstantStaysConstant)
{
    const Raster src(3, 2, 3, 0.37f);
    for (std::size_t f : {1u, 2u, 3u, 4u}) {
        const Raster up = upscale_bilinear(src, f);
        EXPECT_EQ(up.width(), 3 * f);
        EXPECT_EQ(up.height(), 2 * f);
        for (float v : up.data()) {
            EXPECT_EQ(v, 0.37f);
        }
    }
}

TEST(UpscaleBilinear, FactorOneIsBitIdentical)
{
    std::mt19937 rng(1);
    const Raster src = fixtures::random_image(rng, 5, 7, 3);
    EXPECT_EQ(upscale_bilinear(src, 1), src);
}

TEST(UpscaleBilinear, HalfPixelColumnsMatchHandEvaluation)
{
    const Raster src(2, 2, 1, std::vector<float>{0, 1, 0, 1});
    const Raster up = upscale_bilinear(src, 2);
    const float expected[4] = {0.0f, 0.25f, 0.75f, 1.0f};
    for (std::size_t y = 0; y < 4; ++y) {
        for (std::size_t x = 0; x < 4; ++x) {
            EXPECT_EQ(up(0, y, x), expected[x]) << y << "," << x;
        }
    }
}

TEST(UpscaleBilinear, MatchesSamplingFormulaOracleAndStaysInBounds)
{
    std::mt19937 rng(2);
    for (std::size_t f : {2u, 3u, 4u}) {
        const Raster src = fixtures::random_image(rng, 6, 5, 3);
        const Raster up = upscale_bilinear(src, f);
        EXPECT_LE(max_abs_diff(up, oracle::bilinear(src, f)), 1e-6f);
        const auto [lo, hi] = std::minmax_element(src.data().begin(), src.data().end());
        for (float v : up.data()) {
            EXPECT_GE(v, *lo);
            EXPECT_LE(v, *hi);
        }
    }
}

TEST(UpscaleBilinear, RejectsZeroFactor)
{
    EXPECT_THROW(upscale_bilinear(Raster(2, 2, 1), 0), ArgumentError);
}

TEST(DownscaleArea, HandCases)
{
    const Raster src(2, 2, 1, std::vector<float>{0, 1, 1, 0});
    const Raster down = downscale_area(src, 2);
    ASSERT_EQ(down.size(), 1u);
    EXPECT_EQ(down.data()[0], 0.5f);
    const Raster c(8, 4, 2, 0.3f);
    const Raster c_down = downscale_area(c, 4);
    for (float v : c_down.data()) {
        EXPECT_EQ(v, 0.3f);
    }
}

TEST(DownscaleArea, MatchesBlockMeanOracleAndPreservesMean)
{
    std::mt19937 rng(3);
    const Raster src = fixtures::random_image(rng, 8, 8, 3);
    const Raster down = downscale_area(src, 4);
    EXPECT_EQ(down, oracle::block_mean(src, 4));
    double m_src = 0.0;
    double m_down = 0.0;
    for (float v : src.data()) {
        m_src += v;
    }
    for (float v : down.data()) {
        m_down += v;
    }
    m_src /= static_cast<double>(src.size());
    m_down /= static_cast<double>(down.size());
    EXPECT_NEAR(m_down, m_src, 1e-6 * m_src);
}

TEST(DownscaleArea, RejectsNonDivisibleSize)
{
    EXPECT_THROW(downscale_area(Raster(6, 8, 1), 4), ShapeError);
    EXPECT_THROW(downscale_area(Raster(8, 8, 1), 0), ArgumentError);
}

TEST(BoxFilter, IdentityConstantAndErrors)
{
    std::mt19937 rng(4);
    const Raster src = fixtures::random_image(rng, 6, 6, 2);
    EXPECT_EQ(box_filter(src, 1), src);
    const Raster c(7, 5, 3, 0.61f);
    EXPECT_EQ(box_filter(c, 5), c);
    EXPECT_EQ(box_filter(box_filter(c, 3), 3), c);
    EXPECT_THROW(box_filter(src, 0), ArgumentError);
    EXPECT_THROW(box_filter(src, 4), ArgumentError);
}

TEST(BoxFilter, ImpulseSpreadsOneTwentyFifth)
{
    Raster impulse(5, 5, 1);
    impulse(0, 2, 2) = 1.0f;
    const Raster out = box_filter(impulse, 5);
    // With edge replication the center pixel falls in every 5x5 window exactly once.
    for (float v : out.data()) {
        EXPECT_FLOAT_EQ(v, 1.0f / 25.0f);
    }
}

TEST(BoxFilter, MatchesDirectConvolutionOracleAndStaysInBounds)
{
    std::mt19937 rng(5);
    for (std::size_t s : {3u, 5u, 7u}) {
        const Raster src = fixtures::random_image(rng, 9, 11, 3);
        const Raster out = box_filter(src, s);
        EXPECT_LE(max_abs_diff(out, oracle::box(src, s)), 1e-6f);
        const auto [lo, hi] = std::minmax_element(src.data().begin(), src.data().end());
        for (float v : out.data()) {
            EXPECT_GE(v, *lo);
            EXPECT_LE(v, *hi);
        }
    }
}

TEST(HighFreq, ConstantGivesZerosAndImpulseMatchesHandValues)
{
    const Raster flat = high_freq(Raster(6, 6, 3, 0.4f), 5);
    for (float v : flat.data()) {
        EXPECT_EQ(v, 0.0f);
    }
    Raster impulse(5, 5, 1);
    impulse(0, 2, 2) = 1.0f;
    const Raster hf = high_freq(impulse, 3);
    EXPECT_FLOAT_EQ(hf(0, 2, 2), 1.0f - 1.0f / 9.0f);
    EXPECT_FLOAT_EQ(hf(0, 1, 2), -1.0f / 9.0f);
    EXPECT_FLOAT_EQ(hf(0, 3, 3), -1.0f / 9.0f);
    EXPECT_FLOAT_EQ(hf(0, 0, 0), 0.0f);
}

TEST(HighFreq, ReconstructsSourceWithBoxFilter)
{
    std::mt19937 rng(6);
    const Raster src = fixtures::random_image(rng, 12, 10, 3);
    const Raster rebuilt = add(high_freq(src, 5), box_filter(src, 5));
    // One float rounding in the subtraction and one in the addition.
    EXPECT_LE(max_abs_diff(rebuilt, src), 1.2e-7f);
}

TEST(GrayInverted, HandValues)
{
    const Raster white = gray_inverted(Raster(3, 3, 3, 1.0f));
    for (float v : white.data()) {
        EXPECT_EQ(v, 0.0f);
    }
    const Raster half(4, 4, 3, 0.5f);
    EXPECT_EQ(gray_inverted(half), Raster(4, 4, 1, 0.5f));
    EXPECT_EQ(replicate_channels(gray_inverted(half), 3), half);

    Raster red(1, 1, 3);
    red(0, 0, 0) = 1.0f;
    EXPECT_FLOAT_EQ(gray_inverted(red).data()[0], 2.0f / 3.0f);
    EXPECT_THROW(gray_inverted(Raster(2, 2, 1)), ShapeError);
}

TEST(ZeroFraction, ThresholdArithmetic)
{
    EXPECT_EQ(zero_fraction(Raster(4, 4, 3)), 1.0);

    auto tile_with_zeros = [](std::size_t zeros) {
        Raster tile(16, 16, 3, 0.5f);
        for (std::size_t i = 0; i < zeros; ++i) {
            for (std::size_t c = 0; c < 3; ++c) {
                tile.plane(c)[i * 7] = 0.0f;
            }
        }
        return tile;
    };
    EXPECT_DOUBLE_EQ(zero_fraction(tile_with_zeros(13)), 13.0 / 256.0);
    EXPECT_GT(zero_fraction(tile_with_zeros(13)), 0.05);
    EXPECT_DOUBLE_EQ(zero_fraction(tile_with_zeros(12)), 12.0 / 256.0);
    EXPECT_LE(zero_fraction(tile_with_zeros(12)), 0.05);

    Raster one_channel_zero(5, 5, 3, 0.2f);
    std::fill(one_channel_zero.plane(1).begin(), one_channel_zero.plane(1).end(), 0.0f);
    EXPECT_EQ(zero_fraction(one_channel_zero), 0.0);
}

TEST(ZeroFraction, InvariantUnderChannelPermutation)
{
    std::mt19937 rng(7);
    Raster img = fixtures::random_image(rng, 8, 8, 3);
    for (std::size_t i = 0; i < img.pixel_count(); i += 3) {
        for (std::size_t c = 0; c < 3; ++c) {
            img.plane(c)[i] = 0.0f;
        }
    }
    img.plane(0)[1] = 0.0f;
    Raster swapped(8, 8, 3);
    for (std::size_t c = 0; c < 3; ++c) {
        std::copy(img.plane((c + 1) % 3).begin(), img.plane((c + 1) % 3).end(), swapped.plane(c).begin());
    }
    EXPECT_EQ(zero_fraction(swapped), zero_fraction(img));
    EXPECT_DOUBLE_EQ(zero_fraction(img), 22.0 / 64.0);
}

TEST(ConcatChannels, StacksPlanesInOrder)
{
    const Raster a(2, 2, 1, 0.1f);
    const Raster b(2, 2, 2, 0.2f);
    const Raster s = concat_channels<float>({&a, &b});
    EXPECT_EQ(s.channels(), 3u);
    EXPECT_EQ(s(0, 1, 1), 0.1f);
    EXPECT_EQ(s(2, 0, 0), 0.2f);
    const Raster wide(3, 2, 1);
    EXPECT_THROW(concat_channels<float>({&a, &wide}), ShapeError);
}
