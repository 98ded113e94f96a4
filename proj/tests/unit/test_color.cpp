#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pansharp/color.hpp"

using namespace pansharp;

TEST(YCbCr, GrayMapsToNeutralChroma)
{
    for (float v : {0.0f, 0.25f, 0.5f, 0.8f, 1.0f}) {
        const Raster ycc = to_ycbcr(Raster(2, 2, 3, v));
        EXPECT_FLOAT_EQ(ycc(0, 0, 0), v);
        EXPECT_FLOAT_EQ(ycc(1, 1, 1), 0.5f);
        EXPECT_FLOAT_EQ(ycc(2, 0, 1), 0.5f);
    }
}

TEST(YCbCr, PureRedLumaIsBt601Coefficient)
{
    Raster red(1, 1, 3);
    red(0, 0, 0) = 1.0f;
    EXPECT_FLOAT_EQ(to_ycbcr(red)(0, 0, 0), 0.299f);
}

TEST(YCbCr, ForwardMatchesCoefficientTable)
{
    std::mt19937 rng(11);
    const Raster rgb = fixtures::random_image(rng, 8, 8, 3);
    const Raster ycc = to_ycbcr(rgb);
    for (std::size_t i = 0; i < rgb.pixel_count(); ++i) {
        const auto ref = oracle::ycbcr(rgb.plane(0)[i], rgb.plane(1)[i], rgb.plane(2)[i]);
        for (std::size_t c = 0; c < 3; ++c) {
            EXPECT_NEAR(ycc.plane(c)[i], ref[c], 2e-6);
        }
    }
}

TEST(YCbCr, RoundTripWithinOneEMinusFive)
{
    std::mt19937 rng(12);
    const Raster rgb = fixtures::random_image(rng, 32, 32, 3);
    const Raster back = from_ycbcr(to_ycbcr(rgb));
    for (std::size_t i = 0; i < rgb.size(); ++i) {
        EXPECT_NEAR(back.data()[i], rgb.data()[i], 1e-5);
    }
}

TEST(YCbCr, RejectsWrongChannelCount)
{
    EXPECT_THROW(to_ycbcr(Raster(2, 2, 1)), ShapeError);
    EXPECT_THROW(from_ycbcr(Raster(2, 2, 4)), ShapeError);
}
