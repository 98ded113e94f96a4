#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "pansharp/featbank.hpp"
#include "pansharp/image.hpp"

namespace fixtures {

using pansharp::Image;
using pansharp::Raster;

template <typename T = float>
Image<T> random_image(std::mt19937& rng, std::size_t w, std::size_t h, std::size_t c, double lo = 0.0,
                      double hi = 1.0)
{
    std::uniform_real_distribution<double> dist(lo, hi);
    Image<T> img(w, h, c);
    for (T& v : img.data()) {
        v = static_cast<T>(dist(rng));
    }
    return img;
}

/// Random image drawn from a small palette so recolorization hits exact ties.
inline Raster palette_image(std::mt19937& rng, std::size_t w, std::size_t h, std::size_t c, std::size_t colors)
{
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    std::vector<std::vector<float>> palette(colors, std::vector<float>(c));
    for (auto& color : palette) {
        for (float& v : color) {
            v = dist(rng);
        }
    }
    std::uniform_int_distribution<std::size_t> pick(0, colors - 1);
    Raster img(w, h, c);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const auto& color = palette[pick(rng)];
            for (std::size_t k = 0; k < c; ++k) {
                img(k, y, x) = color[k];
            }
        }
    }
    return img;
}

/// Random sequential bank of `stages` stages with odd kernels.
inline pansharp::FeatureBank random_bank(std::mt19937& rng, std::size_t stages, bool allow_pool = true)
{
    std::uniform_real_distribution<float> wdist(-0.5f, 0.5f);
    std::uniform_int_distribution<int> chan(1, 5);
    std::uniform_int_distribution<int> kern(0, 2);
    std::uniform_int_distribution<int> coin(0, 1);
    pansharp::FeatureBank bank;
    bank.mean = {0.4f, 0.45f, 0.5f};
    bank.stddev = {0.25f, 0.2f, 0.3f};
    std::uint32_t in = 3;
    for (std::size_t s = 0; s < stages; ++s) {
        pansharp::ConvStage st;
        st.in_channels = in;
        st.out_channels = static_cast<std::uint32_t>(chan(rng));
        st.kernel = static_cast<std::uint32_t>(1 + 2 * kern(rng));
        st.activation = coin(rng) ? pansharp::Activation::relu : pansharp::Activation::identity;
        if (allow_pool && coin(rng) && s + 1 < stages) {
            st.pool = pansharp::PoolSpec{2, 2};
        }
        st.weights.resize(std::size_t{st.out_channels} * st.in_channels * st.kernel * st.kernel);
        for (float& v : st.weights) {
            v = wdist(rng);
        }
        st.bias.resize(st.out_channels);
        for (float& v : st.bias) {
            v = wdist(rng);
        }
        in = st.out_channels;
        bank.stages.push_back(std::move(st));
    }
    for (std::uint32_t s = 0; s < stages; ++s) {
        if (s + 1 == stages || coin(rng)) {
            bank.taps.push_back(s);
        }
    }
    return bank;
}

/// VGG19-shaped slice up to relu3_1 (taps relu1_1, relu2_1, relu3_1) with random weights.
inline pansharp::FeatureBank vgg_shaped_bank(std::mt19937& rng)
{
    std::normal_distribution<float> wdist(0.0f, 0.05f);
    pansharp::FeatureBank bank;
    bank.mean = {0.485f, 0.456f, 0.406f};
    bank.stddev = {0.229f, 0.224f, 0.225f};
    struct Layer {
        std::uint32_t in, out;
        bool pool;
    };
    const std::vector<Layer> layers{{3, 64, false}, {64, 64, true}, {64, 128, false}, {128, 128, true},
                                    {128, 256, false}};
    for (const Layer& l : layers) {
        pansharp::ConvStage st;
        st.in_channels = l.in;
        st.out_channels = l.out;
        st.kernel = 3;
        st.activation = pansharp::Activation::relu;
        if (l.pool) {
            st.pool = pansharp::PoolSpec{2, 2};
        }
        st.weights.resize(std::size_t{l.out} * l.in * 9);
        for (float& v : st.weights) {
            v = wdist(rng);
        }
        st.bias.assign(l.out, 0.01f);
        bank.stages.push_back(std::move(st));
    }
    bank.taps = {0, 2, 4};
    return bank;
}

/// Hand-rolled FBANK1 writer, independent of pansharp::save_bank.
class FbankBytes {
public:
    FbankBytes& raw(const std::string& s)
    {
        bytes.insert(bytes.end(), s.begin(), s.end());
        return *this;
    }
    FbankBytes& u8(std::uint8_t v)
    {
        bytes.push_back(v);
        return *this;
    }
    FbankBytes& u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i) {
            bytes.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
        }
        return *this;
    }
    FbankBytes& f32(float v)
    {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        return u32(bits);
    }
    std::vector<std::uint8_t> bytes;
};

/// Minimal valid bank: one 1x1 identity stage reading channel 0, one tap.
inline std::vector<std::uint8_t> minimal_bank_bytes()
{
    FbankBytes b;
    b.raw(std::string("FBANK1\0\0", 8)).u32(3);
    b.f32(0).f32(0).f32(0).f32(1).f32(1).f32(1);
    b.u32(1).u32(1).u32(0);
    b.u32(3).u32(1).u32(1).u8(0).u8(0);
    b.f32(1).f32(0).f32(0);
    b.f32(0);
    return b.bytes;
}

} // namespace fixtures
