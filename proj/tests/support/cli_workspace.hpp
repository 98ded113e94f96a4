#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "fixtures.hpp"
#include "image_io.hpp"
#include "pansharp/featbank.hpp"
#include "pansharp/raster.hpp"
#include "pansharp/rawten.hpp"

namespace fixtures {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

inline CliResult run_cli(const std::vector<std::string>& args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = pansharp::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

inline std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream(path, std::ios::binary | std::ios::trunc) << text;
}

/// Scratch directory populated with a small PS/MS/PAN triple, a bank and a dataset folder.
struct CliWorkspace {
    std::filesystem::path dir;
    pansharp::Raster ps;
    pansharp::Raster ms;
    pansharp::Raster pan;
    pansharp::FeatureBank bank;

    explicit CliWorkspace(const std::string& name, std::size_t size = 32, unsigned seed = 99)
        : dir(std::filesystem::temp_directory_path() / ("pansharp_cli_" + name))
    {
        namespace fs = std::filesystem;
        fs::remove_all(dir);
        fs::create_directories(dir / "dataset");
        std::mt19937 rng(seed);
        ms = random_image(rng, size / 4, size / 4, 3, 0.05, 0.95);
        const pansharp::Raster detail = random_image(rng, size, size, 3, -0.05, 0.05);
        ps = pansharp::add(pansharp::upscale_bilinear(ms, 4), detail);
        pan = pansharp::gray_inverted(ps);
        for (float& v : pan.data()) {
            v = 1.0f - v;
        }
        bank = random_bank(rng, 3, false);
        pansharp::write_rawten(dir / "ps.rten", ps);
        pansharp::write_rawten(dir / "ms.rten", ms);
        pansharp::write_rawten(dir / "pan.rten", pan);
        pansharp::cli::write_image(dir / "ps.png", ps, 16);
        pansharp::cli::write_image(dir / "ms.png", ms, 16);
        pansharp::cli::write_image(dir / "pan.png", pan, 16);
        const auto bytes = pansharp::save_bank(bank);
        pansharp::cli::write_bytes(dir / "bank.fbank", bytes);
        spit(dir / "batch.txt", "ps.rten ms.rten pan.rten\nps.png ms.png pan.png ps.png\n");

        // Tiles for the zero-fraction filter: 13/256 and 12/256 all-zero pixels.
        for (std::size_t zeros : {13u, 12u}) {
            pansharp::Raster tile(16, 16, 3, 0.5f);
            for (std::size_t i = 0; i < zeros; ++i) {
                for (std::size_t c = 0; c < 3; ++c) {
                    tile.plane(c)[i * 5] = 0.0f;
                }
            }
            const std::string id = "tile" + std::to_string(zeros);
            pansharp::cli::write_image(dir / "dataset" / (id + "_ms.png"), tile, 8);
            pansharp::cli::write_image(dir / "dataset" / (id + "_pan.png"), pansharp::Raster(64, 64, 1, 0.7f), 8);
        }
    }

    [[nodiscard]] std::string path(const std::string& file) const { return (dir / file).string(); }

    [[nodiscard]] std::string pool_sizes() const
    {
        std::string s;
        for (std::size_t l = 0; l < bank.tap_count(); ++l) {
            s += (l ? "," : "") + std::to_string(3);
        }
        return s;
    }
};

} // namespace fixtures
