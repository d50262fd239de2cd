#pragma once

// Fixtures shared by the unit and acceptance suites.

#include "yoloprep/annot_formats.hpp"
#include "yoloprep/image_io.hpp"
#include "yoloprep/raster.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace yoloprep::testing {

namespace fs = std::filesystem;

class TempDir
{
public:
    TempDir()
    {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("yoloprep_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }

    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const noexcept { return path_; }

private:
    fs::path path_;
};

/// A valid box fully inside a width x height frame, on the 6-decimal grid.
inline CenterBox random_box(std::mt19937_64& rng, int class_count, int width, int height)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto snap = [](double v) { return std::round(v * 1e6) / 1e6; };
    const double min_w = std::max(2.0 / width, 1e-3);
    const double min_h = std::max(2.0 / height, 1e-3);
    CenterBox b;
    b.class_id = static_cast<int>(rng() % static_cast<std::uint64_t>(class_count));
    b.w = snap(min_w + unit(rng) * (0.6 - min_w));
    b.h = snap(min_h + unit(rng) * (0.6 - min_h));
    b.cx = snap(b.w / 2.0 + unit(rng) * (1.0 - b.w));
    b.cy = snap(b.h / 2.0 + unit(rng) * (1.0 - b.h));
    return b;
}

inline Raster gradient_raster(int width, int height, std::uint64_t seed)
{
    Raster r(width, height);
    for (int y = 0; y < height; ++y)
    {
        for (int x = 0; x < width; ++x)
        {
            auto* p = r.at(x, y);
            p[0] = static_cast<std::uint8_t>((x * 255) / std::max(1, width - 1));
            p[1] = static_cast<std::uint8_t>((y * 255) / std::max(1, height - 1));
            p[2] = static_cast<std::uint8_t>((seed * 37 + static_cast<std::uint64_t>(x + y)) % 256);
        }
    }
    return r;
}

/// Writes `<dir>/<id>.jpg` and `<dir>/<id>.txt`.
inline void write_sample(const fs::path& dir, const std::string& id, int width, int height,
                         const std::vector<CenterBox>& boxes, std::uint64_t seed = 0)
{
    write_jpeg(dir / (id + ".jpg"), gradient_raster(width, height, seed));
    write_text_file(dir / (id + ".txt"), serialize_yolo_annotation(boxes));
}

/// `count` images of width x height with 1..5 random boxes each, ids img0000...
inline void write_synthetic_dataset(const fs::path& dir, int count, int width, int height, int class_count,
                                    std::uint64_t seed)
{
    fs::create_directories(dir);
    std::mt19937_64 rng(seed);
    const Raster pixels = gradient_raster(width, height, seed);
    const auto jpeg = encode_jpeg(pixels);
    for (int i = 0; i < count; ++i)
    {
        char id[32];
        std::snprintf(id, sizeof(id), "img%04d", i);
        std::vector<CenterBox> boxes;
        const int n = 1 + static_cast<int>(rng() % 5);
        for (int k = 0; k < n; ++k)
        {
            boxes.push_back(random_box(rng, class_count, width, height));
        }
        write_file_bytes(dir / (std::string(id) + ".jpg"), jpeg);
        write_text_file(dir / (std::string(id) + ".txt"), serialize_yolo_annotation(boxes));
    }
}

inline void write_project_file(const fs::path& path, const std::string& name, const fs::path& dataset,
                               const std::string& classes, const std::string& train_pct, const fs::path& output,
                               std::uint64_t seed = 7)
{
    write_text_file(path, "name = " + name + "\ndataset = " + dataset.string() + "\nclasses = " + classes +
                              "\ntrain_pct = " + train_pct + "\nseed = " + std::to_string(seed) +
                              "\noutput = " + output.string() + "\n");
}

} // namespace yoloprep::testing
