/**
 * Copyright 2026 The yoloprep Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "yoloprep/augmentation.hpp"

#include "yoloprep/image_io.hpp"
#include "yoloprep/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <set>
#include <thread>

namespace yoloprep {

namespace {

template <class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};

std::uint8_t to_byte(double v)
{
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

Raster remap(const Raster& in, int out_w, int out_h, auto source_of)
{
    Raster out(out_w, out_h);
    for (int y = 0; y < out_h; ++y)
    {
        for (int x = 0; x < out_w; ++x)
        {
            const auto [sx, sy] = source_of(x, y);
            const auto* s = in.at(sx, sy);
            auto* d = out.at(x, y);
            d[0] = s[0];
            d[1] = s[1];
            d[2] = s[2];
        }
    }
    return out;
}

Raster rotate_bilinear(const Raster& in, double degrees)
{
    const int W = in.width;
    const int H = in.height;
    const double theta = degrees * std::numbers::pi / 180.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double mx = W / 2.0;
    const double my = H / 2.0;

    Raster out(W, H);
    for (int y = 0; y < H; ++y)
    {
        for (int x = 0; x < W; ++x)
        {
            // inverse rotation of the output pixel center
            const double dx = x + 0.5 - mx;
            const double dy = y + 0.5 - my;
            const double fx = mx + dx * c + dy * s - 0.5;
            const double fy = my - dx * s + dy * c - 0.5;
            if (fx < -0.5 || fy < -0.5 || fx > W - 0.5 || fy > H - 0.5)
            {
                continue;
            }
            const int x0 = static_cast<int>(std::floor(fx));
            const int y0 = static_cast<int>(std::floor(fy));
            const double tx = fx - x0;
            const double ty = fy - y0;
            const int xa = std::clamp(x0, 0, W - 1);
            const int xb = std::clamp(x0 + 1, 0, W - 1);
            const int ya = std::clamp(y0, 0, H - 1);
            const int yb = std::clamp(y0 + 1, 0, H - 1);
            auto* d = out.at(x, y);
            for (int ch = 0; ch < 3; ++ch)
            {
                const double top = in.at(xa, ya)[ch] * (1.0 - tx) + in.at(xb, ya)[ch] * tx;
                const double bottom = in.at(xa, yb)[ch] * (1.0 - tx) + in.at(xb, yb)[ch] * tx;
                d[ch] = to_byte(top * (1.0 - ty) + bottom * ty);
            }
        }
    }
    return out;
}

/// Separable convolution with edge-clamp padding; `kernel` has odd length.
Raster convolve_separable(const Raster& in, const std::vector<double>& kernel)
{
    const int W = in.width;
    const int H = in.height;
    const int r = static_cast<int>(kernel.size() / 2);
    std::vector<double> tmp(in.pixels.size());

    for (int y = 0; y < H; ++y)
    {
        for (int x = 0; x < W; ++x)
        {
            for (int ch = 0; ch < 3; ++ch)
            {
                double acc = 0.0;
                for (int k = -r; k <= r; ++k)
                {
                    acc += kernel[static_cast<std::size_t>(k + r)] * in.at(std::clamp(x + k, 0, W - 1), y)[ch];
                }
                tmp[in.index(x, y) + static_cast<std::size_t>(ch)] = acc;
            }
        }
    }

    Raster out(W, H);
    for (int y = 0; y < H; ++y)
    {
        for (int x = 0; x < W; ++x)
        {
            for (int ch = 0; ch < 3; ++ch)
            {
                double acc = 0.0;
                for (int k = -r; k <= r; ++k)
                {
                    acc += kernel[static_cast<std::size_t>(k + r)] *
                           tmp[in.index(x, std::clamp(y + k, 0, H - 1)) + static_cast<std::size_t>(ch)];
                }
                out.at(x, y)[ch] = to_byte(acc);
            }
        }
    }
    return out;
}

std::vector<double> gaussian_kernel(int radius)
{
    const double sigma = radius / 2.0;
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i)
    {
        const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (auto& v : k)
    {
        v /= sum;
    }
    return k;
}

Raster add_noise(const Raster& in, double sigma, std::uint64_t seed)
{
    Raster out = in;
    std::mt19937_64 rng(seed);
    const double scale = sigma * 255.0;
    // Box-Muller, both outputs used
    bool have_spare = false;
    double spare = 0.0;
    for (auto& p : out.pixels)
    {
        double z;
        if (have_spare)
        {
            z = spare;
            have_spare = false;
        }
        else
        {
            const double u1 = 1.0 - uniform_unit(rng);
            const double u2 = uniform_unit(rng);
            const double mag = std::sqrt(-2.0 * std::log(u1));
            z = mag * std::cos(2.0 * std::numbers::pi * u2);
            spare = mag * std::sin(2.0 * std::numbers::pi * u2);
            have_spare = true;
        }
        p = to_byte(p + z * scale);
    }
    return out;
}

Raster shift_brightness(const Raster& in, double delta)
{
    Raster out = in;
    const double shift = delta * 255.0;
    for (auto& p : out.pixels)
    {
        p = to_byte(p + shift);
    }
    return out;
}

} // namespace

AugmentationPlan default_plan(std::uint64_t seed)
{
    AugmentationPlan plan;
    plan.transforms = {HFlip{}, VFlip{}, Rot90CW{}, Rot180{}, Rot270CW{}, GaussianNoise{0.03}, GaussianBlur{2},
                       Brightness{0.2}};
    plan.keep_original = true;
    plan.min_visibility = default_min_visibility;
    plan.seed = seed;
    return plan;
}

Raster apply_transform_raster(const Raster& image, const Transform& t, std::uint64_t seed)
{
    if (!image.valid())
    {
        throw std::invalid_argument("invalid raster");
    }
    check_transform(t);

    const int W = image.width;
    const int H = image.height;
    using XY = std::pair<int, int>;

    return std::visit(
        overloaded{
            [&](const HFlip&) { return remap(image, W, H, [&](int x, int y) { return XY{W - 1 - x, y}; }); },
            [&](const VFlip&) { return remap(image, W, H, [&](int x, int y) { return XY{x, H - 1 - y}; }); },
            // source (x, y) lands on (H-1-y, x)
            [&](const Rot90CW&) { return remap(image, H, W, [&](int x, int y) { return XY{y, H - 1 - x}; }); },
            [&](const Rot180&) {
                return remap(image, W, H, [&](int x, int y) { return XY{W - 1 - x, H - 1 - y}; });
            },
            // source (x, y) lands on (y, W-1-x)
            [&](const Rot270CW&) { return remap(image, H, W, [&](int x, int y) { return XY{W - 1 - y, x}; }); },
            [&](const RotAngle& r) { return rotate_bilinear(image, r.degrees); },
            [&](const GaussianNoise& n) { return add_noise(image, n.sigma, seed); },
            [&](const GaussianBlur& b) { return convolve_separable(image, gaussian_kernel(b.radius)); },
            [&](const AverageBlur& b) {
                return convolve_separable(image,
                                          std::vector<double>(static_cast<std::size_t>(b.kernel), 1.0 / b.kernel));
            },
            [&](const Brightness& b) { return shift_brightness(image, b.delta); },
        },
        t);
}

std::pair<LabeledImage, Raster> augment_labeled_image(const LabeledImage& labels, const Raster& image,
                                                      const Transform& t, std::uint64_t seed, double min_visibility)
{
    if (image.width != labels.width || image.height != labels.height)
    {
        throw AugmentationError("dimension mismatch for '" + labels.id + "': raster " + std::to_string(image.width) +
                                "x" + std::to_string(image.height) + ", annotation " + std::to_string(labels.width) +
                                "x" + std::to_string(labels.height));
    }

    Raster raster = apply_transform_raster(image, t, seed);

    LabeledImage out;
    out.id = labels.id + "_" + transform_slug(t);
    out.width = raster.width;
    out.height = raster.height;
    out.boxes.reserve(labels.boxes.size());
    for (const auto& box : labels.boxes)
    {
        if (auto moved = transform_box(box, t, labels.width, labels.height, min_visibility))
        {
            out.boxes.push_back(*moved);
        }
    }
    return {std::move(out), std::move(raster)};
}

DatasetManifest augment_dataset(const DatasetManifest& manifest, const AugmentationPlan& plan,
                                const std::filesystem::path& out_dir, unsigned threads)
{
    namespace fs = std::filesystem;

    if (plan.transforms.empty())
    {
        throw AugmentationError("augmentation plan has no transforms");
    }
    if (!(plan.min_visibility >= 0.0 && plan.min_visibility <= 1.0))
    {
        throw AugmentationError("min_visibility must be in [0, 1]");
    }
    for (const auto& t : plan.transforms)
    {
        check_transform(t);
    }

    std::set<std::string> output_ids;
    for (const auto& rec : manifest.images)
    {
        if (!rec.label_text || !rec.has_size())
        {
            throw AugmentationError("image '" + rec.id() + "' is not valid; run validation first");
        }
        if (plan.keep_original && !output_ids.insert(rec.id()).second)
        {
            throw AugmentationError("output id collision: " + rec.id());
        }
        for (const auto& t : plan.transforms)
        {
            const auto id = rec.id() + "_" + transform_slug(t);
            if (!output_ids.insert(id).second)
            {
                throw AugmentationError("output id collision: " + id);
            }
        }
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
    {
        throw AugmentationError("cannot create " + out_dir.string() + ": " + ec.message());
    }
    const fs::path out_abs = fs::absolute(out_dir).lexically_normal();

    const std::size_t n = manifest.images.size();
    std::vector<std::vector<ImageRecord>> results(n);
    std::vector<std::exception_ptr> errors(n);

    auto process = [&](std::size_t i) {
        const ImageRecord& rec = manifest.images[i];
        auto& produced = results[i];

        if (plan.keep_original)
        {
            ImageRecord copy = rec;
            copy.image_path = out_abs / rec.image_path.filename();
            copy.label_path = label_path_for(copy.image_path);
            if (fs::absolute(rec.image_path).lexically_normal() != copy.image_path)
            {
                fs::copy_file(rec.image_path, copy.image_path, fs::copy_options::overwrite_existing);
                write_text_file(copy.label_path, *rec.label_text);
            }
            produced.push_back(std::move(copy));
        }

        if (plan.transforms.empty())
        {
            return;
        }

        const Raster raster = read_jpeg(rec.image_path);
        for (std::size_t k = 0; k < plan.transforms.size(); ++k)
        {
            const auto& t = plan.transforms[k];
            auto [labels, pixels] =
                augment_labeled_image(rec.labels, raster, t, mix_seed(plan.seed, rec.id(), k), plan.min_visibility);

            ImageRecord out;
            out.image_path = out_abs / (labels.id + ".jpg");
            out.label_path = label_path_for(out.image_path);
            out.label_text = is_geometric(t) ? serialize_yolo_annotation(labels.boxes) : *rec.label_text;
            out.labels = std::move(labels);

            write_jpeg(out.image_path, pixels, default_jpeg_quality);
            write_text_file(out.label_path, *out.label_text);
            produced.push_back(std::move(out));
        }
    };

    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < n; i = next++)
        {
            try
            {
                process(i);
            }
            catch (...)
            {
                errors[i] = std::current_exception();
            }
        }
    };

    if (workers <= 1)
    {
        worker();
    }
    else
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
        {
            pool.emplace_back(worker);
        }
    }

    for (std::size_t i = 0; i < n; ++i)
    {
        if (!errors[i])
        {
            continue;
        }
        try
        {
            std::rethrow_exception(errors[i]);
        }
        catch (const AugmentationError&)
        {
            throw;
        }
        catch (const std::exception& e)
        {
            throw AugmentationError(manifest.images[i].id() + ": " + e.what());
        }
    }

    DatasetManifest out;
    out.root = out_abs;
    out.classes = manifest.classes;
    for (auto& batch : results)
    {
        for (auto& rec : batch)
        {
            out.images.push_back(std::move(rec));
        }
    }
    return out;
}

} // namespace yoloprep
