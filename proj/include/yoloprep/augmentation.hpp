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

#pragma once

#include "yoloprep/dataset.hpp"
#include "yoloprep/geometry.hpp"
#include "yoloprep/raster.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <utility>
#include <vector>

namespace yoloprep {

struct AugmentationPlan
{
    std::vector<Transform> transforms;
    bool keep_original = true;
    double min_visibility = default_min_visibility;
    std::uint64_t seed = 0;
};

class AugmentationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Flips, the three right-angle rotations, light noise, a blur and a
/// brightness shift; with the original kept each image becomes nine.
AugmentationPlan default_plan(std::uint64_t seed = 0);

/// Exact symmetries permute pixels. RotAngle samples bilinearly and fills
/// uncovered pixels with black. Noise is drawn from `seed`.
Raster apply_transform_raster(const Raster& image, const Transform& t, std::uint64_t seed);

/// Transforms pixels and boxes together. Boxes that an arbitrary rotation
/// pushes out of frame are dropped; the image is kept even when none remain.
/// The output id is `<id>_<slug>`.
std::pair<LabeledImage, Raster> augment_labeled_image(const LabeledImage& labels, const Raster& image,
                                                      const Transform& t, std::uint64_t seed,
                                                      double min_visibility = default_min_visibility);

/// Writes the augmented dataset (JPEG + label pairs) into `out_dir` and returns
/// its manifest, ordered by input image, original first then plan order.
/// `threads` = 0 uses the hardware concurrency; output does not depend on it.
DatasetManifest augment_dataset(const DatasetManifest& manifest, const AugmentationPlan& plan,
                                const std::filesystem::path& out_dir, unsigned threads = 0);

} // namespace yoloprep
