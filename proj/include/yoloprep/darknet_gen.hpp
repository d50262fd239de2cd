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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace yoloprep {

class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct TrainingHyper
{
    int batch = 64;
    int subdivisions = 16;
    int max_batches = 6000;
    std::array<int, 2> steps{4800, 5400};
    int width = 416;
    int height = 416;
    std::optional<std::filesystem::path> pretrained_weights;
};

/// batch 64, subdivisions 16, 416x416, max_batches = max(6000, 2000 * classes),
/// steps at 80% and 90% of max_batches.
TrainingHyper default_hyper(std::size_t class_count);

void check_hyper(const TrainingHyper& hyper);

struct ProjectConfig
{
    std::string name;
    std::filesystem::path dataset_path;
    std::vector<std::string> classes;
    double train_pct = 0.9;
    std::uint64_t seed = 0;
    std::filesystem::path output_root;
    TrainingHyper hyper;
};

/// Where the Darknet files of a project live inside its layout.
struct ArtifactPaths
{
    std::filesystem::path names;
    std::filesystem::path data;
    std::filesystem::path cfg;
    std::filesystem::path final_weights;
};

ArtifactPaths artifact_paths(const ProjectConfig& project, const LayoutPaths& layout);

/// Stock YOLOv3 network definition shipped with the library.
std::string_view yolov3_template();

std::string render_names(const std::vector<std::string>& classes);

/// The five-key `.data` file. All layout paths must be absolute.
std::string render_data(const ProjectConfig& project, const LayoutPaths& layout);

/// Adapts a YOLOv3 `.cfg` to `class_count` classes and the training
/// hyper-parameters. Only the values of `classes` (in [yolo]), `filters` (in
/// the [convolutional] right before each [yolo]) and the [net] keys batch,
/// subdivisions, width, height, max_batches and steps are rewritten; every
/// other byte of the template is kept.
std::string render_cfg(std::string_view cfg_template, int class_count, const TrainingHyper& hyper);

/// Train, evaluate (mAP over the `valid` list) and predict command lines, in
/// that order. The predict command takes the image path through an `<IMAGE>`
/// placeholder. Nothing is executed.
std::vector<std::string> emit_commands(const ProjectConfig& project, const LayoutPaths& layout,
                                       std::string_view darknet = "./darknet");

} // namespace yoloprep
