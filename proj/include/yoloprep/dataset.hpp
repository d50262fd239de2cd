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

#include "yoloprep/annot_formats.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace yoloprep {

namespace fs = std::filesystem;

/// One discovered image. Problems found while scanning are kept here and
/// reported later by validate().
struct ImageRecord
{
    fs::path image_path;
    fs::path label_path;

    /// Raw label file contents; nullopt when the label file is missing.
    std::optional<std::string> label_text;

    /// id, header dimensions (0x0 if unreadable) and the label lines that parsed cleanly.
    LabeledImage labels;

    const std::string& id() const noexcept { return labels.id; }
    bool has_size() const noexcept { return labels.width > 0 && labels.height > 0; }
};

struct DatasetManifest
{
    fs::path root;
    std::vector<std::string> classes;
    std::vector<ImageRecord> images;
};

class DatasetError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class IssueKind
{
    BadMagic,
    MissingLabel,
    ParseError,
    ClassOutOfRange,
    CoordinateOutOfRange,
    ZeroAreaBox,
    DuplicateId,
};

const char* to_string(IssueKind kind) noexcept;

struct Issue
{
    std::string image;
    IssueKind kind;
    std::string detail;
};

struct ValidationReport
{
    std::vector<Issue> issues;
    std::map<IssueKind, std::size_t> counts;

    bool passed() const noexcept { return issues.empty(); }

    /// Ids of images with at least one issue.
    std::vector<std::string> failing_ids() const;
};

struct SplitResult
{
    std::vector<std::string> train;
    std::vector<std::string> test;
    std::uint64_t seed = 0;
    double train_pct = 0.0;
};

struct LayoutPaths
{
    fs::path root;
    fs::path images_dir;
    fs::path train_list;
    fs::path test_list;
    fs::path backup_dir;

    /// Image files in the layout, train entries first then test, each in split order.
    std::vector<fs::path> train_images;
    std::vector<fs::path> test_images;
};

/// Label path paired with an image: same directory, extension replaced by `.txt`.
fs::path label_path_for(const fs::path& image_path);

/// True for `.jpg` in any letter case.
bool is_jpg_path(const fs::path& path);

/// Builds a record for a single image file (label read, header sized).
ImageRecord load_image_record(const fs::path& image_path, int class_count);

/// Lists every `.jpg` directly under `root`, sorted by file name.
DatasetManifest scan_dataset(const fs::path& root, const std::vector<std::string>& classes);

ValidationReport validate(const DatasetManifest& manifest);

/// Largest train size allowed for `n` images at `train_pct` (test kept non-empty).
std::size_t train_size(std::size_t n, double train_pct);

SplitResult split(const DatasetManifest& manifest, double train_pct, std::uint64_t seed);

/// Creates `<out_root>/<project>/{images,backup}`, copies images and labels and
/// writes train.txt/test.txt with absolute paths. Files already inside the
/// target images directory are not copied again.
LayoutPaths materialize_layout(const DatasetManifest& manifest, const SplitResult& split_result,
                               const fs::path& out_root, const std::string& project, bool force = false);

/// Paths the layout would use, without touching the filesystem.
LayoutPaths layout_paths(const fs::path& out_root, const std::string& project);

/// Rebuilds the test-set ground truth from an existing layout's test.txt.
std::vector<LabeledImage> load_test_set(const LayoutPaths& layout, int class_count);

} // namespace yoloprep
