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

#include "yoloprep/darknet_gen.hpp"

#include <filesystem>
#include <stdexcept>
#include <string_view>

namespace yoloprep {

class ProjectFileError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Parses a flat `key = value` project file. Mandatory keys: name, dataset,
/// classes (comma separated), train_pct (0.9 or 90%). Optional: seed, output,
/// batch, subdivisions, max_batches, steps, width, height, pretrained_weights.
/// Relative paths resolve against `base_dir`; `output` defaults to it.
ProjectConfig parse_project_file(std::string_view text, const std::filesystem::path& base_dir);

ProjectConfig load_project_file(const std::filesystem::path& path);

/// Letters, digits, '.', '_' and '-', not starting with '.'.
bool is_safe_project_name(std::string_view name) noexcept;

} // namespace yoloprep
