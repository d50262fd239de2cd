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

#include "yoloprep/geometry.hpp"
#include "yoloprep/raster.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace yoloprep {

class ImageIoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int default_jpeg_quality = 95;

/// True when the bytes start with the JPEG SOI marker followed by another marker (FF D8 FF).
bool has_jpeg_magic(std::span<const std::uint8_t> head) noexcept;
bool has_jpeg_magic(const std::filesystem::path& path);

/// Reads width/height from the first SOF segment without decoding. Returns
/// nullopt for anything that is not a parseable JPEG header.
std::optional<Size> read_jpeg_size(const std::filesystem::path& path);

Raster decode_jpeg(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> encode_jpeg(const Raster& image, int quality = default_jpeg_quality);

Raster read_jpeg(const std::filesystem::path& path);
void write_jpeg(const std::filesystem::path& path, const Raster& image, int quality = default_jpeg_quality);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> data);
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

} // namespace yoloprep
