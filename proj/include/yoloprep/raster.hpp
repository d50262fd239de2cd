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

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace yoloprep {

/// 8-bit RGB image, row-major, channels interleaved.
struct Raster
{
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    Raster() = default;

    Raster(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, 0)
    {
        if (w < 1 || h < 1)
        {
            throw std::invalid_argument("raster dimensions must be positive");
        }
    }

    std::size_t index(int x, int y) const noexcept
    {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
    }

    std::uint8_t* at(int x, int y) noexcept { return pixels.data() + index(x, y); }
    const std::uint8_t* at(int x, int y) const noexcept { return pixels.data() + index(x, y); }

    bool valid() const noexcept
    {
        return width >= 1 && height >= 1 &&
               pixels.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
    }

    friend bool operator==(const Raster&, const Raster&) = default;
};

} // namespace yoloprep
