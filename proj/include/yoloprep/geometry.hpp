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

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace yoloprep {

/// Axis-aligned rectangle in any consistent unit (pixels or normalized).
struct Rect
{
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double width() const noexcept { return x1 - x0; }
    double height() const noexcept { return y1 - y0; }
    double area() const noexcept { return width() * height(); }
};

struct Size
{
    int width = 0;
    int height = 0;

    friend bool operator==(const Size&, const Size&) = default;
};

Rect to_rect(const CornerBox& box) noexcept;

/// Corners of a normalized box, still in normalized units.
Rect to_rect(const CenterBox& box) noexcept;

/// Intersection over union. Throws std::invalid_argument for boxes with
/// zero or negative area.
double iou(const Rect& a, const Rect& b);
double iou(const CornerBox& a, const CornerBox& b);

// Geometric transforms move boxes, photometric ones only touch pixels.
struct HFlip {};
struct VFlip {};
struct Rot90CW {};
struct Rot180 {};
struct Rot270CW {};

/// Rotation about the image center, clockwise on screen for positive angles.
/// The canvas keeps its size; content rotated out of frame is cropped.
struct RotAngle
{
    double degrees = 0.0;
};

struct GaussianNoise
{
    double sigma = 0.0;
};

struct GaussianBlur
{
    int radius = 1;
};

struct AverageBlur
{
    int kernel = 3;
};

struct Brightness
{
    double delta = 0.0;
};

using Transform =
    std::variant<HFlip, VFlip, Rot90CW, Rot180, Rot270CW, RotAngle, GaussianNoise, GaussianBlur, AverageBlur, Brightness>;

inline constexpr double default_min_visibility = 0.3;

bool is_geometric(const Transform& t) noexcept;

/// Throws std::invalid_argument when a parameter is outside its range.
void check_transform(const Transform& t);

/// Short filesystem-safe tag used to name augmented images, e.g. "hflip",
/// "rot30", "noise0p03".
std::string transform_slug(const Transform& t);

/// Parses the command-line spelling: hflip, vflip, rot90, rot180, rot270,
/// rot:<deg>, noise:<sigma>, gblur:<radius>, ablur:<kernel>, bright:<delta>.
Transform parse_transform(std::string_view text);

Size output_dims(const Transform& t, int width, int height);

/// Maps a box through `t`. Returns nullopt when an arbitrary rotation pushes
/// the box out of frame so that less than `min_visibility` of its original
/// pixel area remains.
std::optional<CenterBox> transform_box(const CenterBox& box, const Transform& t, int width, int height,
                                       double min_visibility = default_min_visibility);

} // namespace yoloprep
