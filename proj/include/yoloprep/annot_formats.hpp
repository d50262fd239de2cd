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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace yoloprep {

/// Normalized YOLO box: class index plus center/size in [0,1] image units.
struct CenterBox
{
    int class_id = 0;
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;

    friend bool operator==(const CenterBox&, const CenterBox&) = default;
};

/// Pascal VOC style box in absolute pixel coordinates, origin top-left.
struct CornerBox
{
    std::string class_name;
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 0.0;
    double ymax = 0.0;

    friend bool operator==(const CornerBox&, const CornerBox&) = default;
};

struct LabeledImage
{
    std::string id;
    int width = 0;
    int height = 0;
    std::vector<CenterBox> boxes;
};

/// Result of parsing a VOC document.
struct VocAnnotation
{
    int width = 0;
    int height = 0;
    std::vector<CornerBox> boxes;
};

/// What went wrong with an annotation. The validator maps these onto report
/// issue kinds, so keep them distinct.
enum class AnnotationErrorKind
{
    Malformed,
    ClassOutOfRange,
    CoordinateOutOfRange,
    ZeroArea,
    UnknownClass,
    MissingElement,
    DegenerateBox,
};

class AnnotationError : public std::runtime_error
{
public:
    AnnotationError(AnnotationErrorKind kind, const std::string& what, std::size_t line = 0)
        : std::runtime_error(what), kind_(kind), line_(line)
    {
    }

    AnnotationErrorKind kind() const noexcept { return kind_; }

    /// 1-based line number, 0 when the error is not tied to a line.
    std::size_t line() const noexcept { return line_; }

private:
    AnnotationErrorKind kind_;
    std::size_t line_;
};

/// Throws AnnotationError when a box breaks the CenterBox invariants.
void check_center_box(const CenterBox& box, int class_count, std::size_t line = 0);

/// Parses a single `<class_id> <cx> <cy> <w> <h>` line. `line_no` is only used
/// in error messages.
CenterBox parse_yolo_line(std::string_view line, int class_count, std::size_t line_no);

std::vector<CenterBox> parse_yolo_annotation(std::string_view text, int class_count);

/// One line per box, 6 decimals, newline-terminated.
std::string serialize_yolo_annotation(const std::vector<CenterBox>& boxes);

VocAnnotation parse_voc_annotation(std::string_view xml);

std::vector<CenterBox> voc_to_yolo(int width, int height, const std::vector<CornerBox>& boxes,
                                   const std::vector<std::string>& classes);

std::vector<CornerBox> yolo_to_voc(const LabeledImage& image, const std::vector<std::string>& classes);

} // namespace yoloprep
