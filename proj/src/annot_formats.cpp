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

#include "yoloprep/annot_formats.hpp"

#include "text_util.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace yoloprep {

namespace {

std::string at_line(std::string msg, std::size_t line)
{
    if (line > 0)
    {
        msg += ", line " + std::to_string(line);
    }
    return msg;
}

void check_unit_range(double v, const char* name, std::size_t line)
{
    if (!(v >= 0.0 && v <= 1.0))
    {
        throw AnnotationError(AnnotationErrorKind::CoordinateOutOfRange,
                              at_line(std::string(name) + " out of range", line), line);
    }
}

void check_extent(double v, const char* name, std::size_t line)
{
    if (v == 0.0)
    {
        throw AnnotationError(AnnotationErrorKind::ZeroArea, at_line(std::string("zero-area box (") + name + " = 0)", line),
                              line);
    }
    if (!(v > 0.0 && v <= 1.0))
    {
        throw AnnotationError(AnnotationErrorKind::CoordinateOutOfRange,
                              at_line(std::string(name) + " out of range", line), line);
    }
}

double voc_number(const boost::property_tree::ptree& node, const std::string& path)
{
    const auto text = node.get_optional<std::string>(path);
    if (!text)
    {
        throw AnnotationError(AnnotationErrorKind::MissingElement, "missing element " + path);
    }
    const auto value = detail::parse_double(detail::trim(*text));
    if (!value)
    {
        throw AnnotationError(AnnotationErrorKind::Malformed, "non-numeric value in " + path + ": '" + *text + "'");
    }
    return *value;
}

} // namespace

void check_center_box(const CenterBox& box, int class_count, std::size_t line)
{
    if (box.class_id < 0 || box.class_id >= class_count)
    {
        throw AnnotationError(AnnotationErrorKind::ClassOutOfRange,
                              at_line("class_id " + std::to_string(box.class_id) + " out of range", line), line);
    }
    check_unit_range(box.cx, "cx", line);
    check_unit_range(box.cy, "cy", line);
    check_extent(box.w, "w", line);
    check_extent(box.h, "h", line);
}

CenterBox parse_yolo_line(std::string_view line, int class_count, std::size_t line_no)
{
    const auto tokens = detail::split_ws(line);
    if (tokens.size() != 5)
    {
        throw AnnotationError(AnnotationErrorKind::Malformed,
                              at_line("expected 5 fields, got " + std::to_string(tokens.size()), line_no), line_no);
    }

    const auto cls = detail::parse_int(tokens[0]);
    if (!cls)
    {
        throw AnnotationError(AnnotationErrorKind::Malformed,
                              at_line("non-integer class_id '" + std::string(tokens[0]) + "'", line_no), line_no);
    }

    double values[4] = {};
    for (int i = 0; i < 4; ++i)
    {
        const auto v = detail::parse_double(tokens[i + 1]);
        if (!v)
        {
            throw AnnotationError(AnnotationErrorKind::Malformed,
                                  at_line("non-numeric field '" + std::string(tokens[i + 1]) + "'", line_no), line_no);
        }
        values[i] = *v;
    }

    CenterBox box{*cls, values[0], values[1], values[2], values[3]};
    check_center_box(box, class_count, line_no);
    return box;
}

std::vector<CenterBox> parse_yolo_annotation(std::string_view text, int class_count)
{
    if (class_count < 1)
    {
        throw std::invalid_argument("class_count must be at least 1");
    }

    std::vector<CenterBox> boxes;
    std::size_t line_no = 0;
    for (const auto line : detail::split_lines(text))
    {
        ++line_no;
        if (detail::trim(line).empty())
        {
            continue;
        }
        boxes.push_back(parse_yolo_line(line, class_count, line_no));
    }
    return boxes;
}

std::string serialize_yolo_annotation(const std::vector<CenterBox>& boxes)
{
    std::string out;
    out.reserve(boxes.size() * 40);
    char buf[128];
    for (const auto& box : boxes)
    {
        check_center_box(box, box.class_id + 1);
        const int n = std::snprintf(buf, sizeof(buf), "%d %.6f %.6f %.6f %.6f\n", box.class_id, box.cx, box.cy, box.w,
                                    box.h);
        out.append(buf, static_cast<std::size_t>(n));
    }
    return out;
}

VocAnnotation parse_voc_annotation(std::string_view xml)
{
    namespace pt = boost::property_tree;

    pt::ptree tree;
    try
    {
        std::istringstream in{std::string(xml)};
        pt::read_xml(in, tree);
    }
    catch (const pt::xml_parser_error& e)
    {
        throw AnnotationError(AnnotationErrorKind::Malformed, std::string("invalid XML: ") + e.message(), e.line());
    }

    const auto root = tree.get_child_optional("annotation");
    if (!root)
    {
        throw AnnotationError(AnnotationErrorKind::MissingElement, "missing element annotation");
    }
    if (!root->get_child_optional("size"))
    {
        throw AnnotationError(AnnotationErrorKind::MissingElement, "missing element size");
    }

    VocAnnotation out;
    const double width = voc_number(*root, "size.width");
    const double height = voc_number(*root, "size.height");
    if (width < 1.0 || height < 1.0 || width != std::floor(width) || height != std::floor(height))
    {
        throw AnnotationError(AnnotationErrorKind::Malformed, "image size must be positive integers");
    }
    out.width = static_cast<int>(width);
    out.height = static_cast<int>(height);

    for (const auto& [tag, node] : *root)
    {
        if (tag != "object")
        {
            continue;
        }
        const auto name = node.get_optional<std::string>("name");
        if (!name)
        {
            throw AnnotationError(AnnotationErrorKind::MissingElement, "missing element object/name");
        }
        if (!node.get_child_optional("bndbox"))
        {
            throw AnnotationError(AnnotationErrorKind::MissingElement, "missing element object/bndbox");
        }

        CornerBox box;
        box.class_name = std::string(detail::trim(*name));
        box.xmin = voc_number(node, "bndbox.xmin");
        box.ymin = voc_number(node, "bndbox.ymin");
        box.xmax = voc_number(node, "bndbox.xmax");
        box.ymax = voc_number(node, "bndbox.ymax");
        if (!(box.xmin < box.xmax) || !(box.ymin < box.ymax))
        {
            throw AnnotationError(AnnotationErrorKind::DegenerateBox, "degenerate box for object '" + box.class_name + "'");
        }
        out.boxes.push_back(std::move(box));
    }
    return out;
}

std::vector<CenterBox> voc_to_yolo(int width, int height, const std::vector<CornerBox>& boxes,
                                   const std::vector<std::string>& classes)
{
    if (width < 1 || height < 1)
    {
        throw std::invalid_argument("image dimensions must be positive");
    }

    std::vector<std::string> unknown;
    for (const auto& box : boxes)
    {
        if (std::find(classes.begin(), classes.end(), box.class_name) == classes.end() &&
            std::find(unknown.begin(), unknown.end(), box.class_name) == unknown.end())
        {
            unknown.push_back(box.class_name);
        }
    }
    if (!unknown.empty())
    {
        std::string names;
        for (const auto& n : unknown)
        {
            names += (names.empty() ? "" : ", ") + n;
        }
        throw AnnotationError(AnnotationErrorKind::UnknownClass, "unknown class name(s): " + names);
    }

    const double W = width;
    const double H = height;
    const int class_count = static_cast<int>(classes.size());

    std::vector<CenterBox> out;
    out.reserve(boxes.size());
    for (const auto& box : boxes)
    {
        const auto it = std::find(classes.begin(), classes.end(), box.class_name);
        CenterBox c;
        c.class_id = static_cast<int>(it - classes.begin());
        c.cx = (box.xmin + box.xmax) / (2.0 * W);
        c.cy = (box.ymin + box.ymax) / (2.0 * H);
        c.w = (box.xmax - box.xmin) / W;
        c.h = (box.ymax - box.ymin) / H;
        check_center_box(c, class_count);
        out.push_back(c);
    }
    return out;
}

std::vector<CornerBox> yolo_to_voc(const LabeledImage& image, const std::vector<std::string>& classes)
{
    if (image.width < 1 || image.height < 1)
    {
        throw std::invalid_argument("image dimensions must be positive");
    }

    const double W = image.width;
    const double H = image.height;
    const int class_count = static_cast<int>(classes.size());

    std::vector<CornerBox> out;
    out.reserve(image.boxes.size());
    for (const auto& box : image.boxes)
    {
        check_center_box(box, class_count);
        out.push_back(CornerBox{classes[static_cast<std::size_t>(box.class_id)], (box.cx - box.w / 2.0) * W,
                                (box.cy - box.h / 2.0) * H, (box.cx + box.w / 2.0) * W, (box.cy + box.h / 2.0) * H});
    }
    return out;
}

} // namespace yoloprep
