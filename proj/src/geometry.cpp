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

#include "yoloprep/geometry.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace yoloprep {

namespace {

template <class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};

std::string compact_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    std::string s(buf);
    for (auto& c : s)
    {
        if (c == '.')
        {
            c = 'p';
        }
        else if (c == '-')
        {
            c = 'm';
        }
    }
    return s;
}

std::optional<CenterBox> rotate_box(const CenterBox& box, double degrees, int width, int height, double min_visibility)
{
    const double W = width;
    const double H = height;
    const double theta = degrees * std::numbers::pi / 180.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double mx = W / 2.0;
    const double my = H / 2.0;

    const double x0 = (box.cx - box.w / 2.0) * W;
    const double x1 = (box.cx + box.w / 2.0) * W;
    const double y0 = (box.cy - box.h / 2.0) * H;
    const double y1 = (box.cy + box.h / 2.0) * H;

    const std::array<std::array<double, 2>, 4> corners{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
    Rect hull{INFINITY, INFINITY, -INFINITY, -INFINITY};
    for (const auto& [x, y] : corners)
    {
        const double dx = x - mx;
        const double dy = y - my;
        const double rx = mx + dx * c - dy * s;
        const double ry = my + dx * s + dy * c;
        hull.x0 = std::min(hull.x0, rx);
        hull.y0 = std::min(hull.y0, ry);
        hull.x1 = std::max(hull.x1, rx);
        hull.y1 = std::max(hull.y1, ry);
    }

    const Rect clipped{std::clamp(hull.x0, 0.0, W), std::clamp(hull.y0, 0.0, H), std::clamp(hull.x1, 0.0, W),
                       std::clamp(hull.y1, 0.0, H)};
    const double original_area = (x1 - x0) * (y1 - y0);
    if (clipped.width() <= 0.0 || clipped.height() <= 0.0 || clipped.area() < min_visibility * original_area)
    {
        return std::nullopt;
    }

    CenterBox out = box;
    out.cx = std::clamp((clipped.x0 + clipped.x1) / (2.0 * W), 0.0, 1.0);
    out.cy = std::clamp((clipped.y0 + clipped.y1) / (2.0 * H), 0.0, 1.0);
    out.w = std::min(clipped.width() / W, 1.0);
    out.h = std::min(clipped.height() / H, 1.0);
    if (out.w <= 0.0 || out.h <= 0.0)
    {
        return std::nullopt;
    }
    return out;
}

} // namespace

Rect to_rect(const CornerBox& box) noexcept
{
    return Rect{box.xmin, box.ymin, box.xmax, box.ymax};
}

Rect to_rect(const CenterBox& box) noexcept
{
    return Rect{box.cx - box.w / 2.0, box.cy - box.h / 2.0, box.cx + box.w / 2.0, box.cy + box.h / 2.0};
}

double iou(const Rect& a, const Rect& b)
{
    if (!(a.x0 < a.x1 && a.y0 < a.y1) || !(b.x0 < b.x1 && b.y0 < b.y1))
    {
        throw std::invalid_argument("iou: degenerate box");
    }
    const double iw = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
    const double ih = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
    if (iw <= 0.0 || ih <= 0.0)
    {
        return 0.0;
    }
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return std::clamp(inter / uni, 0.0, 1.0);
}

double iou(const CornerBox& a, const CornerBox& b)
{
    return iou(to_rect(a), to_rect(b));
}

bool is_geometric(const Transform& t) noexcept
{
    return std::visit(overloaded{
                          [](const HFlip&) { return true; },
                          [](const VFlip&) { return true; },
                          [](const Rot90CW&) { return true; },
                          [](const Rot180&) { return true; },
                          [](const Rot270CW&) { return true; },
                          [](const RotAngle&) { return true; },
                          [](const auto&) { return false; },
                      },
                      t);
}

void check_transform(const Transform& t)
{
    std::visit(overloaded{
                   [](const RotAngle& r) {
                       if (!(r.degrees > -180.0 && r.degrees <= 180.0))
                       {
                           throw std::invalid_argument("rotation angle must be in (-180, 180]");
                       }
                   },
                   [](const GaussianNoise& n) {
                       if (!(n.sigma >= 0.0) || !std::isfinite(n.sigma))
                       {
                           throw std::invalid_argument("noise sigma must be >= 0");
                       }
                   },
                   [](const GaussianBlur& b) {
                       if (b.radius < 1)
                       {
                           throw std::invalid_argument("blur radius must be >= 1");
                       }
                   },
                   [](const AverageBlur& b) {
                       if (b.kernel < 3 || b.kernel % 2 == 0)
                       {
                           throw std::invalid_argument("average blur kernel must be odd and >= 3");
                       }
                   },
                   [](const Brightness& b) {
                       if (!(b.delta >= -1.0 && b.delta <= 1.0))
                       {
                           throw std::invalid_argument("brightness delta must be in [-1, 1]");
                       }
                   },
                   [](const auto&) {},
               },
               t);
}

std::string transform_slug(const Transform& t)
{
    return std::visit(overloaded{
                          [](const HFlip&) -> std::string { return "hflip"; },
                          [](const VFlip&) -> std::string { return "vflip"; },
                          [](const Rot90CW&) -> std::string { return "rot90cw"; },
                          [](const Rot180&) -> std::string { return "rot180"; },
                          [](const Rot270CW&) -> std::string { return "rot270cw"; },
                          [](const RotAngle& r) { return "rot" + compact_number(r.degrees); },
                          [](const GaussianNoise& n) { return "noise" + compact_number(n.sigma); },
                          [](const GaussianBlur& b) { return "gblur" + std::to_string(b.radius); },
                          [](const AverageBlur& b) { return "ablur" + std::to_string(b.kernel); },
                          [](const Brightness& b) { return "bright" + compact_number(b.delta); },
                      },
                      t);
}

Transform parse_transform(std::string_view text)
{
    text = detail::trim(text);
    const auto colon = text.find(':');
    const auto name = text.substr(0, colon);
    const auto arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

    auto need_double = [&]() {
        const auto v = detail::parse_double(arg);
        if (!v)
        {
            throw std::invalid_argument("transform '" + std::string(text) + "' needs a numeric argument");
        }
        return *v;
    };
    auto need_int = [&]() {
        const auto v = detail::parse_int(arg);
        if (!v)
        {
            throw std::invalid_argument("transform '" + std::string(text) + "' needs an integer argument");
        }
        return *v;
    };
    auto no_arg = [&]() {
        if (colon != std::string_view::npos)
        {
            throw std::invalid_argument("transform '" + std::string(name) + "' takes no argument");
        }
    };

    Transform t;
    if (name == "hflip")
    {
        no_arg();
        t = HFlip{};
    }
    else if (name == "vflip")
    {
        no_arg();
        t = VFlip{};
    }
    else if (name == "rot90" || name == "rot90cw")
    {
        no_arg();
        t = Rot90CW{};
    }
    else if (name == "rot180")
    {
        no_arg();
        t = Rot180{};
    }
    else if (name == "rot270" || name == "rot270cw")
    {
        no_arg();
        t = Rot270CW{};
    }
    else if (name == "rot")
    {
        t = RotAngle{need_double()};
    }
    else if (name == "noise")
    {
        t = GaussianNoise{need_double()};
    }
    else if (name == "gblur")
    {
        t = GaussianBlur{need_int()};
    }
    else if (name == "ablur")
    {
        t = AverageBlur{need_int()};
    }
    else if (name == "bright")
    {
        t = Brightness{need_double()};
    }
    else
    {
        throw std::invalid_argument("unknown transform '" + std::string(text) + "'");
    }
    check_transform(t);
    return t;
}

Size output_dims(const Transform& t, int width, int height)
{
    if (std::holds_alternative<Rot90CW>(t) || std::holds_alternative<Rot270CW>(t))
    {
        return Size{height, width};
    }
    return Size{width, height};
}

std::optional<CenterBox> transform_box(const CenterBox& box, const Transform& t, int width, int height,
                                       double min_visibility)
{
    return std::visit(overloaded{
                          [&](const HFlip&) -> std::optional<CenterBox> {
                              return CenterBox{box.class_id, 1.0 - box.cx, box.cy, box.w, box.h};
                          },
                          [&](const VFlip&) -> std::optional<CenterBox> {
                              return CenterBox{box.class_id, box.cx, 1.0 - box.cy, box.w, box.h};
                          },
                          [&](const Rot90CW&) -> std::optional<CenterBox> {
                              return CenterBox{box.class_id, 1.0 - box.cy, box.cx, box.h, box.w};
                          },
                          [&](const Rot180&) -> std::optional<CenterBox> {
                              return CenterBox{box.class_id, 1.0 - box.cx, 1.0 - box.cy, box.w, box.h};
                          },
                          [&](const Rot270CW&) -> std::optional<CenterBox> {
                              return CenterBox{box.class_id, box.cy, 1.0 - box.cx, box.h, box.w};
                          },
                          [&](const RotAngle& r) -> std::optional<CenterBox> {
                              return rotate_box(box, r.degrees, width, height, min_visibility);
                          },
                          [&](const auto&) -> std::optional<CenterBox> { return box; },
                      },
                      t);
}

} // namespace yoloprep
