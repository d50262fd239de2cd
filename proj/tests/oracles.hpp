#pragma once

// Independent reference implementations used to check the library.

#include "yoloprep/annot_formats.hpp"

#include <algorithm>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

namespace yoloprep::testing {

// Sum over true positives of the best precision reachable at or after that rank.
inline double step_oracle(const std::vector<bool>& flags, std::size_t gt)
{
    double ap = 0.0;
    std::size_t tp = 0;
    for (std::size_t k = 0; k < flags.size(); ++k)
    {
        tp += flags[k];
        if (!flags[k])
        {
            continue;
        }
        double best = 0.0;
        std::size_t tp_j = tp;
        for (std::size_t j = k; j < flags.size(); ++j)
        {
            if (j > k)
            {
                tp_j += flags[j];
            }
            best = std::max(best, double(tp_j) / double(j + 1));
        }
        ap += best / double(gt);
    }
    return ap;
}

// Integer-only recall comparison: recall >= i/10 <=> 10 * tp >= i * gt.
inline double eleven_oracle(const std::vector<bool>& flags, std::size_t gt)
{
    double sum = 0.0;
    for (std::size_t i = 0; i <= 10; ++i)
    {
        double best = 0.0;
        std::size_t tp = 0;
        for (std::size_t j = 0; j < flags.size(); ++j)
        {
            tp += flags[j];
            if (10 * tp >= i * gt)
            {
                best = std::max(best, double(tp) / double(j + 1));
            }
        }
        sum += best;
    }
    return sum / 11.0;
}

// Corner rotation with complex arithmetic, in pixel units, y pointing down.
inline std::optional<CenterBox> rotate_oracle(const CenterBox& b, double degrees, int W, int H, double min_vis)
{
    const std::complex<double> center(W / 2.0, H / 2.0);
    const auto turn = std::polar(1.0, degrees * std::numbers::pi / 180.0);
    const double x0 = (b.cx - b.w / 2) * W, x1 = (b.cx + b.w / 2) * W;
    const double y0 = (b.cy - b.h / 2) * H, y1 = (b.cy + b.h / 2) * H;
    double lx = 1e300, ly = 1e300, hx = -1e300, hy = -1e300;
    for (const auto p : {std::complex<double>(x0, y0), {x1, y0}, {x0, y1}, {x1, y1}})
    {
        const auto q = center + (p - center) * turn;
        lx = std::min(lx, q.real());
        hx = std::max(hx, q.real());
        ly = std::min(ly, q.imag());
        hy = std::max(hy, q.imag());
    }
    lx = std::max(lx, 0.0);
    ly = std::max(ly, 0.0);
    hx = std::min(hx, double(W));
    hy = std::min(hy, double(H));
    if (hx <= lx || hy <= ly || (hx - lx) * (hy - ly) < min_vis * (x1 - x0) * (y1 - y0))
    {
        return std::nullopt;
    }
    return CenterBox{b.class_id, (lx + hx) / (2.0 * W), (ly + hy) / (2.0 * H), (hx - lx) / W, (hy - ly) / H};
}

} // namespace yoloprep::testing
