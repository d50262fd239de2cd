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

#include "yoloprep/evaluation.hpp"

#include "text_util.hpp"
#include "yoloprep/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_map>

namespace yoloprep {

namespace {

std::string class_label(const std::vector<std::string>& classes, int id)
{
    if (id >= 0 && static_cast<std::size_t>(id) < classes.size())
    {
        return classes[static_cast<std::size_t>(id)];
    }
    return "class" + std::to_string(id);
}

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

// Strict total order on detections. Only identical detections compare equal
// up to the final input-index key.
bool ranks_before(const Detection& a, std::size_t ia, const Detection& b, std::size_t ib)
{
    if (a.confidence != b.confidence)
    {
        return a.confidence > b.confidence;
    }
    if (a.image_id != b.image_id)
    {
        return a.image_id < b.image_id;
    }
    const auto ka = std::tie(a.class_id, a.box.cx, a.box.cy, a.box.w, a.box.h);
    const auto kb = std::tie(b.class_id, b.box.cx, b.box.cy, b.box.w, b.box.h);
    if (ka != kb)
    {
        return ka < kb;
    }
    return ia < ib;
}

} // namespace

const char* to_string(ApMode mode) noexcept
{
    return mode == ApMode::AllPoints ? "all_points" : "eleven_point";
}

ApMode parse_ap_mode(std::string_view text)
{
    if (text == "all_points" || text == "all-points" || text == "all")
    {
        return ApMode::AllPoints;
    }
    if (text == "eleven_point" || text == "eleven-point" || text == "11")
    {
        return ApMode::ElevenPoint;
    }
    throw std::invalid_argument("unknown AP mode '" + std::string(text) + "' (all_points or eleven_point)");
}

std::vector<Detection> parse_detections(std::string_view text, int class_count)
{
    if (class_count < 1)
    {
        throw std::invalid_argument("class_count must be at least 1");
    }

    std::vector<Detection> out;
    std::size_t line_no = 0;
    for (const auto line : detail::split_lines(text))
    {
        ++line_no;
        if (detail::trim(line).empty())
        {
            continue;
        }
        const auto where = ", line " + std::to_string(line_no);
        const auto tokens = detail::split_ws(line);
        if (tokens.size() != 7)
        {
            throw EvaluationError("expected 7 fields, got " + std::to_string(tokens.size()) + where);
        }

        Detection d;
        d.image_id = std::string(tokens[0]);
        const auto cls = detail::parse_int(tokens[1]);
        if (!cls)
        {
            throw EvaluationError("non-integer class_id '" + std::string(tokens[1]) + "'" + where);
        }
        const auto conf = detail::parse_double(tokens[2]);
        if (!conf)
        {
            throw EvaluationError("non-numeric confidence '" + std::string(tokens[2]) + "'" + where);
        }
        if (!(*conf >= 0.0 && *conf <= 1.0))
        {
            throw EvaluationError("confidence out of range" + where);
        }
        d.class_id = *cls;
        d.confidence = *conf;

        // the box fields share the YOLO label grammar and checks
        const std::string yolo_line = std::string(tokens[1]) + " " + std::string(tokens[3]) + " " +
                                      std::string(tokens[4]) + " " + std::string(tokens[5]) + " " +
                                      std::string(tokens[6]);
        try
        {
            d.box = parse_yolo_line(yolo_line, class_count, line_no);
        }
        catch (const AnnotationError& e)
        {
            throw EvaluationError(e.what());
        }
        out.push_back(std::move(d));
    }
    return out;
}

MatchResult match_detections(const std::vector<Detection>& dets, const std::vector<LabeledImage>& truth,
                             double iou_thr)
{
    if (!(iou_thr > 0.0 && iou_thr < 1.0))
    {
        throw std::invalid_argument("iou threshold must be in (0, 1)");
    }

    std::unordered_map<std::string, std::size_t> image_index;
    MatchResult result;
    for (std::size_t i = 0; i < truth.size(); ++i)
    {
        if (!image_index.emplace(truth[i].id, i).second)
        {
            throw EvaluationError("duplicate ground-truth image id '" + truth[i].id + "'");
        }
        for (const auto& box : truth[i].boxes)
        {
            ++result.ground_truth[box.class_id];
        }
    }
    for (const auto& d : dets)
    {
        if (!image_index.contains(d.image_id))
        {
            throw EvaluationError("detection refers to unknown image id '" + d.image_id + "'");
        }
    }

    result.order.resize(dets.size());
    std::iota(result.order.begin(), result.order.end(), std::size_t{0});
    std::sort(result.order.begin(), result.order.end(),
              [&](std::size_t a, std::size_t b) { return ranks_before(dets[a], a, dets[b], b); });

    std::vector<std::vector<bool>> used(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i)
    {
        used[i].assign(truth[i].boxes.size(), false);
    }

    result.is_tp.reserve(dets.size());
    std::map<int, std::size_t> matched;
    for (const auto idx : result.order)
    {
        const auto& d = dets[idx];
        const auto img = image_index.at(d.image_id);
        const auto& gts = truth[img].boxes;
        const Rect det_rect = to_rect(d.box);

        double best = -1.0;
        std::size_t best_k = gts.size();
        for (std::size_t k = 0; k < gts.size(); ++k)
        {
            if (used[img][k] || gts[k].class_id != d.class_id)
            {
                continue;
            }
            const double o = iou(det_rect, to_rect(gts[k]));
            if (o > best)
            {
                best = o;
                best_k = k;
            }
        }

        const bool tp = best_k < gts.size() && best > iou_thr;
        if (tp)
        {
            used[img][best_k] = true;
            ++matched[d.class_id];
        }
        result.is_tp.push_back(tp);
    }

    for (const auto& [cls, count] : result.ground_truth)
    {
        result.false_negatives[cls] = count - matched[cls];
    }
    return result;
}

double average_precision(const std::vector<bool>& ranked_tp, std::size_t total_gt, ApMode mode)
{
    if (total_gt == 0)
    {
        throw EvaluationError("average precision is undefined without ground truth");
    }

    const std::size_t n = ranked_tp.size();
    std::vector<double> precision(n);
    std::vector<double> recall(n);
    std::size_t tp = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        tp += ranked_tp[i] ? 1 : 0;
        precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
        recall[i] = static_cast<double>(tp) / static_cast<double>(total_gt);
    }

    if (mode == ApMode::ElevenPoint)
    {
        double sum = 0.0;
        for (int step = 0; step <= 10; ++step)
        {
            const double r = step / 10.0;
            double p = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                if (recall[i] >= r)
                {
                    p = std::max(p, precision[i]);
                }
            }
            sum += p;
        }
        return sum / 11.0;
    }

    // precision envelope integrated over recall, sentinels at both ends
    std::vector<double> mrec;
    std::vector<double> mpre;
    mrec.reserve(n + 2);
    mpre.reserve(n + 2);
    mrec.push_back(0.0);
    mpre.push_back(0.0);
    mrec.insert(mrec.end(), recall.begin(), recall.end());
    mpre.insert(mpre.end(), precision.begin(), precision.end());
    mrec.push_back(1.0);
    mpre.push_back(0.0);

    for (std::size_t i = mpre.size() - 1; i > 0; --i)
    {
        mpre[i - 1] = std::max(mpre[i - 1], mpre[i]);
    }
    double ap = 0.0;
    for (std::size_t i = 1; i < mrec.size(); ++i)
    {
        if (mrec[i] != mrec[i - 1])
        {
            ap += (mrec[i] - mrec[i - 1]) * mpre[i];
        }
    }
    return std::clamp(ap, 0.0, 1.0);
}

EvalReport evaluate(const std::vector<Detection>& dets, const std::vector<LabeledImage>& truth, double iou_thr,
                    double conf_thr, ApMode mode)
{
    const auto m = match_detections(dets, truth, iou_thr);

    EvalReport report;
    report.iou_threshold = iou_thr;
    report.conf_threshold = conf_thr;
    report.ap_mode = mode;

    std::set<int> classes;
    for (const auto& [cls, count] : m.ground_truth)
    {
        classes.insert(cls);
    }
    for (const auto& d : dets)
    {
        classes.insert(d.class_id);
    }

    std::size_t total_gt = 0;
    double ap_sum = 0.0;
    std::size_t ap_count = 0;
    for (const int cls : classes)
    {
        std::vector<bool> flags;
        ClassStats stats;
        for (std::size_t k = 0; k < m.order.size(); ++k)
        {
            if (dets[m.order[k]].class_id != cls)
            {
                continue;
            }
            flags.push_back(m.is_tp[k]);
            (m.is_tp[k] ? stats.tp : stats.fp) += 1;
        }
        const auto gt_it = m.ground_truth.find(cls);
        const std::size_t gt = gt_it == m.ground_truth.end() ? 0 : gt_it->second;
        stats.fn = gt - stats.tp;
        if (gt > 0)
        {
            stats.ap = average_precision(flags, gt, mode);
            ap_sum += *stats.ap;
            ++ap_count;
        }
        total_gt += gt;
        report.per_class[cls] = stats;
    }
    report.map = ap_count > 0 ? ap_sum / static_cast<double>(ap_count) : 0.0;

    for (std::size_t k = 0; k < m.order.size(); ++k)
    {
        if (dets[m.order[k]].confidence >= conf_thr)
        {
            (m.is_tp[k] ? report.tp : report.fp) += 1;
        }
    }
    report.fn = total_gt - report.tp;
    report.precision = report.tp + report.fp > 0
                           ? static_cast<double>(report.tp) / static_cast<double>(report.tp + report.fp)
                           : 0.0;
    report.recall = total_gt > 0 ? static_cast<double>(report.tp) / static_cast<double>(total_gt) : 0.0;
    report.f1 = report.precision + report.recall > 0.0
                    ? 2.0 * report.precision * report.recall / (report.precision + report.recall)
                    : 0.0;
    return report;
}

std::string select_best_checkpoint(const std::vector<std::pair<std::string, EvalReport>>& reports)
{
    if (reports.empty())
    {
        throw EvaluationError("no checkpoints to compare");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < reports.size(); ++i)
    {
        if (reports[i].second.map > reports[best].second.map)
        {
            best = i;
        }
    }
    return reports[best].first;
}

std::string format_report_text(const EvalReport& report, const std::vector<std::string>& classes)
{
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof(buf), "%-20s %8s %7s %7s %7s\n", "class", "AP", "TP", "FP", "FN");
    out += buf;
    for (const auto& [cls, s] : report.per_class)
    {
        const std::string ap = s.ap ? fixed(*s.ap, 4) : "-";
        std::snprintf(buf, sizeof(buf), "%-20s %8s %7zu %7zu %7zu\n", class_label(classes, cls).c_str(), ap.c_str(),
                      s.tp, s.fp, s.fn);
        out += buf;
    }
    out += "\n";
    out += "mAP = " + fixed(report.map, 4) + " (IoU > " + fixed(report.iou_threshold, 2) + ", " +
           to_string(report.ap_mode) + ")\n";
    out += "precision = " + fixed(report.precision, 4) + "  recall = " + fixed(report.recall, 4) +
           "  F1 = " + fixed(report.f1, 4) + "  (confidence >= " + fixed(report.conf_threshold, 2) +
           ": TP " + std::to_string(report.tp) + ", FP " + std::to_string(report.fp) + ", FN " +
           std::to_string(report.fn) + ")\n";
    return out;
}

std::string format_report_csv(const EvalReport& report, const std::vector<std::string>& classes)
{
    std::string out = "class,ap,tp,fp,fn\n";
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (const auto& [cls, s] : report.per_class)
    {
        out += class_label(classes, cls) + "," + (s.ap ? fixed(*s.ap, 6) : "") + "," + std::to_string(s.tp) + "," +
               std::to_string(s.fp) + "," + std::to_string(s.fn) + "\n";
        tp += s.tp;
        fp += s.fp;
        fn += s.fn;
    }
    out += "all," + fixed(report.map, 6) + "," + std::to_string(tp) + "," + std::to_string(fp) + "," +
           std::to_string(fn) + "\n";
    return out;
}

} // namespace yoloprep
