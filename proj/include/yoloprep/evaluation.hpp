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

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace yoloprep {

struct Detection
{
    std::string image_id;
    int class_id = 0;
    double confidence = 0.0;
    CenterBox box;
};

enum class ApMode
{
    AllPoints,
    ElevenPoint,
};

const char* to_string(ApMode mode) noexcept;
ApMode parse_ap_mode(std::string_view text);

class EvaluationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Parses `<image_id> <class_id> <confidence> <cx> <cy> <w> <h>` lines.
/// Errors carry the 1-based line number.
std::vector<Detection> parse_detections(std::string_view text, int class_count);

struct MatchResult
{
    /// Indices into the input detections, in ranking order.
    std::vector<std::size_t> order;

    /// is_tp[k] belongs to detection order[k].
    std::vector<bool> is_tp;

    /// Unmatched ground-truth boxes per class.
    std::map<int, std::size_t> false_negatives;

    /// Ground-truth boxes per class.
    std::map<int, std::size_t> ground_truth;
};

/// Greedy matching in descending confidence. Each detection takes the
/// highest-IoU unmatched ground-truth box of its class in its image; it is a
/// true positive when that IoU is strictly above `iou_thr`.
MatchResult match_detections(const std::vector<Detection>& dets, const std::vector<LabeledImage>& truth,
                             double iou_thr);

/// `ranked_tp` holds the TP/FP flags of one class in ranking order.
double average_precision(const std::vector<bool>& ranked_tp, std::size_t total_gt, ApMode mode);

struct ClassStats
{
    /// Unset when the class has no ground truth; such classes do not enter the mAP.
    std::optional<double> ap;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

struct EvalReport
{
    std::map<int, ClassStats> per_class;
    double map = 0.0;

    // At the confidence threshold.
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    double iou_threshold = 0.5;
    double conf_threshold = 0.25;
    ApMode ap_mode = ApMode::AllPoints;
};

EvalReport evaluate(const std::vector<Detection>& dets, const std::vector<LabeledImage>& truth,
                    double iou_thr = 0.5, double conf_thr = 0.25, ApMode mode = ApMode::AllPoints);

/// Label of the report with the highest mAP; the earliest wins ties.
std::string select_best_checkpoint(const std::vector<std::pair<std::string, EvalReport>>& reports);

std::string format_report_text(const EvalReport& report, const std::vector<std::string>& classes);

/// `class,ap,tp,fp,fn` rows and a final `all` row carrying the mAP.
std::string format_report_csv(const EvalReport& report, const std::vector<std::string>& classes);

} // namespace yoloprep
