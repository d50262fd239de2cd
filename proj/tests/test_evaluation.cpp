#include "yoloprep/evaluation.hpp"

#include "oracles.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace yoloprep;

namespace {

Detection det(std::string image, int cls, double conf, CenterBox box)
{
    box.class_id = cls;
    return Detection{std::move(image), cls, conf, box};
}

/// Three ground-truth boxes in one image; two found, one false alarm, one miss.
struct ThreeBoxFixture
{
    std::vector<LabeledImage> truth{
        LabeledImage{"img", 100, 100,
                     {CenterBox{0, 0.2, 0.2, 0.2, 0.2}, CenterBox{0, 0.6, 0.6, 0.2, 0.2},
                      CenterBox{0, 0.8, 0.2, 0.1, 0.1}}}};
    std::vector<Detection> dets{
        det("img", 0, 0.9, CenterBox{0, 0.2, 0.2, 0.2, 0.2}),
        det("img", 0, 0.8, CenterBox{0, 0.61, 0.6, 0.2, 0.2}),
        det("img", 0, 0.7, CenterBox{0, 0.3, 0.8, 0.1, 0.1}),
    };
};

} // namespace

TEST_CASE("average_precision on small rankings")
{
    CHECK(average_precision({true, true, false}, 3, ApMode::AllPoints) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(average_precision({true, true, false}, 3, ApMode::ElevenPoint) ==
          doctest::Approx(7.0 / 11.0).epsilon(1e-12));
    CHECK(average_precision({true, false, true}, 2, ApMode::AllPoints) == doctest::Approx(0.5 + 0.5 * 2.0 / 3.0));
    CHECK(average_precision({false, true}, 1, ApMode::AllPoints) == doctest::Approx(0.5));
    CHECK(average_precision({}, 4, ApMode::AllPoints) == 0.0);
    CHECK(average_precision({}, 4, ApMode::ElevenPoint) == 0.0);
    CHECK(average_precision({true}, 1, ApMode::AllPoints) == 1.0);
    CHECK(average_precision({true}, 1, ApMode::ElevenPoint) == doctest::Approx(1.0));
    CHECK(average_precision({false, false}, 2, ApMode::ElevenPoint) == 0.0);
    CHECK_THROWS_AS(average_precision({true}, 0, ApMode::AllPoints), EvaluationError);
}

TEST_CASE("average_precision agrees with brute-force oracles")
{
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 5000; ++trial)
    {
        const std::size_t n = rng() % 21;
        std::vector<bool> flags(n);
        std::size_t tp = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            flags[i] = rng() % 2 == 0;
            tp += flags[i];
        }
        const std::size_t gt = std::max<std::size_t>(tp, 1) + rng() % 5;
        CHECK(std::abs(average_precision(flags, gt, ApMode::AllPoints) - testing::step_oracle(flags, gt)) <= 1e-9);
        CHECK(std::abs(average_precision(flags, gt, ApMode::ElevenPoint) - testing::eleven_oracle(flags, gt)) <= 1e-9);
    }
}

TEST_CASE("evaluate the three-box fixture")
{
    ThreeBoxFixture f;
    const auto r = evaluate(f.dets, f.truth);
    CHECK(r.map == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(r.tp == 2);
    CHECK(r.fp == 1);
    CHECK(r.fn == 1);
    CHECK(r.precision == doctest::Approx(2.0 / 3.0));
    CHECK(r.recall == doctest::Approx(2.0 / 3.0));
    CHECK(r.f1 == doctest::Approx(2.0 / 3.0));
    REQUIRE(r.per_class.size() == 1);
    CHECK(r.per_class.at(0).ap.value() == doctest::Approx(2.0 / 3.0));

    const auto eleven = evaluate(f.dets, f.truth, 0.5, 0.25, ApMode::ElevenPoint);
    CHECK(eleven.map == doctest::Approx(7.0 / 11.0).epsilon(1e-12));

    // the confidence threshold only touches precision/recall/F1
    const auto strict = evaluate(f.dets, f.truth, 0.5, 0.85);
    CHECK(strict.map == r.map);
    CHECK(strict.tp == 1);
    CHECK(strict.fp == 0);
    CHECK(strict.fn == 2);
    CHECK(strict.precision == 1.0);

    const auto text = format_report_text(r, {"stoma"});
    CHECK(text.find("mAP = 0.6667 (IoU > 0.50, all_points)") != std::string::npos);
    CHECK(format_report_csv(r, {"stoma"}) == "class,ap,tp,fp,fn\nstoma,0.666667,2,1,1\nall,0.666667,2,1,1\n");
}

TEST_CASE("perfect and empty detections")
{
    ThreeBoxFixture f;
    std::vector<Detection> perfect;
    for (const auto& b : f.truth[0].boxes)
    {
        perfect.push_back(det("img", 0, 0.99, b));
    }
    const auto r = evaluate(perfect, f.truth);
    CHECK(r.map == 1.0);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.f1 == 1.0);

    const auto none = evaluate({}, f.truth);
    CHECK(none.map == 0.0);
    CHECK(none.fn == 3);
    CHECK(none.precision == 0.0);
    CHECK(none.f1 == 0.0);

    const auto nothing = evaluate({}, {LabeledImage{"x", 10, 10, {}}});
    CHECK(nothing.map == 0.0);
    CHECK(nothing.per_class.empty());
}

TEST_CASE("matching rules")
{
    const std::vector<LabeledImage> truth{
        LabeledImage{"a", 100, 100, {CenterBox{0, 0.5, 0.5, 0.2, 0.2}, CenterBox{1, 0.5, 0.5, 0.2, 0.2}}},
        LabeledImage{"b", 100, 100, {CenterBox{0, 0.5, 0.5, 0.2, 0.2}}}};

    SUBCASE("duplicates of one box are false positives")
    {
        const auto m = match_detections({det("a", 0, 0.5, {0, 0.5, 0.5, 0.2, 0.2}),
                                         det("a", 0, 0.9, {0, 0.5, 0.5, 0.2, 0.2})},
                                        truth, 0.5);
        CHECK(m.order == std::vector<std::size_t>{1, 0});
        CHECK(m.is_tp == std::vector<bool>{true, false});
        CHECK(m.false_negatives.at(0) == 1);
        CHECK(m.false_negatives.at(1) == 1);
        CHECK(m.ground_truth.at(0) == 2);
    }

    SUBCASE("class and image must agree")
    {
        const auto m = match_detections({det("a", 1, 0.9, {0, 0.5, 0.5, 0.2, 0.2}),
                                         det("b", 1, 0.8, {0, 0.5, 0.5, 0.2, 0.2})},
                                        truth, 0.5);
        CHECK(m.is_tp == std::vector<bool>{true, false});
    }

    SUBCASE("the IoU threshold is strict")
    {
        // IoU of 1/3 with the ground truth
        const auto shifted = det("b", 0, 0.9, {0, 0.6, 0.5, 0.2, 0.2});
        CHECK(match_detections({shifted}, truth, 0.3).is_tp[0]);
        CHECK_FALSE(match_detections({shifted}, truth, 0.34).is_tp[0]);
        // IoU exactly 0.5 with dyadic coordinates
        const std::vector<LabeledImage> exact{LabeledImage{"d", 64, 64, {CenterBox{0, 0.5, 0.5, 0.5, 0.5}}}};
        const auto half = det("d", 0, 0.9, {0, 0.5, 0.5, 0.5, 0.25});
        CHECK(iou(to_rect(half.box), to_rect(exact[0].boxes[0])) == 0.5);
        CHECK_FALSE(match_detections({half}, exact, 0.5).is_tp[0]);
        CHECK(match_detections({half}, exact, 0.49).is_tp[0]);
    }

    SUBCASE("each detection takes the best remaining box")
    {
        const std::vector<LabeledImage> two{
            LabeledImage{"c", 100, 100, {CenterBox{0, 0.3, 0.5, 0.2, 0.2}, CenterBox{0, 0.4, 0.5, 0.2, 0.2}}}};
        const auto m = match_detections({det("c", 0, 0.9, {0, 0.39, 0.5, 0.2, 0.2}),
                                         det("c", 0, 0.8, {0, 0.39, 0.5, 0.2, 0.2})},
                                        two, 0.3);
        CHECK(m.is_tp == std::vector<bool>{true, true});
        CHECK(m.false_negatives.at(0) == 0);
    }

    SUBCASE("bad inputs")
    {
        CHECK_THROWS_AS(match_detections({det("zzz", 0, 0.9, {0, 0.5, 0.5, 0.2, 0.2})}, truth, 0.5), EvaluationError);
        CHECK_THROWS_AS(match_detections({}, {truth[0], truth[0]}, 0.5), EvaluationError);
        CHECK_THROWS_AS(match_detections({}, truth, 1.0), std::invalid_argument);
    }
}

TEST_CASE("evaluation invariants on random instances")
{
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial)
    {
        std::vector<LabeledImage> truth;
        const int images = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < images; ++i)
        {
            LabeledImage img{"im" + std::to_string(i), 64, 64, {}};
            const int boxes = static_cast<int>(rng() % 4);
            for (int k = 0; k < boxes; ++k)
            {
                img.boxes.push_back(testing::random_box(rng, 2, 64, 64));
            }
            truth.push_back(img);
        }
        std::vector<Detection> dets;
        const int n = static_cast<int>(rng() % 21);
        for (int k = 0; k < n; ++k)
        {
            const auto& img = truth[rng() % truth.size()];
            CenterBox b = testing::random_box(rng, 2, 64, 64);
            if (!img.boxes.empty() && rng() % 2 == 0)
            {
                // jitter a real box so that true positives occur
                b = img.boxes[rng() % img.boxes.size()];
                b.cx = std::clamp(b.cx + (unit(rng) - 0.5) * 0.02, b.w / 2, 1 - b.w / 2);
            }
            // coarse confidences make ties likely
            dets.push_back(det(img.id, b.class_id, std::round(unit(rng) * 4) / 4, b));
        }

        const auto base = evaluate(dets, truth);
        std::size_t total_gt = 0;
        for (const auto& img : truth)
        {
            total_gt += img.boxes.size();
        }

        // per-class counts
        for (const auto& [cls, s] : base.per_class)
        {
            std::size_t class_dets = 0;
            std::size_t class_gt = 0;
            for (const auto& d : dets)
            {
                class_dets += d.class_id == cls;
            }
            for (const auto& img : truth)
            {
                for (const auto& b : img.boxes)
                {
                    class_gt += b.class_id == cls;
                }
            }
            CHECK(s.tp + s.fp == class_dets);
            CHECK(s.tp + s.fn == class_gt);
            CHECK(s.ap.has_value() == (class_gt > 0));
        }
        CHECK(base.tp + base.fn == total_gt);

        // AP of each class equals the oracle on the ranked flags
        const auto m = match_detections(dets, truth, 0.5);
        for (const auto& [cls, s] : base.per_class)
        {
            if (!s.ap)
            {
                continue;
            }
            std::vector<bool> flags;
            for (std::size_t k = 0; k < m.order.size(); ++k)
            {
                if (dets[m.order[k]].class_id == cls)
                {
                    flags.push_back(m.is_tp[k]);
                }
            }
            CHECK(std::abs(*s.ap - testing::step_oracle(flags, m.ground_truth.at(cls))) <= 1e-9);
        }

        // order of the detection list does not matter
        auto shuffled = dets;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto again = evaluate(shuffled, truth);
        CHECK(again.map == base.map);
        CHECK(again.tp == base.tp);
        CHECK(again.fp == base.fp);

        // a strictly increasing map of confidences changes nothing but the thresholded counts
        auto squashed = dets;
        for (auto& d : squashed)
        {
            d.confidence = 0.1 + 0.8 * d.confidence * d.confidence;
        }
        const auto mono = evaluate(squashed, truth);
        CHECK(mono.map == base.map);
        for (const auto& [cls, s] : base.per_class)
        {
            CHECK(mono.per_class.at(cls).tp == s.tp);
        }
    }
}

TEST_CASE("parse_detections")
{
    const auto dets = parse_detections("img1 0 0.9 0.5 0.5 0.2 0.2\n\nimg2 1 0.25 0.1 0.1 0.1 0.1\n", 2);
    REQUIRE(dets.size() == 2);
    CHECK(dets[0].image_id == "img1");
    CHECK(dets[0].confidence == 0.9);
    CHECK(dets[1].class_id == 1);
    CHECK(dets[1].box.class_id == 1);
    CHECK(parse_detections("", 1).empty());

    CHECK_THROWS_WITH_AS(parse_detections("a 0 0.5 0.5 0.5 0.2 0.2\na 0 1.5 0.5 0.5 0.2 0.2\n", 1),
                         "confidence out of range, line 2", EvaluationError);
    CHECK_THROWS_AS(parse_detections("a 0 0.5 0.5 0.5 0.2", 1), EvaluationError);
    CHECK_THROWS_AS(parse_detections("a 3 0.5 0.5 0.5 0.2 0.2", 2), EvaluationError);
    CHECK_THROWS_AS(parse_detections("a 0 x 0.5 0.5 0.2 0.2", 1), EvaluationError);
    CHECK_THROWS_AS(parse_detections("a 0 0.5 0.5 0.5 0 0.2", 1), EvaluationError);
}

TEST_CASE("AP mode names")
{
    CHECK(parse_ap_mode("all_points") == ApMode::AllPoints);
    CHECK(parse_ap_mode("eleven_point") == ApMode::ElevenPoint);
    CHECK(std::string(to_string(ApMode::ElevenPoint)) == "eleven_point");
    CHECK_THROWS_AS(parse_ap_mode("voc"), std::invalid_argument);
}

TEST_CASE("select_best_checkpoint")
{
    EvalReport a;
    a.map = 0.5;
    EvalReport b;
    b.map = 0.7;
    EvalReport c;
    c.map = 0.7;
    CHECK(select_best_checkpoint({{"w1000", a}, {"w2000", b}, {"w3000", c}}) == "w2000");
    CHECK(select_best_checkpoint({{"only", a}}) == "only");
    CHECK_THROWS_AS(select_best_checkpoint({}), EvaluationError);
}
