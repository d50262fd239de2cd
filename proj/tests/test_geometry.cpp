#include "yoloprep/geometry.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace yoloprep;

namespace {

constexpr double tight = 1e-12;

void check_close(const CenterBox& a, const CenterBox& b, double tol = tight)
{
    CHECK(a.class_id == b.class_id);
    CHECK(std::abs(a.cx - b.cx) <= tol);
    CHECK(std::abs(a.cy - b.cy) <= tol);
    CHECK(std::abs(a.w - b.w) <= tol);
    CHECK(std::abs(a.h - b.h) <= tol);
}

CenterBox apply(const CenterBox& b, const Transform& t, int W = 100, int H = 100)
{
    const auto out = transform_box(b, t, W, H);
    REQUIRE(out.has_value());
    return *out;
}

} // namespace

TEST_CASE("iou of known rectangles")
{
    CHECK(iou(Rect{0, 0, 10, 10}, Rect{0, 0, 10, 10}) == 1.0);
    CHECK(iou(Rect{0, 0, 10, 10}, Rect{5, 0, 15, 10}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(iou(Rect{0, 0, 10, 10}, Rect{10, 0, 20, 10}) == 0.0);
    CHECK(iou(Rect{0, 0, 10, 10}, Rect{20, 20, 30, 30}) == 0.0);
    CHECK(iou(Rect{0, 0, 10, 10}, Rect{2, 2, 4, 4}) == doctest::Approx(0.04));
    CHECK(iou(CornerBox{"a", 0, 0, 10, 10}, CornerBox{"b", 5, 0, 15, 10}) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(iou(Rect{0, 0, 0, 10}, Rect{0, 0, 10, 10}), std::invalid_argument);
    CHECK_THROWS_AS(iou(Rect{0, 0, 10, 10}, Rect{5, 5, 4, 6}), std::invalid_argument);
}

TEST_CASE("iou is symmetric and bounded")
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i)
    {
        const auto a = to_rect(testing::random_box(rng, 1, 100, 100));
        const auto b = to_rect(testing::random_box(rng, 1, 100, 100));
        const double ab = iou(a, b);
        CHECK(ab == iou(b, a));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(iou(a, a) == doctest::Approx(1.0));
    }
}

TEST_CASE("fixed geometric transforms on one box")
{
    const CenterBox b{0, 0.2, 0.3, 0.1, 0.4};
    check_close(apply(b, HFlip{}), CenterBox{0, 0.8, 0.3, 0.1, 0.4});
    check_close(apply(b, VFlip{}), CenterBox{0, 0.2, 0.7, 0.1, 0.4});
    check_close(apply(b, Rot90CW{}), CenterBox{0, 0.7, 0.2, 0.4, 0.1});
    check_close(apply(b, Rot180{}), CenterBox{0, 0.8, 0.7, 0.1, 0.4});
    check_close(apply(b, Rot270CW{}), CenterBox{0, 0.3, 0.8, 0.4, 0.1});
}

TEST_CASE("photometric transforms leave boxes untouched")
{
    const CenterBox b{2, 0.2, 0.3, 0.1, 0.4};
    for (const Transform& t : {Transform{GaussianNoise{0.1}}, Transform{GaussianBlur{2}}, Transform{AverageBlur{3}},
                               Transform{Brightness{-0.3}}})
    {
        CHECK_FALSE(is_geometric(t));
        CHECK(apply(b, t) == b);
    }
}

TEST_CASE("geometric identities hold on random boxes")
{
    std::mt19937_64 rng(99);
    for (int i = 0; i < 1000; ++i)
    {
        const auto b = testing::random_box(rng, 3, 100, 100);
        check_close(apply(apply(b, HFlip{}), HFlip{}), b);
        check_close(apply(apply(b, VFlip{}), VFlip{}), b);
        check_close(apply(apply(b, Rot180{}), Rot180{}), b);

        auto r = b;
        for (int k = 0; k < 4; ++k)
        {
            r = apply(r, Rot90CW{});
        }
        check_close(r, b);

        check_close(apply(apply(b, Rot90CW{}), Rot270CW{}), b);
        check_close(apply(apply(b, Rot90CW{}), Rot90CW{}), apply(b, Rot180{}));
        check_close(apply(apply(b, HFlip{}), VFlip{}), apply(b, Rot180{}));

        // area in pixels is preserved by flips and right-angle rotations
        const double area = b.w * 100 * b.h * 100;
        for (const Transform& t : {Transform{HFlip{}}, Transform{VFlip{}}, Transform{Rot90CW{}}, Transform{Rot180{}},
                                   Transform{Rot270CW{}}})
        {
            const auto m = apply(b, t);
            CHECK(std::abs(m.w * 100 * m.h * 100 - area) <= 1e-9);
        }
    }
}

TEST_CASE("right-angle rotation on a non-square frame swaps the axes")
{
    // 200 wide, 100 tall; box corners (20,10)-(60,50)
    const CenterBox b{0, 0.2, 0.3, 0.2, 0.4};
    const auto r = apply(b, Rot90CW{}, 200, 100);
    // in the 100 x 200 output a source pixel (x, y) lands at (H - y, x)
    check_close(r, CenterBox{0, (100 - 30.0) / 100.0, 40.0 / 200.0, 40.0 / 100.0, 40.0 / 200.0});
    CHECK(output_dims(Rot90CW{}, 200, 100) == Size{100, 200});
    CHECK(output_dims(Rot270CW{}, 200, 100) == Size{100, 200});
    CHECK(output_dims(Rot180{}, 200, 100) == Size{200, 100});
    CHECK(output_dims(RotAngle{30}, 200, 100) == Size{200, 100});
    CHECK(output_dims(GaussianBlur{1}, 200, 100) == Size{200, 100});
}

TEST_CASE("arbitrary rotation")
{
    std::mt19937_64 rng(7);
    SUBCASE("zero degrees is the identity")
    {
        for (int i = 0; i < 200; ++i)
        {
            const auto b = testing::random_box(rng, 1, 120, 80);
            check_close(apply(b, RotAngle{0}, 120, 80), b);
        }
    }

    SUBCASE("ninety degrees agrees with Rot90CW on a square frame")
    {
        for (int i = 0; i < 200; ++i)
        {
            const auto b = testing::random_box(rng, 1, 64, 64);
            check_close(apply(b, RotAngle{90}, 64, 64), apply(b, Rot90CW{}, 64, 64), 1e-12);
            check_close(apply(b, RotAngle{180}, 64, 64), apply(b, Rot180{}, 64, 64), 1e-12);
            check_close(apply(b, RotAngle{-90}, 64, 64), apply(b, Rot270CW{}, 64, 64), 1e-12);
        }
    }

    SUBCASE("45 degrees around the center of a centered square")
    {
        // square of side 20 px centered in 100x100 -> diamond with half-diagonal 10*sqrt(2)
        const auto r = apply(CenterBox{0, 0.5, 0.5, 0.2, 0.2}, RotAngle{45});
        const double side = 20.0 * std::sqrt(2.0) / 100.0;
        check_close(r, CenterBox{0, 0.5, 0.5, side, side}, 1e-12);
    }

    SUBCASE("boxes rotated out of frame are dropped")
    {
        // a corner box in a wide frame leaves the canvas under 90 degrees
        const CenterBox corner{0, 0.05, 0.5, 0.1, 0.1};
        CHECK_FALSE(transform_box(corner, RotAngle{90}, 400, 100).has_value());
        // threshold 0 keeps anything with positive clipped area
        CHECK_FALSE(transform_box(corner, RotAngle{90}, 400, 100, 0.0).has_value());

        // 40x20 px box at x 20..60, y 40..60 of a 200x100 frame; after 90 degrees
        // it spans x 90..110, y -30..10, so a quarter of it stays visible
        const CenterBox quarter{0, 0.2, 0.5, 0.2, 0.2};
        CHECK_FALSE(transform_box(quarter, RotAngle{90}, 200, 100, 0.3).has_value());
        const auto kept = transform_box(quarter, RotAngle{90}, 200, 100, 0.2);
        REQUIRE(kept.has_value());
        check_close(*kept, CenterBox{0, 0.5, 0.05, 0.1, 0.1}, 1e-12);
    }

    SUBCASE("outputs always satisfy the box invariants")
    {
        std::uniform_real_distribution<double> angle(-179.0, 180.0);
        for (int i = 0; i < 2000; ++i)
        {
            const auto b = testing::random_box(rng, 1, 90, 60);
            const auto r = transform_box(b, RotAngle{angle(rng)}, 90, 60);
            if (r)
            {
                CHECK_NOTHROW(check_center_box(*r, 1, 1));
            }
        }
    }
}

TEST_CASE("transform parsing and slugs")
{
    CHECK(std::holds_alternative<HFlip>(parse_transform("hflip")));
    CHECK(std::holds_alternative<Rot90CW>(parse_transform("rot90")));
    CHECK(std::holds_alternative<Rot270CW>(parse_transform(" rot270 ")));
    CHECK(std::get<RotAngle>(parse_transform("rot:-12.5")).degrees == -12.5);
    CHECK(std::get<GaussianNoise>(parse_transform("noise:0.03")).sigma == 0.03);
    CHECK(std::get<GaussianBlur>(parse_transform("gblur:2")).radius == 2);
    CHECK(std::get<AverageBlur>(parse_transform("ablur:5")).kernel == 5);
    CHECK(std::get<Brightness>(parse_transform("bright:-0.2")).delta == -0.2);

    CHECK_THROWS_AS(parse_transform("spin"), std::invalid_argument);
    CHECK_THROWS_AS(parse_transform("rot:abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_transform("rot:200"), std::invalid_argument);
    CHECK_THROWS_AS(parse_transform("gblur:0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_transform("ablur:4"), std::invalid_argument);
    CHECK_THROWS_AS(parse_transform("bright:2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_transform("noise:-1"), std::invalid_argument);

    CHECK(transform_slug(HFlip{}) == "hflip");
    CHECK(transform_slug(Rot270CW{}) == "rot270cw");
    CHECK(transform_slug(RotAngle{-12.5}) == "rotm12p5");
    CHECK(transform_slug(GaussianNoise{0.03}) == "noise0p03");
    CHECK(transform_slug(GaussianBlur{2}) == "gblur2");
    CHECK(transform_slug(AverageBlur{3}) == "ablur3");
    CHECK(transform_slug(Brightness{0.2}) == "bright0p2");
}
