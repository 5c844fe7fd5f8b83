#include <cmath>
#include <numbers>

#include "doctest.h"
#include "vecproc/covering.hpp"
#include "vecproc/entropy_bounds.hpp"
#include "vecproc/rng.hpp"

using namespace vecproc;

TEST_SUITE("entropy_bounds") {
  TEST_CASE("net count") {
    // K1 = 1 for d = 1, m = 2, K_B = 1
    CHECK(net_count(1, 2, 1.0, 0.1) == doctest::Approx(7.0));
    // K1 = 2 for d = 2, m = 1
    CHECK(net_count(2, 1, 1.0, 0.5) == doctest::Approx(std::pow(std::ceil(std::sqrt(2.0) * 16.0), 2)));
  }

  TEST_CASE("closed forms") {
    BoundParams p;
    p.d = 1;
    p.m = 2;
    p.k_b = 1.0;
    p.delta = 0.1;
    const double l = 7.0, e = std::numbers::e;
    p.variant = BoxVariant{1.0};
    CHECK(bound_box(p) == doctest::Approx(2.0 * 2.0 * l * std::log(2.0 * e / 0.1)));
    p.variant = AssouadVariant{3.0, 2.0};
    CHECK(bound_assouad(p) == doctest::Approx(l * 2.0 * (std::log(3.0) + 2.0 * std::log(e + 3.0)) +
                                              2.0 * (std::log(3.0) + 2.0 * std::log(4.0 * e / 0.1))));
    p.variant = ExpVariant{2.0, 0.5};
    CHECK(bound_exp(p) == doctest::Approx(2.0 * std::sqrt(2.0 * e) * 2.0 * l * std::pow(0.1, -0.5)));
    p.variant = RkhsVariant{2.0, 4.0};
    // tau = 2d/h = 1/2 plus d/m = 1/2 from the net size
    CHECK(bound_exponent(p) == doctest::Approx(1.0));
    CHECK(combined_smooth_exponent(1, 2, 1, 1) == doctest::Approx(1.5));
  }

  TEST_CASE("clipped loss") {
    const double y[2] = {0.0, 0.0}, a[2] = {3.0, 4.0}, b[2] = {0.3, 0.4};
    CHECK(clipped_distance_loss(y, a, 2.0) == doctest::Approx(2.0));
    CHECK(clipped_distance_loss(y, b, 2.0) == doctest::Approx(0.5));
  }

  TEST_CASE("contraction of covering numbers") {
    const auto cls = generate_finite_dim_ball_class(1, 1, 2, 1.0, 10, 3);
    const auto s = evaluate_on(cls, EmpiricalDesign::uniform(12, 1, 4));
    Rng rng(9);
    std::vector<HPoint> targets;
    for (int i = 0; i < 12; ++i) targets.push_back(HPoint{rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const auto rep = lipschitz_contraction_check(s, 1.0, 0.7, targets, {0.5, 0.2, 0.1, 0.05});
    CHECK(rep.all_ok);
    for (const auto& r : rep.rows) CHECK(r.loss_cover <= r.class_cover);
  }
}
