#include <cmath>

#include "doctest.h"
#include "vecproc/empirical_process.hpp"
#include "vecproc/parallel.hpp"

using namespace vecproc;

TEST_SUITE("empirical_process") {
  TEST_CASE("quantiles") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({1.0, 2.0, 3.0, 4.0}) == 2.5);
    CHECK(quantile({0.0, 10.0}, 0.25) == doctest::Approx(2.5));
  }

  TEST_CASE("chaining plan invariants") {
    const auto cls = generate_finite_dim_ball_class(1, 2, 3, 1.0, 30, 11);
    const auto s = evaluate_on(cls, EmpiricalDesign::uniform(60, 1, 2));
    const auto plan = build_chaining_plan(s, default_chain_depth(60));
    CHECK(plan.depth == 5);
    CHECK(plan.levels.size() == 7);
    CHECK(plan.links_ok);
    CHECK(std::abs(chaining_j(plan) - plan.j_n) <= 1e-12);
    for (std::size_t g = 0; g < s.members; ++g) {
      CHECK(plan.chains[g][0] == kZeroFunction);
      for (int k = 0; k <= plan.depth; ++k) {
        CHECK(plan.link_lengths[g][static_cast<std::size_t>(k)] <= std::ldexp(plan.r_n, -k) * (1.0 + 1e-12));
      }
    }
    // covers get finer
    for (std::size_t l = 2; l < plan.levels.size(); ++l) CHECK(plan.levels[l].count >= plan.levels[l - 1].count);
  }

  TEST_CASE("chained tails") {
    const auto cls = generate_finite_dim_ball_class(1, 2, 3, 1.0, 10, 12);
    const auto s = evaluate_on(cls, EmpiricalDesign::uniform(50, 1, 3));
    const auto plan = build_chaining_plan(s, default_chain_depth(50));
    const auto r = chaining_tail_check(s, plan, {0.5, 1, 2, 50}, 4000, 5);
    CHECK(r.all_ok());
    CHECK(r.freqs.back() == 0.0);
  }

  TEST_CASE("zero class has a trivial plan") {
    ClassSample zero(1, 8, 2);
    const auto plan = build_chaining_plan(zero, 3);
    CHECK(plan.r_n == 0.0);
    CHECK(plan.j_n == 0.0);
    CHECK(plan.links_ok);
    CHECK(chaining_tail_check(zero, plan, {1.0}, 100, 1).freqs[0] <= 1.0);
  }

  TEST_CASE("symmetrization in expectation") {
    const auto cls = generate_finite_dim_ball_class(1, 2, 2, 1.0, 8, 13);
    const auto r = symmetrization_check(cls, 50, 1000, 7, {0.2, 0.3});
    CHECK(r.ok_ghost);
    CHECK(r.ok_sigma);
    CHECK(r.all_ok());
    CHECK(r.mean_deviation > 0.0);
    CHECK_THROWS(symmetrization_check(cls, 50, 10, 7));
  }

  TEST_CASE("uniform deviation decays") {
    const auto cls = generate_finite_dim_ball_class(1, 2, 2, 1.0, 8, 14);
    const auto c = gc_decay_curve(cls, {25, 100, 400, 1600}, 100, 3);
    CHECK(c.rows.size() == 4);
    CHECK(c.rows.back().median < c.rows.front().median);
    CHECK(c.decay_ratio > 4.0);
  }

  TEST_CASE("equicontinuity table") {
    const auto cls = generate_finite_dim_ball_class(1, 2, 2, 1.0, 10, 15);
    const auto rows = equicontinuity_curve(cls, 0, {0.0, 0.5, 5.0}, {200}, 50, 4);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].members_in_ball == 1);
    CHECK(rows[0].median == 0.0);
    CHECK(rows[2].members_in_ball == 10);
    CHECK(rows[2].median >= rows[1].median);
  }

  TEST_CASE("results independent of worker count") {
    const auto cls = generate_finite_dim_ball_class(1, 2, 2, 1.0, 6, 16);
    set_worker_count(1);
    const auto a = symmetrization_check(cls, 40, 1000, 9);
    set_worker_count(4);
    const auto b = symmetrization_check(cls, 40, 1000, 9);
    set_worker_count(0);
    CHECK(a.mean_deviation == b.mean_deviation);
    CHECK(a.mean_sigma == b.mean_sigma);
  }
}
