#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "vecproc/rademacher.hpp"

using namespace vecproc;

TEST_SUITE("rademacher") {
  TEST_CASE("trivial classes") {
    ClassSample zero(1, 6, 2);
    CHECK(norm_rademacher(zero, RademacherMode::exact).value == 0.0);
    const auto c = coordinatewise_rademacher(zero, OrthonormalBasis::identity(2), RademacherMode::exact);
    CHECK(c.average == 0.0);
    CHECK(c.pattern_sum == 0.0);
    ClassSample one(1, 1, 2);
    one.at(0, 0)[0] = 3.0;
    one.at(0, 0)[1] = 4.0;
    CHECK(norm_rademacher(one, RademacherMode::exact).value == doctest::Approx(5.0));
  }

  TEST_CASE("exact against Monte Carlo") {
    const auto cls = generate_finite_dim_ball_class(1, 1, 2, 1.0, 10, 3);
    const auto s = evaluate_on(cls, EmpiricalDesign::uniform(8, 1, 4));
    const auto ex = norm_rademacher(s, RademacherMode::exact);
    const auto mc = norm_rademacher(s, RademacherMode::monte_carlo, 100000, 5);
    CHECK(std::abs(ex.value - mc.value) <= 3.0 * mc.se);
    CHECK_THROWS_AS(norm_rademacher(evaluate_on(cls, EmpiricalDesign::uniform(21, 1, 4)), RademacherMode::exact),
                    std::invalid_argument);
  }

  TEST_CASE("norm form is basis free and homogeneous") {
    const auto cls = generate_finite_dim_ball_class(1, 1, 3, 1.0, 6, 7);
    const auto s = evaluate_on(cls, EmpiricalDesign::uniform(10, 1, 8));
    const auto basis = OrthonormalBasis::gram_schmidt({HPoint{1, 2, 0}, HPoint{0, 1, 3}, HPoint{1, 0, 1}});
    const double a = norm_rademacher(s, RademacherMode::exact).value;
    CHECK(std::abs(a - norm_rademacher(rotate(s, basis), RademacherMode::exact).value) <= 1e-12);
    CHECK(norm_rademacher(scale(s, 2.5), RademacherMode::exact).value == doctest::Approx(2.5 * a).epsilon(1e-13));
  }

  TEST_CASE("two-point fixture") {
    const auto d = basis_dependence_demo();
    CHECK(d.standard.pattern_sum == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(d.standard.effective_signs == 2);
    CHECK(d.standard.average == doctest::Approx(0.5));
    // every sign is effective in the rotated basis; the exact sum is 12 / sqrt 2
    CHECK(d.rotated.effective_signs == 4);
    CHECK(d.rotated.pattern_sum == doctest::Approx(6.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(d.rotated.average == doctest::Approx(0.75 / std::sqrt(2.0)));
    CHECK(std::abs(d.norm_standard - d.norm_rotated) <= 1e-12);
    CHECK(d.dependent);
  }

  TEST_CASE("pattern sum bookkeeping") {
    const auto cls = generate_finite_dim_ball_class(1, 1, 2, 1.0, 4, 9);
    const auto s = evaluate_on(cls, EmpiricalDesign::uniform(5, 1, 10));
    const auto c = coordinatewise_rademacher(s, OrthonormalBasis::identity(2), RademacherMode::exact);
    CHECK(c.pattern_sum == doctest::Approx(std::ldexp(c.average, static_cast<int>(c.effective_signs))));
    CHECK(c.normalized == doctest::Approx(c.average / 5.0));
    const auto mc = coordinatewise_rademacher(s, OrthonormalBasis::identity(2), RademacherMode::monte_carlo, 50000, 3);
    CHECK(std::abs(mc.average - c.average) <= 3.0 * mc.se + 1e-12);
    CHECK_THROWS(coordinatewise_rademacher(evaluate_on(cls, EmpiricalDesign::uniform(11, 1, 10)),
                                           OrthonormalBasis::identity(2), RademacherMode::exact));
  }

  TEST_CASE("entropy bound") {
    const auto cls = generate_finite_dim_ball_class(1, 1, 2, 1.0, 15, 12);
    const auto s = evaluate_on(cls, EmpiricalDesign::uniform(16, 1, 13));
    const auto r = rademacher_entropy_bound_check(s, 5);
    CHECK(r.ok_log2);
    CHECK(r.bound_log2 >= r.bound);
    CHECK(r.estimate.value > 0.0);
    ClassSample zero(1, 4, 2);
    CHECK(rademacher_entropy_bound_check(zero, 3).ok);
  }
}
