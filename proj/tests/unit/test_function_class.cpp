#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "vecproc/function_class.hpp"

using namespace vecproc;

TEST_SUITE("function_class") {
  TEST_CASE("multi-indices") {
    CHECK(multi_indices(1, 3).size() == 4);
    CHECK(multi_indices(2, 2).size() == 6);
    CHECK(multi_factorial({2, 3}) == doctest::Approx(12.0));
    const double h[2] = {0.5, 2.0};
    CHECK(multi_power(h, {2, 1}) == doctest::Approx(0.5));
  }

  TEST_CASE("derivatives agree with finite differences") {
    SmoothMap g(2, 2);
    g.add(TrigTerm{{1.0, 2.0}, HPoint{0.3, -0.1}, HPoint{0.2, 0.4}});
    g.add(MonomialTerm{{1, 1}, HPoint{0.5, 0.25}});
    const double x[2] = {0.3, 0.6};
    const double e = 1e-6;
    const double xp[2] = {0.3 + e, 0.6}, xm[2] = {0.3 - e, 0.6};
    const auto fd = (1.0 / (2 * e)) * (g.value(xp) - g.value(xm));
    const auto d = g.derivative({1, 0}, x);
    for (std::size_t k = 0; k < 2; ++k) CHECK(d[k] == doctest::Approx(fd[k]).epsilon(1e-7));
  }

  TEST_CASE("closed-form mean matches quadrature") {
    SmoothMap g(1, 1);
    g.add(TrigTerm{{1.0}, HPoint{0.7}, HPoint{-0.2}});
    g.add(MonomialTerm{{2}, HPoint{1.5}});
    const auto design = EmpiricalDesign::midpoints(20000);
    double s = 0.0;
    for (std::size_t i = 0; i < design.size(); ++i) s += g.value(design[i])[0];
    CHECK(g.mean_uniform()[0] == doctest::Approx(s / 20000.0).epsilon(1e-8));
  }

  TEST_CASE("generated classes respect their bounds") {
    const auto ball = generate_finite_dim_ball_class(1, 2, 3, 1.0, 12, 5);
    CHECK(ball.size() == 12);
    CHECK(ball.check_membership().ok);
    std::vector<HPoint> psi{HPoint{1.0, 0.0, 0.0}, HPoint{0.0, 0.0, 1.0}};
    const auto span = generate_span_class(1, 1, psi, 2.0, 6, 9);
    CHECK(span.check_membership().ok);
    const auto sm = generate_smooth_output_class(1, 1, 1, 1, 1.0, 33, 4, 3);
    CHECK(sm.check_membership().ok);
  }

  TEST_CASE("serialization round trip") {
    const auto cls = generate_finite_dim_ball_class(1, 1, 2, 1.0, 5, 17, {65, 3});
    const auto back = FunctionClass::deserialize(cls.serialize());
    REQUIRE(back.size() == cls.size());
    for (std::size_t g = 0; g < cls.size(); ++g) {
      CHECK(std::equal(cls[g].raw().begin(), cls[g].raw().end(), back[g].raw().begin()));
    }
    std::string bad = cls.serialize();
    bad.back() = static_cast<char>(bad.back() ^ 0x1);
    CHECK_THROWS(FunctionClass::deserialize(bad));
  }

  TEST_CASE("design validation and sample evaluation") {
    CHECK_THROWS_AS(EmpiricalDesign({{0.5}, {1.5}}), std::invalid_argument);
    const auto cls = generate_finite_dim_ball_class(1, 1, 2, 1.0, 4, 2);
    const auto design = EmpiricalDesign::uniform(30, 1, 8);
    const auto s = evaluate_on(cls, design);
    CHECK(s.members == 4);
    CHECK(s.points == 30);
    CHECK(s.distance(0, 1) == doctest::Approx(s.distance(1, 0)));
    CHECK(s.distance(2, 2) == 0.0);
    CHECK(s.l2_norm(0) == doctest::Approx(lp_seminorm(cls[0], 2.0, design)));
    CHECK(semi_inner(cls[0], cls[0], design) == doctest::Approx(s.l2_norm(0) * s.l2_norm(0)));
    const auto env = envelope(cls, design);
    CHECK(env.size() == 30);
  }

  TEST_CASE("taylor remainder bound") {
    const auto cls = generate_finite_dim_ball_class(1, 2, 2, 1.0, 3, 21);
    const double a[1] = {0.2};
    const double h[1] = {0.3};
    CHECK(taylor_remainder_check(cls[0], a, h, 1.0).ok);
  }

  TEST_CASE("samples of B stay in B") {
    for (const auto& y : sample_b(BallSet{2.0}, 4, 200, 3)) CHECK(norm(y) <= 2.0 + 1e-12);
  }
}
