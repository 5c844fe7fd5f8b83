#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "vecproc/regression.hpp"

using namespace vecproc;

TEST_SUITE("regression_lab") {
  TEST_CASE("delta_n with J = 0 has a closed form") {
    const double t = 1.0;
    const std::size_t n = 10000;
    const double want = 8.0 * (4.0 * std::sqrt(1.0 + t) + std::sqrt(8.0 * t / 3.0)) / std::sqrt(double(n));
    const double got = solve_delta_n([](double) { return 0.0; }, n, t);
    CHECK(got == doctest::Approx(want).epsilon(1e-6));
  }

  TEST_CASE("delta_n with linear J scales as n^{-1/2}") {
    const auto j = [](double d) { return d; };
    const double a = solve_delta_n(j, 10000, 2.0);
    const double b = solve_delta_n(j, 40000, 2.0);
    CHECK(a / b == doctest::Approx(2.0).epsilon(1e-5));
  }

  TEST_CASE("delta_n plugs back in") {
    const auto j = [](double d) { return 3.0 * std::sqrt(d); };
    const double d = solve_delta_n(j, 10000, 1.0);
    CHECK(delta_n_residual(j, 10000, 1.0, d) >= -1e-9);
    CHECK(delta_n_residual(j, 10000, 1.0, d * (1.0 - 1e-5)) < 0.0);
  }

  TEST_CASE("delta_n preconditions") {
    CHECK_THROWS_AS(solve_delta_n([](double) { return 0.0; }, 100, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(solve_delta_n([](double d) { return d * d * d; }, 100, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_delta_n([](double d) { return 1e6 * d; }, 100, 1.0), std::domain_error);
  }

  TEST_CASE("least squares recovers g0 without noise") {
    const auto cls = generate_finite_dim_ball_class(1, 1, 3, 1.0, 6, 2);
    const auto s = evaluate_on(cls, EmpiricalDesign::midpoints(40));
    const auto fit = least_squares_fit(s, 4, std::vector<double>(40 * 3, 0.0));
    CHECK(fit.index == 4);
    CHECK(fit.error == 0.0);
  }

  TEST_CASE("least squares picks g0 against a far candidate") {
    ClassSample s(2, 20, 2);
    for (std::size_t i = 0; i < 20; ++i) s.at(1, i)[0] = 3.0;
    const CovarianceSpectrum noise({0.5, 0.5});
    int hits = 0;
    for (std::uint64_t r = 0; r < 100; ++r) {
      Rng rng(1, r);
      const auto eps = draw_noise(noise, 20, rng);
      const auto fit = least_squares_fit(s, 0, eps);
      hits += fit.index == 0;
      CHECK(fit.basic_lhs <= fit.basic_rhs + 1e-12);
    }
    CHECK(hits >= 99);
  }

  TEST_CASE("spline dynamic program matches brute force") {
    SplineNet net;
    net.knots = 3;
    net.h = 1.0 / 3.0;
    net.eps = 0.5;
    net.k_b = 1.0;
    net.q_max = 2;
    net.step_max = 1;
    std::vector<double> x, y;
    Rng rng(3);
    for (int i = 0; i < 17; ++i) {
      x.push_back((i + 0.5) / 17.0);
      y.push_back(rng.uniform(-1.2, 1.2));
    }
    double best = std::numeric_limits<double>::infinity();
    std::size_t paths = 0;
    std::function<void(std::vector<int>&)> walk = [&](std::vector<int>& q) {
      if (q.size() == 4) {
        ++paths;
        double loss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          const auto j = std::min<std::size_t>(2, static_cast<std::size_t>(x[i] * 3.0));
          const double u = x[i] * 3.0 - double(j);
          const double f = 0.5 * ((1 - u) * q[j] + u * q[j + 1]);
          loss += (y[i] - f) * (y[i] - f);
        }
        best = std::min(best, loss);
        return;
      }
      for (int v = -2; v <= 2; ++v) {
        if (!q.empty() && std::abs(v - q.back()) > 1) continue;
        q.push_back(v);
        walk(q);
        q.pop_back();
      }
    };
    std::vector<int> q;
    walk(q);
    double loss = 0.0;
    net.fit(x, y, &loss);
    CHECK(loss == doctest::Approx(best).epsilon(1e-12));
    CHECK(std::exp(net.log_paths()) == doctest::Approx(double(paths)));
  }

  TEST_CASE("linear fit") {
    const auto [slope, intercept] = linear_fit({1, 2, 3}, {5, 7, 9});
    CHECK(slope == doctest::Approx(2.0));
    CHECK(intercept == doctest::Approx(3.0));
  }

  TEST_CASE("small rate experiment") {
    RateConfig c;
    c.n_grid = {64, 512};
    c.reps = 30;
    c.seed = 4;
    const auto fit = rate_experiment(c);
    CHECK(fit.basic_ok());
    CHECK(fit.coverage_ok());
    CHECK(fit.rows[1].median_error < fit.rows[0].median_error);
    CHECK(fit.theory_exponent == doctest::Approx(-1.0 / 3.0));
  }

  TEST_CASE("gaussian chained tail") {
    const auto cls = generate_finite_dim_ball_class(1, 2, 3, 1.0, 10, 5);
    const auto s = evaluate_on(cls, EmpiricalDesign::uniform(50, 1, 6));
    const auto plan = build_chaining_plan(s, default_chain_depth(50));
    const auto r = gaussian_chaining_check(s, plan, CovarianceSpectrum({0.5, 0.3, 0.2}), {0.5, 1, 2}, 3000, 7);
    CHECK(r.all_ok());
    CHECK_THROWS(gaussian_chaining_check(s, plan, CovarianceSpectrum({1.0, 1.0, 1.0}), {1}, 10, 7));
  }

  TEST_CASE("erm with one member has no excess risk") {
    ErmConfig c;
    c.members = 1;
    c.n_grid = {50};
    c.reps = 20;
    c.sign_draws = 16;
    c.quadrature_nodes = 200;
    const auto r = erm_lipschitz_experiment(c);
    CHECK(r.rows[0].median_excess == 0.0);
    CHECK(r.all_ok());
  }

  TEST_CASE("erm bound on a small class") {
    ErmConfig c;
    c.n_grid = {100, 400};
    c.reps = 40;
    c.sign_draws = 32;
    c.quadrature_nodes = 400;
    const auto r = erm_lipschitz_experiment(c);
    CHECK(r.all_ok());
    CHECK(r.rows[0].decomposition_violations == 0);
  }
}
