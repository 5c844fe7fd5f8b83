#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "vecproc/hilbert.hpp"
#include "vecproc/parallel.hpp"
#include "vecproc/rng.hpp"

using namespace vecproc;

TEST_SUITE("hilbert_core") {
  TEST_CASE("point arithmetic and norms") {
    HPoint a{3.0, 4.0};
    HPoint b{1.0, -1.0};
    CHECK(norm(a) == doctest::Approx(5.0));
    CHECK(inner(a, b) == doctest::Approx(-1.0));
    CHECK((a + b) == HPoint{4.0, 3.0});
    CHECK((a - b) == HPoint{2.0, 5.0});
    a.axpy(2.0, b);
    CHECK(a == HPoint{5.0, 2.0});
    CHECK(distance(HPoint{0.0, 0.0}.coords(), HPoint{3.0, 4.0}.coords()) == doctest::Approx(5.0));
    CHECK_THROWS_AS(HPoint(std::vector<double>{1.0, NAN}), std::invalid_argument);
  }

  TEST_CASE("orthonormal bases") {
    const auto gs = OrthonormalBasis::gram_schmidt({HPoint{1.0, 1.0, 0.0}, HPoint{1.0, 0.0, 1.0}, HPoint{0.0, 1.0, 1.0}});
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) CHECK(inner(gs[i], gs[j]) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    }
    const HPoint u{0.3, -1.2, 2.5};
    const auto c = change_basis(u, gs);
    CHECK(norm(c) == doctest::Approx(norm(u)).epsilon(1e-14));
    const auto back = from_basis(c, gs);
    for (std::size_t k = 0; k < 3; ++k) CHECK(back[k] == doctest::Approx(u[k]).epsilon(1e-14));
    CHECK_THROWS_AS(OrthonormalBasis({HPoint{1.0, 0.0}, HPoint{1.0, 1.0}}), std::invalid_argument);
  }

  TEST_CASE("rng streams are reproducible and distinct") {
    Rng a(7, 3), b(7, 3), c(7, 4);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
      const auto x = a.next();
      CHECK(x == b.next());
      differs = differs || x != c.next();
    }
    CHECK(differs);
    Rng r(11);
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double u = r.uniform();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
      const double z = r.normal();
      s += z;
      s2 += z * z;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
    for (int i = 0; i < 1000; ++i) CHECK(r.below(7) < 7);
  }

  TEST_CASE("parallel_for results do not depend on the worker count") {
    std::vector<double> one(5000), many(5000);
    set_worker_count(1);
    parallel_for(one.size(), [&](std::size_t i) { one[i] = Rng(5, i).normal(); });
    set_worker_count(4);
    parallel_for(many.size(), [&](std::size_t i) { many[i] = Rng(5, i).normal(); });
    set_worker_count(0);
    CHECK(one == many);
  }

  TEST_CASE("parallel_for propagates exceptions") {
    set_worker_count(4);
    CHECK_THROWS(parallel_for(100, [](std::size_t i) {
      if (i == 57) throw std::runtime_error("boom");
    }));
    set_worker_count(0);
  }
}
