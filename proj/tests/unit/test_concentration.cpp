#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "vecproc/concentration.hpp"

using namespace vecproc;

TEST_SUITE("concentration") {
  TEST_CASE("spectra") {
    CHECK(CovarianceSpectrum::geometric(30).trace() == doctest::Approx(1.0));
    CHECK(CovarianceSpectrum::uniform(10, 2.0).largest() == doctest::Approx(0.2));
    CHECK_THROWS(CovarianceSpectrum({-1.0, 0.5}));
  }

  TEST_CASE("mgf product bound with equality for one mode") {
    const auto rows = gaussian_mgf_check(CovarianceSpectrum::single(), {0.1, 0.25, 0.4});
    for (const auto& r : rows) {
      CHECK(r.ok);
      CHECK(std::abs(r.product - r.bound) <= 1e-12);
    }
    for (const auto& r : gaussian_mgf_check(CovarianceSpectrum::geometric(30), {0.1, 0.25, 0.4})) {
      CHECK(r.ok);
      CHECK(r.product < r.bound);
    }
    CHECK_THROWS(gaussian_mgf_check(CovarianceSpectrum::single(), {0.5}));
  }

  TEST_CASE("hoeffding tails") {
    CHECK(hoeffding_real_check(std::vector<double>(20, 1.0), {0.5, 1, 2}, 20000, 3).all_ok());
    const auto r = hoeffding_hilbert_check(5, std::vector<double>(20, 1.0), {0.5, 1, 2}, 20000, 3);
    CHECK(r.all_ok());
    CHECK(r.freqs.size() == 3);
  }

  TEST_CASE("gaussian sampling and tails") {
    const CovarianceSpectrum s({0.5, 0.3, 0.2});
    Rng rng(4);
    double tr = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
      const auto y = sample_gaussian(HPoint(3), s, rng);
      tr += inner(y, y);
    }
    CHECK(tr / n == doctest::Approx(1.0).epsilon(0.03));
    CHECK(gaussian_tail_check(s, {1, 2, 3}, 20000, 5).all_ok());
    CHECK_THROWS(gaussian_tail_check(s, {1}, 100, 5));
  }

  TEST_CASE("cosh moments") {
    const auto r = cosh_moment_check(3, std::vector<double>(10, 1.0), {0.1, 0.3}, 20000, 6);
    CHECK(r.all_ok());
  }
}
