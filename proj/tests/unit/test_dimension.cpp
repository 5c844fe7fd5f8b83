#include <cmath>

#include "doctest.h"
#include "vecproc/dimension.hpp"
#include "vecproc/rng.hpp"

using namespace vecproc;

TEST_SUITE("dimension") {
  TEST_CASE("line and square slopes") {
    std::vector<std::vector<double>> line, square;
    for (int i = 0; i < 512; ++i) line.push_back({(i + 0.5) / 512.0, 0.0, 0.0});
    for (int i = 0; i < 48; ++i) {
      for (int j = 0; j < 48; ++j) square.push_back({(i + 0.5) / 48.0, (j + 0.5) / 48.0});
    }
    const auto lc = PointCloud::euclidean(line);
    const auto sc = PointCloud::euclidean(square);
    const auto lf = box_dimension_estimate(lc, default_delta_grid(lc));
    const auto sf = box_dimension_estimate(sc, default_delta_grid(sc));
    CHECK(lf.slope == doctest::Approx(1.0).epsilon(0.1));
    CHECK(sf.slope == doctest::Approx(2.0).epsilon(0.15));
  }

  TEST_CASE("grid and diameter") {
    std::vector<std::vector<double>> pts;
    for (int i = 0; i <= 200; ++i) pts.push_back({i / 200.0});
    const auto c = PointCloud::euclidean(pts);
    CHECK(diameter(c) == doctest::Approx(1.0));
    const auto g = default_delta_grid(c, 5);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] < g[i - 1]);
    CHECK_THROWS(box_dimension_estimate(c, {0.5, 0.2}));
  }

  TEST_CASE("homogeneity of a filled square") {
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) pts.push_back({i / 19.0, j / 19.0});
    }
    const auto cloud = PointCloud::euclidean(pts);
    const auto rep = homogeneity_check(cloud, 16.0, 2.0, 30, 3);
    CHECK(rep.trials.size() == 30);
    CHECK(rep.all_ok);
    // M = 1, tau tiny: claims a ball needs about one subball
    CHECK_FALSE(homogeneity_check(cloud, 1.0, 0.01, 30, 3).all_ok);
    CHECK_THROWS(homogeneity_check(cloud, 1.0, 0.0, 30, 3));
  }

  TEST_CASE("assouad estimate on a segment is near one") {
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 400; ++i) pts.push_back({i / 399.0});
    const auto est = assouad_estimate(PointCloud::euclidean(pts), 2, 100);
    CHECK(est.tau > 0.6);
    CHECK(est.tau < 1.4);
  }
}
