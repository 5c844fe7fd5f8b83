#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "vecproc/covering.hpp"
#include "vecproc/rng.hpp"

using namespace vecproc;

namespace {

PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows(n, std::vector<double>(2));
  for (auto& r : rows) {
    for (auto& v : r) v = rng.uniform();
  }
  return PointCloud::euclidean(std::move(rows));
}

}  // namespace

TEST_SUITE("covering") {
  TEST_CASE("greedy cover on a line") {
    const auto cloud = PointCloud::euclidean(std::vector<std::vector<double>>{{0.0}, {1.0}, {2.0}, {3.0}});
    const auto c = greedy_cover(cloud, 1.0);
    CHECK(cover_is_valid(cloud, c));
    // starts at 0, farthest uncovered is 3
    CHECK(c.center_indices == std::vector<std::size_t>{0, 3});
    CHECK(exact_cover_number(cloud, 1.0) == 2);
    CHECK(max_packing_number(cloud, 1.0) == 2);
    CHECK(max_packing_number(cloud, 0.5) == 4);
    CHECK(greedy_cover(cloud, 10.0).size() == 1);
  }

  TEST_CASE("oracle inequalities on random clouds") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto cloud = random_cloud(8, s);
      for (double d : {0.1, 0.25, 0.4}) {
        const auto g = greedy_cover(cloud, d);
        CHECK(cover_is_valid(cloud, g));
        const auto ex = exact_cover_number(cloud, d);
        CHECK(ex <= g.size());
        const auto pk = max_packing_number(cloud, d);
        CHECK(ex <= pk);
        CHECK(pk <= exact_cover_number(cloud, d / 2.0));
      }
    }
  }

  TEST_CASE("invalid arguments") {
    const auto cloud = random_cloud(25, 1);
    CHECK_THROWS_AS(greedy_cover(cloud, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(greedy_cover(cloud, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(exact_cover_number(cloud, 0.1), std::invalid_argument);
    CHECK(greedy_cover_allow_zero(cloud, 0.0).size() == 25);
  }

  TEST_CASE("metrics") {
    PointCloud sup(Metric::sup_norm, 2, {{0, 0, 0, 0}, {3, 4, 1, 0}});
    PointCloud l2(Metric::l2_empirical, 2, {{0, 0, 0, 0}, {3, 4, 1, 0}});
    CHECK(sup.distance(0, 1) == doctest::Approx(5.0));
    CHECK(l2.distance(0, 1) == doctest::Approx(std::sqrt(13.0)));
  }

  TEST_CASE("smooth cover constants") {
    CHECK(smooth_cover_k1(1, 2, 1.0) == doctest::Approx(1.0));
    CHECK(smooth_cover_k1(2, 2, 1.0) == doctest::Approx(2.0));
    // ceil(sqrt(1) (4 / 0.1)^{1/2})
    CHECK(smooth_cover_net_size(1, 2, 1.0, 0.1) == doctest::Approx(7.0));
  }

  TEST_CASE("smooth cover cells are delta-small") {
    const auto cls = generate_finite_dim_ball_class(1, 2, 2, 1.0, 40, 4);
    const auto sc = build_smooth_cover(cls, 0.2, 64, 1);
    CHECK(sc.cell_of_member.size() == 40);
    CHECK(sc.occupied_cells >= 1);
    const auto v = verify_cover_validity(cls, sc);
    CHECK(v.ok);
    CHECK(v.max_ratio <= 1.0 + 1e-9);
    CHECK_THROWS_AS(build_smooth_cover(cls, 1.5), std::invalid_argument);
  }
}
