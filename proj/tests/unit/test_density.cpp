#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "wedgeframe/density.hpp"
#include "wedgeframe/error.hpp"

using namespace wedgeframe;

namespace {

PointSequence cloud(int n, double half_width, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-half_width, half_width);
  std::vector<double> c;
  for (int i = 0; i < 2 * n; ++i) c.push_back(u(rng));
  return PointSequence(1, c);
}

}  // namespace

TEST_CASE("box counts") {
  const auto Z = PointSequence::lattice(1.0, 1, 5);
  const std::vector<double> origin{0.0, 0.0};
  CHECK(box_count(Z, 1.5, origin) == 9);
  CHECK(box_count(Z.doubled(), 1.5, origin) == 18);
  CHECK(box_count(PointSequence(1, {}), 3.0, origin) == 0);

  // every integer on the first axis listed twice
  std::vector<double> axis;
  for (int k = -3; k <= 3; ++k)
    for (int rep = 0; rep < 2; ++rep) {
      axis.push_back(k);
      axis.push_back(0.0);
    }
  CHECK(box_count(PointSequence(1, axis), 1.5, origin) == 6);
}

TEST_CASE("box counter agrees with brute force") {
  const auto g = cloud(400, 10.0, 1);
  const BoxCounter bc(g);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-10.0, 10.0), r(0.1, 6.0);
  for (int t = 0; t < 200; ++t) {
    const std::vector<double> z{u(rng), u(rng)};
    const double R = r(rng);
    std::size_t brute = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (std::abs(g.coords(i)[0] - z[0]) <= R && std::abs(g.coords(i)[1] - z[1]) <= R) ++brute;
    CHECK(bc.count(R, z) == brute);
    CHECK(box_count(g, R, z) == brute);
  }
}

TEST_CASE("lattice densities") {
  // closed boxes of side 2R hold between (2R/mu)^2 and (2R/mu + 1)^2 lattice points
  const auto g = PointSequence::lattice(1.25, 1, 48);  // |gamma| <= 60
  const auto prof = density_profile(g, {20.0, 30.0, 40.0});
  for (std::size_t i = 0; i < prof.radii.size(); ++i) {
    const double R = prof.radii[i];
    CHECK(prof.lower[i] == doctest::Approx(std::pow(std::floor(2 * R / 1.25), 2) / (4 * R * R)));
    CHECK(prof.upper[i] == doctest::Approx(std::pow(std::floor(2 * R / 1.25) + 1, 2) / (4 * R * R)));
    CHECK(std::abs(prof.lower[i] - 0.64) <= 0.05 * 0.64);
    if (R >= 30.0) CHECK(std::abs(prof.upper[i] - 0.64) <= 0.05 * 0.64);
  }
  const auto Z = PointSequence::lattice(1.0, 1, 60);
  const auto pz = density_profile(Z, {10.0, 20.0, 40.0});
  CHECK(std::abs(pz.lower_estimate() - 1.0) <= 0.05);
  CHECK(std::abs(pz.upper_estimate() - 1.0) <= 0.05);
  const auto pd = density_profile(Z.doubled(), {10.0, 20.0, 40.0});
  for (std::size_t i = 0; i < pd.radii.size(); ++i) {
    CHECK(pd.lower[i] == 2.0 * pz.lower[i]);
    CHECK(pd.upper[i] == 2.0 * pz.upper[i]);
  }
}

TEST_CASE("density is translation consistent") {
  const auto g = cloud(3000, 30.0, 4);
  const std::vector<double> u{7.0, -3.0};
  const auto a = density_profile(g, {6.0, 12.0}, 1.0);
  const auto b = density_profile(g.translated(u), {6.0, 12.0}, 1.0);
  for (std::size_t i = 0; i < a.radii.size(); ++i) {
    CHECK(a.lower[i] == b.lower[i]);
    CHECK(a.upper[i] == b.upper[i]);
  }
}

TEST_CASE("coverage is enforced") {
  const auto g = PointSequence::lattice(1.0, 1, 5);
  CHECK_THROWS_WITH_AS(density_profile(g, {20.0}), doctest::Contains("COVERAGE"), Error);
}

TEST_CASE("enumeration by norm") {
  const auto Z = PointSequence::lattice(1.0, 1, 6);
  const std::vector<double> origin{0.0, 0.0};
  const Enumeration e = enumerate_by_norm(Z, origin);
  for (std::size_t k = 0; k < e.order.size(); ++k) CHECK(e.dist[k] == e.box->shell(k));

  std::vector<double> two{2.0, 0.0, 0.0, 1.0};
  const Enumeration t = enumerate_by_norm(PointSequence(1, two), origin);
  CHECK(t.order[0] == 1);

  const auto g = cloud(500, 20.0, 5);
  const Enumeration c = enumerate_by_norm(g, origin);
  std::set<std::size_t> seen(c.order.begin(), c.order.end());
  CHECK(seen.size() == g.size());
  std::mt19937 rng(6);
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  for (int t2 = 0; t2 < 10000; ++t2) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (c.box->shell(a) < c.box->shell(b)) CHECK(c.dist[a] <= c.dist[b]);
    CHECK(c.dist[a] == sup_distance(g.coords(c.order[a]), origin));
  }
}

TEST_CASE("deficit boxes") {
  const auto sparse = PointSequence::lattice(1.25, 1, 40);
  const auto found = deficit_box_search(sparse, std::sqrt(0.8), {2.0, 4.0, 8.0, 16.0});
  REQUIRE(found.has_value());
  CHECK(found->count <= 0.8 * std::pow(2 * found->R0, 2));

  const auto Z = PointSequence::lattice(1.0, 1, 40);
  CHECK_FALSE(deficit_box_search(Z, std::sqrt(0.8), {4.0, 8.0, 16.0}).has_value());

  std::vector<double> holed;
  for (int a = -30; a <= 30; ++a)
    for (int b = -30; b <= 30; ++b)
      if (!(a > 0 && b > 0)) {
        holed.push_back(a);
        holed.push_back(b);
      }
  const auto h = deficit_box_search(PointSequence(1, holed), 0.1, {4.0, 8.0});
  REQUIRE(h.has_value());
  CHECK(h->z0[0] - h->R0 > 0.0);
  CHECK(h->z0[1] - h->R0 > 0.0);
}
