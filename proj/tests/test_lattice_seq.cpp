#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "equidist/lattice_seq.hpp"
#include "oracle.hpp"

using namespace equidist;

TEST_CASE("point count guard") {
  CHECK(checked_point_count(2, 8, kDefaultPointBudget) == 64);
  CHECK_THROWS_AS(checked_point_count(3, 1024, kDefaultPointBudget), SizeError);
  CHECK_THROWS_AS(checked_point_count(1, 0, kDefaultPointBudget), std::invalid_argument);
  CHECK_THROWS_AS(generate_points(AlphaVec::random(1, 2), 100, std::nullopt, 1000), SizeError);
}

TEST_CASE("points equal the exact linear forms in lexicographic order") {
  const AlphaVec a = AlphaVec::random(7, 3);
  const std::int64_t N = 6;
  const PointSet p = generate_points(a, N);
  REQUIRE(p.size() == 216);
  std::size_t idx = 0;
  for (int k1 = 1; k1 <= N; ++k1)
    for (int k2 = 1; k2 <= N; ++k2)
      for (int k3 = 1; k3 <= N; ++k3) {
        const oracle::big s = oracle::to_big(a[0].raw) * k1 + oracle::to_big(a[1].raw) * k2 + oracle::to_big(a[2].raw) * k3;
        CHECK(p.values[idx++].raw == oracle::from_big(s));
      }
}

TEST_CASE("generation does not depend on the thread count") {
  const AlphaVec a = AlphaVec::random(3, 2);
  const PointSet one = generate_points(a, 300, std::nullopt, kDefaultPointBudget, 1);
  const PointSet four = generate_points(a, 300, std::nullopt, kDefaultPointBudget, 4);
  CHECK(one.values == four.values);
}

TEST_CASE("window shifts") {
  CHECK(window_start(0.0) == 1);
  CHECK(window_start(-0.5) == 0);
  CHECK(window_start(-2.0) == -1);
  CHECK(window_start(1.5) == 2);
  CHECK(window_start(2.0) == 3);

  const AlphaVec a = AlphaVec::random(5, 2);
  WindowShift zero{0.0, {0.0, 0.0}};
  CHECK(generate_points(a, 10, zero).values == generate_points(a, 10).values);

  WindowShift s{0.0, {-1.5, 0.5}};
  const PointSet p = generate_points(a, 4, s);
  // axis 1 runs -1..2, axis 2 runs 1..4
  CHECK(p.values.front() == frac_mul_int(a[0], -1) + frac_mul_int(a[1], 1));
  CHECK(p.values.back() == frac_mul_int(a[0], 2) + frac_mul_int(a[1], 4));

  CHECK_THROWS_AS((WindowShift{0.0, {2.5, 0.0}}.validate(2, 4)), std::invalid_argument);
  CHECK_THROWS_AS((WindowShift{0.2, {0.0, 0.0}}.validate(2, 4)), std::invalid_argument);
  CHECK_THROWS_AS((WindowShift{0.0, {0.0}}.validate(2, 4)), std::invalid_argument);
}

TEST_CASE("interval counting") {
  PointSet p;
  for (double v : {0.1, 0.2, 0.5, 0.5, 0.9}) p.values.push_back(frac_from_real(v));
  CHECK(count_in_interval(p, 0.0, 0.5) == 2);
  CHECK(count_in_interval(p, 0.0, 0.5000001) == 4);
  CHECK(count_in_interval(p, 0.5, 0.5) == 0);
  CHECK(count_in_interval(p, 0.0, 1.0) == 5);
  CHECK(count_in_interval(p, -0.05, 0.95) == 5);
  CHECK(count_in_interval(p, 0.85, 1.15) == 2);   // wraps: 0.9, 0.1
  CHECK(count_in_interval(p, -0.15, 0.15) == 2);  // 0.9, 0.1
  CHECK(count_in_interval(p, 0.3, 2.0) == 5);
}

TEST_CASE("arc membership agrees with a real-valued recheck") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_real_distribution<double> len(0.0, 1.2);
  for (int k = 0; k < 300; ++k) {
    const double a = u(rng);
    const double b = a + len(rng);
    const ArcInterval arc = ArcInterval::from_reals(a, b);
    for (int t = 0; t < 50; ++t) {
      const double y = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      bool inside = b - a >= 1.0;
      for (int shift = -3; shift <= 3 && !inside; ++shift) inside = a <= y + shift && y + shift < b;
      CHECK(arc.contains(frac_from_real(y)) == inside);
    }
  }
}

TEST_CASE("sorted dump is little-endian and ordered") {
  PointSet p;
  p.values = {UnitFrac(u128(2)), UnitFrac(u128(1) << 64), UnitFrac(u128(1))};
  std::ostringstream os;
  dump_sorted_points(p, os);
  const std::string s = os.str();
  REQUIRE(s.size() == 48);
  CHECK(static_cast<unsigned char>(s[0]) == 1);
  CHECK(static_cast<unsigned char>(s[16]) == 2);
  CHECK(static_cast<unsigned char>(s[32 + 8]) == 1);
}
