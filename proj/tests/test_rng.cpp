#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lena/rng.hpp"

using namespace lena;

TEST_CASE("same seed reproduces the stream exactly") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  Rng c(42), d(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(c.normal() == d.normal());
    CHECK(c.uniform() == d.uniform());
  }
}

TEST_CASE("split streams differ from the parent") {
  Rng root(7);
  Rng child = root.split(1);
  Rng other = root.split(2);
  CHECK(child.next_u64() != other.next_u64());
}

TEST_CASE("uniform_index stays in range and covers all values") {
  Rng rng(3);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const auto k = rng.uniform_index(5);
    REQUIRE(k >= 0);
    REQUIRE(k < 5);
    hits[static_cast<std::size_t>(k)]++;
  }
  for (int h : hits) CHECK(h > 800);
}

TEST_CASE("normal moments are sane") {
  Rng rng(11);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum_sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sum_sq / n - 1.0) < 0.02);
}

TEST_CASE("ball draws are inside the ball and radially uniform") {
  Rng rng(19);
  const double radius = 2.0;
  int inside_half = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto x = rng.ball(2, radius);
    REQUIRE(x.norm() <= radius + 1e-12);
    if (x.norm() <= radius / 2.0) inside_half++;
  }
  // mass of the half-radius disk is (1/2)^2
  CHECK(std::abs(static_cast<double>(inside_half) / n - 0.25) < 0.01);
}
