#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "voternet/rng.hpp"

using namespace voternet;

TEST_CASE("identical triples reproduce identical draws") {
  RngStream a(42, "unit", 3);
  RngStream b(42, "unit", 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct triples give distinct streams") {
  std::set<std::uint64_t> first_draws;
  for (std::uint64_t rep = 0; rep < 50; ++rep)
    first_draws.insert(RngStream(7, "unit", rep).next_u64());
  first_draws.insert(RngStream(8, "unit", 0).next_u64());
  first_draws.insert(RngStream(7, "other", 0).next_u64());
  CHECK(first_draws.size() == 52);
}

TEST_CASE("random access matches sequential draws") {
  RngStream a(9, "idx", 0);
  const RngStream b(9, "idx", 0);
  for (std::uint64_t i = 0; i < 20; ++i) CHECK(a.next_u64() == b.at(i));
}

TEST_CASE("u01 lies in [0,1)") {
  RngStream s(1, "u", 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.u01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("below is within range and roughly uniform") {
  RngStream s(2, "below", 0);
  std::vector<int> counts(10, 0);
  for (int i = 0; i < 100000; ++i) {
    const auto v = s.below(10);
    REQUIRE(v < 10);
    counts[v]++;
  }
  for (int c : counts) {
    CHECK(c > 9000);
    CHECK(c < 11000);
  }
}

TEST_CASE("poisson matches mean and variance at small and large means") {
  for (const double lambda : {0.3, 4.0, 35.0}) {
    RngStream s(3, "pois", static_cast<std::uint64_t>(lambda * 10));
    const int reps = 200000;
    double sum = 0, sumsq = 0;
    for (int i = 0; i < reps; ++i) {
      const double k = double(s.poisson(lambda));
      sum += k;
      sumsq += k * k;
    }
    const double mean = sum / reps;
    const double var = sumsq / reps - mean * mean;
    const double se = std::sqrt(lambda / reps);
    CHECK(std::abs(mean - lambda) < 4 * se);
    CHECK(std::abs(var - lambda) < 0.05 * lambda + 4 * se);
  }
}

TEST_CASE("exponential has the requested mean") {
  RngStream s(4, "exp", 0);
  double sum = 0;
  const int reps = 200000;
  for (int i = 0; i < reps; ++i) sum += s.exponential(2.0);
  CHECK(std::abs(sum / reps - 0.5) < 0.01);
}
