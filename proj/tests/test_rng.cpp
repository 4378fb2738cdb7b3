#include <set>
#include <vector>

#include "doctest.h"
#include "pathwise/rng.hpp"
#include "pathwise/stats.hpp"

using namespace pathwise;

TEST_CASE("philox is a pure function of counter and key") {
  const auto a = rng::philox4x32({1, 2, 3, 4}, 42);
  const auto b = rng::philox4x32({1, 2, 3, 4}, 42);
  CHECK(a == b);
  CHECK(rng::philox4x32({1, 2, 3, 5}, 42) != a);
  CHECK(rng::philox4x32({1, 2, 3, 4}, 43) != a);
}

TEST_CASE("philox output words look independent across counters") {
  std::set<std::uint64_t> seen;
  for (std::uint32_t i = 0; i < 4096; ++i) {
    const auto r = rng::philox4x32({i, 0, 0, 0}, 7);
    seen.insert(rng::to_u64(r[0], r[1]));
  }
  CHECK(seen.size() == 4096);
}

TEST_CASE("unit mappings stay in range") {
  CHECK(rng::u64_to_open_unit(0) > 0.0);
  CHECK(rng::u64_to_open_unit(~std::uint64_t{0}) <= 1.0);
  CHECK(rng::u64_to_unit(0) == 0.0);
  CHECK(rng::u64_to_unit(~std::uint64_t{0}) < 1.0);
}

TEST_CASE("node gaussians have standard moments") {
  const std::size_t n = 1u << 20;
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i)
    z[i] = rng::node_gaussian(123, 3, i, 0);
  const auto mv = stats::mean_variance(z);
  CHECK(std::fabs(mv.mean) < 0.005);
  CHECK(mv.variance == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("derived streams differ by tag and index") {
  const auto a = rng::derive_seed(9, 0, rng::kStreamReplica);
  const auto b = rng::derive_seed(9, 0, rng::kStreamBlock);
  const auto c = rng::derive_seed(9, 1, rng::kStreamReplica);
  CHECK(a != b);
  CHECK(a != c);
  CHECK(rng::derive_seed(9, 0, rng::kStreamReplica) == a);
}

TEST_CASE("uniform_at covers [0,1) evenly") {
  const std::size_t n = 1u << 18;
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = rng::uniform_at(5, i, 0);
  const auto mv = stats::mean_variance(u);
  CHECK(mv.mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(mv.variance == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}
