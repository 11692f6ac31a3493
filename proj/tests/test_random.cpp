#include <catch_amalgamated.hpp>

#include <map>
#include <set>

#include "rear/parallel.hpp"
#include "rear/random.hpp"

using rear::stats::RandomPlan;
using rear::stats::Rng;
using rear::stats::StreamLabel;

TEST_CASE("equal labels give equal streams") {
  const RandomPlan plan(42);
  auto a = plan.stream({"h1", 7, 3, "perm"});
  auto b = plan.stream({"h1", 7, 3, "perm"});
  for (int i = 0; i < 100; ++i) REQUIRE(a() == b());
}

TEST_CASE("every label field changes the stream") {
  const RandomPlan plan(42);
  const std::vector<StreamLabel> labels = {
      {"h1", 7, 3, "perm"}, {"h2", 7, 3, "perm"}, {"h1", 5, 3, "perm"},
      {"h1", 7, 4, "perm"}, {"h1", 7, 3, "control"}, {"h1", -7, 3, "perm"},
  };
  std::set<std::uint64_t> seeds;
  for (const auto& l : labels) seeds.insert(plan.derive(l));
  CHECK(seeds.size() == labels.size());
  CHECK(RandomPlan(43).derive(labels[0]) != plan.derive(labels[0]));
}

TEST_CASE("pinned derivation") {
  // Changing this value means results from older runs no longer reproduce;
  // bump the generator version alongside.
  const RandomPlan plan(42);
  CHECK(plan.derive({"h1", 7, 0, "perm"}) == 0x140716027f1c1cfbULL);
  CHECK(RandomPlan::kGeneratorVersion == "mt19937_64+splitmix64/v1");
  CHECK(rear::stats::splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("below stays in range and is roughly uniform") {
  Rng rng(7);
  std::map<std::uint64_t, int> counts;
  for (int i = 0; i < 60000; ++i) {
    const auto x = rng.below(6);
    REQUIRE(x < 6);
    ++counts[x];
  }
  for (const auto& [value, n] : counts) CHECK(std::abs(n - 10000) < 500);
  CHECK(rng.below(1) == 0);
}

TEST_CASE("uniform lies in [0, 1)") {
  Rng rng(11);
  double lo = 1.0;
  double hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("parallel_for visits each index once and rethrows") {
  for (std::size_t workers : {1u, 3u, 8u}) {
    std::vector<int> hits(1000, 0);
    rear::parallel_for(hits.size(), workers, [&](std::size_t i) { ++hits[i]; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
  CHECK_THROWS_AS(rear::parallel_for(500, 4,
                                     [](std::size_t i) {
                                       if (i == 300) throw std::runtime_error("boom");
                                     }),
                  std::runtime_error);
  rear::parallel_for(0, 4, [](std::size_t) { FAIL("called on empty range"); });
}
