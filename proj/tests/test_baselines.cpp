#include <doctest.h>

#include <random>

#include "busfreq/baselines.hpp"
#include "busfreq/greedy.hpp"
#include "support.hpp"

using namespace busfreq;
using namespace busfreq::testing;

TEST_CASE("fix_interval spaces departures evenly from the window start") {
  SUBCASE("window [300,1200], n=3") {
    InstanceBuilder b;
    b.route("r1", {"A", "B"}, {0, 60}).candidates("r1", {0}).quota("r1", 1);
    Instance inst = b.build();
    inst.quotas[0] = 3;  // candidates don't constrain fix_interval
    const Frequency f = fix_interval(inst, 300, 1200);
    REQUIRE(f.size() == 3);
    CHECK(f.buses[0].depart == 300);
    CHECK(f.buses[1].depart == 600);
    CHECK(f.buses[2].depart == 900);
  }
  SUBCASE("n=1 departs at the window start") {
    InstanceBuilder b;
    b.route("r1", {"A", "B"}, {0, 60}).candidates("r1", {0}).quota("r1", 1);
    const Instance inst = b.build();
    const Frequency f = fix_interval(inst, 7000, 9000);
    REQUIRE(f.size() == 1);
    CHECK(f.buses[0].depart == 7000);
  }
  SUBCASE("full-day window, n=30") {
    InstanceBuilder b;
    b.route("r1", {"A", "B"}, {0, 60}).candidates("r1", {0}).quota("r1", 1);
    Instance inst = b.build();
    inst.quotas[0] = 30;
    const Frequency f = fix_interval(inst, 18000, 86400);
    REQUIRE(f.size() == 30);
    CHECK(f.buses[0].depart == 18000);   // interval floor(68400/30) = 2280
    CHECK(f.buses[1].depart == 20280);
    CHECK(f.buses[2].depart == 22560);
  }
  SUBCASE("window too small for the quota") {
    InstanceBuilder b;
    b.route("r1", {"A", "B"}, {0, 60}).candidates("r1", {0}).quota("r1", 1);
    Instance inst = b.build();
    inst.quotas[0] = 10;
    CHECK_THROWS_AS(fix_interval(inst, 100, 105), InfeasibleError);
  }
  SUBCASE("empty window") {
    InstanceBuilder b;
    b.route("r1", {"A", "B"}, {0, 60}).candidates("r1", {0}).quota("r1", 1);
    const Instance inst = b.build();
    CHECK_THROWS_AS(fix_interval(inst, 500, 500), ValidationError);
  }
}

TEST_CASE("top_k picks per-route standalone winners, earlier departure on ties") {
  const Instance inst = toy_instance(2);
  const Frequency f = top_k(inst, 50);
  REQUIRE(f.size() == 2);
  // standalone gains: depart 0 -> 1, depart 10 -> 2, depart 200 -> 1;
  // the 1-vs-1 tie goes to the earlier departure 0
  CHECK(f.buses[0].depart == 0);
  CHECK(f.buses[1].depart == 10);
  CHECK(objective(inst, f, 50) == 2);  // p2 double-covered, p3 missed
}

TEST_CASE("top_k equals greedy when candidates serve disjoint passengers") {
  InstanceBuilder b;
  b.route("r1", {"A", "B"}, {0, 60})
      .candidates("r1", {0, 1000, 2000})
      .passenger("A", "B", 0)
      .passenger("A", "B", 10)
      .passenger("A", "B", 1000)
      .passenger("A", "B", 2000)
      .quota("r1", 2);
  const Instance inst = b.build();
  const Frequency tk = top_k(inst, 30);
  const Frequency gr = greedy_solve(inst, 30);
  CHECK(tk.buses == gr.buses);
}

TEST_CASE("top_k with quota equal to candidate count selects everything") {
  const Instance inst = toy_instance(3);
  CHECK(top_k(inst, 50).size() == 3);
}

TEST_CASE("brute force on the toy instance") {
  const Instance inst = toy_instance(2);
  const auto bf = brute_force_opt(inst, 50);
  CHECK(bf.opt == 3);
  REQUIRE(bf.best.size() == 2);
  CHECK(bf.best.buses[0].depart == 10);
  CHECK(bf.best.buses[1].depart == 200);
}

TEST_CASE("brute force with full quotas returns the whole-set objective") {
  const Instance inst = toy_instance(3);
  const auto bf = brute_force_opt(inst, 50);
  Frequency all;
  all.buses = inst.candidates;
  CHECK(bf.opt == objective(inst, all, 50));
}

TEST_CASE("brute force with no passengers returns zero") {
  InstanceBuilder b;
  b.route("r1", {"A", "B"}, {0, 60}).candidates("r1", {0, 60}).quota("r1", 1);
  const Instance inst = b.build();
  CHECK(brute_force_opt(inst, 60).opt == 0);
}

TEST_CASE("brute force refuses oversized enumerations with the count") {
  InstanceBuilder b;
  std::vector<int> departs;
  for (int d = 0; d < 30; ++d) departs.push_back(d * 60);
  b.route("r1", {"A", "B"}, {0, 60}).candidates("r1", departs).quota("r1", 10);
  const Instance inst = b.build();
  CHECK_THROWS_AS(brute_force_opt(inst, 60, 1000), InfeasibleError);  // C(30,10) > 1000
  CHECK_NOTHROW(brute_force_opt(inst, 60, 40'000'000));               // C(30,10) ~ 30M
}

TEST_CASE("pruning never changes the optimum") {
  std::mt19937_64 rng(1357);
  for (int round = 0; round < 50; ++round) {
    const Instance inst = random_instance(rng);
    const int theta = random_theta(rng);
    CHECK(brute_force_opt(inst, theta).opt == naive_opt(inst, theta));
  }
}

TEST_CASE("oracle dominates every other algorithm") {
  std::mt19937_64 rng(8642);
  for (int round = 0; round < 30; ++round) {
    Instance inst = random_instance(rng);
    // make the fix_interval grid part of the candidate set so the oracle's
    // optimum ranges over it too
    const int w_start = 0, w_end = 2600;
    for (RouteIdx r = 0; r < inst.routes.size(); ++r) {
      const int interval = (w_end - w_start) / inst.quotas[r];
      for (int k = 0; k < inst.quotas[r]; ++k) {
        inst.candidates.push_back({r, w_start + k * interval});
      }
    }
    std::sort(inst.candidates.begin(), inst.candidates.end(),
              [](const BusCandidate& a, const BusCandidate& b) {
                return a.route != b.route ? a.route < b.route : a.depart < b.depart;
              });
    inst.candidates.erase(std::unique(inst.candidates.begin(), inst.candidates.end()),
                          inst.candidates.end());
    inst.finalize();
    validate_instance(inst);

    const int theta = random_theta(rng);
    const auto opt = brute_force_opt(inst, theta).opt;
    CHECK(objective(inst, greedy_solve(inst, theta), theta) <= opt);
    CHECK(objective(inst, top_k(inst, theta), theta) <= opt);
    const Frequency fi = fix_interval(inst, w_start, w_end);
    CHECK(objective(inst, fi, theta) <= opt);
  }
}
