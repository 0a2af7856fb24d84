#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "busfreq/io.hpp"
#include "busfreq/partition.hpp"
#include "support.hpp"

using namespace busfreq;
using namespace busfreq::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("busfreq_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

LoadSpec minimal_fixture(const TempDir& dir) {
  write(dir.file("routes.csv"),
        "route_id,seq,stop_id,segment_seconds\n"
        "r1,0,A,0\n"
        "r1,1,B,120\n");
  write(dir.file("passengers.csv"),
        "passenger_id,board_stop,alight_stop,arrival_seconds\n"
        "p1,A,B,30\n");
  write(dir.file("quotas.csv"), "route_id,n\nr1,1\n");
  LoadSpec spec;
  spec.routes_path = dir.file("routes.csv");
  spec.passengers_path = dir.file("passengers.csv");
  spec.quotas_path = dir.file("quotas.csv");
  spec.window_start = 0;
  spec.window_end = 120;
  spec.step = 60;
  return spec;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("minimal fixture loads with zero unservable") {
  TempDir dir;
  LoadReport report;
  const Instance inst = load_instance(minimal_fixture(dir), &report);
  CHECK(inst.routes.size() == 1);
  CHECK(inst.passengers.size() == 1);
  CHECK(inst.candidates.size() == 3);  // 0, 60, 120
  CHECK(report.unservable == 0);
  CHECK(report.candidates_per_route == std::vector<std::uint32_t>{3});
}

TEST_CASE("loader errors carry the offending location") {
  TempDir dir;

  SUBCASE("unknown stop in passengers names the row") {
    auto spec = minimal_fixture(dir);
    write(dir.file("passengers.csv"),
          "passenger_id,board_stop,alight_stop,arrival_seconds\n"
          "p1,A,B,30\n"
          "p2,A,NOPE,30\n");
    try {
      load_instance(spec);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      CHECK(what.find(":3:") != std::string::npos);  // header is line 1
      CHECK(what.find("NOPE") != std::string::npos);
    }
  }

  SUBCASE("fractional seconds are rejected") {
    auto spec = minimal_fixture(dir);
    write(dir.file("passengers.csv"),
          "passenger_id,board_stop,alight_stop,arrival_seconds\n"
          "p1,A,B,30.5\n");
    CHECK_THROWS_AS(load_instance(spec), ValidationError);
  }

  SUBCASE("negative segment makes cum_time non-monotone") {
    auto spec = minimal_fixture(dir);
    write(dir.file("routes.csv"),
          "route_id,seq,stop_id,segment_seconds\n"
          "r1,0,A,0\nr1,1,B,-5\n");
    CHECK_THROWS_AS(load_instance(spec), ValidationError);
  }

  SUBCASE("repeated stop on a route is rejected") {
    auto spec = minimal_fixture(dir);
    write(dir.file("routes.csv"),
          "route_id,seq,stop_id,segment_seconds\n"
          "r1,0,A,0\nr1,1,B,60\nr1,2,A,60\n");
    CHECK_THROWS_AS(load_instance(spec), ValidationError);
  }

  SUBCASE("quota beyond the candidate count names the route") {
    auto spec = minimal_fixture(dir);
    write(dir.file("quotas.csv"), "route_id,n\nr1,99\n");
    try {
      load_instance(spec);
      FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
      CHECK(std::string(e.what()).find("r1") != std::string::npos);
    }
  }

  SUBCASE("missing quota row") {
    auto spec = minimal_fixture(dir);
    write(dir.file("quotas.csv"), "route_id,n\n");
    CHECK_THROWS_AS(load_instance(spec), ValidationError);
  }

  SUBCASE("wrong header") {
    auto spec = minimal_fixture(dir);
    write(dir.file("quotas.csv"), "route,n\nr1,1\n");
    CHECK_THROWS_AS(load_instance(spec), ValidationError);
  }
}

TEST_CASE("candidate generation follows the window rule") {
  InstanceBuilder b;
  b.route("r1", {"A", "B"}, {0, 60}).candidates("r1", {0}).quota("r1", 1);
  Instance inst = b.build();

  SUBCASE("inclusive end") {
    generate_candidates(inst, 0, 120, 60);
    REQUIRE(inst.candidates.size() == 3);
    CHECK(inst.candidates[0].depart == 0);
    CHECK(inst.candidates[1].depart == 60);
    CHECK(inst.candidates[2].depart == 120);
  }
  SUBCASE("default service window yields 1140 per route") {
    generate_candidates(inst, 18000, 86400, 60);
    CHECK(inst.candidates.size() == 1140);  // 86400 itself is not a second of day
    CHECK(inst.candidates.back().depart == 86340);
  }
  SUBCASE("step beyond the window leaves the single start departure") {
    generate_candidates(inst, 100, 160, 600);
    REQUIRE(inst.candidates.size() == 1);
    CHECK(inst.candidates[0].depart == 100);
  }
  SUBCASE("empty window is an error") {
    CHECK_THROWS_AS(generate_candidates(inst, 200, 100, 60), ValidationError);
    CHECK_THROWS_AS(generate_candidates(inst, 0, 100, 0), ValidationError);
  }
}

TEST_CASE("explicit candidates file wins over the window rule") {
  TempDir dir;
  auto spec = minimal_fixture(dir);
  write(dir.file("candidates.csv"), "route_id,depart_seconds\nr1,45\nr1,15\n");
  spec.candidates_path = dir.file("candidates.csv");
  const Instance inst = load_instance(spec);
  REQUIRE(inst.candidates.size() == 2);
  CHECK(inst.candidates[0].depart == 15);  // sorted on load
  CHECK(inst.candidates[1].depart == 45);

  write(dir.file("candidates.csv"), "route_id,depart_seconds\nr1,45\nr1,45\n");
  CHECK_THROWS_AS(load_instance(spec), ValidationError);
}

TEST_CASE("generator is byte-deterministic per seed") {
  TempDir a, b;
  GeneratorConfig cfg;
  cfg.route_count = 6;
  cfg.passenger_count = 500;
  cfg.overlap = 0.4;
  cfg.seed = 99;
  cfg.emit_candidates = true;
  cfg.window_start = 20000;
  cfg.window_end = 30000;
  cfg.step = 300;
  generate_instance_files(cfg, a.path.string());
  generate_instance_files(cfg, b.path.string());
  for (const char* name : {"routes.csv", "passengers.csv", "quotas.csv", "candidates.csv"}) {
    CHECK(slurp(a.file(name)) == slurp(b.file(name)));
    CHECK_FALSE(slurp(a.file(name)).empty());
  }

  cfg.seed = 100;
  TempDir c;
  generate_instance_files(cfg, c.path.string());
  CHECK(slurp(a.file("passengers.csv")) != slurp(c.file("passengers.csv")));
}

TEST_CASE("overlap zero produces pairwise-disjoint pools") {
  GeneratorConfig cfg;
  cfg.route_count = 8;
  cfg.passenger_count = 400;
  cfg.overlap = 0.0;
  cfg.seed = 5;
  const Instance inst = generate_instance(cfg);
  const OdCoverage cov = build_od_coverage(inst);
  std::vector<std::vector<PassengerIdx>> pools;
  for (RouteIdx r = 0; r < inst.routes.size(); ++r) {
    pools.push_back(passenger_pool(inst, cov, std::vector<RouteIdx>{r}));
  }
  for (std::size_t i = 0; i < pools.size(); ++i) {
    for (std::size_t j = i + 1; j < pools.size(); ++j) {
      CHECK(intersection_size(pools[i], pools[j]) == 0);
    }
  }
  // every generated passenger lies on its route, time aside
  CHECK(unservable_count(cov) == 0);
}

TEST_CASE("overlap above zero shares pools") {
  GeneratorConfig cfg;
  cfg.route_count = 8;
  cfg.passenger_count = 800;
  cfg.overlap = 0.5;
  cfg.seed = 6;
  const Instance inst = generate_instance(cfg);
  const OdCoverage cov = build_od_coverage(inst);
  std::size_t multi = 0;
  for (PassengerIdx p = 0; p < inst.passengers.size(); ++p) multi += cov.degree(p) > 1;
  CHECK(multi > 0);
}

TEST_CASE("generator respects the declared envelopes exactly") {
  GeneratorConfig cfg;
  cfg.route_count = 12;
  cfg.stops_min = 5;
  cfg.stops_max = 9;
  cfg.segment_min = 45;
  cfg.segment_max = 90;
  cfg.passenger_count = 777;
  cfg.departures_per_route = 4;
  cfg.overlap = 0.3;
  cfg.seed = 21;
  const Instance inst = generate_instance(cfg);

  CHECK(inst.routes.size() == 12);
  CHECK(inst.passengers.size() == 777);
  for (const auto& rt : inst.routes) {
    CHECK(rt.stops.size() >= 5);
    CHECK(rt.stops.size() <= 9);
    for (std::size_t k = 1; k < rt.cum_time.size(); ++k) {
      const int seg = rt.cum_time[k] - rt.cum_time[k - 1];
      CHECK(seg >= 45);
      CHECK(seg <= 90);
    }
  }
  for (int q : inst.quotas) CHECK(q == 4);
  for (const auto& p : inst.passengers) {
    CHECK(p.arrival >= 0);
    CHECK(p.arrival < kSecondsPerDay);
  }
}

TEST_CASE("zero passengers is a valid instance") {
  TempDir dir;
  GeneratorConfig cfg;
  cfg.route_count = 2;
  cfg.passenger_count = 0;
  cfg.seed = 3;
  const LoadSpec spec = generate_instance_files(cfg, dir.path.string());
  const Instance inst = load_instance(spec);
  CHECK(inst.passengers.empty());
  CHECK(inst.routes.size() == 2);
}

TEST_CASE("save/load round-trips the in-memory instance") {
  TempDir dir;
  GeneratorConfig cfg;
  cfg.route_count = 5;
  cfg.passenger_count = 300;
  cfg.overlap = 0.3;
  cfg.seed = 42;
  const Instance original = generate_instance(cfg);
  save_instance(original, dir.path.string());

  LoadSpec spec;
  spec.routes_path = dir.file("routes.csv");
  spec.passengers_path = dir.file("passengers.csv");
  spec.quotas_path = dir.file("quotas.csv");
  spec.window_start = cfg.window_start;
  spec.window_end = cfg.window_end;
  spec.step = cfg.step;
  const Instance loaded = load_instance(spec);

  REQUIRE(loaded.routes.size() == original.routes.size());
  for (RouteIdx r = 0; r < loaded.routes.size(); ++r) {
    CHECK(loaded.routes[r].id == original.routes[r].id);
    CHECK(loaded.routes[r].cum_time == original.routes[r].cum_time);
    REQUIRE(loaded.routes[r].stops.size() == original.routes[r].stops.size());
    for (std::size_t k = 0; k < loaded.routes[r].stops.size(); ++k) {
      CHECK(loaded.stop_names[loaded.routes[r].stops[k]] ==
            original.stop_names[original.routes[r].stops[k]]);
    }
  }
  REQUIRE(loaded.passengers.size() == original.passengers.size());
  for (std::size_t i = 0; i < loaded.passengers.size(); ++i) {
    CHECK(loaded.stop_names[loaded.passengers[i].board] ==
          original.stop_names[original.passengers[i].board]);
    CHECK(loaded.stop_names[loaded.passengers[i].alight] ==
          original.stop_names[original.passengers[i].alight]);
    CHECK(loaded.passengers[i].arrival == original.passengers[i].arrival);
  }
  CHECK(loaded.quotas == original.quotas);
  CHECK(loaded.candidates.size() == original.candidates.size());
}

TEST_CASE("schedules save sorted and reload") {
  TempDir dir;
  const Instance inst = toy_instance();
  Frequency f;
  f.buses = {{0, 200}, {0, 10}};
  const std::string path = dir.file("schedule.csv");
  save_schedule(path, inst, f);
  CHECK(slurp(path) == "route_id,depart_seconds\nr1,10\nr1,200\n");
  const Frequency loaded = load_schedule(path, inst);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded.buses[0].depart == 10);
  CHECK(loaded.buses[1].depart == 200);
}

TEST_CASE("generator config reads from JSON") {
  TempDir dir;
  write(dir.file("cfg.json"), R"({"route_count": 7,,})");
  CHECK_THROWS_AS(GeneratorConfig::from_json_file(dir.file("cfg.json")), ValidationError);

  write(dir.file("cfg.json"),
        R"({"route_count": 7, "passenger_count": 123, "overlap": 0.25,
           "stops_per_route": [4, 9], "seed": 17})");
  const GeneratorConfig cfg = GeneratorConfig::from_json_file(dir.file("cfg.json"));
  CHECK(cfg.route_count == 7);
  CHECK(cfg.passenger_count == 123);
  CHECK(cfg.overlap == 0.25);
  CHECK(cfg.stops_min == 4);
  CHECK(cfg.stops_max == 9);
  CHECK(cfg.seed == 17);
}
