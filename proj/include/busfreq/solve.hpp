#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "busfreq/baselines.hpp"
#include "busfreq/io.hpp"
#include "busfreq/model.hpp"
#include "busfreq/propart.hpp"

namespace busfreq {

enum class Algo { Greedy, PartGreedy, ProPartGreedy, FixInterval, TopK, BruteForce };

Algo parse_algo(const std::string& name);  // greedy|partgreedy|propartgreedy|...
std::string algo_name(Algo a);

struct RunParams {
  Algo algo = Algo::Greedy;
  int theta = 180;
  Rational rho = Rational(1, 5);     // 0.2
  Rational epsilon = Rational(1, 100);  // 0.01
  std::optional<std::pair<int, int>> window;  // required by fixinterval
  std::uint64_t bf_limit = 2'000'000;
  int threads = 1;
};

struct RunResult {
  Frequency schedule;
  std::int64_t spn = 0;
  double solve_ms = 0;
  double index_ms = 0;  // 0 when a prebuilt index was supplied
  std::optional<PartitionReport> partition;
  std::uint64_t combinations = 0;  // brute force only
};

// Runs one algorithm. Solve time wraps the algorithm only; the serve index
// is built beforehand (or taken from `prebuilt`) and reported separately.
// The returned spn is recomputed from the schedule, not trusted from the
// solver internals.
RunResult run_algorithm(const Instance& inst, const RunParams& params,
                        const BuiltIndex* prebuilt = nullptr);

// Metrics document emitted next to every schedule.
nlohmann::json metrics_json(const Instance& inst, const RunParams& params,
                            const RunResult& result, std::size_t unservable);

}  // namespace busfreq
