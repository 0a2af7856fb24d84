#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "busfreq/greedy.hpp"
#include "busfreq/io.hpp"
#include "busfreq/solve.hpp"

namespace {

using namespace busfreq;
using nlohmann::json;

struct InstanceFlags {
  std::string routes, passengers, quotas, candidates;
  std::string gen_config;
  std::string window_text;
  int step = 60;
  std::uint64_t seed = 0;  // 0 -> keep config seed
};

void add_instance_flags(CLI::App* cmd, InstanceFlags& f) {
  cmd->add_option("--routes", f.routes, "routes.csv path");
  cmd->add_option("--passengers", f.passengers, "passengers.csv path");
  cmd->add_option("--quotas", f.quotas, "quotas.csv path");
  cmd->add_option("--candidates", f.candidates, "candidates.csv path (optional)");
  cmd->add_option("--gen", f.gen_config, "generator config JSON instead of CSV inputs");
  cmd->add_option("--step", f.step, "candidate step seconds when no candidates file")
      ->default_val(60);
  cmd->add_option("--seed", f.seed, "override generator seed");
}

std::pair<int, int> parse_window(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw ValidationError("--window expects START,END seconds");
  }
  try {
    return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ValidationError("--window expects START,END seconds");
  }
}

Instance acquire_instance(const InstanceFlags& f, LoadReport* report) {
  if (!f.gen_config.empty()) {
    GeneratorConfig cfg = GeneratorConfig::from_json_file(f.gen_config);
    if (f.seed != 0) cfg.seed = f.seed;
    Instance inst = generate_instance(cfg);
    if (report) {
      const OdCoverage cov = build_od_coverage(inst);
      report->unservable = unservable_count(cov);
    }
    return inst;
  }
  if (f.routes.empty() || f.passengers.empty() || f.quotas.empty()) {
    throw ValidationError("need --routes, --passengers and --quotas (or --gen)");
  }
  LoadSpec spec;
  spec.routes_path = f.routes;
  spec.passengers_path = f.passengers;
  spec.quotas_path = f.quotas;
  spec.candidates_path = f.candidates;
  spec.step = f.step;
  if (!f.window_text.empty()) {
    auto [s, e] = parse_window(f.window_text);
    spec.window_start = s;
    spec.window_end = e;
  }
  return load_instance(spec, report);
}

// Keeps a deterministic subsample of `count` passengers.
void subsample_passengers(Instance& inst, std::size_t count, std::uint64_t seed) {
  std::vector<std::uint32_t> order(inst.passengers.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng() % (order.size() - i);
    std::swap(order[i], order[j]);
  }
  order.resize(count);
  std::sort(order.begin(), order.end());
  std::vector<Passenger> kept;
  kept.reserve(count);
  for (std::uint32_t i : order) kept.push_back(inst.passengers[i]);
  inst.passengers = std::move(kept);
}

int cmd_solve(const InstanceFlags& flags, const std::string& algo_text, int theta,
              const std::string& rho_text, const std::string& eps_text,
              const std::string& window_text, std::uint64_t limit, int threads,
              const std::string& out_path, const std::string& metrics_path) {
  RunParams params;
  params.algo = parse_algo(algo_text);
  params.theta = theta;
  params.rho = parse_rational(rho_text);
  params.epsilon = parse_rational(eps_text);
  params.bf_limit = limit;
  params.threads = threads;
  if (!window_text.empty()) params.window = parse_window(window_text);

  LoadReport report;
  const Instance inst = acquire_instance(flags, &report);

  const RunResult result = run_algorithm(inst, params);
  validate_exact_quotas(inst, result.schedule);
  save_schedule(out_path, inst, result.schedule);

  // End-to-end consistency: spn must match the objective of the file we wrote.
  const Frequency reloaded = load_schedule(out_path, inst);
  const std::int64_t recomputed =
      objective_fast(inst, build_od_coverage(inst), reloaded, params.theta);
  if (recomputed != result.spn) {
    throw ContractViolation("emitted schedule objective " + std::to_string(recomputed) +
                            " does not match reported spn " + std::to_string(result.spn));
  }

  const json metrics = metrics_json(inst, params, result, report.unservable);
  if (!metrics_path.empty()) {
    std::ofstream out(metrics_path, std::ios::binary);
    out << metrics.dump(2) << '\n';
  }
  std::cout << metrics.dump(2) << std::endl;
  return 0;
}

int cmd_partition(const InstanceFlags& flags, const std::string& rho_text, int theta,
                  int threads, const std::string& out_path) {
  const Instance inst = acquire_instance(flags, nullptr);
  require_feasible_quotas(inst);
  int n_min = inst.quotas.front();
  for (int q : inst.quotas) n_min = std::min(n_min, q);

  const ClusterSet cs =
      bus_route_partitioning(inst, theta, n_min, parse_rational(rho_text), threads);

  json dump = json::array();
  for (std::size_t i = 0; i < cs.clusters.size(); ++i) {
    const Cluster& c = cs.clusters[i];
    json jc;
    jc["cluster_id"] = i;
    json ids = json::array();
    for (RouteIdx r : c.routes) ids.push_back(inst.routes[r].id);
    jc["route_ids"] = std::move(ids);
    jc["pool_size"] = c.pool.size();
    jc["rho"] = c.rho.to_double();
    dump.push_back(std::move(jc));
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    out << dump.dump(2) << '\n';
  }
  std::cout << dump.dump(2) << std::endl;
  return 0;
}

int cmd_generate(const std::string& config_path, const std::string& out_dir,
                 std::uint64_t seed) {
  GeneratorConfig cfg = GeneratorConfig::from_json_file(config_path);
  if (seed != 0) cfg.seed = seed;
  generate_instance_files(cfg, out_dir);
  std::cout << "instance written to " << out_dir << std::endl;
  return 0;
}

int cmd_compare(const InstanceFlags& flags, int theta, const std::string& rho_text,
                const std::string& eps_text, const std::string& window_text,
                std::uint64_t limit, int threads, bool no_oracle) {
  LoadReport report;
  const Instance inst = acquire_instance(flags, &report);
  const Rational rho = parse_rational(rho_text);
  const Rational eps = parse_rational(eps_text);
  const auto window = window_text.empty() ? std::pair<int, int>{18000, 86400}
                                          : parse_window(window_text);

  const BuiltIndex built = BuiltIndex::build(inst, theta);

  struct Row {
    std::string name;
    std::int64_t spn;
    double ms;
    Rational rho_max;  // partitioned algos only
  };
  std::vector<Row> rows;
  auto run = [&](Algo algo) {
    RunParams params;
    params.algo = algo;
    params.theta = theta;
    params.rho = rho;
    params.epsilon = eps;
    params.window = window;
    params.bf_limit = limit;
    params.threads = threads;
    RunResult res = run_algorithm(inst, params, &built);
    Rational rm = Rational::zero();
    if (res.partition) rm = res.partition->partition.rho_max;
    rows.push_back({algo_name(algo), res.spn, res.solve_ms, rm});
    return res;
  };

  run(Algo::FixInterval);
  run(Algo::TopK);
  run(Algo::Greedy);
  run(Algo::PartGreedy);
  run(Algo::ProPartGreedy);

  std::int64_t opt = -1;
  if (!no_oracle) {
    const auto bf = brute_force_opt(inst, built.topo, limit);
    opt = bf.opt;
  }

  std::cout << std::left << std::setw(16) << "algorithm" << std::right << std::setw(10) << "spn"
            << std::setw(14) << "runtime_ms";
  if (opt >= 0) std::cout << std::setw(12) << "opt_ratio";
  std::cout << '\n';
  for (const auto& row : rows) {
    std::cout << std::left << std::setw(16) << row.name << std::right << std::setw(10) << row.spn
              << std::setw(14) << std::fixed << std::setprecision(3) << row.ms;
    if (opt >= 0) {
      const double ratio = opt == 0 ? 1.0 : static_cast<double>(row.spn) / opt;
      std::cout << std::setw(12) << std::setprecision(4) << ratio;
    }
    std::cout << '\n';
  }

  if (opt < 0) return 0;
  std::cout << "opt " << opt << "\n";

  bool violated = false;
  auto check = [&](const std::string& name, double bound) {
    const auto it = std::find_if(rows.begin(), rows.end(),
                                 [&](const Row& r) { return r.name == name; });
    const double need = bound * static_cast<double>(opt) - 1e-9;
    const bool ok = static_cast<double>(it->spn) >= need;
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << " spn " << it->spn
              << " >= " << std::setprecision(6) << need << " (bound " << bound << ")\n";
    if (!ok) violated = true;
  };
  constexpr double kOneMinusInvE = 1.0 - 0.36787944117144233;
  const auto part_rho = rows[3].rho_max.to_double();
  const auto propart_rho = rows[4].rho_max.to_double();
  check("greedy", kOneMinusInvE);
  check("partgreedy", (1.0 - part_rho) * kOneMinusInvE);
  check("propartgreedy", (1.0 - propart_rho) * (kOneMinusInvE - eps.to_double()));

  return violated ? 3 : 0;
}

// Sweep harness. One CSV row per (cell, algo); side data files per sweep
// with one column per algorithm, ready for gnuplot.
int cmd_bench(const InstanceFlags& flags, const std::string& suite_path,
              const std::string& out_prefix, int repeats_override, int threads) {
  json suite = {
      {"sweeps",
       {{"theta", {60, 120, 180, 240, 300}},
        {"rho", {"0.1", "0.2", "0.3", "0.4"}},
        {"epsilon", {"1e-4", "1e-3", "1e-2", "1e-1"}},
        {"n", {10, 20, 30, 40, 50}},
        {"passengers", {100000, 200000, 300000, 400000, 500000}}}},
      {"defaults", {{"theta", 180}, {"rho", "0.2"}, {"epsilon", "0.01"}}},
      {"algos", {"fixinterval", "topk", "greedy", "partgreedy", "propartgreedy"}},
      {"repeats", 10},
      {"window", {18000, 86400}},
  };
  if (!suite_path.empty()) {
    std::ifstream in(suite_path);
    if (!in) throw ValidationError("cannot open suite config " + suite_path);
    json user;
    in >> user;
    suite.merge_patch(user);
  }
  const int repeats = repeats_override > 0 ? repeats_override : suite["repeats"].get<int>();

  const Instance base = acquire_instance(flags, nullptr);
  const auto window = std::pair<int, int>{suite["window"][0].get<int>(),
                                          suite["window"][1].get<int>()};

  RunParams defaults;
  defaults.theta = suite["defaults"]["theta"].get<int>();
  defaults.rho = parse_rational(suite["defaults"]["rho"].get<std::string>());
  defaults.epsilon = parse_rational(suite["defaults"]["epsilon"].get<std::string>());
  defaults.window = window;
  defaults.threads = threads;

  std::vector<std::string> all_algos;
  for (const auto& a : suite["algos"]) all_algos.push_back(a.get<std::string>());

  std::ofstream csv(out_prefix + ".csv", std::ios::binary);
  csv << "cell,algo,param,value,mean_spn,mean_runtime_ms,repeats\n";

  struct DatRow {
    std::string value;
    std::vector<double> spn;
    std::vector<double> ms;
  };

  auto run_cell = [&](const std::string& param, const std::string& value_text,
                      const Instance& inst, const RunParams& params,
                      const std::vector<std::string>& algos, std::vector<DatRow>& dat) {
    const std::string cell = param + "=" + value_text;
    BuiltIndex built;
    try {
      require_feasible_quotas(inst);
      built = BuiltIndex::build(inst, params.theta);
    } catch (const std::exception& e) {
      std::cerr << "cell " << cell << " skipped: " << e.what() << std::endl;
      return;
    }
    DatRow row;
    row.value = value_text;
    for (const auto& algo : algos) {
      RunParams p = params;
      p.algo = parse_algo(algo);
      double sum_spn = 0, sum_ms = 0;
      bool failed = false;
      for (int rep = 0; rep < repeats; ++rep) {
        try {
          const RunResult res = run_algorithm(inst, p, &built);
          sum_spn += static_cast<double>(res.spn);
          sum_ms += res.solve_ms;
        } catch (const std::exception& e) {
          std::cerr << "cell " << cell << " algo " << algo << " failed: " << e.what()
                    << std::endl;
          failed = true;
          break;
        }
      }
      if (failed) continue;
      const double mean_spn = sum_spn / repeats;
      const double mean_ms = sum_ms / repeats;
      csv << cell << ',' << algo << ',' << param << ',' << value_text << ',' << mean_spn << ','
          << mean_ms << ',' << repeats << '\n';
      row.spn.push_back(mean_spn);
      row.ms.push_back(mean_ms);
    }
    dat.push_back(std::move(row));
  };

  auto write_dat = [&](const std::string& param, const std::vector<std::string>& algos,
                       const std::vector<DatRow>& rows) {
    for (const char* kind : {"spn", "runtime"}) {
      std::ofstream out(out_prefix + "_" + param + "_" + kind + ".dat", std::ios::binary);
      out << "# " << param;
      for (const auto& a : algos) out << ' ' << a;
      out << '\n';
      for (const auto& row : rows) {
        out << row.value;
        const auto& vals = std::string(kind) == "spn" ? row.spn : row.ms;
        for (double v : vals) out << ' ' << v;
        out << '\n';
      }
    }
  };

  const std::vector<std::string> partitioned = {"partgreedy", "propartgreedy"};
  const std::vector<std::string> progressive = {"propartgreedy"};

  for (const auto& [param, values] : suite["sweeps"].items()) {
    std::vector<DatRow> dat;
    std::vector<std::string> algos = all_algos;
    if (param == "rho") algos = partitioned;
    if (param == "epsilon") algos = progressive;

    for (const auto& v : values) {
      RunParams params = defaults;
      Instance inst = base;
      std::string value_text;
      if (param == "theta") {
        params.theta = v.get<int>();
        value_text = std::to_string(params.theta);
      } else if (param == "rho") {
        value_text = v.get<std::string>();
        params.rho = parse_rational(value_text);
      } else if (param == "epsilon") {
        value_text = v.get<std::string>();
        params.epsilon = parse_rational(value_text);
      } else if (param == "n") {
        const int n = v.get<int>();
        value_text = std::to_string(n);
        inst.quotas.assign(inst.routes.size(), n);
      } else if (param == "passengers") {
        const auto want = v.get<std::size_t>();
        value_text = std::to_string(want);
        if (want > inst.passengers.size()) {
          std::cerr << "cell passengers=" << want << " skipped: instance has only "
                    << inst.passengers.size() << " passengers" << std::endl;
          continue;
        }
        subsample_passengers(inst, want, flags.seed ? flags.seed : 1);
      } else {
        std::cerr << "unknown sweep parameter '" << param << "' skipped" << std::endl;
        break;
      }
      run_cell(param, value_text, inst, params, algos, dat);
    }
    if (!dat.empty()) write_dat(param, algos, dat);
  }
  std::cout << "bench results written to " << out_prefix << ".csv" << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bus departure scheduling: maximize passengers served within a waiting threshold"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "run one algorithm and emit schedule + metrics");
  InstanceFlags solve_flags;
  add_instance_flags(solve, solve_flags);
  std::string algo_text = "greedy";
  int theta = 180;
  std::string rho_text = "0.2", eps_text = "0.01", window_text;
  std::uint64_t limit = 2'000'000;
  int threads = 1;
  std::string out_path = "schedule.csv", metrics_path;
  solve->add_option("--algo", algo_text,
                    "greedy|partgreedy|propartgreedy|fixinterval|topk|bruteforce");
  solve->add_option("--theta", theta, "waiting threshold seconds")->default_val(180);
  solve->add_option("--rho", rho_text, "partition overlap threshold (rational)");
  solve->add_option("--epsilon", eps_text, "progressive threshold parameter (rational)");
  solve->add_option("--window", window_text, "START,END seconds (fixinterval)");
  solve->add_option("--limit", limit, "max brute-force combinations");
  solve->add_option("--threads", threads, "solver-internal parallelism")->default_val(1);
  solve->add_option("--out", out_path, "schedule.csv output path")->default_val("schedule.csv");
  solve->add_option("--metrics", metrics_path, "metrics JSON output path");

  // bench
  auto* bench = app.add_subcommand("bench", "parameter sweep harness");
  InstanceFlags bench_flags;
  add_instance_flags(bench, bench_flags);
  std::string suite_path, out_prefix = "bench";
  int repeats = 0;
  int bench_threads = 1;
  bench->add_option("--suite", suite_path, "suite config JSON (defaults built in)");
  bench->add_option("--out-prefix", out_prefix, "output prefix for CSV/dat files")
      ->default_val("bench");
  bench->add_option("--repeats", repeats, "repeats per cell (overrides suite)");
  bench->add_option("--threads", bench_threads, "solver-internal parallelism")->default_val(1);

  // compare
  auto* compare = app.add_subcommand("compare", "run all algorithms, check oracle bounds");
  InstanceFlags cmp_flags;
  add_instance_flags(compare, cmp_flags);
  int cmp_theta = 180;
  std::string cmp_rho = "0.2", cmp_eps = "0.01", cmp_window;
  std::uint64_t cmp_limit = 2'000'000;
  int cmp_threads = 1;
  bool no_oracle = false;
  compare->add_option("--theta", cmp_theta)->default_val(180);
  compare->add_option("--rho", cmp_rho);
  compare->add_option("--epsilon", cmp_eps);
  compare->add_option("--window", cmp_window, "START,END for fixinterval");
  compare->add_option("--limit", cmp_limit, "max brute-force combinations");
  compare->add_option("--threads", cmp_threads)->default_val(1);
  compare->add_flag("--no-oracle", no_oracle, "skip brute force and bound checks");

  // partition
  auto* partition = app.add_subcommand("partition", "dump the overlap-guided route partition");
  InstanceFlags part_flags;
  add_instance_flags(partition, part_flags);
  std::string part_rho = "0.2", part_out;
  int part_theta = 180;
  int part_threads = 1;
  partition->add_option("--rho", part_rho);
  partition->add_option("--theta", part_theta)->default_val(180);
  partition->add_option("--threads", part_threads)->default_val(1);
  partition->add_option("--out", part_out, "JSON output path (also printed)");

  // generate
  auto* generate = app.add_subcommand("generate", "write a synthetic instance");
  std::string gen_config, gen_out = "instance";
  std::uint64_t gen_seed = 0;
  generate->add_option("--config", gen_config, "generator config JSON")->required();
  generate->add_option("--out-dir", gen_out, "output directory")->default_val("instance");
  generate->add_option("--seed", gen_seed, "override config seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      solve_flags.window_text = window_text;
      return cmd_solve(solve_flags, algo_text, theta, rho_text, eps_text, window_text, limit,
                       threads, out_path, metrics_path);
    }
    if (bench->parsed()) {
      return cmd_bench(bench_flags, suite_path, out_prefix, repeats, bench_threads);
    }
    if (compare->parsed()) {
      cmp_flags.window_text = cmp_window;
      return cmd_compare(cmp_flags, cmp_theta, cmp_rho, cmp_eps, cmp_window, cmp_limit,
                         cmp_threads, no_oracle);
    }
    if (partition->parsed()) {
      return cmd_partition(part_flags, part_rho, part_theta, part_threads, part_out);
    }
    if (generate->parsed()) {
      return cmd_generate(gen_config, gen_out, gen_seed);
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << std::endl;
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
