#include "busfreq/solve.hpp"

#include <chrono>

#include "busfreq/greedy.hpp"

namespace busfreq {

Algo parse_algo(const std::string& name) {
  if (name == "greedy") return Algo::Greedy;
  if (name == "partgreedy") return Algo::PartGreedy;
  if (name == "propartgreedy") return Algo::ProPartGreedy;
  if (name == "fixinterval") return Algo::FixInterval;
  if (name == "topk") return Algo::TopK;
  if (name == "bruteforce") return Algo::BruteForce;
  throw ValidationError("unknown algorithm '" + name +
                        "' (expected greedy|partgreedy|propartgreedy|fixinterval|topk|bruteforce)");
}

std::string algo_name(Algo a) {
  switch (a) {
    case Algo::Greedy: return "greedy";
    case Algo::PartGreedy: return "partgreedy";
    case Algo::ProPartGreedy: return "propartgreedy";
    case Algo::FixInterval: return "fixinterval";
    case Algo::TopK: return "topk";
    case Algo::BruteForce: return "bruteforce";
  }
  return "?";
}

RunResult run_algorithm(const Instance& inst, const RunParams& params,
                        const BuiltIndex* prebuilt) {
  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  RunResult result;

  BuiltIndex local;
  const BuiltIndex* built = prebuilt;
  if (!built) {
    const auto t0 = clock::now();
    local = BuiltIndex::build(inst, params.theta);
    result.index_ms = ms_since(t0);
    built = &local;
  }

  const auto t0 = clock::now();
  switch (params.algo) {
    case Algo::Greedy: {
      require_feasible_quotas(inst);
      IndexState st;
      st.reset(built->topo);
      std::vector<RouteIdx> routes(inst.routes.size());
      for (RouteIdx r = 0; r < inst.routes.size(); ++r) routes[r] = r;
      auto steps = greedy_select(built->topo, st, routes, inst.quotas);
      std::vector<BusIdx> buses;
      for (const auto& s : steps) buses.push_back(s.bus);
      result.schedule = to_frequency(inst, std::move(buses));
      break;
    }
    case Algo::PartGreedy: {
      PartitionReport report;
      result.schedule = part_greedy_solve(inst, *built, params.rho, &report, params.threads);
      result.partition = std::move(report);
      break;
    }
    case Algo::ProPartGreedy: {
      PartitionReport report;
      result.schedule = pro_part_greedy_solve(inst, *built, params.rho, params.epsilon, &report,
                                              params.threads);
      result.partition = std::move(report);
      break;
    }
    case Algo::FixInterval: {
      if (!params.window) {
        throw ValidationError("fixinterval requires --window START,END");
      }
      result.schedule = fix_interval(inst, params.window->first, params.window->second);
      break;
    }
    case Algo::TopK:
      result.schedule = top_k(inst, built->topo);
      break;
    case Algo::BruteForce: {
      auto bf = brute_force_opt(inst, built->topo, params.bf_limit);
      result.schedule = std::move(bf.best);
      result.combinations = bf.combinations;
      break;
    }
  }
  result.solve_ms = ms_since(t0);
  result.spn = objective_fast(inst, built->cov, result.schedule, params.theta);
  return result;
}

nlohmann::json metrics_json(const Instance& inst, const RunParams& params,
                            const RunResult& result, std::size_t unservable) {
  nlohmann::json j;
  j["algorithm"] = algo_name(params.algo);
  j["spn"] = result.spn;
  j["runtime_ms"] = result.solve_ms;
  j["index_build_ms"] = result.index_ms;
  j["schedule_size"] = result.schedule.size();
  j["unservable_count"] = unservable;

  nlohmann::json p;
  p["theta"] = params.theta;
  if (params.algo == Algo::PartGreedy || params.algo == Algo::ProPartGreedy) {
    p["rho"] = params.rho.to_double();
  }
  if (params.algo == Algo::ProPartGreedy) {
    p["epsilon"] = params.epsilon.to_double();
  }
  if (params.window) {
    p["window"] = {params.window->first, params.window->second};
  }
  if (params.algo == Algo::BruteForce) {
    p["limit"] = params.bf_limit;
    j["combinations"] = result.combinations;
  }
  p["threads"] = params.threads;
  j["params"] = std::move(p);

  if (result.partition) {
    const auto& rep = *result.partition;
    nlohmann::json clusters = nlohmann::json::array();
    for (std::size_t i = 0; i < rep.partition.clusters.size(); ++i) {
      const Cluster& c = rep.partition.clusters[i];
      nlohmann::json jc;
      jc["cluster_id"] = i;
      nlohmann::json ids = nlohmann::json::array();
      for (RouteIdx r : c.routes) ids.push_back(inst.routes[r].id);
      jc["route_ids"] = std::move(ids);
      jc["pool_size"] = c.pool.size();
      jc["rho"] = c.rho.to_double();
      if (i < rep.cluster_objective.size()) jc["local_spn"] = rep.cluster_objective[i];
      clusters.push_back(std::move(jc));
    }
    j["per_cluster"] = std::move(clusters);
    j["rho_max"] = rep.partition.rho_max.to_double();
    j["partition_ms"] = rep.partition_ms;
  }
  return j;
}

}  // namespace busfreq
