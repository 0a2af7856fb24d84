#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "busfreq/model.hpp"

namespace busfreq::testing {

// Builds a valid in-memory instance from readable literals.
struct InstanceBuilder {
  Instance inst;
  std::map<std::string, StopIdx> stops;

  StopIdx stop(const std::string& name) {
    auto it = stops.find(name);
    if (it != stops.end()) return it->second;
    const auto id = static_cast<StopIdx>(inst.stop_names.size());
    inst.stop_names.push_back(name);
    inst.stop_index.emplace(name, id);
    stops.emplace(name, id);
    return id;
  }

  InstanceBuilder& route(const std::string& id, const std::vector<std::string>& stop_names,
                         const std::vector<int>& cum_time) {
    Route rt;
    rt.id = id;
    for (const auto& s : stop_names) rt.stops.push_back(stop(s));
    rt.cum_time = cum_time;
    inst.routes.push_back(std::move(rt));
    return *this;
  }

  InstanceBuilder& passenger(const std::string& board, const std::string& alight, int arrival) {
    inst.passengers.push_back({stop(board), stop(alight), arrival});
    return *this;
  }

  InstanceBuilder& candidates(const std::string& route_id, const std::vector<int>& departs) {
    pending_candidates.emplace_back(route_id, departs);
    return *this;
  }

  InstanceBuilder& quota(const std::string& route_id, int n) {
    pending_quotas.emplace_back(route_id, n);
    return *this;
  }

  Instance build() {
    std::sort(inst.routes.begin(), inst.routes.end(),
              [](const Route& a, const Route& b) { return a.id < b.id; });
    inst.route_index.clear();
    for (RouteIdx r = 0; r < inst.routes.size(); ++r) inst.route_index.emplace(inst.routes[r].id, r);
    inst.candidates.clear();
    for (const auto& [id, departs] : pending_candidates) {
      const RouteIdx r = inst.route_index.at(id);
      for (int d : departs) inst.candidates.push_back({r, d});
    }
    std::sort(inst.candidates.begin(), inst.candidates.end(),
              [](const BusCandidate& a, const BusCandidate& b) {
                return a.route != b.route ? a.route < b.route : a.depart < b.depart;
              });
    inst.quotas.assign(inst.routes.size(), 0);
    if (pending_quotas.empty()) {
      inst.quotas.clear();
    } else {
      for (const auto& [id, n] : pending_quotas) inst.quotas[inst.route_index.at(id)] = n;
    }
    inst.finalize();
    validate_instance(inst);
    return inst;
  }

  std::vector<std::pair<std::string, std::vector<int>>> pending_candidates;
  std::vector<std::pair<std::string, int>> pending_quotas;
};

// Spec toy: one route A->B taking 120s, candidates {0, 10, 200},
// passengers (A,B,0), (A,B,10), (A,B,200), theta 50, quota 2.
inline Instance toy_instance(int quota = 2) {
  InstanceBuilder b;
  b.route("r1", {"A", "B"}, {0, 120})
      .candidates("r1", {0, 10, 200})
      .passenger("A", "B", 0)
      .passenger("A", "B", 10)
      .passenger("A", "B", 200)
      .quota("r1", quota);
  return b.build();
}

// Spec serve-example route A->B->C with cumulative times 0/300/600.
inline Instance abc_instance() {
  InstanceBuilder b;
  b.route("r1", {"A", "B", "C"}, {0, 300, 600})
      .candidates("r1", {100, 400})
      .passenger("B", "C", 600)
      .passenger("C", "A", 0)
      .quota("r1", 1);
  return b.build();
}

struct RandomInstanceOptions {
  int max_routes = 3;
  int max_stops_per_route = 5;
  int max_candidates_per_route = 4;
  int max_passengers = 30;
  int min_passengers = 3;
  int max_theta = 400;
  bool shared_stop_pool = true;  // lets routes overlap
  bool random_quotas = true;     // otherwise quota 1 per route
  int max_total_quota = 5;
};

// Small random instances for property tests and oracle comparisons.
inline Instance random_instance(std::mt19937_64& rng, const RandomInstanceOptions& opt = {}) {
  auto draw = [&](int lo, int hi) { return lo + static_cast<int>(rng() % (hi - lo + 1)); };

  InstanceBuilder b;
  const int n_routes = draw(1, opt.max_routes);
  const int pool =
      opt.shared_stop_pool ? std::max(opt.max_stops_per_route + 2, n_routes * 3) : 1000;

  std::vector<std::string> route_ids;
  for (int r = 0; r < n_routes; ++r) {
    const int len = draw(2, opt.max_stops_per_route);
    std::vector<std::string> names;
    std::vector<int> used;
    while (static_cast<int>(names.size()) < len) {
      const int s = opt.shared_stop_pool ? draw(0, pool - 1) : r * 100 + static_cast<int>(names.size());
      if (std::find(used.begin(), used.end(), s) != used.end()) continue;
      used.push_back(s);
      names.push_back("s" + std::to_string(s));
    }
    std::vector<int> cum{0};
    for (int k = 1; k < len; ++k) cum.push_back(cum.back() + draw(30, 300));
    const std::string id = "r" + std::to_string(r);
    route_ids.push_back(id);
    b.route(id, names, cum);

    std::vector<int> departs;
    const int n_cand = draw(1, opt.max_candidates_per_route);
    while (static_cast<int>(departs.size()) < n_cand) {
      const int d = draw(0, 2000);
      if (std::find(departs.begin(), departs.end(), d) == departs.end()) departs.push_back(d);
    }
    b.candidates(id, departs);
  }

  const int n_pass = draw(opt.min_passengers, opt.max_passengers);
  for (int i = 0; i < n_pass; ++i) {
    int s1 = draw(0, pool - 1);
    int s2 = draw(0, pool - 1);
    while (s2 == s1) s2 = draw(0, pool - 1);
    b.passenger("s" + std::to_string(s1), "s" + std::to_string(s2), draw(0, 2500));
  }

  Instance inst = b.build();  // builder leaves quotas empty; assigned below

  inst.quotas.assign(inst.routes.size(), 1);
  int budget = opt.max_total_quota - static_cast<int>(inst.routes.size());
  for (RouteIdx r = 0; r < inst.routes.size() && opt.random_quotas; ++r) {
    const int cap = static_cast<int>(inst.candidate_count(r));
    int extra = budget > 0 ? draw(0, std::min(budget, cap - 1)) : 0;
    inst.quotas[r] = 1 + extra;
    budget -= extra;
  }
  for (RouteIdx r = 0; r < inst.routes.size(); ++r) {
    inst.quotas[r] = std::min<int>(inst.quotas[r], inst.candidate_count(r));
  }
  validate_instance(inst);
  return inst;
}

inline int random_theta(std::mt19937_64& rng, int max_theta = 400) {
  return static_cast<int>(rng() % (max_theta + 1));
}

// Test-local exhaustive optimum by plain subset recursion; the independent
// check for the production oracle's pruning.
inline std::int64_t naive_opt(const Instance& inst, int theta) {
  std::vector<BusCandidate> chosen;
  std::int64_t best = 0;
  std::function<void(RouteIdx)> rec = [&](RouteIdx r) {
    if (r == inst.routes.size()) {
      Frequency f;
      f.buses = chosen;
      best = std::max(best, objective(inst, f, theta));
      return;
    }
    const auto cands = inst.candidates_of(r);
    const int n = inst.quotas[r];
    std::vector<int> comb(n);
    std::function<void(int, int)> pick = [&](int from, int k) {
      if (k == n) {
        rec(r + 1);
        return;
      }
      for (int i = from; i < static_cast<int>(cands.size()); ++i) {
        chosen.push_back(cands[i]);
        pick(i + 1, k + 1);
        chosen.pop_back();
      }
    };
    pick(0, 0);
  };
  rec(0);
  return best;
}

}  // namespace busfreq::testing
