#include "busfreq/greedy.hpp"

#include <algorithm>

namespace busfreq {

void require_feasible_quotas(const Instance& inst) {
  if (inst.quotas.size() != inst.routes.size()) {
    throw ValidationError("instance has no quota per route");
  }
  for (RouteIdx r = 0; r < inst.routes.size(); ++r) {
    if (inst.quotas[r] < 1) {
      throw ValidationError("route '" + inst.routes[r].id + "' quota must be >= 1");
    }
    if (static_cast<std::uint32_t>(inst.quotas[r]) > inst.candidate_count(r)) {
      throw InfeasibleError("route '" + inst.routes[r].id + "' quota " +
                            std::to_string(inst.quotas[r]) + " exceeds its " +
                            std::to_string(inst.candidate_count(r)) + " candidates");
    }
  }
}

std::vector<SelectionStep> greedy_select(const IndexTopology& topo, IndexState& st,
                                         std::span<const RouteIdx> routes,
                                         std::span<const int> quotas) {
  int wanted = 0;
  for (RouteIdx r : routes) wanted += quotas[r];

  std::vector<SelectionStep> picked;
  picked.reserve(wanted);
  std::vector<int> taken(quotas.size(), 0);

  for (int step = 0; step < wanted; ++step) {
    BusIdx best = 0;
    std::int64_t best_gain = -1;
    for (RouteIdx r : routes) {
      if (taken[r] >= quotas[r]) continue;
      for (BusIdx b = topo.route_begin[r]; b < topo.route_begin[r + 1]; ++b) {
        if (st.bus_state[b] != static_cast<std::uint8_t>(BusState::Eligible)) continue;
        ++st.gain_evals;
        const std::int64_t gain = st.n_to_be_served[b];
        if (gain > best_gain) {
          best_gain = gain;
          best = b;
        }
      }
    }
    if (best_gain < 0) {
      throw InfeasibleError("ran out of eligible candidates before quotas were met");
    }
    const RouteIdx r = topo.route_of(best);
    const std::int64_t gain = commit(topo, st, best);
    picked.push_back({best, gain});
    if (++taken[r] >= quotas[r]) remove_route(topo, st, r);
  }
  return picked;
}

Frequency to_frequency(const Instance& inst, std::vector<BusIdx> buses) {
  std::sort(buses.begin(), buses.end());
  Frequency f;
  f.buses.reserve(buses.size());
  for (BusIdx b : buses) f.buses.push_back(inst.candidates[b]);
  return f;
}

Frequency greedy_solve(const Instance& inst, int theta) {
  require_feasible_quotas(inst);
  ServeIndex idx = ServeIndex::build(inst, theta);
  return greedy_solve(inst, idx);
}

Frequency greedy_solve(const Instance& inst, ServeIndex& idx) {
  require_feasible_quotas(inst);
  idx.reset();
  std::vector<RouteIdx> routes(inst.routes.size());
  for (RouteIdx r = 0; r < inst.routes.size(); ++r) routes[r] = r;
  auto steps = greedy_select(idx.topology(), idx.mutable_state(), routes, inst.quotas);
  std::vector<BusIdx> buses;
  buses.reserve(steps.size());
  for (const auto& s : steps) buses.push_back(s.bus);
  return to_frequency(inst, std::move(buses));
}

}  // namespace busfreq
