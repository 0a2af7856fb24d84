#pragma once

#include <span>
#include <vector>

#include "busfreq/index.hpp"
#include "busfreq/model.hpp"

namespace busfreq {

// One selection step of the index-based greedy: chosen bus and its gain at
// commit time, in selection order.
struct SelectionStep {
  BusIdx bus;
  std::int64_t gain;
};

// Index-based greedy over a subset of routes. Each iteration scans the
// eligible candidates of `routes` for the largest marginal gain (ties go to
// the smallest dense id, i.e. smallest (route_id, depart)), commits it, and
// removes the route once its quota is met. Selects exactly sum of quotas
// buses, even when every remaining gain is zero.
std::vector<SelectionStep> greedy_select(const IndexTopology& topo, IndexState& st,
                                         std::span<const RouteIdx> routes,
                                         std::span<const int> quotas);

// Whole-instance greedy. Validates quota feasibility (error names the
// deficient route), builds the index, and returns the chosen frequency.
Frequency greedy_solve(const Instance& inst, int theta);

// Same, over a caller-built index (state is reset first).
Frequency greedy_solve(const Instance& inst, ServeIndex& idx);

// Maps dense bus ids back to (route, depart) pairs, sorted by id.
Frequency to_frequency(const Instance& inst, std::vector<BusIdx> buses);

void require_feasible_quotas(const Instance& inst);

}  // namespace busfreq
