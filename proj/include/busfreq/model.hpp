#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "busfreq/util.hpp"

namespace busfreq {

constexpr int kSecondsPerDay = 86400;

using StopIdx = std::uint32_t;
using RouteIdx = std::uint32_t;
using BusIdx = std::uint32_t;
using PassengerIdx = std::uint32_t;

// An ordered stop sequence with cumulative travel times from the first stop.
// cum_time[0] == 0 and cum_time is non-decreasing; stops never repeat within
// one route.
struct Route {
  std::string id;
  std::vector<StopIdx> stops;
  std::vector<int> cum_time;
  std::unordered_map<StopIdx, std::uint32_t> stop_pos;  // stop -> position on route

  // Position of `stop` on this route, or -1 if the route does not visit it.
  int position_of(StopIdx stop) const {
    auto it = stop_pos.find(stop);
    return it == stop_pos.end() ? -1 : static_cast<int>(it->second);
  }
};

// One trip demand: board/alight stops plus the second-of-day the passenger
// reaches the boarding stop.
struct Passenger {
  StopIdx board = 0;
  StopIdx alight = 0;
  int arrival = 0;
};

// One potential departure: a route and a departure time from its first stop.
struct BusCandidate {
  RouteIdx route = 0;
  int depart = 0;

  friend bool operator==(const BusCandidate&, const BusCandidate&) = default;
};

// A chosen set of departures. Solvers return exactly quota[i] buses per route;
// baselines like the fixed-interval scheduler may synthesize departures that
// are not members of the candidate set, which is fine for evaluation.
struct Frequency {
  std::vector<BusCandidate> buses;

  std::size_t size() const { return buses.size(); }
};

// A fully resolved problem instance. Routes are sorted by id and candidates
// by (route, depart), so ascending dense index order is the deterministic
// tie-break order used throughout the solvers.
struct Instance {
  std::vector<std::string> stop_names;
  std::unordered_map<std::string, StopIdx> stop_index;

  std::vector<Route> routes;
  std::unordered_map<std::string, RouteIdx> route_index;

  std::vector<Passenger> passengers;

  std::vector<BusCandidate> candidates;
  std::vector<std::uint32_t> route_cand_begin;  // size routes+1; candidates of route r
                                                // live in [begin[r], begin[r+1])

  std::vector<int> quotas;  // per route; empty until a quotas file is loaded

  std::span<const BusCandidate> candidates_of(RouteIdx r) const {
    return {candidates.data() + route_cand_begin[r],
            candidates.data() + route_cand_begin[r + 1]};
  }
  std::uint32_t candidate_count(RouteIdx r) const {
    return route_cand_begin[r + 1] - route_cand_begin[r];
  }
  int total_quota() const;

  // Rebuilds stop position maps and the per-route candidate ranges; call
  // after mutating routes/candidates directly (the loader does this).
  void finalize();
};

// Checks every structural invariant (route shapes, passenger ranges,
// candidate uniqueness, quota feasibility). Throws ValidationError or
// InfeasibleError with the offending entity named.
void validate_instance(const Instance& inst);

// 1 iff `bus` can serve `p`: the bus's route visits p.board strictly before
// p.alight, and the wait depart + T(s1, board) - arrival lies in [0, theta].
int serve_indicator(const Instance& inst, const BusCandidate& bus, const Passenger& p,
                    int theta);

// 1 iff any bus of F serves p.
int coverage(const Instance& inst, const Frequency& f, const Passenger& p, int theta);

// Total passengers served by F. Duplicated passenger tuples each count.
// This is the from-scratch ground truth the index and all solvers are
// checked against; it deliberately stays a plain double loop.
std::int64_t objective(const Instance& inst, const Frequency& f, int theta);

// Per-route selection counts of F.
std::vector<int> route_counts(const Instance& inst, const Frequency& f);

// Throws unless F picks exactly quota[r] departures for every route.
void validate_exact_quotas(const Instance& inst, const Frequency& f);

// Time-free route coverage: for every passenger, the routes that list its
// board stop strictly before its alight stop, with the boarding travel
// offset T(s1, board). Shared by the index build, passenger pools and the
// unservable statistic.
struct OdCoverage {
  std::vector<std::uint32_t> offsets;  // size |P|+1
  std::vector<RouteIdx> route;         // flattened route lists
  std::vector<int> board_time;         // parallel to `route`

  std::span<const RouteIdx> routes_of(PassengerIdx p) const {
    return {route.data() + offsets[p], route.data() + offsets[p + 1]};
  }
  std::size_t degree(PassengerIdx p) const { return offsets[p + 1] - offsets[p]; }
};

OdCoverage build_od_coverage(const Instance& inst);

// Passengers whose OD pair lies on no route; they contribute 0 to every
// objective and are surfaced as a statistic, never an error.
std::size_t unservable_count(const OdCoverage& cov);

// Same value as objective(), evaluated through per-route departure lookups
// instead of the full double loop. Tests hold the two equal.
std::int64_t objective_fast(const Instance& inst, const OdCoverage& cov, const Frequency& f,
                            int theta);

}  // namespace busfreq
