#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "busfreq/index.hpp"
#include "busfreq/model.hpp"
#include "busfreq/util.hpp"

namespace busfreq {

// One cluster of the route partition. `routes` is kept sorted; the cluster's
// buses are implicitly all candidates of its routes. `pool` is the time-free
// passenger pool Serve(P, routes), sorted. `g_bar` is the greedy lower-bound
// estimate the overlap ratio is normalized by.
struct Cluster {
  std::vector<RouteIdx> routes;
  std::vector<PassengerIdx> pool;
  std::int64_t g_bar = 0;
  Rational rho;

  RouteIdx min_route() const { return routes.front(); }
};

struct ClusterSet {
  std::vector<Cluster> clusters;
  Rational rho_threshold;
  Rational rho_max;  // max stored ratio at exit; feeds the (1-rho) bound checks
};

// Passengers whose OD pair lies in order on some route of `routes`,
// ignoring time. Sorted ascending.
std::vector<PassengerIdx> passenger_pool(const Instance& inst, const OdCoverage& cov,
                                         std::span<const RouteIdx> routes);
std::vector<PassengerIdx> passenger_pool(const Instance& inst,
                                         std::span<const RouteIdx> routes);

// |union over j != i of (S_i intersect S_j)| / g_bar_i, and 0 when the
// denominator is 0 or there is no other cluster.
Rational overlap_ratio(const std::vector<Cluster>& clusters, std::size_t i);

// Overlap-ratio-guided agglomeration: start from one singleton cluster per
// route (g_bar = greedy objective with quota n_min each), repeatedly merge
// the largest-ratio cluster with the cluster sharing the most pool until
// every stored ratio is <= rho. Ties: smallest min route id.
ClusterSet bus_route_partitioning(const Instance& inst, const IndexTopology& topo,
                                  const OdCoverage& cov, int n_min, const Rational& rho,
                                  int threads = 1);

// Convenience overload that builds the index and coverage itself.
ClusterSet bus_route_partitioning(const Instance& inst, int theta, int n_min,
                                  const Rational& rho, int threads = 1);

std::size_t intersection_size(std::span<const PassengerIdx> a, std::span<const PassengerIdx> b);

}  // namespace busfreq
