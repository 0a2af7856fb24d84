#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "busfreq/greedy.hpp"
#include "busfreq/index.hpp"
#include "busfreq/model.hpp"
#include "busfreq/partition.hpp"
#include "busfreq/util.hpp"

namespace busfreq {

// The geometrically decreasing threshold h = h0 / (1+eps)^k with eps = p/q.
// Gains are integers, so every comparison against h reduces to the exact
// integer ceil(h): an integer x satisfies x >= h iff x >= ceil(h). The ceil
// is tracked through an outward-rounded long-double interval; the rare step
// where the interval straddles an integer falls back to exact big-integer
// arithmetic, so comparisons never depend on floating-point luck.
class GeometricThreshold {
 public:
  GeometricThreshold(std::int64_t h0, const Rational& eps);

  std::int64_t ceil_value() const { return ceil_; }
  bool at_least_one() const { return ge_one_; }
  std::int64_t exponent() const { return k_; }
  std::int64_t initial() const { return h0_; }

  void advance();  // h <- h / (1 + eps)

  // Sign of (h0/(1+eps)^k - x), exact. Public for tests and the invariant
  // checks; not on the solver hot path.
  static int exact_compare(std::int64_t h0, const Rational& eps, std::int64_t k,
                           std::int64_t x);

 private:
  void refresh();

  std::int64_t h0_;
  std::int64_t q_;   // eps = p/q
  std::int64_t qp_;  // q + p
  std::int64_t k_ = 0;
  long double lo_, hi_;
  std::int64_t ceil_ = 0;
  bool ge_one_ = true;
};

// Observer invoked at every commit of the progressive sweep, with the raw
// threshold exponent in effect. Used by tests to verify the two-sided
// threshold bound; keep it cheap or null.
struct ProCommitEvent {
  BusIdx bus;
  std::int64_t gain;
  std::int64_t exponent;        // h = h0/(1+eps)^exponent at commit time
  std::int64_t threshold_ceil;  // effective integer threshold of the sweep
  bool fallback_fill;           // true for the zero-gain quota fill
};
using ProObserver = std::function<void(const IndexTopology&, const IndexState&,
                                       const ProCommitEvent&)>;

// Threshold greedy over a subset of routes: sort by standalone gain, sweep
// committing every bus whose live marginal gain clears the threshold, lower
// the threshold geometrically, and fill any leftover quota with the
// smallest-(route, depart) eligible buses once no positive gain remains.
std::vector<SelectionStep> pro_select(const IndexTopology& topo, IndexState& st,
                                      std::span<const RouteIdx> routes,
                                      std::span<const int> quotas, const Rational& eps,
                                      const ProObserver& observer = {});

// Per-cluster diagnostics of the partitioned solvers.
struct PartitionReport {
  ClusterSet partition;
  std::vector<std::int64_t> cluster_objective;  // local greedy objective per cluster
  double partition_ms = 0;
};

Frequency pro_greedy_solve(const Instance& inst, int theta, const Rational& eps);
Frequency pro_greedy_solve(const Instance& inst, ServeIndex& idx, const Rational& eps);

Frequency part_greedy_solve(const Instance& inst, const BuiltIndex& built, const Rational& rho,
                            PartitionReport* report = nullptr, int threads = 1);
Frequency part_greedy_solve(const Instance& inst, int theta, const Rational& rho,
                            PartitionReport* report = nullptr, int threads = 1);

Frequency pro_part_greedy_solve(const Instance& inst, const BuiltIndex& built,
                                const Rational& rho, const Rational& eps,
                                PartitionReport* report = nullptr, int threads = 1);
Frequency pro_part_greedy_solve(const Instance& inst, int theta, const Rational& rho,
                                const Rational& eps, PartitionReport* report = nullptr,
                                int threads = 1);

}  // namespace busfreq
