#include "busfreq/propart.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include <boost/multiprecision/cpp_int.hpp>

#include "busfreq/greedy.hpp"

namespace busfreq {

namespace {

using BigInt = boost::multiprecision::cpp_int;

BigInt big_pow(std::int64_t base, std::int64_t exp) {
  BigInt r = 1;
  BigInt b = base;
  while (exp > 0) {
    if (exp & 1) r *= b;
    b *= b;
    exp >>= 1;
  }
  return r;
}

long double next_down(long double x) {
  return std::nextafterl(x, -std::numeric_limits<long double>::infinity());
}
long double next_up(long double x) {
  return std::nextafterl(x, std::numeric_limits<long double>::infinity());
}

}  // namespace

GeometricThreshold::GeometricThreshold(std::int64_t h0, const Rational& eps) : h0_(h0) {
  if (eps.num <= 0 || eps >= Rational(1, 1)) {
    throw ValidationError("epsilon must lie in (0, 1)");
  }
  q_ = eps.den;
  qp_ = eps.den + eps.num;
  lo_ = hi_ = static_cast<long double>(h0);
  refresh();
}

int GeometricThreshold::exact_compare(std::int64_t h0, const Rational& eps, std::int64_t k,
                                      std::int64_t x) {
  // sign of h0 * q^k - x * (q+p)^k
  const BigInt lhs = BigInt(h0) * big_pow(eps.den, k);
  const BigInt rhs = BigInt(x) * big_pow(eps.den + eps.num, k);
  if (lhs < rhs) return -1;
  if (lhs > rhs) return 1;
  return 0;
}

void GeometricThreshold::advance() {
  ++k_;
  lo_ = next_down(next_down(lo_ * static_cast<long double>(q_)) /
                  static_cast<long double>(qp_));
  hi_ = next_up(next_up(hi_ * static_cast<long double>(q_)) /
                static_cast<long double>(qp_));
  refresh();
}

void GeometricThreshold::refresh() {
  if (h0_ <= 0) {
    ceil_ = 0;
    ge_one_ = false;
    return;
  }
  const long double cl = std::ceil(lo_);
  const long double ch = std::ceil(hi_);
  if (cl == ch && lo_ > 0) {
    ceil_ = static_cast<std::int64_t>(cl);
  } else {
    // Interval straddles an integer boundary: decide exactly.
    std::int64_t candidate = std::max<std::int64_t>(static_cast<std::int64_t>(cl), 1);
    // ceil(h) is the smallest integer c with h <= c.
    while (exact_compare(h0_, Rational(qp_ - q_, q_), k_, candidate) > 0) ++candidate;
    while (candidate > 1 && exact_compare(h0_, Rational(qp_ - q_, q_), k_, candidate - 1) <= 0) {
      --candidate;
    }
    ceil_ = candidate;
  }
  if (lo_ >= 1.0L) {
    ge_one_ = true;
  } else if (hi_ < 1.0L) {
    ge_one_ = false;
  } else {
    ge_one_ = exact_compare(h0_, Rational(qp_ - q_, q_), k_, 1) >= 0;
  }
}

std::vector<SelectionStep> pro_select(const IndexTopology& topo, IndexState& st,
                                      std::span<const RouteIdx> routes,
                                      std::span<const int> quotas, const Rational& eps,
                                      const ProObserver& observer) {
  int wanted = 0;
  for (RouteIdx r : routes) wanted += quotas[r];
  std::vector<SelectionStep> picked;
  picked.reserve(wanted);
  std::vector<int> taken(quotas.size(), 0);

  // Sort by descending standalone gain; ascending dense id breaks ties, so
  // equal-gain buses keep the (route_id, depart) order.
  std::vector<BusIdx> order;
  for (RouteIdx r : routes) {
    for (BusIdx b = topo.route_begin[r]; b < topo.route_begin[r + 1]; ++b) order.push_back(b);
  }
  std::stable_sort(order.begin(), order.end(), [&](BusIdx a, BusIdx b) {
    return topo.standalone(a) > topo.standalone(b);
  });

  std::int64_t h0 = 0;
  if (!order.empty()) h0 = topo.standalone(order.front());

  auto commit_bus = [&](BusIdx b, std::int64_t exponent, std::int64_t ceil_h, bool fill) {
    const std::int64_t gain = commit(topo, st, b);
    picked.push_back({b, gain});
    const RouteIdx r = topo.route_of(b);
    if (++taken[r] >= quotas[r]) remove_route(topo, st, r);
    if (observer) observer(topo, st, {b, gain, exponent, ceil_h, fill});
  };

  // One sweep at integer threshold c: commit every bus whose live marginal
  // gain reaches c, stopping early once standalone gains (upper bounds on the
  // marginals) drop below c.
  auto sweep = [&](std::int64_t c, std::int64_t exponent) {
    for (BusIdx b : order) {
      if (static_cast<int>(picked.size()) >= wanted) break;
      if (static_cast<std::int64_t>(topo.standalone(b)) < c) break;
      if (st.bus_state[b] != static_cast<std::uint8_t>(BusState::Eligible)) continue;
      ++st.gain_evals;
      if (static_cast<std::int64_t>(st.n_to_be_served[b]) >= c) {
        commit_bus(b, exponent, c, false);
      }
    }
  };

  if (h0 > 0) {
    GeometricThreshold h(h0, eps);
    std::int64_t last_swept = -1;
    while (static_cast<int>(picked.size()) < wanted && h.at_least_one()) {
      // Sweeps whose effective integer threshold already ran are no-ops
      // (gains are integral and only decrease), so only distinct ceils scan.
      if (h.ceil_value() != last_swept) {
        last_swept = h.ceil_value();
        sweep(h.ceil_value(), h.exponent());
      }
      h.advance();
    }
    // The raw loop can step from above 1 to below 1 without an effective
    // threshold-1 sweep; all sub-1 thresholds admit exactly the gains >= 1.
    if (static_cast<int>(picked.size()) < wanted && last_swept != 1) {
      sweep(1, h.exponent());
    }
  }

  // Every remaining eligible gain is zero: fill quotas in (route, depart)
  // order, which ascending dense id provides.
  if (static_cast<int>(picked.size()) < wanted) {
    for (RouteIdx r : routes) {
      while (taken[r] < quotas[r]) {
        bool progressed = false;
        for (BusIdx b = topo.route_begin[r]; b < topo.route_begin[r + 1]; ++b) {
          if (st.bus_state[b] != static_cast<std::uint8_t>(BusState::Eligible)) continue;
          commit_bus(b, 0, 0, true);
          progressed = true;
          break;
        }
        if (!progressed) {
          throw InfeasibleError("ran out of eligible candidates before quotas were met");
        }
      }
    }
  }
  return picked;
}

Frequency pro_greedy_solve(const Instance& inst, int theta, const Rational& eps) {
  require_feasible_quotas(inst);
  ServeIndex idx = ServeIndex::build(inst, theta);
  return pro_greedy_solve(inst, idx, eps);
}

Frequency pro_greedy_solve(const Instance& inst, ServeIndex& idx, const Rational& eps) {
  require_feasible_quotas(inst);
  idx.reset();
  std::vector<RouteIdx> routes(inst.routes.size());
  for (RouteIdx r = 0; r < inst.routes.size(); ++r) routes[r] = r;
  auto steps = pro_select(idx.topology(), idx.mutable_state(), routes, inst.quotas, eps);
  std::vector<BusIdx> buses;
  for (const auto& s : steps) buses.push_back(s.bus);
  return to_frequency(inst, std::move(buses));
}

namespace {

using ClusterSelect = std::function<std::vector<SelectionStep>(
    const IndexTopology&, IndexState&, std::span<const RouteIdx>, std::span<const int>)>;

Frequency partitioned_solve(const Instance& inst, const BuiltIndex& built, const Rational& rho,
                            PartitionReport* report, int threads,
                            const ClusterSelect& local) {
  require_feasible_quotas(inst);

  int n_min = inst.quotas.empty() ? 1 : inst.quotas.front();
  for (int q : inst.quotas) n_min = std::min(n_min, q);

  const IndexTopology& topo = built.topo;
  const auto t0 = std::chrono::steady_clock::now();
  ClusterSet cs = bus_route_partitioning(inst, topo, built.cov, n_min, rho, threads);
  const auto t1 = std::chrono::steady_clock::now();

  const std::size_t m = cs.clusters.size();
  std::vector<std::vector<SelectionStep>> steps(m);
  std::vector<std::thread> workers;
  std::atomic<std::size_t> cursor{0};
  auto run = [&] {
    for (std::size_t i = cursor.fetch_add(1); i < m; i = cursor.fetch_add(1)) {
      IndexState st;
      st.reset(topo);
      steps[i] = local(topo, st, cs.clusters[i].routes, inst.quotas);
    }
  };
  const int count = std::max(1, std::min<int>(threads, static_cast<int>(m)));
  for (int t = 1; t < count; ++t) workers.emplace_back(run);
  run();
  for (auto& th : workers) th.join();

  std::vector<BusIdx> buses;
  std::vector<std::int64_t> local_obj(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (const auto& s : steps[i]) {
      buses.push_back(s.bus);
      local_obj[i] += s.gain;
    }
  }
  if (report) {
    report->partition = std::move(cs);
    report->cluster_objective = std::move(local_obj);
    report->partition_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
  }
  return to_frequency(inst, std::move(buses));
}

}  // namespace

Frequency part_greedy_solve(const Instance& inst, const BuiltIndex& built, const Rational& rho,
                            PartitionReport* report, int threads) {
  return partitioned_solve(inst, built, rho, report, threads,
                           [](const IndexTopology& topo, IndexState& st,
                              std::span<const RouteIdx> routes, std::span<const int> quotas) {
                             return greedy_select(topo, st, routes, quotas);
                           });
}

Frequency part_greedy_solve(const Instance& inst, int theta, const Rational& rho,
                            PartitionReport* report, int threads) {
  return part_greedy_solve(inst, BuiltIndex::build(inst, theta), rho, report, threads);
}

Frequency pro_part_greedy_solve(const Instance& inst, const BuiltIndex& built,
                                const Rational& rho, const Rational& eps,
                                PartitionReport* report, int threads) {
  return partitioned_solve(inst, built, rho, report, threads,
                           [&eps](const IndexTopology& topo, IndexState& st,
                                  std::span<const RouteIdx> routes,
                                  std::span<const int> quotas) {
                             return pro_select(topo, st, routes, quotas, eps);
                           });
}

Frequency pro_part_greedy_solve(const Instance& inst, int theta, const Rational& rho,
                                const Rational& eps, PartitionReport* report, int threads) {
  return pro_part_greedy_solve(inst, BuiltIndex::build(inst, theta), rho, eps, report, threads);
}

}  // namespace busfreq
