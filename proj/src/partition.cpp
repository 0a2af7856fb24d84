#include "busfreq/partition.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>

#include "busfreq/greedy.hpp"

namespace busfreq {

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  const int count = std::min<int>(threads, static_cast<int>(n));
  for (int t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<PassengerIdx> passenger_pool(const Instance& inst, const OdCoverage& cov,
                                         std::span<const RouteIdx> routes) {
  std::vector<std::uint8_t> wanted(inst.routes.size(), 0);
  for (RouteIdx r : routes) wanted[r] = 1;
  std::vector<PassengerIdx> pool;
  for (PassengerIdx p = 0; p < inst.passengers.size(); ++p) {
    for (RouteIdx r : cov.routes_of(p)) {
      if (wanted[r]) {
        pool.push_back(p);
        break;
      }
    }
  }
  return pool;
}

std::vector<PassengerIdx> passenger_pool(const Instance& inst,
                                         std::span<const RouteIdx> routes) {
  return passenger_pool(inst, build_od_coverage(inst), routes);
}

std::size_t intersection_size(std::span<const PassengerIdx> a, std::span<const PassengerIdx> b) {
  std::size_t n = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++n;
      ++ia;
      ++ib;
    }
  }
  return n;
}

Rational overlap_ratio(const std::vector<Cluster>& clusters, std::size_t i) {
  if (clusters.size() <= 1 || clusters[i].g_bar == 0) return Rational::zero();
  // union over j != i of (S_i ∩ S_j) == S_i ∩ (union of the other pools),
  // so intersections overlapping across j are not double counted.
  std::vector<PassengerIdx> others;
  for (std::size_t j = 0; j < clusters.size(); ++j) {
    if (j == i) continue;
    others.insert(others.end(), clusters[j].pool.begin(), clusters[j].pool.end());
  }
  std::sort(others.begin(), others.end());
  others.erase(std::unique(others.begin(), others.end()), others.end());
  const std::size_t shared = intersection_size(clusters[i].pool, others);
  return Rational(static_cast<std::int64_t>(shared), clusters[i].g_bar);
}

ClusterSet bus_route_partitioning(const Instance& inst, int theta, int n_min,
                                  const Rational& rho, int threads) {
  const OdCoverage cov = build_od_coverage(inst);
  const IndexTopology topo = IndexTopology::build(inst, theta, cov);
  return bus_route_partitioning(inst, topo, cov, n_min, rho, threads);
}

ClusterSet bus_route_partitioning(const Instance& inst, const IndexTopology& topo,
                                  const OdCoverage& cov, int n_min, const Rational& rho,
                                  int threads) {
  if (rho.num <= 0 || rho > Rational(1, 1)) {
    throw ValidationError("partition threshold rho must lie in (0, 1]");
  }
  if (n_min < 1) throw ValidationError("n_min must be >= 1");

  const std::size_t m0 = inst.routes.size();
  std::vector<Cluster> clusters(m0);
  std::vector<std::uint8_t> alive(m0, 1);
  std::size_t alive_count = m0;

  // Singleton pools come straight from the OD coverage lists, already sorted
  // by passenger id because of the bucketing order.
  for (PassengerIdx p = 0; p < inst.passengers.size(); ++p) {
    for (RouteIdx r : cov.routes_of(p)) clusters[r].pool.push_back(p);
  }

  // cnt[p] = number of live clusters whose pool contains p. A passenger is a
  // shared member of a pool exactly when cnt >= 2, which keeps every stored
  // ratio's numerator exact as other clusters merge.
  std::vector<std::uint32_t> cnt(inst.passengers.size(), 0);
  for (PassengerIdx p = 0; p < inst.passengers.size(); ++p) {
    cnt[p] = static_cast<std::uint32_t>(cov.degree(p));
  }

  const std::vector<int> nmin_quotas(inst.routes.size(), n_min);
  parallel_for(m0, threads, [&](std::size_t r) {
    clusters[r].routes = {static_cast<RouteIdx>(r)};
    IndexState st;
    st.reset(topo);
    const RouteIdx rr[1] = {static_cast<RouteIdx>(r)};
    std::int64_t g = 0;
    for (const auto& step : greedy_select(topo, st, rr, nmin_quotas)) g += step.gain;
    clusters[r].g_bar = g;
  });

  auto stored_rho = [&](const Cluster& c) -> Rational {
    if (alive_count <= 1 || c.g_bar == 0) return Rational::zero();
    std::int64_t shared = 0;
    for (PassengerIdx p : c.pool) {
      if (cnt[p] >= 2) ++shared;
    }
    return Rational(shared, c.g_bar);
  };

  for (std::size_t i = 0; i < m0; ++i) clusters[i].rho = stored_rho(clusters[i]);

  auto argmax_rho = [&]() -> std::size_t {
    std::size_t best = m0;
    for (std::size_t i = 0; i < m0; ++i) {
      if (!alive[i]) continue;
      if (best == m0 || clusters[i].rho > clusters[best].rho ||
          (clusters[i].rho == clusters[best].rho &&
           clusters[i].min_route() < clusters[best].min_route())) {
        best = i;
      }
    }
    return best;
  };

  std::size_t k = argmax_rho();
  while (k != m0 && clusters[k].rho > rho) {
    // merge partner: largest common pool, tie -> smallest min route id
    std::size_t j_best = m0;
    std::size_t j_inter = 0;
    for (std::size_t j = 0; j < m0; ++j) {
      if (!alive[j] || j == k) continue;
      const std::size_t inter = intersection_size(clusters[k].pool, clusters[j].pool);
      if (j_best == m0 || inter > j_inter ||
          (inter == j_inter && clusters[j].min_route() < clusters[j_best].min_route())) {
        j_best = j;
        j_inter = inter;
      }
    }
    Cluster& ck = clusters[k];
    Cluster& cj = clusters[j_best];

    ck.g_bar = std::max({ck.g_bar + cj.g_bar - static_cast<std::int64_t>(j_inter),
                         ck.g_bar, cj.g_bar});

    // members of both pools now belong to one fewer live cluster
    {
      auto ia = ck.pool.begin();
      auto ib = cj.pool.begin();
      while (ia != ck.pool.end() && ib != cj.pool.end()) {
        if (*ia < *ib) {
          ++ia;
        } else if (*ib < *ia) {
          ++ib;
        } else {
          --cnt[*ia];
          ++ia;
          ++ib;
        }
      }
    }
    std::vector<PassengerIdx> merged;
    merged.reserve(ck.pool.size() + cj.pool.size());
    std::merge(ck.pool.begin(), ck.pool.end(), cj.pool.begin(), cj.pool.end(),
               std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    ck.pool = std::move(merged);

    std::vector<RouteIdx> routes;
    routes.reserve(ck.routes.size() + cj.routes.size());
    std::merge(ck.routes.begin(), ck.routes.end(), cj.routes.begin(), cj.routes.end(),
               std::back_inserter(routes));
    ck.routes = std::move(routes);

    alive[j_best] = 0;
    cj = Cluster{};
    --alive_count;

    ck.rho = stored_rho(ck);
    k = argmax_rho();
  }

  ClusterSet out;
  out.rho_threshold = rho;
  out.rho_max = Rational::zero();
  for (std::size_t i = 0; i < m0; ++i) {
    if (!alive[i]) continue;
    if (clusters[i].rho > out.rho_max) out.rho_max = clusters[i].rho;
    out.clusters.push_back(std::move(clusters[i]));
  }
  return out;
}

}  // namespace busfreq
