#include "busfreq/baselines.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "busfreq/greedy.hpp"

namespace busfreq {

Frequency fix_interval(const Instance& inst, int window_start, int window_end) {
  if (window_end <= window_start) {
    throw ValidationError("fix_interval window must satisfy end > start");
  }
  if (window_start < 0 || window_end > kSecondsPerDay) {
    throw ValidationError("fix_interval window must lie within [0, 86400]");
  }
  if (inst.quotas.size() != inst.routes.size()) {
    throw ValidationError("instance has no quota per route");
  }
  Frequency f;
  for (RouteIdx r = 0; r < inst.routes.size(); ++r) {
    const int n = inst.quotas[r];
    const int interval = (window_end - window_start) / n;
    if (interval == 0) {
      throw InfeasibleError("route '" + inst.routes[r].id + "' quota " + std::to_string(n) +
                            " exceeds the window length " +
                            std::to_string(window_end - window_start) + "s");
    }
    for (int k = 0; k < n; ++k) {
      f.buses.push_back({r, window_start + k * interval});
    }
  }
  return f;
}

Frequency top_k(const Instance& inst, int theta) {
  return top_k(inst, IndexTopology::build(inst, theta));
}

Frequency top_k(const Instance& inst, const IndexTopology& topo) {
  require_feasible_quotas(inst);
  std::vector<BusIdx> chosen;
  std::vector<BusIdx> order;
  for (RouteIdx r = 0; r < inst.routes.size(); ++r) {
    order.clear();
    for (BusIdx b = topo.route_begin[r]; b < topo.route_begin[r + 1]; ++b) order.push_back(b);
    // Ascending id already means ascending depart within a route.
    std::stable_sort(order.begin(), order.end(), [&](BusIdx a, BusIdx b) {
      return topo.standalone(a) > topo.standalone(b);
    });
    chosen.insert(chosen.end(), order.begin(), order.begin() + inst.quotas[r]);
  }
  return to_frequency(inst, std::move(chosen));
}

namespace {

using Words = std::vector<std::uint64_t>;

std::int64_t popcount(const Words& w) {
  std::int64_t n = 0;
  for (std::uint64_t x : w) n += std::popcount(x);
  return n;
}

struct Enumerator {
  const Instance& inst;
  const IndexTopology& topo;
  std::size_t words;
  std::vector<Words> bus_bits;          // per candidate: its served passengers
  std::vector<std::int64_t> route_ub;   // route_ub[r] = best possible gain from routes >= r
  std::vector<Words> covered_at;        // DFS stack of coverage bitsets
  std::vector<BusIdx> current;
  std::vector<BusIdx> best_sel;
  std::int64_t best = -1;

  void run(RouteIdx r, std::int64_t covered_count) {
    if (r == inst.routes.size()) {
      if (covered_count > best) {
        best = covered_count;
        best_sel = current;
      }
      return;
    }
    if (covered_count + route_ub[r] <= best) return;  // cannot strictly improve

    const int n = inst.quotas[r];
    const BusIdx base = topo.route_begin[r];
    const int m = static_cast<int>(topo.route_begin[r + 1] - base);
    std::vector<int> comb(n);
    std::iota(comb.begin(), comb.end(), 0);
    const std::size_t mark = current.size();
    while (true) {
      Words& acc = covered_at[r + 1];
      acc = covered_at[r];
      current.resize(mark);
      for (int k = 0; k < n; ++k) {
        const BusIdx b = base + comb[k];
        current.push_back(b);
        const Words& bits = bus_bits[b];
        for (std::size_t w = 0; w < words; ++w) acc[w] |= bits[w];
      }
      run(r + 1, popcount(covered_at[r + 1]));

      // next combination in lexicographic order
      int k = n - 1;
      while (k >= 0 && comb[k] == m - n + k) --k;
      if (k < 0) break;
      ++comb[k];
      for (int j = k + 1; j < n; ++j) comb[j] = comb[j - 1] + 1;
    }
    current.resize(mark);
  }
};

}  // namespace

BruteForceResult brute_force_opt(const Instance& inst, int theta, std::uint64_t limit) {
  return brute_force_opt(inst, IndexTopology::build(inst, theta), limit);
}

BruteForceResult brute_force_opt(const Instance& inst, const IndexTopology& topo,
                                 std::uint64_t limit) {
  require_feasible_quotas(inst);

  // Combination count, saturating just past the limit.
  std::uint64_t combos = 1;
  for (RouteIdx r = 0; r < inst.routes.size(); ++r) {
    const std::uint64_t m = inst.candidate_count(r);
    const std::uint64_t n = inst.quotas[r];
    std::uint64_t c = 1;
    for (std::uint64_t k = 0; k < n; ++k) {
      c = c * (m - k) / (k + 1);
      if (c > limit) break;
    }
    if (combos > limit / std::max<std::uint64_t>(c, 1)) {
      combos = limit + 1;
      break;
    }
    combos *= c;
    if (combos > limit) break;
  }
  if (combos > limit) {
    throw InfeasibleError("brute force refused: combination count exceeds limit " +
                          std::to_string(limit));
  }
  Enumerator en{inst, topo, (inst.passengers.size() + 63) / 64, {}, {}, {}, {}, {}, -1};
  en.bus_bits.assign(topo.bus_count, Words(en.words, 0));
  for (BusIdx b = 0; b < topo.bus_count; ++b) {
    for (PassengerIdx p : topo.served_list(b)) {
      en.bus_bits[b][p / 64] |= std::uint64_t{1} << (p % 64);
    }
  }

  // Static upper bound per route: the n_i largest standalone counts. Sound
  // (gains only shrink under overlap), so pruning never changes the optimum.
  en.route_ub.assign(inst.routes.size() + 1, 0);
  for (RouteIdx r = inst.routes.size(); r-- > 0;) {
    std::vector<std::int64_t> counts;
    for (BusIdx b = topo.route_begin[r]; b < topo.route_begin[r + 1]; ++b) {
      counts.push_back(topo.standalone(b));
    }
    std::sort(counts.rbegin(), counts.rend());
    std::int64_t top = 0;
    for (int k = 0; k < inst.quotas[r]; ++k) top += counts[k];
    en.route_ub[r] = en.route_ub[r + 1] + top;
  }

  en.covered_at.assign(inst.routes.size() + 1, Words(en.words, 0));
  en.run(0, 0);

  BruteForceResult res;
  res.opt = en.best;
  res.combinations = combos;
  res.best = to_frequency(inst, std::move(en.best_sel));
  return res;
}

}  // namespace busfreq
