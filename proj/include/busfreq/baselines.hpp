#pragma once

#include <cstdint>
#include <vector>

#include "busfreq/index.hpp"
#include "busfreq/model.hpp"

namespace busfreq {

// Evenly spaced departures: per route, interval = floor(window / n_i) and
// departures at start, start+interval, ... The output is synthesized from the
// window, not drawn from the candidate set.
Frequency fix_interval(const Instance& inst, int window_start, int window_end);

// Per route independently, the n_i candidates with the largest standalone
// served counts (ties go to the earlier departure).
Frequency top_k(const Instance& inst, int theta);
Frequency top_k(const Instance& inst, const IndexTopology& topo);

struct BruteForceResult {
  Frequency best;
  std::int64_t opt = 0;
  std::uint64_t combinations = 0;  // full enumeration size
};

// Exhaustive optimum over all quota-respecting selections. Deterministic:
// among maxima it returns the lexicographically smallest (by dense bus ids).
// Refuses instances whose combination count exceeds `limit`.
BruteForceResult brute_force_opt(const Instance& inst, int theta,
                                 std::uint64_t limit = 2'000'000);
BruteForceResult brute_force_opt(const Instance& inst, const IndexTopology& topo,
                                 std::uint64_t limit = 2'000'000);

}  // namespace busfreq
