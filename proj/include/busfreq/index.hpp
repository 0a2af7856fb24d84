#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "busfreq/model.hpp"

namespace busfreq {

// Immutable serve adjacency: per bus the passengers it can serve (forward
// lists) and per passenger the buses that can serve it (inverted lists),
// flattened into offset/value arrays over dense ids.
struct IndexTopology {
  std::uint32_t bus_count = 0;
  std::uint32_t passenger_count = 0;

  std::vector<std::uint32_t> fwd_offsets;  // size bus_count+1
  std::vector<PassengerIdx> fwd;           // forward lists, ascending passenger id

  std::vector<std::uint32_t> inv_offsets;  // size passenger_count+1
  std::vector<BusIdx> inv;                 // optional buses, ascending bus id

  std::vector<std::uint32_t> route_begin;  // copy of the instance candidate ranges

  std::span<const PassengerIdx> served_list(BusIdx b) const {
    return {fwd.data() + fwd_offsets[b], fwd.data() + fwd_offsets[b + 1]};
  }
  std::span<const BusIdx> optional_buses(PassengerIdx p) const {
    return {inv.data() + inv_offsets[p], inv.data() + inv_offsets[p + 1]};
  }
  std::uint32_t standalone(BusIdx b) const { return fwd_offsets[b + 1] - fwd_offsets[b]; }

  RouteIdx route_of(BusIdx b) const {
    auto it = std::upper_bound(route_begin.begin(), route_begin.end(), b);
    return static_cast<RouteIdx>(it - route_begin.begin()) - 1;
  }

  static IndexTopology build(const Instance& inst, int theta);
  static IndexTopology build(const Instance& inst, int theta, const OdCoverage& cov);

  // Binary snapshot: magic "FSIX1", little-endian u32 counts, then the
  // forward and inverted adjacency arrays.
  void save(const std::string& path) const;
  static IndexTopology load(const std::string& path, const Instance& inst);
};

// Coverage + topology bundle, built once per (instance, theta) and shared by
// every solver so solve timings exclude the preprocessing cost.
struct BuiltIndex {
  OdCoverage cov;
  IndexTopology topo;

  static BuiltIndex build(const Instance& inst, int theta) {
    BuiltIndex bi;
    bi.cov = build_od_coverage(inst);
    bi.topo = IndexTopology::build(inst, theta, bi.cov);
    return bi;
  }
};

enum class BusState : std::uint8_t { Eligible = 0, Committed = 1, Removed = 2 };

// Mutable selection state over a topology. Solvers own one per run so
// cluster-local searches can proceed independently over the shared adjacency.
struct IndexState {
  std::vector<std::uint32_t> n_to_be_served;  // per bus: unserved members of its list
  std::vector<std::uint8_t> bus_state;        // BusState per bus
  std::vector<std::uint8_t> is_served;        // per passenger
  std::int64_t total_served = 0;
  std::uint64_t gain_evals = 0;

  void reset(const IndexTopology& topo);
};

// Current marginal gain of an eligible bus; equals the objective increase of
// committing it now. Throws ContractViolation for committed/removed buses.
// Pure read: safe for concurrent readers between commits.
std::int64_t marginal_gain(const IndexTopology& topo, const IndexState& st, BusIdx b);

// Commits a bus: flips its unserved passengers and fans the decrement out to
// every other bus that could serve them. Returns the number of flips.
std::int64_t commit(const IndexTopology& topo, IndexState& st, BusIdx b);

// Makes every uncommitted candidate of the route ineligible. Gains of other
// buses are untouched.
void remove_route(const IndexTopology& topo, IndexState& st, RouteIdx r);

// The spec-facing index object: one topology plus its own state.
class ServeIndex {
 public:
  static ServeIndex build(const Instance& inst, int theta) {
    ServeIndex idx;
    idx.topo_ = IndexTopology::build(inst, theta);
    idx.state_.reset(idx.topo_);
    return idx;
  }
  static ServeIndex from_topology(IndexTopology topo) {
    ServeIndex idx;
    idx.topo_ = std::move(topo);
    idx.state_.reset(idx.topo_);
    return idx;
  }

  const IndexTopology& topology() const { return topo_; }
  const IndexState& state() const { return state_; }
  IndexState& mutable_state() { return state_; }

  std::int64_t marginal_gain(BusIdx b) const { return busfreq::marginal_gain(topo_, state_, b); }
  std::int64_t commit(BusIdx b) { return busfreq::commit(topo_, state_, b); }
  void remove_route(RouteIdx r) { busfreq::remove_route(topo_, state_, r); }
  bool is_served(PassengerIdx p) const { return state_.is_served[p] != 0; }
  BusState state_of(BusIdx b) const { return static_cast<BusState>(state_.bus_state[b]); }
  void reset() { state_.reset(topo_); }

 private:
  IndexTopology topo_;
  IndexState state_;
};

}  // namespace busfreq
