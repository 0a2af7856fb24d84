#include "busfreq/index.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

namespace busfreq {

IndexTopology IndexTopology::build(const Instance& inst, int theta) {
  return build(inst, theta, build_od_coverage(inst));
}

IndexTopology IndexTopology::build(const Instance& inst, int theta, const OdCoverage& cov) {
  IndexTopology topo;
  topo.bus_count = static_cast<std::uint32_t>(inst.candidates.size());
  topo.passenger_count = static_cast<std::uint32_t>(inst.passengers.size());
  topo.route_begin = inst.route_cand_begin;

  // A bus (r, d) serves p iff d lies in [arrival - t_board, arrival - t_board
  // + theta]; candidates per route are sorted by depart, so each (p, route)
  // pair maps to one contiguous candidate range found by binary search.
  auto range_of = [&](PassengerIdx p, std::uint32_t k) -> std::pair<BusIdx, BusIdx> {
    const RouteIdx r = cov.route[k];
    const std::int64_t lo_depart =
        static_cast<std::int64_t>(inst.passengers[p].arrival) - cov.board_time[k];
    const std::int64_t hi_depart = lo_depart + theta;
    const BusCandidate* first = inst.candidates.data() + inst.route_cand_begin[r];
    const BusCandidate* last = inst.candidates.data() + inst.route_cand_begin[r + 1];
    const BusCandidate* lo = std::lower_bound(
        first, last, lo_depart,
        [](const BusCandidate& c, std::int64_t t) { return c.depart < t; });
    const BusCandidate* hi = std::upper_bound(
        lo, last, hi_depart,
        [](std::int64_t t, const BusCandidate& c) { return t < c.depart; });
    const auto base = static_cast<BusIdx>(first - inst.candidates.data());
    return {base + static_cast<BusIdx>(lo - first), base + static_cast<BusIdx>(hi - first)};
  };

  topo.inv_offsets.assign(topo.passenger_count + 1, 0);
  std::vector<std::uint32_t> fwd_counts(topo.bus_count, 0);
  for (PassengerIdx p = 0; p < topo.passenger_count; ++p) {
    std::uint32_t deg = 0;
    for (std::uint32_t k = cov.offsets[p]; k < cov.offsets[p + 1]; ++k) {
      auto [lo, hi] = range_of(p, k);
      deg += hi - lo;
      for (BusIdx b = lo; b < hi; ++b) ++fwd_counts[b];
    }
    topo.inv_offsets[p + 1] = topo.inv_offsets[p] + deg;
  }

  topo.fwd_offsets.assign(topo.bus_count + 1, 0);
  for (BusIdx b = 0; b < topo.bus_count; ++b) {
    topo.fwd_offsets[b + 1] = topo.fwd_offsets[b] + fwd_counts[b];
  }

  topo.inv.resize(topo.inv_offsets.back());
  topo.fwd.resize(topo.fwd_offsets.back());
  std::vector<std::uint32_t> fwd_cursor(topo.fwd_offsets.begin(), topo.fwd_offsets.end() - 1);
  for (PassengerIdx p = 0; p < topo.passenger_count; ++p) {
    std::uint32_t at = topo.inv_offsets[p];
    for (std::uint32_t k = cov.offsets[p]; k < cov.offsets[p + 1]; ++k) {
      auto [lo, hi] = range_of(p, k);
      for (BusIdx b = lo; b < hi; ++b) {
        topo.inv[at++] = b;
        topo.fwd[fwd_cursor[b]++] = p;
      }
    }
    // Coverage lists are route-ascending and buses are route-major, so the
    // inverted list comes out sorted already; keep the guarantee explicit.
    std::sort(topo.inv.begin() + topo.inv_offsets[p], topo.inv.begin() + at);
  }
  return topo;
}

void IndexState::reset(const IndexTopology& topo) {
  n_to_be_served.resize(topo.bus_count);
  for (BusIdx b = 0; b < topo.bus_count; ++b) n_to_be_served[b] = topo.standalone(b);
  bus_state.assign(topo.bus_count, static_cast<std::uint8_t>(BusState::Eligible));
  is_served.assign(topo.passenger_count, 0);
  total_served = 0;
  gain_evals = 0;
}

namespace {

void require_eligible(const IndexState& st, BusIdx b, const char* op) {
  if (b >= st.bus_state.size()) {
    throw ContractViolation(std::string(op) + " on unknown bus id " + std::to_string(b));
  }
  const auto s = static_cast<BusState>(st.bus_state[b]);
  if (s == BusState::Committed) {
    throw ContractViolation(std::string(op) + " on already-committed bus " + std::to_string(b));
  }
  if (s == BusState::Removed) {
    throw ContractViolation(std::string(op) + " on removed bus " + std::to_string(b));
  }
}

}  // namespace

std::int64_t marginal_gain(const IndexTopology&, const IndexState& st, BusIdx b) {
  require_eligible(st, b, "marginal_gain");
  return st.n_to_be_served[b];
}

std::int64_t commit(const IndexTopology& topo, IndexState& st, BusIdx b) {
  require_eligible(st, b, "commit");
  st.bus_state[b] = static_cast<std::uint8_t>(BusState::Committed);
  std::int64_t flips = 0;
  for (PassengerIdx p : topo.served_list(b)) {
    if (st.is_served[p]) continue;
    st.is_served[p] = 1;
    ++flips;
    for (BusIdx other : topo.optional_buses(p)) --st.n_to_be_served[other];
  }
  st.total_served += flips;
  return flips;
}

void remove_route(const IndexTopology& topo, IndexState& st, RouteIdx r) {
  for (BusIdx b = topo.route_begin[r]; b < topo.route_begin[r + 1]; ++b) {
    if (st.bus_state[b] == static_cast<std::uint8_t>(BusState::Eligible)) {
      st.bus_state[b] = static_cast<std::uint8_t>(BusState::Removed);
    }
  }
}

namespace {

constexpr char kMagic[5] = {'F', 'S', 'I', 'X', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  char buf[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(buf, 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) throw ValidationError("index snapshot truncated");
  return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
         (static_cast<std::uint32_t>(buf[2]) << 16) | (static_cast<std::uint32_t>(buf[3]) << 24);
}

void put_array(std::ostream& out, const std::vector<std::uint32_t>& v) {
  put_u32(out, static_cast<std::uint32_t>(v.size()));
  for (std::uint32_t x : v) put_u32(out, x);
}

std::vector<std::uint32_t> get_array(std::istream& in) {
  const std::uint32_t n = get_u32(in);
  std::vector<std::uint32_t> v(n);
  for (std::uint32_t i = 0; i < n; ++i) v[i] = get_u32(in);
  return v;
}

}  // namespace

void IndexTopology::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write index snapshot to " + path);
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, bus_count);
  put_u32(out, passenger_count);
  put_array(out, fwd_offsets);
  put_array(out, fwd);
  put_array(out, inv_offsets);
  put_array(out, inv);
  if (!out) throw ValidationError("short write while saving index snapshot");
}

IndexTopology IndexTopology::load(const std::string& path, const Instance& inst) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open index snapshot " + path);
  char magic[5];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ValidationError("bad index snapshot magic in " + path);
  }
  IndexTopology topo;
  topo.bus_count = get_u32(in);
  topo.passenger_count = get_u32(in);
  if (topo.bus_count != inst.candidates.size() ||
      topo.passenger_count != inst.passengers.size()) {
    throw ValidationError("index snapshot does not match the loaded instance");
  }
  topo.fwd_offsets = get_array(in);
  topo.fwd = get_array(in);
  topo.inv_offsets = get_array(in);
  topo.inv = get_array(in);
  if (topo.fwd_offsets.size() != topo.bus_count + 1 ||
      topo.inv_offsets.size() != topo.passenger_count + 1 ||
      topo.fwd.size() != topo.fwd_offsets.back() || topo.inv.size() != topo.inv_offsets.back()) {
    throw ValidationError("index snapshot arrays inconsistent in " + path);
  }
  topo.route_begin = inst.route_cand_begin;
  return topo;
}

}  // namespace busfreq
