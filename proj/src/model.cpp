#include "busfreq/model.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace busfreq {

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw ValidationError("empty rational literal");

  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    std::int64_t n = 0, d = 0;
    auto r1 = std::from_chars(text.data(), text.data() + slash, n);
    auto r2 = std::from_chars(text.data() + slash + 1, text.data() + text.size(), d);
    if (r1.ec != std::errc() || r1.ptr != text.data() + slash || r2.ec != std::errc() ||
        r2.ptr != text.data() + text.size() || d <= 0 || n < 0) {
      throw ValidationError("bad rational literal '" + text + "'");
    }
    return Rational(n, d);
  }

  // [digits][.digits][e[+|-]digits], parsed digit-wise.
  std::size_t i = 0;
  std::int64_t mantissa = 0;
  int frac_digits = 0;
  bool any_digit = false;
  for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
    mantissa = mantissa * 10 + (text[i] - '0');
    any_digit = true;
    if (mantissa > (std::int64_t{1} << 53)) throw ValidationError("rational literal too large: " + text);
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
      mantissa = mantissa * 10 + (text[i] - '0');
      ++frac_digits;
      any_digit = true;
      if (mantissa > (std::int64_t{1} << 53)) throw ValidationError("rational literal too large: " + text);
    }
  }
  int exponent = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      neg = text[i] == '-';
      ++i;
    }
    if (i == text.size()) throw ValidationError("bad rational literal '" + text + "'");
    for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
      exponent = exponent * 10 + (text[i] - '0');
      if (exponent > 18) throw ValidationError("rational exponent out of range: " + text);
    }
    if (neg) exponent = -exponent;
  }
  if (!any_digit || i != text.size()) {
    throw ValidationError("bad rational literal '" + text + "'");
  }

  std::int64_t num = mantissa;
  std::int64_t den = 1;
  int pow10 = exponent - frac_digits;
  for (; pow10 > 0; --pow10) {
    num *= 10;
    if (num > (std::int64_t{1} << 60)) throw ValidationError("rational literal too large: " + text);
  }
  for (; pow10 < 0; ++pow10) {
    den *= 10;
    if (den > (std::int64_t{1} << 60)) throw ValidationError("rational literal too small: " + text);
  }
  return Rational(num, den);
}

std::string to_string(const Rational& r) {
  if (r.den == 1) return std::to_string(r.num);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

int Instance::total_quota() const {
  int n = 0;
  for (int q : quotas) n += q;
  return n;
}

void Instance::finalize() {
  for (auto& rt : routes) {
    rt.stop_pos.clear();
    rt.stop_pos.reserve(rt.stops.size());
    for (std::uint32_t k = 0; k < rt.stops.size(); ++k) rt.stop_pos.emplace(rt.stops[k], k);
  }
  route_cand_begin.assign(routes.size() + 1, 0);
  for (const auto& c : candidates) ++route_cand_begin[c.route + 1];
  for (std::size_t r = 0; r < routes.size(); ++r) route_cand_begin[r + 1] += route_cand_begin[r];
}

void validate_instance(const Instance& inst) {
  for (RouteIdx r = 0; r < inst.routes.size(); ++r) {
    const Route& rt = inst.routes[r];
    if (rt.stops.size() < 2) {
      throw ValidationError("route '" + rt.id + "' has fewer than 2 stops");
    }
    if (rt.cum_time.size() != rt.stops.size()) {
      throw ValidationError("route '" + rt.id + "' cum_time/stops length mismatch");
    }
    if (rt.cum_time.front() != 0) {
      throw ValidationError("route '" + rt.id + "' cum_time must start at 0");
    }
    for (std::size_t k = 1; k < rt.cum_time.size(); ++k) {
      if (rt.cum_time[k] < rt.cum_time[k - 1]) {
        throw ValidationError("route '" + rt.id + "' has non-monotone cum_time");
      }
    }
    if (rt.stop_pos.size() != rt.stops.size()) {
      throw ValidationError("route '" + rt.id + "' repeats a stop");
    }
    for (StopIdx s : rt.stops) {
      if (s >= inst.stop_names.size()) {
        throw ValidationError("route '" + rt.id + "' references unknown stop");
      }
    }
  }
  for (std::size_t i = 0; i < inst.passengers.size(); ++i) {
    const Passenger& p = inst.passengers[i];
    if (p.board >= inst.stop_names.size() || p.alight >= inst.stop_names.size()) {
      throw ValidationError("passenger " + std::to_string(i) + " references unknown stop");
    }
    if (p.board == p.alight) {
      throw ValidationError("passenger " + std::to_string(i) + " boards and alights at the same stop");
    }
    if (p.arrival < 0 || p.arrival >= kSecondsPerDay) {
      throw ValidationError("passenger " + std::to_string(i) + " arrival out of [0,86400)");
    }
  }
  for (std::size_t b = 0; b < inst.candidates.size(); ++b) {
    const BusCandidate& c = inst.candidates[b];
    if (c.route >= inst.routes.size()) {
      throw ValidationError("candidate " + std::to_string(b) + " references unknown route");
    }
    if (c.depart < 0 || c.depart >= kSecondsPerDay) {
      throw ValidationError("candidate " + std::to_string(b) + " departs outside [0,86400)");
    }
    if (b > 0 && inst.candidates[b - 1] == c) {
      throw ValidationError("duplicate candidate (" + inst.routes[c.route].id + ", " +
                            std::to_string(c.depart) + ")");
    }
  }
  if (!std::is_sorted(inst.candidates.begin(), inst.candidates.end(),
                      [](const BusCandidate& a, const BusCandidate& b) {
                        return a.route != b.route ? a.route < b.route : a.depart < b.depart;
                      })) {
    throw ValidationError("candidate set not sorted by (route, depart)");
  }
  if (!inst.quotas.empty()) {
    if (inst.quotas.size() != inst.routes.size()) {
      throw ValidationError("quota vector size does not match route count");
    }
    for (RouteIdx r = 0; r < inst.routes.size(); ++r) {
      if (inst.quotas[r] < 1) {
        throw ValidationError("route '" + inst.routes[r].id + "' quota must be >= 1");
      }
      if (static_cast<std::uint32_t>(inst.quotas[r]) > inst.candidate_count(r)) {
        throw InfeasibleError("route '" + inst.routes[r].id + "' quota " +
                              std::to_string(inst.quotas[r]) + " exceeds its " +
                              std::to_string(inst.candidate_count(r)) + " candidates");
      }
    }
  }
}

int serve_indicator(const Instance& inst, const BusCandidate& bus, const Passenger& p,
                    int theta) {
  if (bus.route >= inst.routes.size()) {
    throw ValidationError("serve query for unknown route index " + std::to_string(bus.route));
  }
  const Route& rt = inst.routes[bus.route];
  const int pos_b = rt.position_of(p.board);
  if (pos_b < 0) return 0;
  const int pos_e = rt.position_of(p.alight);
  if (pos_e < 0 || pos_e <= pos_b) return 0;
  const std::int64_t wait =
      static_cast<std::int64_t>(bus.depart) + rt.cum_time[pos_b] - p.arrival;
  return wait >= 0 && wait <= theta ? 1 : 0;
}

int coverage(const Instance& inst, const Frequency& f, const Passenger& p, int theta) {
  for (const auto& bus : f.buses) {
    if (serve_indicator(inst, bus, p, theta)) return 1;
  }
  return 0;
}

std::int64_t objective(const Instance& inst, const Frequency& f, int theta) {
  std::int64_t served = 0;
  for (const auto& p : inst.passengers) served += coverage(inst, f, p, theta);
  return served;
}

std::vector<int> route_counts(const Instance& inst, const Frequency& f) {
  std::vector<int> counts(inst.routes.size(), 0);
  for (const auto& bus : f.buses) {
    if (bus.route >= counts.size()) {
      throw ValidationError("schedule references unknown route index");
    }
    ++counts[bus.route];
  }
  return counts;
}

void validate_exact_quotas(const Instance& inst, const Frequency& f) {
  const auto counts = route_counts(inst, f);
  for (RouteIdx r = 0; r < inst.routes.size(); ++r) {
    if (counts[r] != inst.quotas[r]) {
      std::ostringstream msg;
      msg << "route '" << inst.routes[r].id << "' has " << counts[r]
          << " departures, quota requires " << inst.quotas[r];
      throw ValidationError(msg.str());
    }
  }
}

OdCoverage build_od_coverage(const Instance& inst) {
  // stop -> routes visiting it, so each passenger only inspects routes that
  // contain its boarding stop.
  std::vector<std::uint32_t> stop_route_begin(inst.stop_names.size() + 1, 0);
  for (const auto& rt : inst.routes) {
    for (StopIdx s : rt.stops) ++stop_route_begin[s + 1];
  }
  for (std::size_t s = 0; s < inst.stop_names.size(); ++s) {
    stop_route_begin[s + 1] += stop_route_begin[s];
  }
  std::vector<RouteIdx> stop_routes(stop_route_begin.back());
  {
    auto cursor = stop_route_begin;
    for (RouteIdx r = 0; r < inst.routes.size(); ++r) {
      for (StopIdx s : inst.routes[r].stops) stop_routes[cursor[s]++] = r;
    }
  }

  OdCoverage cov;
  cov.offsets.assign(inst.passengers.size() + 1, 0);
  for (PassengerIdx p = 0; p < inst.passengers.size(); ++p) {
    const Passenger& ps = inst.passengers[p];
    std::uint32_t deg = 0;
    for (std::uint32_t k = stop_route_begin[ps.board]; k < stop_route_begin[ps.board + 1]; ++k) {
      const Route& rt = inst.routes[stop_routes[k]];
      const int pos_e = rt.position_of(ps.alight);
      if (pos_e > rt.position_of(ps.board)) ++deg;  // board position always exists here
    }
    cov.offsets[p + 1] = cov.offsets[p] + deg;
  }
  cov.route.resize(cov.offsets.back());
  cov.board_time.resize(cov.offsets.back());
  for (PassengerIdx p = 0; p < inst.passengers.size(); ++p) {
    const Passenger& ps = inst.passengers[p];
    std::uint32_t at = cov.offsets[p];
    for (std::uint32_t k = stop_route_begin[ps.board]; k < stop_route_begin[ps.board + 1]; ++k) {
      const RouteIdx r = stop_routes[k];
      const Route& rt = inst.routes[r];
      const int pos_b = rt.position_of(ps.board);
      const int pos_e = rt.position_of(ps.alight);
      if (pos_e > pos_b) {
        cov.route[at] = r;
        cov.board_time[at] = rt.cum_time[pos_b];
        ++at;
      }
    }
  }
  return cov;
}

std::size_t unservable_count(const OdCoverage& cov) {
  std::size_t n = 0;
  for (std::size_t p = 0; p + 1 < cov.offsets.size(); ++p) {
    if (cov.offsets[p + 1] == cov.offsets[p]) ++n;
  }
  return n;
}

std::int64_t objective_fast(const Instance& inst, const OdCoverage& cov, const Frequency& f,
                            int theta) {
  std::vector<std::vector<int>> departs(inst.routes.size());
  for (const auto& bus : f.buses) {
    if (bus.route >= inst.routes.size()) {
      throw ValidationError("schedule references unknown route index");
    }
    departs[bus.route].push_back(bus.depart);
  }
  for (auto& d : departs) std::sort(d.begin(), d.end());

  std::int64_t served = 0;
  for (PassengerIdx p = 0; p < inst.passengers.size(); ++p) {
    const int arrival = inst.passengers[p].arrival;
    for (std::uint32_t k = cov.offsets[p]; k < cov.offsets[p + 1]; ++k) {
      const auto& d = departs[cov.route[k]];
      if (d.empty()) continue;
      const std::int64_t lo = static_cast<std::int64_t>(arrival) - cov.board_time[k];
      auto it = std::lower_bound(d.begin(), d.end(), lo);
      if (it != d.end() && *it <= lo + theta) {
        ++served;
        break;
      }
    }
  }
  return served;
}

}  // namespace busfreq
