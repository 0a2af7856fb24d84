#include "busfreq/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include <json.hpp>

namespace busfreq {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

struct CsvReader {
  std::string path;
  std::ifstream in;
  std::size_t line_no = 0;

  explicit CsvReader(const std::string& p) : path(p), in(p) {
    if (!in) throw ValidationError("cannot open " + p);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError(path + ":" + std::to_string(line_no) + ": " + what);
  }

  bool next_row(std::vector<std::string>& fields, std::size_t expected) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      fields = split_csv(line);
      if (fields.size() != expected) {
        fail("expected " + std::to_string(expected) + " fields, got " +
             std::to_string(fields.size()));
      }
      return true;
    }
    return false;
  }

  void expect_header(const std::string& header) {
    std::vector<std::string> fields;
    if (!next_row(fields, split_csv(header).size())) fail("missing header row");
    std::string joined;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) joined += ',';
      joined += fields[i];
    }
    if (joined != header) fail("expected header '" + header + "'");
  }

  // Whole-field integer; anything else (including fractional seconds) fails.
  std::int64_t to_int(const std::string& field) const {
    std::int64_t v = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
      fail("'" + field + "' is not an integer");
    }
    return v;
  }
};

}  // namespace

void generate_candidates(Instance& inst, int window_start, int window_end, int step) {
  if (step < 1) throw ValidationError("candidate step must be >= 1");
  if (window_end < window_start) throw ValidationError("empty candidate window");
  if (window_start < 0) throw ValidationError("candidate window starts before 0");
  inst.candidates.clear();
  for (RouteIdx r = 0; r < inst.routes.size(); ++r) {
    for (std::int64_t d = window_start; d <= window_end && d < kSecondsPerDay; d += step) {
      inst.candidates.push_back({r, static_cast<int>(d)});
    }
  }
  inst.finalize();
}

Instance load_instance(const LoadSpec& spec, LoadReport* report) {
  Instance inst;

  auto intern_stop = [&inst](const std::string& name) -> StopIdx {
    auto [it, fresh] = inst.stop_index.emplace(name, static_cast<StopIdx>(inst.stop_names.size()));
    if (fresh) inst.stop_names.push_back(name);
    return it->second;
  };

  // routes.csv: rows may arrive in any order; seq must enumerate 0..k-1.
  {
    CsvReader rd(spec.routes_path);
    rd.expect_header("route_id,seq,stop_id,segment_seconds");
    std::map<std::string, std::vector<std::tuple<std::int64_t, std::string, std::int64_t>>> rows;
    std::vector<std::string> f;
    while (rd.next_row(f, 4)) {
      if (f[0].empty()) rd.fail("empty route_id");
      if (f[2].empty()) rd.fail("empty stop_id");
      rows[f[0]].emplace_back(rd.to_int(f[1]), f[2], rd.to_int(f[3]));
    }
    if (rows.empty()) throw ValidationError(spec.routes_path + ": no routes");
    for (auto& [id, stops] : rows) {
      std::sort(stops.begin(), stops.end(),
                [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });
      Route rt;
      rt.id = id;
      for (std::size_t k = 0; k < stops.size(); ++k) {
        const auto& [seq, stop, seg] = stops[k];
        if (seq != static_cast<std::int64_t>(k)) {
          throw ValidationError(spec.routes_path + ": route '" + id +
                                "' seq values must be 0..k-1 without gaps");
        }
        if (k == 0 && seg != 0) {
          throw ValidationError(spec.routes_path + ": route '" + id +
                                "' first segment_seconds must be 0");
        }
        if (seg < 0) {
          throw ValidationError(spec.routes_path + ": route '" + id +
                                "' has non-monotone cum_time (negative segment)");
        }
        rt.stops.push_back(intern_stop(stop));
        rt.cum_time.push_back(k == 0 ? 0 : rt.cum_time.back() + static_cast<int>(seg));
      }
      inst.routes.push_back(std::move(rt));
    }
    // std::map iteration already gave lexicographic route order
    for (RouteIdx r = 0; r < inst.routes.size(); ++r) inst.route_index.emplace(inst.routes[r].id, r);
  }

  // passengers.csv
  {
    CsvReader rd(spec.passengers_path);
    rd.expect_header("passenger_id,board_stop,alight_stop,arrival_seconds");
    std::vector<std::string> f;
    while (rd.next_row(f, 4)) {
      auto board = inst.stop_index.find(f[1]);
      if (board == inst.stop_index.end()) rd.fail("unknown board stop '" + f[1] + "'");
      auto alight = inst.stop_index.find(f[2]);
      if (alight == inst.stop_index.end()) rd.fail("unknown alight stop '" + f[2] + "'");
      const std::int64_t arrival = rd.to_int(f[3]);
      if (arrival < 0 || arrival >= kSecondsPerDay) rd.fail("arrival_seconds out of [0,86400)");
      if (board->second == alight->second) rd.fail("board and alight stops are equal");
      inst.passengers.push_back({board->second, alight->second, static_cast<int>(arrival)});
    }
  }

  // candidates: explicit file or the window/step rule
  if (!spec.candidates_path.empty()) {
    CsvReader rd(spec.candidates_path);
    rd.expect_header("route_id,depart_seconds");
    std::vector<std::string> f;
    while (rd.next_row(f, 2)) {
      auto it = inst.route_index.find(f[0]);
      if (it == inst.route_index.end()) rd.fail("unknown route '" + f[0] + "'");
      const std::int64_t depart = rd.to_int(f[1]);
      if (depart < 0 || depart >= kSecondsPerDay) rd.fail("depart_seconds out of [0,86400)");
      inst.candidates.push_back({it->second, static_cast<int>(depart)});
    }
    std::sort(inst.candidates.begin(), inst.candidates.end(),
              [](const BusCandidate& a, const BusCandidate& b) {
                return a.route != b.route ? a.route < b.route : a.depart < b.depart;
              });
    for (std::size_t i = 1; i < inst.candidates.size(); ++i) {
      if (inst.candidates[i] == inst.candidates[i - 1]) {
        throw ValidationError(spec.candidates_path + ": duplicate candidate (" +
                              inst.routes[inst.candidates[i].route].id + ", " +
                              std::to_string(inst.candidates[i].depart) + ")");
      }
    }
    inst.finalize();
  } else {
    generate_candidates(inst, spec.window_start, spec.window_end, spec.step);
  }

  // quotas.csv: one row per route, all routes covered
  {
    CsvReader rd(spec.quotas_path);
    rd.expect_header("route_id,n");
    inst.quotas.assign(inst.routes.size(), 0);
    std::vector<std::uint8_t> seen(inst.routes.size(), 0);
    std::vector<std::string> f;
    while (rd.next_row(f, 2)) {
      auto it = inst.route_index.find(f[0]);
      if (it == inst.route_index.end()) rd.fail("unknown route '" + f[0] + "'");
      if (seen[it->second]) rd.fail("duplicate quota for route '" + f[0] + "'");
      seen[it->second] = 1;
      const std::int64_t n = rd.to_int(f[1]);
      if (n < 1) rd.fail("quota must be >= 1");
      inst.quotas[it->second] = static_cast<int>(n);
    }
    for (RouteIdx r = 0; r < inst.routes.size(); ++r) {
      if (!seen[r]) {
        throw ValidationError(spec.quotas_path + ": missing quota for route '" +
                              inst.routes[r].id + "'");
      }
    }
  }

  validate_instance(inst);

  if (report) {
    const OdCoverage cov = build_od_coverage(inst);
    report->unservable = unservable_count(cov);
    report->candidates_per_route.resize(inst.routes.size());
    for (RouteIdx r = 0; r < inst.routes.size(); ++r) {
      report->candidates_per_route[r] = inst.candidate_count(r);
    }
  }
  return inst;
}

void save_instance(const Instance& inst, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::ofstream routes(fs::path(dir) / "routes.csv", std::ios::binary);
  routes << "route_id,seq,stop_id,segment_seconds\n";
  for (const auto& rt : inst.routes) {
    for (std::size_t k = 0; k < rt.stops.size(); ++k) {
      const int seg = k == 0 ? 0 : rt.cum_time[k] - rt.cum_time[k - 1];
      routes << rt.id << ',' << k << ',' << inst.stop_names[rt.stops[k]] << ',' << seg << '\n';
    }
  }

  std::ofstream passengers(fs::path(dir) / "passengers.csv", std::ios::binary);
  passengers << "passenger_id,board_stop,alight_stop,arrival_seconds\n";
  for (std::size_t i = 0; i < inst.passengers.size(); ++i) {
    const Passenger& p = inst.passengers[i];
    passengers << 'p' << i << ',' << inst.stop_names[p.board] << ',' << inst.stop_names[p.alight]
               << ',' << p.arrival << '\n';
  }

  std::ofstream quotas(fs::path(dir) / "quotas.csv", std::ios::binary);
  quotas << "route_id,n\n";
  for (RouteIdx r = 0; r < inst.routes.size(); ++r) {
    quotas << inst.routes[r].id << ',' << inst.quotas[r] << '\n';
  }
}

void save_schedule(const std::string& path, const Instance& inst, const Frequency& f) {
  std::vector<BusCandidate> sorted = f.buses;
  std::sort(sorted.begin(), sorted.end(), [](const BusCandidate& a, const BusCandidate& b) {
    return a.route != b.route ? a.route < b.route : a.depart < b.depart;
  });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write schedule to " + path);
  out << "route_id,depart_seconds\n";
  for (const auto& bus : sorted) {
    out << inst.routes[bus.route].id << ',' << bus.depart << '\n';
  }
}

Frequency load_schedule(const std::string& path, const Instance& inst) {
  CsvReader rd(path);
  rd.expect_header("route_id,depart_seconds");
  Frequency f;
  std::vector<std::string> fields;
  while (rd.next_row(fields, 2)) {
    auto it = inst.route_index.find(fields[0]);
    if (it == inst.route_index.end()) rd.fail("unknown route '" + fields[0] + "'");
    f.buses.push_back({it->second, static_cast<int>(rd.to_int(fields[1]))});
  }
  return f;
}

namespace {

// All generator randomness flows through raw mt19937_64 draws so the output
// bytes depend only on the seed, not on library distribution internals.
struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}

  std::uint64_t next() { return engine(); }
  // uniform in [0, n)
  std::uint64_t below(std::uint64_t n) { return n <= 1 ? 0 : next() % n; }
  // uniform in [lo, hi]
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }
  bool chance_permyriad(int permyriad) { return below(10000) < static_cast<std::uint64_t>(permyriad); }
};

std::string padded(const char prefix, std::uint64_t value, int width) {
  std::string digits = std::to_string(value);
  std::string out(1, prefix);
  for (int i = static_cast<int>(digits.size()); i < width; ++i) out += '0';
  return out + digits;
}

}  // namespace

GeneratorConfig GeneratorConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open generator config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad generator config " + path + ": " + e.what());
  }
  GeneratorConfig cfg;
  cfg.route_count = j.value("route_count", cfg.route_count);
  if (j.contains("stops_per_route")) {
    cfg.stops_min = j["stops_per_route"].at(0).get<int>();
    cfg.stops_max = j["stops_per_route"].at(1).get<int>();
  }
  if (j.contains("segment_seconds")) {
    cfg.segment_min = j["segment_seconds"].at(0).get<int>();
    cfg.segment_max = j["segment_seconds"].at(1).get<int>();
  }
  cfg.passenger_count = j.value("passenger_count", cfg.passenger_count);
  cfg.od_locality = j.value("od_locality", cfg.od_locality);
  if (j.contains("peak_weights")) {
    cfg.weight_morning = j["peak_weights"].value("morning", cfg.weight_morning);
    cfg.weight_evening = j["peak_weights"].value("evening", cfg.weight_evening);
    cfg.weight_background = j["peak_weights"].value("background", cfg.weight_background);
  }
  cfg.overlap = j.value("overlap", cfg.overlap);
  cfg.departures_per_route = j.value("departures_per_route", cfg.departures_per_route);
  if (j.contains("window")) {
    cfg.window_start = j["window"].at(0).get<int>();
    cfg.window_end = j["window"].at(1).get<int>();
  }
  cfg.step = j.value("step", cfg.step);
  cfg.emit_candidates = j.value("emit_candidates", cfg.emit_candidates);
  cfg.seed = j.value("seed", cfg.seed);
  return cfg;
}

Instance generate_instance(const GeneratorConfig& cfg) {
  if (cfg.route_count < 1) throw ValidationError("route_count must be >= 1");
  if (cfg.stops_min < 2 || cfg.stops_max < cfg.stops_min) {
    throw ValidationError("stops_per_route range must satisfy 2 <= min <= max");
  }
  if (cfg.segment_min < 1 || cfg.segment_max < cfg.segment_min) {
    throw ValidationError("segment_seconds range must satisfy 1 <= min <= max");
  }
  if (cfg.overlap < 0 || cfg.overlap > 0.9) {
    throw ValidationError("overlap must lie in [0, 0.9]");
  }
  if (cfg.od_locality < 0 || cfg.od_locality >= 1) {
    throw ValidationError("od_locality must lie in [0, 1)");
  }
  if (cfg.passenger_count < 0) throw ValidationError("passenger_count must be >= 0");

  Rng rng(cfg.seed);
  Instance inst;

  const int id_width = std::max<int>(4, static_cast<int>(std::to_string(cfg.route_count).size()));
  auto fresh_stop = [&]() -> StopIdx {
    const auto id = static_cast<StopIdx>(inst.stop_names.size());
    inst.stop_names.push_back(padded('S', id, 6));
    inst.stop_index.emplace(inst.stop_names.back(), id);
    return id;
  };

  const int overlap_permyriad = static_cast<int>(std::llround(cfg.overlap * 10000));
  for (int r = 0; r < cfg.route_count; ++r) {
    Route rt;
    rt.id = padded('R', static_cast<std::uint64_t>(r), id_width);
    const int length = static_cast<int>(rng.between(cfg.stops_min, cfg.stops_max));
    int shared = r == 0 ? 0 : static_cast<int>(static_cast<std::int64_t>(length) *
                                               overlap_permyriad / 10000);
    if (shared >= length) shared = length - 1;  // keep at least one fresh stop

    std::vector<StopIdx> stops;
    if (shared >= 1) {
      // Chain neighborhoods: each route shares a contiguous segment with its
      // predecessor, so overlap stays local and clusters have boundaries.
      const auto& donor = inst.routes[r - 1];
      const int donor_len = static_cast<int>(donor.stops.size());
      const int take = std::min(shared, donor_len);
      const int from = static_cast<int>(rng.between(0, donor_len - take));
      const int prefix = static_cast<int>(rng.between(0, length - take));
      for (int k = 0; k < prefix; ++k) stops.push_back(fresh_stop());
      for (int k = 0; k < take; ++k) stops.push_back(donor.stops[from + k]);
      while (static_cast<int>(stops.size()) < length) stops.push_back(fresh_stop());
    } else {
      for (int k = 0; k < length; ++k) stops.push_back(fresh_stop());
    }
    rt.stops = std::move(stops);
    rt.cum_time.push_back(0);
    for (int k = 1; k < length; ++k) {
      rt.cum_time.push_back(rt.cum_time.back() +
                            static_cast<int>(rng.between(cfg.segment_min, cfg.segment_max)));
    }
    inst.routes.push_back(std::move(rt));
  }
  for (RouteIdx r = 0; r < inst.routes.size(); ++r) inst.route_index.emplace(inst.routes[r].id, r);

  // Demand: pick a route, a boarding position, extend the trip with
  // probability od_locality per hop, then draw an arrival from the peak
  // mixture. Every passenger's OD pair lies on its route by construction.
  const int locality_permyriad = static_cast<int>(std::llround(cfg.od_locality * 10000));
  const int wa = cfg.weight_morning, wb = cfg.weight_evening, wc = cfg.weight_background;
  if (wa < 0 || wb < 0 || wc < 0 || wa + wb + wc == 0) {
    throw ValidationError("peak weights must be non-negative and not all zero");
  }
  auto draw_arrival = [&]() -> int {
    const auto pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(wa + wb + wc)));
    std::int64_t t;
    if (pick < wa) {
      t = 28800 - 7200 + (rng.between(0, 7199) + rng.between(0, 7199));  // morning peak
    } else if (pick < wa + wb) {
      t = 66600 - 7200 + (rng.between(0, 7199) + rng.between(0, 7199));  // evening peak
    } else {
      t = rng.between(0, kSecondsPerDay - 1);
    }
    return static_cast<int>(std::clamp<std::int64_t>(t, 0, kSecondsPerDay - 1));
  };

  inst.passengers.reserve(static_cast<std::size_t>(cfg.passenger_count));
  for (std::int64_t i = 0; i < cfg.passenger_count; ++i) {
    const Route& rt = inst.routes[rng.below(inst.routes.size())];
    const int len = static_cast<int>(rt.stops.size());
    const int board = static_cast<int>(rng.between(0, len - 2));
    int hops = 1;
    while (board + hops < len - 1 && rng.chance_permyriad(locality_permyriad)) ++hops;
    inst.passengers.push_back({rt.stops[board], rt.stops[board + hops], draw_arrival()});
  }

  inst.quotas.assign(inst.routes.size(), cfg.departures_per_route);
  generate_candidates(inst, cfg.window_start, cfg.window_end, cfg.step);
  validate_instance(inst);
  return inst;
}

LoadSpec generate_instance_files(const GeneratorConfig& cfg, const std::string& dir) {
  namespace fs = std::filesystem;
  const Instance inst = generate_instance(cfg);
  save_instance(inst, dir);

  LoadSpec spec;
  spec.routes_path = (fs::path(dir) / "routes.csv").string();
  spec.passengers_path = (fs::path(dir) / "passengers.csv").string();
  spec.quotas_path = (fs::path(dir) / "quotas.csv").string();
  spec.window_start = cfg.window_start;
  spec.window_end = cfg.window_end;
  spec.step = cfg.step;
  if (cfg.emit_candidates) {
    spec.candidates_path = (fs::path(dir) / "candidates.csv").string();
    std::ofstream out(spec.candidates_path, std::ios::binary);
    out << "route_id,depart_seconds\n";
    for (const auto& c : inst.candidates) {
      out << inst.routes[c.route].id << ',' << c.depart << '\n';
    }
  }
  return spec;
}

}  // namespace busfreq
