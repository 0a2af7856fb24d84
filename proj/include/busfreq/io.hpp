#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "busfreq/model.hpp"

namespace busfreq {

// File set of one instance. All CSV, UTF-8, header row first.
//   routes.csv      route_id,seq,stop_id,segment_seconds
//   passengers.csv  passenger_id,board_stop,alight_stop,arrival_seconds
//   quotas.csv      route_id,n
//   candidates.csv  route_id,depart_seconds            (optional)
// Without a candidates file, candidates come from the window/step rule.
struct LoadSpec {
  std::string routes_path;
  std::string passengers_path;
  std::string quotas_path;
  std::string candidates_path;  // empty -> synthesize from window/step
  int window_start = 18000;
  int window_end = 86400;
  int step = 60;
};

struct LoadReport {
  std::size_t unservable = 0;
  std::vector<std::uint32_t> candidates_per_route;
};

Instance load_instance(const LoadSpec& spec, LoadReport* report = nullptr);

// Departures start, start+step, ... capped at end and at the last valid
// second of day. Replaces any existing candidate set.
void generate_candidates(Instance& inst, int window_start, int window_end, int step);

void save_instance(const Instance& inst, const std::string& dir);

// schedule.csv: route_id,depart_seconds, sorted by (route_id, depart).
void save_schedule(const std::string& path, const Instance& inst, const Frequency& f);
Frequency load_schedule(const std::string& path, const Instance& inst);

// Synthetic instance generator. Deterministic: one seed, byte-identical
// output. Route overlap is controlled by copying a contiguous stop segment
// from the previous route (chained neighborhoods); 0 keeps all route stop
// sets disjoint.
struct GeneratorConfig {
  int route_count = 50;
  int stops_min = 8, stops_max = 20;
  int segment_min = 60, segment_max = 240;
  std::int64_t passenger_count = 50000;
  double od_locality = 0.7;  // probability of extending a trip one more hop
  int weight_morning = 4, weight_evening = 4, weight_background = 2;
  double overlap = 0.0;  // fraction of a route's stops shared with earlier routes
  int departures_per_route = 30;
  int window_start = 18000, window_end = 86400, step = 60;
  bool emit_candidates = false;
  std::uint64_t seed = 1;

  static GeneratorConfig from_json_file(const std::string& path);
};

Instance generate_instance(const GeneratorConfig& cfg);

// Generates and writes routes/passengers/quotas (and candidates when
// configured) under `dir`; returns the matching LoadSpec.
LoadSpec generate_instance_files(const GeneratorConfig& cfg, const std::string& dir);

}  // namespace busfreq
