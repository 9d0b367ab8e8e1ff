#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kelvinprobe/fem.hpp"
#include "kelvinprobe/geometry.hpp"
#include "kelvinprobe/profiler.hpp"

namespace kp {

// Removes `span` from the crack set, splitting or dropping intervals as needed.
CrackSet subtract_interval(const CrackSet& cracks, Interval span);

// Joined interval of `cracks` that contains x_star (slab frame). Throws
// ErrorCode::Domain when x_star sits on a crack.
Interval joined_interval_at(const CrackSet& cracks, double x_star);

// Grows the joined interval around x_star by the two steps, clipped to [0,a].
// Cracks shrink accordingly and vanish once consumed.
CrackSet evolve_gap(const CrackSet& cracks, double x_star, double left_step, double right_step);

struct MonitorConfig {
  std::vector<double> pressure_points;  // slab frame, increasing order of processing
  double gap_threshold = 1.5;
  double left_step = 0.25;
  double right_step = 0.2;
  std::size_t max_rounds = 4;
  // Weld nugget created when monitoring of the matching point starts; empty
  // entries mean the point must already lie in a joined interval.
  std::vector<std::optional<Interval>> nuggets;

  void validate(const SlabGeometry& geom) const;
};

// Everything one probing round needs besides the crack state.
struct ProbeSetup {
  double crack_width = 0.04;
  std::size_t target_elements = 30720;
  double corner_exclusion = 0.0;
  SupportMode support = SupportMode::TopAndBottom;
  ProbingLine line;
  std::vector<double> xi1_grid;  // slab frame
  std::vector<double> tau_grid;
  std::size_t threads = 1;
  SlopeWindow window;
  double prominence_fraction = 0.02;
  double noise_level = 0.0;
  std::uint64_t seed = 1;
  // Optional per-round flux; defaults to sin(3 theta) with the settings above.
  std::function<NeumannData(const Mesh&, std::size_t point, std::size_t round)> forcing;
};

struct RoundResult {
  CauchyData cauchy;
  Profile profile;
  TipEstimate tips;
  std::size_t elements = 0;
};

// Mesh, solve, optional noise, sweep and tip detection for one crack state.
// The noise seed is derived from (setup.seed, point, round).
RoundResult probe_round(const SlabGeometry& geom, const CrackSet& cracks, double x_star, const ProbeSetup& setup,
                        std::size_t point, std::size_t round);

std::uint64_t round_seed(std::uint64_t seed, std::size_t point, std::size_t round);

enum class Decision { Continue, Success, Failure, Error };
const char* decision_name(Decision d);

struct RoundRecord {
  std::size_t point = 0;
  double x_star = 0.0;  // slab frame
  std::size_t round = 0;
  CrackSet cracks;
  Interval true_joined;
  TipEstimate tips;
  std::optional<double> gap;
  Decision decision = Decision::Continue;
  std::string message;
  std::string profile_csv;  // artifact paths relative to the run directory
  std::string profile_svg;
  std::string indicator_csv;
};

struct PointSummary {
  double x_star = 0.0;
  bool success = false;
  std::size_t rounds = 0;
};

struct MonitorLog {
  std::vector<RoundRecord> rounds;
  std::vector<PointSummary> points;
  CrackSet final_cracks;

  std::string to_json(const SlabGeometry& geom, const std::string& config_hash, std::uint64_t seed) const;
};

// Runs the monitoring loop for every pressure point in order. The crack state
// carries over from one point to the next. When `run_dir` is non-empty,
// per-round profile CSV/SVG and an indicator CSV above x_star are written to
// run_dir/point<P>/round<R>_*.
MonitorLog run_monitor(const SlabGeometry& geom, const CrackSet& initial, const MonitorConfig& cfg,
                       const ProbeSetup& setup, const std::string& run_dir = {},
                       const std::string& config_hash = {});

}  // namespace kp
