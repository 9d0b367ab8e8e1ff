#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kelvinprobe/fem.hpp"
#include "kelvinprobe/geometry.hpp"
#include "kelvinprobe/monitor.hpp"

namespace kp {

// Run configuration. Abscissae (cracks, grids, pressure points, nuggets) are
// user frame, as written in the file. Defaults reproduce the two-slab weld
// experiment: 8 x 0.4 slab centred at the origin.
struct RunConfig {
  struct Geometry {
    double a = 8.0, b = 0.4, c = 0.2;
    double shift_x = -4.0, shift_y = -0.2;
    bool operator==(const Geometry&) const = default;
  } geometry;

  struct Cracks {
    std::vector<Interval> intervals{{-4.0, -1.5}, {-1.0, 4.0}};
    double width = 0.04;
    std::int64_t target_elements = 30720;
    bool operator==(const Cracks&) const = default;
  } cracks;

  struct Forcing {
    std::string kind = "sin3";          // sin3 | linear_x1
    std::string support = "top_bottom";  // top_bottom | top | full
    double corner_exclusion = 0.0;
    bool operator==(const Forcing&) const = default;
  } forcing;

  struct Probe {
    double tau_min = 1.0, tau_max = 5.0, tau_step = 0.1;
    double xi1_min = -4.0, xi1_max = 4.0, xi1_step = 0.05;
    double min_standoff = 0.5, max_standoff = 2.0, slope_divisor = 2.5, center = 0.0;
    std::string reference = "user_origin";  // user_origin | slab_top
    std::optional<double> delta;
    std::optional<double> sup_s_bound;
    std::optional<double> tau_window_lo, tau_window_hi;
    double prominence_fraction = 0.02;
    std::int64_t threads = 0;  // 0: hardware concurrency
    bool operator==(const Probe&) const = default;
  } probe;

  struct Noise {
    bool enabled = false;
    double level = 2e-4;
    std::int64_t seed = 1;
    double min_standoff = 0.75;
    bool operator==(const Noise&) const = default;
  } noise;

  struct Monitor {
    std::vector<double> pressure_points{-1.25, 1.25};
    double gap_threshold = 1.5;
    double left_step = 0.25;
    double right_step = 0.2;
    std::int64_t max_rounds = 4;
    std::vector<std::optional<Interval>> nuggets{Interval{-1.5, -1.0}, Interval{1.0, 1.5}};
    bool operator==(const Monitor&) const = default;
  } monitor;

  struct Output {
    std::string run_dir = "runs/reference";
    std::vector<std::string> formats{"csv", "svg", "json"};
    bool operator==(const Output&) const = default;
  } output;

  bool operator==(const RunConfig&) const = default;

  // Throws ErrorCode::Config naming the offending field.
  void validate() const;

  SlabGeometry slab() const;
  CrackSet crack_set(std::vector<std::string>* warnings = nullptr) const;
  std::vector<double> tau_grid() const;
  std::vector<double> xi1_grid() const;  // slab frame
  // The noise-mode line raises the standoff floor when noise is enabled.
  ProbingLine probing_line() const;
  SupportMode support_mode() const;
  MonitorConfig monitor_config() const;  // slab frame
  ProbeSetup probe_setup() const;

  // Canonical TOML text; parse(serialize()) reproduces the config.
  std::string serialize() const;
  // FNV-1a of the canonical text.
  std::string hash() const;
};

// Parses the TOML subset used by the config: [section] headers, key = value
// with numbers, booleans, double-quoted strings and (nested, possibly
// multi-line) arrays, and # comments. Missing keys keep their defaults.
// Errors carry "line N:" or the field path.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Evenly spaced values lo, lo+step, ..., hi (hi included when it lands on the
// grid within 1e-9 of a step).
std::vector<double> uniform_grid(double lo, double hi, double step);

}  // namespace kp
