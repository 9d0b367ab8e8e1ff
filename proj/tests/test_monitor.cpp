#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>

#include "fixtures.hpp"
#include "kelvinprobe/config.hpp"
#include "kelvinprobe/error.hpp"
#include "kelvinprobe/monitor.hpp"

using namespace kp;
namespace fx = kp::fixture;

namespace {

// Coarse, quick probing setup around the left pressure point.
ProbeSetup quick_setup() {
  RunConfig cfg;
  cfg.cracks.target_elements = 3000;
  cfg.probe.xi1_min = -2.5;
  cfg.probe.xi1_max = 0.0;
  cfg.probe.xi1_step = 0.1;
  cfg.probe.tau_step = 0.5;
  cfg.probe.threads = 2;
  return cfg.probe_setup();
}

MonitorConfig left_point_only(double threshold, std::size_t rounds) {
  const auto g = fx::slab();
  MonitorConfig m;
  m.pressure_points = {g.x_to_slab(-1.25)};
  m.nuggets = {Interval{g.x_to_slab(-1.5), g.x_to_slab(-1.0)}};
  m.gap_threshold = threshold;
  m.max_rounds = rounds;
  return m;
}

std::vector<Interval> user_intervals(const CrackSet& cs) {
  const auto g = fx::slab();
  std::vector<Interval> out;
  for (const auto& iv : cs.intervals()) out.push_back({g.x_to_user(iv.lo), g.x_to_user(iv.hi)});
  return out;
}

}  // namespace

TEST_CASE("gap evolution grows the joined interval by the steps") {
  const auto g = fx::slab();
  const auto cracks = fx::start_stage();
  const auto next = evolve_gap(cracks, g.x_to_slab(-1.25), 0.25, 0.2);
  const auto w = joined_interval_at(next, g.x_to_slab(-1.25));
  CHECK(g.x_to_user(w.lo) == doctest::Approx(-1.75));
  CHECK(g.x_to_user(w.hi) == doctest::Approx(-0.8));
  CHECK(next.intervals().size() == 2);

  CHECK(evolve_gap(cracks, g.x_to_slab(-1.25), 0.0, 0.0).intervals() == cracks.intervals());

  // A narrow crack next to the gap disappears once the step swallows it.
  const auto thin = fx::cracks_user({{-4.0, -2.0}, {-1.0, -0.95}, {-0.5, 4.0}});
  const auto grown = user_intervals(evolve_gap(thin, g.x_to_slab(-1.5), 0.0, 0.1));
  REQUIRE(grown.size() == 2);
  CHECK(grown[1].lo == doctest::Approx(-0.5));

  CHECK_THROWS_AS(evolve_gap(cracks, g.x_to_slab(0.0), 0.1, 0.1), Error);
  CHECK_THROWS_AS(evolve_gap(cracks, g.x_to_slab(-1.25), -0.1, 0.1), Error);
}

TEST_CASE("subtracting an interval splits the crack it falls in") {
  const auto g = fx::slab();
  const auto cs = user_intervals(subtract_interval(fx::cracks_user({{-4.0, 4.0}}), {g.x_to_slab(1.0), g.x_to_slab(1.5)}));
  REQUIRE(cs.size() == 2);
  CHECK(cs[0].hi == doctest::Approx(1.0));
  CHECK(cs[1].lo == doctest::Approx(1.5));
}

TEST_CASE("round seeds are distinct per point and round") {
  CHECK(round_seed(1, 0, 0) == 1);
  CHECK(round_seed(1, 1, 3) == 1004);
  CHECK(round_seed(1, 0, 1) != round_seed(1, 1, 0));
}

TEST_CASE("monitor stops after max_rounds when the threshold is never met") {
  const auto g = fx::slab();
  const auto log = run_monitor(g, fx::cracks_user({{-4.0, 4.0}}), left_point_only(100.0, 3), quick_setup());
  REQUIRE(log.rounds.size() == 3);
  CHECK(log.rounds[0].decision == Decision::Continue);
  CHECK(log.rounds[2].decision == Decision::Failure);
  CHECK_FALSE(log.points[0].success);
  // Each round widens the true gap by the two steps.
  const double w0 = log.rounds[0].true_joined.hi - log.rounds[0].true_joined.lo;
  const double w2 = log.rounds[2].true_joined.hi - log.rounds[2].true_joined.lo;
  CHECK(w2 - w0 == doctest::Approx(2 * (0.25 + 0.2)));
}

TEST_CASE("monitor succeeds as soon as the detected gap reaches the threshold") {
  const auto g = fx::slab();
  const auto log = run_monitor(g, fx::cracks_user({{-4.0, 4.0}}), left_point_only(0.0, 3), quick_setup());
  REQUIRE_FALSE(log.rounds.empty());
  const auto& first = log.rounds.front();
  if (first.gap) {
    CHECK(first.decision == Decision::Success);
    CHECK(log.rounds.size() == 1);
    CHECK(log.points[0].success);
  } else {
    CHECK(first.decision == Decision::Continue);
  }
}

TEST_CASE("a pressure point on a crack aborts only that point") {
  const auto g = fx::slab();
  MonitorConfig m;
  m.pressure_points = {g.x_to_slab(-1.25), g.x_to_slab(2.0)};
  m.gap_threshold = 100.0;
  m.max_rounds = 1;
  const auto log = run_monitor(g, fx::start_stage(), m, quick_setup());
  REQUIRE(log.points.size() == 2);
  REQUIRE(log.rounds.size() == 2);
  CHECK(log.rounds[0].decision == Decision::Failure);
  CHECK(log.rounds[1].decision == Decision::Error);
  CHECK(log.rounds[1].message.find("crack") != std::string::npos);
}

TEST_CASE("noisy monitor runs are reproducible and logged") {
  const auto g = fx::slab();
  auto setup = quick_setup();
  setup.noise_level = 2e-4;
  setup.seed = 7;
  const auto dir = std::filesystem::temp_directory_path() / "kp_monitor_test";
  std::filesystem::remove_all(dir);
  const auto a = run_monitor(g, fx::cracks_user({{-4.0, 4.0}}), left_point_only(100.0, 2), setup, dir.string(), "h");
  const auto b = run_monitor(g, fx::cracks_user({{-4.0, 4.0}}), left_point_only(100.0, 2), setup);
  const auto ja = nlohmann::json::parse(a.to_json(g, "h", 7));
  const auto jb = nlohmann::json::parse(b.to_json(g, "h", 7));
  for (std::size_t r = 0; r < 2; ++r) {
    CHECK(ja["rounds"][r]["x_L"] == jb["rounds"][r]["x_L"]);
    CHECK(ja["rounds"][r]["x_R"] == jb["rounds"][r]["x_R"]);
    CHECK(ja["rounds"][r]["decision"] == jb["rounds"][r]["decision"]);
  }
  CHECK(ja["seed"] == 7);
  CHECK(ja["rounds"][1]["profile_csv"] == "point0/round1_profile.csv");
  CHECK(std::filesystem::exists(dir / "point0/round1_profile.csv"));
  CHECK(std::filesystem::exists(dir / "point0/round1_profile.svg"));
  CHECK(std::filesystem::exists(dir / "point0/round0_indicator.csv"));
  std::filesystem::remove_all(dir);
}
