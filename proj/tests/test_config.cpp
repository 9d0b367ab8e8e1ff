#include <doctest.h>

#include <string>

#include "kelvinprobe/config.hpp"
#include "kelvinprobe/error.hpp"

using namespace kp;

namespace {

const std::string kReference = std::string(KP_SOURCE_DIR) + "/configs/reference.toml";

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("shipped reference file parses to the defaults") {
  const RunConfig cfg = parse_config_file(kReference);
  CHECK(cfg.probe.tau_step == 0.1);
  CHECK(cfg.tau_grid().size() == 41);
  CHECK(cfg.xi1_grid().size() == 161);
  CHECK(cfg.xi1_grid().front() == doctest::Approx(0.0));
  CHECK(cfg == parse_config_text(""));
  CHECK(cfg == RunConfig{});
}

TEST_CASE("serialize and parse round trip") {
  RunConfig cfg;
  cfg.geometry.a = 6.5;
  cfg.cracks.intervals = {{-4.0, -2.0}, {-1.0, 1.0}, {2.0, 2.5}};
  cfg.probe.delta = 0.15;
  cfg.probe.sup_s_bound = 3.0;
  cfg.probe.tau_window_lo = 1.5;
  cfg.noise.enabled = true;
  cfg.noise.seed = 42;
  cfg.monitor.nuggets = {Interval{-1.5, -1.0}, std::nullopt};
  cfg.output.run_dir = "out dir/\"quoted\"";
  const std::string text = cfg.serialize();
  const RunConfig back = parse_config_text(text);
  CHECK(back == cfg);
  CHECK(back.serialize() == text);
  CHECK(back.hash() == cfg.hash());
  CHECK(cfg.hash().size() == 16);
  CHECK(cfg.hash() != RunConfig{}.hash());
}

TEST_CASE("semantic errors name the field") {
  CHECK(error_of("[geometry]\nc = 0.4\n").find("geometry.c") != std::string::npos);
  CHECK(error_of("[cracks]\nwidth = 0.3\n").find("cracks.width") != std::string::npos);
  CHECK(error_of("[probe]\ntau_step = -1\n").find("probe.tau_step") != std::string::npos);
  CHECK(error_of("[monitor]\nnuggets = [[-1.5, -1.0]]\n").find("monitor.nuggets") != std::string::npos);
}

TEST_CASE("syntax errors carry the line") {
  CHECK(error_of("[geometry]\na = \n").find("line 2") != std::string::npos);
  CHECK(error_of("\n\n[nowhere]\n").find("line 3") != std::string::npos);
  CHECK(error_of("[geometry]\nbogus = 1\n").find("line 2") != std::string::npos);
  CHECK(error_of("[geometry]\na = 8\na = 9\n").find("line 3") != std::string::npos);
  CHECK(error_of("[probe]\nreference = \"open\n").find("line 2") != std::string::npos);
}

TEST_CASE("multi-line arrays, comments and noise line") {
  const RunConfig cfg = parse_config_text(
      "[cracks]  # trailing comment\n"
      "intervals = [\n"
      "  [-4.0, -2.0],  # first\n"
      "  [0.0, 4.0],\n"
      "]\n"
      "[noise]\nenabled = true\n");
  REQUIRE(cfg.cracks.intervals.size() == 2);
  CHECK(cfg.cracks.intervals[1].hi == 4.0);
  CHECK(cfg.probing_line().min_standoff == 0.75);
  CHECK(cfg.probe_setup().noise_level == 2e-4);
}

TEST_CASE("frames: monitor and crack blocks convert to the slab frame") {
  const RunConfig cfg;
  const auto m = cfg.monitor_config();
  CHECK(m.pressure_points[0] == doctest::Approx(2.75));
  REQUIRE(m.nuggets[1]);
  CHECK(m.nuggets[1]->lo == doctest::Approx(5.0));
  const auto cs = cfg.crack_set();
  CHECK(cs.intervals()[0] == Interval{0.0, 2.5});
  CHECK(cs.intervals()[1] == Interval{3.0, 8.0});
}

TEST_CASE("uniform grid includes the end point") {
  const auto g = uniform_grid(1.0, 5.0, 0.1);
  CHECK(g.size() == 41);
  CHECK(g.back() == doctest::Approx(5.0));
  CHECK(uniform_grid(0.0, 1.0, 0.3).size() == 4);
  CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 0.0), Error);
}
