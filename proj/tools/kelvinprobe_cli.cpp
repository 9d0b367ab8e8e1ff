// Command-line front end. Talks to the library only through kelvinprobe.h.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kelvinprobe.h"

namespace {

// Carries a library status out of a subcommand.
struct Failure {
  kp_status status;
  std::string message;
};

void check(kp_status s) {
  if (s != KP_OK) throw Failure{s, kp_last_error()};
}

void report_error(const std::string& kind, int code, const std::string& message) {
  nlohmann::json j{{"error", {{"kind", kind}, {"code", code}, {"message", message}}}};
  std::cerr << j.dump() << std::endl;
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};
using Config = Handle<kp_config, kp_config_free>;
using Solution = Handle<kp_solution, kp_solution_free>;
using Profile = Handle<kp_profile, kp_profile_free>;
using Oracle = Handle<kp_oracle_report, kp_oracle_free>;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise;
  bool noisy = false;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "TOML run configuration (defaults when omitted)");
  cmd->add_option("--out", c.out, "output directory (config run_dir by default)");
  cmd->add_option("--seed", c.seed, "seed for all stochastic behaviour");
  cmd->add_option("--noise", c.noise, "relative noise level on the trace; 0 disables");
  cmd->add_flag("--noisy", c.noisy, "enable noise at the configured level");
  cmd->add_option("--threads", c.threads, "worker threads for profile sweeps (0: all cores)")->check(CLI::NonNegativeNumber);
}

void load(Config& cfg, const Common& c) {
  if (c.config.empty()) check(kp_config_default(cfg.out()));
  else check(kp_config_load(c.config.c_str(), cfg.out()));
  if (c.seed) check(kp_config_set_seed(cfg.get(), *c.seed));
  if (c.noise) check(kp_config_set_noise(cfg.get(), *c.noise > 0.0, *c.noise));
  else if (c.noisy) check(kp_config_set_noise(cfg.get(), 1, -1.0));
  if (c.threads) check(kp_config_set_threads(cfg.get(), *c.threads));
}

std::string out_dir(const Config& cfg, const Common& c) {
  if (!c.out.empty()) return c.out;
  std::size_t needed = 0;
  check(kp_config_run_dir(cfg.get(), nullptr, 0, &needed));
  std::string buf(needed, '\0');
  check(kp_config_run_dir(cfg.get(), buf.data(), buf.size(), &needed));
  buf.resize(needed - 1);
  return buf;
}

// "lo:hi:step"
std::optional<std::vector<double>> parse_triplet(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ':')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  if (v.size() != 3) return std::nullopt;
  return v;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crack detection in a welded slab from one set of boundary measurements"};
  app.require_subcommand(1);

  Common solve_opts, probe_opts, monitor_opts;

  auto* solve = app.add_subcommand("solve", "mesh and solve the forward problem; write mesh and Cauchy data");
  add_common(solve, solve_opts);

  auto* probe = app.add_subcommand("probe", "indicator at one probe point, or the full slope profile");
  add_common(probe, probe_opts);
  std::optional<double> xi1, delta, x_star;
  std::string tau_text;
  probe->add_option("--xi1", xi1, "probe abscissa (user frame); omit for a full profile sweep");
  probe->add_option("--tau", tau_text, "tau grid as lo:hi:step");
  probe->add_option("--delta", delta, "partial-boundary cutoff: keep x2 > c - delta");
  probe->add_option("--x-star", x_star, "pressure point for reporting the flanking maxima");

  auto* monitor = app.add_subcommand("monitor", "run the weld monitoring loop");
  add_common(monitor, monitor_opts);

  auto* oracle = app.add_subcommand("oracle", "check the tip-integral limit against quadrature");
  int n = 1;
  double s0 = 1.0, alpha = 0.0;
  std::optional<double> eta;
  std::vector<double> taus{8.0, 16.0, 32.0, 64.0, 100.0};
  std::string oracle_out;
  oracle->add_option("--n", n, "order n >= 1");
  oracle->add_option("--s0", s0, "disc radius s0 > 0");
  oracle->add_option("--alpha", alpha, "angle in (-pi/2, pi/2)");
  oracle->add_option("--eta", eta, "upper integration limit");
  oracle->add_option("--tau", taus, "increasing tau values")->delimiter(',');
  oracle->add_option("--out", oracle_out, "existing directory for oracle.json");

  auto* plot = app.add_subcommand("plot", "re-render a profile CSV as SVG");
  std::string csv_path, svg_path, plot_config, title = "profile";
  plot->add_option("--csv", csv_path, "profile CSV")->required();
  plot->add_option("--out", svg_path, "SVG path (CSV path with .svg by default)");
  plot->add_option("--config", plot_config, "config whose crack tips are drawn");
  plot->add_option("--title", title, "plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.get_exit_code(), e.what());
    return 2;
  }

  try {
    if (*solve) {
      Config cfg;
      load(cfg, solve_opts);
      const std::string dir = out_dir(cfg, solve_opts);
      Solution sol;
      check(kp_solve(cfg.get(), sol.out()));
      check(kp_solution_write_mesh(sol.get(), (dir + "/mesh.txt").c_str()));
      check(kp_solution_write_cauchy_csv(sol.get(), (dir + "/cauchy.csv").c_str()));
      std::size_t elements = 0, bnodes = 0;
      double residual = 0.0;
      check(kp_solution_info(sol.get(), &elements, &bnodes, &residual));
      std::cout << "elements " << elements << ", boundary nodes " << bnodes << ", relative residual " << residual
                << "\nwrote " << dir << "/mesh.txt and " << dir << "/cauchy.csv\n";
    } else if (*probe) {
      Config cfg;
      load(cfg, probe_opts);
      if (!tau_text.empty()) {
        const auto t = parse_triplet(tau_text);
        if (!t) throw Failure{KP_ERR_INVALID_ARGUMENT, "--tau expects lo:hi:step"};
        check(kp_config_set_tau_grid(cfg.get(), (*t)[0], (*t)[1], (*t)[2]));
      }
      if (delta) check(kp_config_set_delta(cfg.get(), *delta));
      const std::string dir = out_dir(cfg, probe_opts);
      Solution sol;
      check(kp_solve(cfg.get(), sol.out()));
      if (xi1) {
        const std::string path = dir + "/indicator.csv";
        check(kp_indicator_write_csv(sol.get(), *xi1, path.c_str()));
        std::size_t count = 0;
        check(kp_indicator(sol.get(), *xi1, 0, nullptr, nullptr, nullptr, nullptr, &count));
        std::cout << "wrote " << path << " (" << count << " tau rows)\n";
      } else {
        Profile prof;
        check(kp_profile_sweep(sol.get(), prof.out()));
        check(kp_profile_write_csv(prof.get(), (dir + "/profile.csv").c_str()));
        check(kp_profile_write_svg(prof.get(), (dir + "/profile.svg").c_str(), "slope profile"));
        std::cout << "wrote " << dir << "/profile.csv and " << dir << "/profile.svg\n";
        if (x_star) {
          kp_tips tips{};
          check(kp_profile_tips(prof.get(), *x_star, &tips));
          std::cout << "maxima around " << *x_star << ": (" << (tips.has_left ? fmt(tips.x_left) : "-") << ", "
                    << (tips.has_right ? fmt(tips.x_right) : "-") << ")\n";
        }
      }
    } else if (*monitor) {
      Config cfg;
      load(cfg, monitor_opts);
      const std::string dir = out_dir(cfg, monitor_opts);
      const std::string log_path = dir + "/monitor.json";
      int ok = 0;
      check(kp_monitor_run(cfg.get(), dir.c_str(), log_path.c_str(), &ok));
      std::cout << "wrote " << log_path << "\n";
      std::cout << (ok ? "all pressure points reached the gap threshold\n"
                       : "some pressure points did not reach the gap threshold\n");
    } else if (*oracle) {
      Oracle rep;
      check(kp_oracle_run(n, s0, alpha, eta ? *eta : NAN, taus.data(), taus.size(), rep.out()));
      std::cout << kp_oracle_text(rep.get());
      if (!oracle_out.empty()) {
        std::FILE* f = std::fopen((oracle_out + "/oracle.json").c_str(), "w");
        if (!f) throw Failure{KP_ERR_IO, "cannot write " + oracle_out + "/oracle.json"};
        std::fputs(kp_oracle_json(rep.get()), f);
        std::fclose(f);
      }
      return kp_oracle_passed(rep.get()) ? 0 : 3;
    } else if (*plot) {
      std::vector<double> tips;
      if (!plot_config.empty()) {
        Config cfg;
        check(kp_config_load(plot_config.c_str(), cfg.out()));
        std::size_t count = 0;
        check(kp_config_true_tips(cfg.get(), nullptr, 0, &count));
        tips.resize(count);
        check(kp_config_true_tips(cfg.get(), tips.data(), tips.size(), &count));
      }
      if (svg_path.empty()) {
        svg_path = csv_path;
        const auto dot = svg_path.rfind(".csv");
        if (dot != std::string::npos) svg_path.erase(dot);
        svg_path += ".svg";
      }
      check(kp_plot_profile_csv(csv_path.c_str(), svg_path.c_str(), title.c_str(), tips.data(), tips.size()));
      std::cout << "wrote " << svg_path << "\n";
    }
  } catch (const Failure& f) {
    report_error(kp_status_name(f.status), static_cast<int>(f.status), f.message);
    return 1;
  }
  return 0;
}
