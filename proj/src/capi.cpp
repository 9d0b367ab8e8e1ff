#include "kelvinprobe.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <sstream>
#include <string>

#include "kelvinprobe/asymptotics.hpp"
#include "kelvinprobe/config.hpp"
#include "kelvinprobe/error.hpp"
#include "kelvinprobe/io.hpp"
#include "kelvinprobe/monitor.hpp"
#include "kelvinprobe/probe.hpp"
#include "kelvinprobe/profiler.hpp"

struct kp_config {
  kp::RunConfig cfg;
};

struct kp_solution {
  kp::RunConfig cfg;
  kp::FieldSolution field;
  kp::CauchyData data;  // after noise
};

struct kp_profile {
  kp::RunConfig cfg;
  kp::Profile profile;
};

struct kp_oracle_report {
  kp::TipLimitReport report;
  std::string json;
  std::string text;
};

namespace {

thread_local std::string last_error;

kp_status to_status(kp::ErrorCode code) {
  switch (code) {
    case kp::ErrorCode::InvalidArgument: return KP_ERR_INVALID_ARGUMENT;
    case kp::ErrorCode::Config: return KP_ERR_CONFIG;
    case kp::ErrorCode::Io: return KP_ERR_IO;
    case kp::ErrorCode::Numerical: return KP_ERR_NUMERICAL;
    case kp::ErrorCode::Domain: return KP_ERR_DOMAIN;
    case kp::ErrorCode::Internal: return KP_ERR_INTERNAL;
  }
  return KP_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
kp_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return KP_OK;
  } catch (const kp::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return KP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return KP_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) kp::fail(kp::ErrorCode::InvalidArgument, std::string("null ") + what);
}

void copy_out(const std::string& s, char* buf, std::size_t cap, std::size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf || cap == 0) return;
  const std::size_t n = std::min(cap - 1, s.size());
  std::memcpy(buf, s.data(), n);
  buf[n] = '\0';
  if (s.size() + 1 > cap) kp::fail(kp::ErrorCode::InvalidArgument, "output buffer too small");
}

std::string preamble(const kp::RunConfig& cfg) {
  return kp::csv_preamble(cfg.hash(), static_cast<std::uint64_t>(cfg.noise.seed));
}

kp::ProbeConfig probe_at(const kp::RunConfig& cfg, const kp::SlabGeometry& geom, double xi1_user) {
  kp::ProbeConfig pc;
  pc.xi = kp::gamma_eps(geom.x_to_slab(xi1_user), cfg.probing_line(), geom);
  pc.tau_grid = cfg.tau_grid();
  pc.delta = cfg.probe.delta;
  pc.sup_s_bound = cfg.probe.sup_s_bound;
  return pc;
}

kp::IndicatorSamples evaluate_indicator(const kp_solution* sol, double xi1) {
  const auto& geom = sol->data.mesh->geom;
  const auto pc = probe_at(sol->cfg, geom, xi1);
  return pc.delta ? kp::indicator_partial(sol->data, pc) : kp::indicator(sol->data, pc);
}

}  // namespace

extern "C" {

const char* kp_status_name(kp_status status) {
  switch (status) {
    case KP_OK: return "ok";
    case KP_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case KP_ERR_CONFIG: return "config";
    case KP_ERR_IO: return "io";
    case KP_ERR_NUMERICAL: return "numerical";
    case KP_ERR_DOMAIN: return "domain";
    case KP_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* kp_last_error(void) { return last_error.c_str(); }

kp_status kp_config_default(kp_config** out) {
  return guarded([&] {
    require(out, "output pointer");
    *out = new kp_config{};
  });
}

kp_status kp_config_load(const char* path, kp_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "output pointer");
    *out = new kp_config{kp::parse_config_file(path)};
  });
}

kp_status kp_config_parse(const char* text, kp_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "output pointer");
    *out = new kp_config{kp::parse_config_text(text)};
  });
}

void kp_config_free(kp_config* cfg) { delete cfg; }

kp_status kp_config_set_seed(kp_config* cfg, uint64_t seed) {
  return guarded([&] {
    require(cfg, "config");
    if (seed > static_cast<uint64_t>(INT64_MAX)) kp::fail(kp::ErrorCode::InvalidArgument, "seed out of range");
    cfg->cfg.noise.seed = static_cast<std::int64_t>(seed);
  });
}

kp_status kp_config_set_noise(kp_config* cfg, int enabled, double level) {
  return guarded([&] {
    require(cfg, "config");
    auto next = cfg->cfg;
    next.noise.enabled = enabled != 0;
    if (level >= 0.0) next.noise.level = level;
    next.validate();
    cfg->cfg = next;
  });
}

kp_status kp_config_set_threads(kp_config* cfg, int threads) {
  return guarded([&] {
    require(cfg, "config");
    if (threads < 0) kp::fail(kp::ErrorCode::InvalidArgument, "threads must be non-negative");
    cfg->cfg.probe.threads = threads;
  });
}

kp_status kp_config_set_delta(kp_config* cfg, double delta) {
  return guarded([&] {
    require(cfg, "config");
    auto next = cfg->cfg;
    next.probe.delta = delta;
    next.validate();
    cfg->cfg = next;
  });
}

kp_status kp_config_set_tau_grid(kp_config* cfg, double lo, double hi, double step) {
  return guarded([&] {
    require(cfg, "config");
    auto next = cfg->cfg;
    next.probe.tau_min = lo;
    next.probe.tau_max = hi;
    next.probe.tau_step = step;
    next.validate();
    cfg->cfg = next;
  });
}

kp_status kp_config_set_run_dir(kp_config* cfg, const char* dir) {
  return guarded([&] {
    require(cfg, "config");
    require(dir, "directory");
    if (!*dir) kp::fail(kp::ErrorCode::InvalidArgument, "empty run directory");
    cfg->cfg.output.run_dir = dir;
  });
}

kp_status kp_config_get_seed(const kp_config* cfg, uint64_t* seed) {
  return guarded([&] {
    require(cfg, "config");
    require(seed, "output pointer");
    *seed = static_cast<uint64_t>(cfg->cfg.noise.seed);
  });
}

kp_status kp_config_hash(const kp_config* cfg, char* buf, size_t cap) {
  return guarded([&] {
    require(cfg, "config");
    copy_out(cfg->cfg.hash(), buf, cap, nullptr);
  });
}

kp_status kp_config_run_dir(const kp_config* cfg, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(cfg, "config");
    copy_out(cfg->cfg.output.run_dir, buf, cap, needed);
  });
}

kp_status kp_config_serialize(const kp_config* cfg, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(cfg, "config");
    copy_out(cfg->cfg.serialize(), buf, cap, needed);
  });
}

kp_status kp_config_true_tips(const kp_config* cfg, double* tips, size_t cap, size_t* count) {
  return guarded([&] {
    require(cfg, "config");
    require(count, "count pointer");
    const auto geom = cfg->cfg.slab();
    const auto t = cfg->cfg.crack_set().tips();
    *count = t.size();
    if (!tips) return;
    if (cap < t.size()) kp::fail(kp::ErrorCode::InvalidArgument, "output buffer too small");
    for (std::size_t k = 0; k < t.size(); ++k) tips[k] = geom.x_to_user(t[k]);
  });
}

kp_status kp_solve(const kp_config* cfg, kp_solution** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "output pointer");
    const auto& rc = cfg->cfg;
    const auto setup = rc.probe_setup();
    auto mesh = std::make_shared<const kp::Mesh>(
        kp::build_mesh(rc.slab(), rc.crack_set(), setup.crack_width, setup.target_elements));
    const auto g = setup.forcing ? setup.forcing(*mesh, 0, 0)
                                 : kp::neumann_sin3(*mesh, setup.corner_exclusion, setup.support);
    auto sol = std::make_unique<kp_solution>();
    sol->cfg = rc;
    sol->field = kp::solve_neumann(mesh, g);
    sol->data = setup.noise_level > 0.0 ? kp::add_noise(sol->field.cauchy, setup.noise_level, setup.seed)
                                        : sol->field.cauchy;
    *out = sol.release();
  });
}

void kp_solution_free(kp_solution* sol) { delete sol; }

kp_status kp_solution_info(const kp_solution* sol, size_t* elements, size_t* boundary_nodes,
                           double* relative_residual) {
  return guarded([&] {
    require(sol, "solution");
    if (elements) *elements = sol->data.mesh->element_count();
    if (boundary_nodes) *boundary_nodes = sol->data.mesh->boundary_nodes.size();
    if (relative_residual) *relative_residual = sol->field.relative_residual;
  });
}

kp_status kp_solution_write_mesh(const kp_solution* sol, const char* path) {
  return guarded([&] {
    require(sol, "solution");
    require(path, "path");
    std::ostringstream os;
    kp::write_mesh(os, *sol->data.mesh);
    kp::write_text_file(path, os.str());
  });
}

kp_status kp_solution_write_cauchy_csv(const kp_solution* sol, const char* path) {
  return guarded([&] {
    require(sol, "solution");
    require(path, "path");
    std::ostringstream os;
    kp::write_cauchy_csv(os, sol->data, preamble(sol->cfg));
    kp::write_text_file(path, os.str());
  });
}

kp_status kp_indicator(const kp_solution* sol, double xi1, size_t cap, double* tau, double* re, double* im,
                       int* valid, size_t* count) {
  return guarded([&] {
    require(sol, "solution");
    require(count, "count pointer");
    const auto s = evaluate_indicator(sol, xi1);
    *count = s.tau.size();
    if (!tau && !re && !im && !valid) return;
    if (cap < s.tau.size()) kp::fail(kp::ErrorCode::InvalidArgument, "output buffer too small");
    for (std::size_t k = 0; k < s.tau.size(); ++k) {
      if (tau) tau[k] = s.tau[k];
      if (re) re[k] = s.value[k].real();
      if (im) im[k] = s.value[k].imag();
      if (valid) valid[k] = s.valid[k];
    }
  });
}

kp_status kp_indicator_write_csv(const kp_solution* sol, double xi1, const char* path) {
  return guarded([&] {
    require(sol, "solution");
    require(path, "path");
    const auto s = evaluate_indicator(sol, xi1);
    std::string pre = preamble(sol->cfg);
    if (!s.trusted) pre += "# warning=" + s.warning + "\n";
    std::ostringstream os;
    kp::write_indicator_csv(os, s, pre);
    kp::write_text_file(path, os.str());
  });
}

kp_status kp_profile_sweep(const kp_solution* sol, kp_profile** out) {
  return guarded([&] {
    require(sol, "solution");
    require(out, "output pointer");
    const auto setup = sol->cfg.probe_setup();
    auto prof = std::make_unique<kp_profile>();
    prof->cfg = sol->cfg;
    prof->profile =
        kp::sweep_profile(sol->data, setup.line, setup.xi1_grid, setup.tau_grid, {setup.threads, setup.window});
    *out = prof.release();
  });
}

void kp_profile_free(kp_profile* prof) { delete prof; }

kp_status kp_profile_tips(const kp_profile* prof, double x_star, kp_tips* out) {
  return guarded([&] {
    require(prof, "profile");
    require(out, "output pointer");
    const auto geom = prof->cfg.slab();
    const auto t = kp::detect_tips(prof->profile, geom.x_to_slab(x_star), prof->cfg.probe.prominence_fraction);
    out->has_left = t.x_left.has_value();
    out->has_right = t.x_right.has_value();
    out->x_left = t.x_left ? geom.x_to_user(*t.x_left) : NAN;
    out->x_right = t.x_right ? geom.x_to_user(*t.x_right) : NAN;
  });
}

kp_status kp_profile_write_csv(const kp_profile* prof, const char* path) {
  return guarded([&] {
    require(prof, "profile");
    require(path, "path");
    std::ostringstream os;
    kp::write_profile_csv(os, prof->profile, prof->cfg.slab(), prof->cfg.probe.prominence_fraction,
                          preamble(prof->cfg));
    kp::write_text_file(path, os.str());
  });
}

kp_status kp_profile_write_svg(const kp_profile* prof, const char* path, const char* title) {
  return guarded([&] {
    require(prof, "profile");
    require(path, "path");
    const auto geom = prof->cfg.slab();
    std::vector<double> xs, tips, found;
    for (double x : prof->profile.xi1) xs.push_back(geom.x_to_user(x));
    for (double t : prof->cfg.crack_set().tips()) tips.push_back(geom.x_to_user(t));
    for (const auto& pk : kp::profile_maxima(prof->profile, prof->cfg.probe.prominence_fraction))
      found.push_back(geom.x_to_user(prof->profile.xi1[pk.first]));
    kp::write_text_file(path, kp::profile_svg(xs, prof->profile.phi, tips, found, title ? title : "profile"));
  });
}

kp_status kp_monitor_run(const kp_config* cfg, const char* run_dir, const char* log_path, int* all_success) {
  return guarded([&] {
    require(cfg, "config");
    const auto& rc = cfg->cfg;
    const std::string dir = run_dir ? run_dir : rc.output.run_dir;
    const auto log =
        kp::run_monitor(rc.slab(), rc.crack_set(), rc.monitor_config(), rc.probe_setup(), dir, rc.hash());
    const std::string path = log_path ? std::string(log_path) : dir + "/monitor.json";
    kp::write_text_file(path, log.to_json(rc.slab(), rc.hash(), static_cast<std::uint64_t>(rc.noise.seed)));
    if (all_success) {
      *all_success = 1;
      for (const auto& p : log.points) *all_success = *all_success && p.success;
    }
  });
}

kp_status kp_oracle_run(int n, double s0, double alpha, double eta_prime, const double* taus, size_t ntau,
                        kp_oracle_report** out) {
  return guarded([&] {
    require(out, "output pointer");
    kp::OracleCase c;
    c.n = n;
    c.s0 = s0;
    c.alpha = alpha;
    if (!std::isnan(eta_prime)) c.eta_prime = eta_prime;
    if (taus && ntau) c.tau_list.assign(taus, taus + ntau);
    auto rep = std::make_unique<kp_oracle_report>();
    rep->report = kp::verify_tip_limit(c);
    rep->json = rep->report.to_json();
    rep->text = rep->report.to_text();
    *out = rep.release();
  });
}

void kp_oracle_free(kp_oracle_report* rep) { delete rep; }

int kp_oracle_passed(const kp_oracle_report* rep) { return rep && rep->report.pass ? 1 : 0; }

const char* kp_oracle_json(const kp_oracle_report* rep) { return rep ? rep->json.c_str() : ""; }

const char* kp_oracle_text(const kp_oracle_report* rep) { return rep ? rep->text.c_str() : ""; }

kp_status kp_plot_profile_csv(const char* csv_path, const char* svg_path, const char* title, const double* true_tips,
                              size_t n_tips) {
  return guarded([&] {
    require(csv_path, "csv path");
    require(svg_path, "svg path");
    std::istringstream in(kp::read_text_file(csv_path));
    const auto csv = kp::read_profile_csv(in);
    std::vector<double> tips, found;
    if (true_tips) tips.assign(true_tips, true_tips + n_tips);
    for (std::size_t k = 0; k < csv.xi1_user.size(); ++k)
      if (csv.is_max[k]) found.push_back(csv.xi1_user[k]);
    kp::write_text_file(svg_path, kp::profile_svg(csv.xi1_user, csv.phi, tips, found, title ? title : "profile"));
  });
}

}  // extern "C"
