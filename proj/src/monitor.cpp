#include "kelvinprobe/monitor.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "kelvinprobe/error.hpp"
#include "kelvinprobe/io.hpp"
#include "kelvinprobe/probe.hpp"

namespace kp {

namespace {

// Steps like 0.2 accumulate binary dust; snapping keeps crack ends on the
// decimal grid the mesh generator aligns to.
double snap(double x) { return std::round(x * 1e9) / 1e9; }

// User-frame abscissa for the log, rounded so the frame offset leaves no dust.
double user_x(double x, const SlabGeometry& geom) { return snap(geom.x_to_user(x)); }

nlohmann::json optional_json(const std::optional<double>& v, const SlabGeometry& geom) {
  if (!v) return nullptr;
  return user_x(*v, geom);
}

}  // namespace

CrackSet subtract_interval(const CrackSet& cracks, Interval span) {
  if (!(span.lo <= span.hi)) fail(ErrorCode::InvalidArgument, "inverted interval");
  std::vector<Interval> kept;
  for (const auto& iv : cracks.intervals()) {
    if (iv.hi <= span.lo || iv.lo >= span.hi) {
      kept.push_back(iv);
      continue;
    }
    if (iv.lo < span.lo) kept.push_back({iv.lo, span.lo});
    if (iv.hi > span.hi) kept.push_back({span.hi, iv.hi});
  }
  return CrackSet::create(std::move(kept), cracks.line_height(), cracks.slab_width());
}

Interval joined_interval_at(const CrackSet& cracks, double x_star) {
  if (cracks.in_crack(x_star)) fail(ErrorCode::Domain, "pressure point lies on a crack (weld point not joined)");
  for (const auto& w : cracks.joined())
    if (w.contains(x_star)) return w;
  fail(ErrorCode::Domain, "pressure point lies outside the slab");
}

CrackSet evolve_gap(const CrackSet& cracks, double x_star, double left_step, double right_step) {
  if (!(left_step >= 0.0) || !(right_step >= 0.0)) fail(ErrorCode::InvalidArgument, "gap steps must be non-negative");
  const Interval w = joined_interval_at(cracks, x_star);
  if (left_step == 0.0 && right_step == 0.0) return cracks;
  const Interval grown{std::max(0.0, snap(w.lo - left_step)), std::min(cracks.slab_width(), snap(w.hi + right_step))};
  return subtract_interval(cracks, grown);
}

void MonitorConfig::validate(const SlabGeometry& geom) const {
  if (pressure_points.empty()) fail(ErrorCode::Config, "monitor needs at least one pressure point");
  for (double x : pressure_points)
    if (!(x > 0.0 && x < geom.a())) fail(ErrorCode::Config, "pressure point outside the slab");
  if (!(gap_threshold >= 0.0)) fail(ErrorCode::Config, "gap threshold must be non-negative");
  if (!(left_step >= 0.0) || !(right_step >= 0.0)) fail(ErrorCode::Config, "gap steps must be non-negative");
  if (max_rounds == 0) fail(ErrorCode::Config, "max_rounds must be at least 1");
  if (!nuggets.empty() && nuggets.size() != pressure_points.size())
    fail(ErrorCode::Config, "one nugget entry per pressure point is required");
  for (std::size_t k = 0; k < nuggets.size(); ++k)
    if (nuggets[k] && !(nuggets[k]->lo < pressure_points[k] && pressure_points[k] < nuggets[k]->hi))
      fail(ErrorCode::Config, "nugget must contain its pressure point");
}

std::uint64_t round_seed(std::uint64_t seed, std::size_t point, std::size_t round) {
  return seed + 1000u * static_cast<std::uint64_t>(point) + static_cast<std::uint64_t>(round);
}

RoundResult probe_round(const SlabGeometry& geom, const CrackSet& cracks, double x_star, const ProbeSetup& setup,
                        std::size_t point, std::size_t round) {
  RoundResult out;
  auto mesh = std::make_shared<const Mesh>(build_mesh(geom, cracks, setup.crack_width, setup.target_elements));
  out.elements = mesh->element_count();
  const NeumannData g = setup.forcing ? setup.forcing(*mesh, point, round)
                                      : neumann_sin3(*mesh, setup.corner_exclusion, setup.support);
  out.cauchy = solve_neumann(mesh, g).cauchy;
  if (setup.noise_level > 0.0)
    out.cauchy = add_noise(out.cauchy, setup.noise_level, round_seed(setup.seed, point, round));
  out.profile = sweep_profile(out.cauchy, setup.line, setup.xi1_grid, setup.tau_grid, {setup.threads, setup.window});
  out.tips = detect_tips(out.profile, x_star, setup.prominence_fraction);
  return out;
}

const char* decision_name(Decision d) {
  switch (d) {
    case Decision::Continue: return "continue";
    case Decision::Success: return "success";
    case Decision::Failure: return "failure";
    case Decision::Error: return "error";
  }
  return "unknown";
}

MonitorLog run_monitor(const SlabGeometry& geom, const CrackSet& initial, const MonitorConfig& cfg,
                       const ProbeSetup& setup, const std::string& run_dir, const std::string& config_hash) {
  cfg.validate(geom);
  MonitorLog log;
  CrackSet cracks = initial;
  const std::string preamble = csv_preamble(config_hash, setup.seed);

  for (std::size_t p = 0; p < cfg.pressure_points.size(); ++p) {
    const double x_star = cfg.pressure_points[p];
    PointSummary summary{x_star, false, 0};
    try {
      if (p < cfg.nuggets.size() && cfg.nuggets[p]) cracks = subtract_interval(cracks, *cfg.nuggets[p]);
      joined_interval_at(cracks, x_star);
    } catch (const Error& e) {
      RoundRecord rec;
      rec.point = p;
      rec.x_star = x_star;
      rec.cracks = cracks;
      rec.decision = Decision::Error;
      rec.message = e.what();
      log.rounds.push_back(rec);
      log.points.push_back(summary);
      continue;
    }

    for (std::size_t r = 0; r < cfg.max_rounds; ++r) {
      if (r > 0) cracks = evolve_gap(cracks, x_star, cfg.left_step, cfg.right_step);
      RoundRecord rec;
      rec.point = p;
      rec.x_star = x_star;
      rec.round = r;
      rec.cracks = cracks;
      rec.true_joined = joined_interval_at(cracks, x_star);
      ++summary.rounds;
      try {
        const RoundResult res = probe_round(geom, cracks, x_star, setup, p, r);
        rec.tips = res.tips;
        rec.gap = res.tips.gap();
        if (!rec.tips.x_left || !rec.tips.x_right)
          rec.message = std::string("no qualifying maximum on the ") + (rec.tips.x_left ? "right" : "left") + " side";
        if (rec.gap && *rec.gap >= cfg.gap_threshold) {
          rec.decision = Decision::Success;
          summary.success = true;
        } else {
          rec.decision = r + 1 == cfg.max_rounds ? Decision::Failure : Decision::Continue;
        }

        if (!run_dir.empty()) {
          const std::string stem = "point" + std::to_string(p) + "/round" + std::to_string(r);
          rec.profile_csv = stem + "_profile.csv";
          rec.profile_svg = stem + "_profile.svg";
          rec.indicator_csv = stem + "_indicator.csv";
          std::ostringstream csv;
          write_profile_csv(csv, res.profile, geom, setup.prominence_fraction, preamble);
          write_text_file(run_dir + "/" + rec.profile_csv, csv.str());

          std::vector<double> xs, true_tips, found;
          for (double x : res.profile.xi1) xs.push_back(geom.x_to_user(x));
          for (double t : cracks.tips()) true_tips.push_back(geom.x_to_user(t));
          for (const auto& t : {rec.tips.x_left, rec.tips.x_right})
            if (t) found.push_back(geom.x_to_user(*t));
          std::ostringstream title;
          title << "x* = " << geom.x_to_user(x_star) << ", round " << r;
          write_text_file(run_dir + "/" + rec.profile_svg,
                          profile_svg(xs, res.profile.phi, true_tips, found, title.str()));

          ProbeConfig pc;
          pc.xi = gamma_eps(x_star, setup.line, geom);
          pc.tau_grid = setup.tau_grid;
          std::ostringstream ind;
          write_indicator_csv(ind, indicator(res.cauchy, pc), preamble);
          write_text_file(run_dir + "/" + rec.indicator_csv, ind.str());
        }
      } catch (const Error& e) {
        rec.decision = Decision::Error;
        rec.message = e.what();
        log.rounds.push_back(rec);
        break;
      }
      log.rounds.push_back(rec);
      if (rec.decision == Decision::Success) break;
    }
    log.points.push_back(summary);
  }
  log.final_cracks = cracks;
  return log;
}

std::string MonitorLog::to_json(const SlabGeometry& geom, const std::string& config_hash, std::uint64_t seed) const {
  using nlohmann::json;
  auto intervals_json = [&](const CrackSet& cs) {
    json arr = json::array();
    for (const auto& iv : cs.intervals()) arr.push_back({user_x(iv.lo, geom), user_x(iv.hi, geom)});
    return arr;
  };
  json rounds_json = json::array();
  for (const auto& r : rounds) {
    json j{{"point", r.point},
           {"x_star", user_x(r.x_star, geom)},
           {"round", r.round},
           {"cracks", intervals_json(r.cracks)},
           {"true_joined", {user_x(r.true_joined.lo, geom), user_x(r.true_joined.hi, geom)}},
           {"x_L", optional_json(r.tips.x_left, geom)},
           {"x_R", optional_json(r.tips.x_right, geom)},
           {"prominence_L", r.tips.prominence_left},
           {"prominence_R", r.tips.prominence_right},
           {"gap", r.gap ? json(snap(*r.gap)) : json(nullptr)},
           {"decision", decision_name(r.decision)},
           {"message", r.message},
           {"profile_csv", r.profile_csv},
           {"profile_svg", r.profile_svg},
           {"indicator_csv", r.indicator_csv}};
    rounds_json.push_back(std::move(j));
  }
  json points_json = json::array();
  for (const auto& p : points)
    points_json.push_back({{"x_star", user_x(p.x_star, geom)}, {"success", p.success}, {"rounds", p.rounds}});
  json root{{"config_hash", config_hash},
            {"seed", seed},
            {"rounds", rounds_json},
            {"points", points_json},
            {"final_cracks", intervals_json(final_cracks)}};
  return root.dump(2) + "\n";
}

}  // namespace kp
