#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "kelvinprobe/asymptotics.hpp"
#include "kelvinprobe/error.hpp"

using namespace kp;

namespace {

// Composite Simpson in t = sqrt(r); independent of the library's rules.
cplx simpson_tau0(int n, double s0, cplx zeta, double eta, int panels) {
  auto f = [&](double t) {
    const double r = t * t;
    const cplx d = r - s0 * zeta;
    return 2.0 * t * std::pow(r, (2.0 * n - 1.0) / 2.0) / (d * d);
  };
  const double T = std::sqrt(eta), h = T / panels;
  cplx sum = f(0.0) + f(T);
  for (int k = 1; k < panels; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(k * h);
  return sum * h / 3.0;
}

}  // namespace

TEST_CASE("tau = 0 integral agrees with an independent rule") {
  OracleCase c;
  const auto q = tip_integral_raw(1, 1.0, c.zbar(), c.eta(), 0.0);
  const cplx ref = simpson_tau0(1, 1.0, c.zbar(), c.eta(), 4000);
  CHECK(std::abs(q.value - ref) < 1e-10);
  CHECK(c.zbar() == cplx(-1.0, -1.0));
}

TEST_CASE("empty interval gives zero") {
  CHECK(tip_integral_raw(2, 1.0, cplx(-1.0, -1.0), 0.0, 10.0).value == cplx(0.0, 0.0));
  OracleCase c;
  c.eta_prime = 0.0;
  CHECK(scaled_tip_integral(c, 8.0).value == cplx(0.0, 0.0));
}

TEST_CASE("conjugation symmetry") {
  const OracleCase c{1, 1.0, 0.6};
  for (double tau : {0.5, 3.0, 12.0}) {
    const cplx a = tip_integral_raw(1, 1.0, c.zbar(), c.eta(), tau).value;
    const cplx b = tip_integral_raw(1, 1.0, std::conj(c.zbar()), c.eta(), -tau).value;
    CHECK(std::abs(std::conj(a) - b) <= 1e-14 * std::abs(a));
  }
}

TEST_CASE("closed-form limit") {
  const OracleCase c;
  const cplx L = tip_limit_closed_form(c);
  CHECK(std::abs(L) == doctest::Approx(std::sqrt(2.0) * std::tgamma(1.5)).epsilon(1e-14));
  CHECK(std::abs(L) == doctest::Approx(1.25331).epsilon(1e-5));
  for (int n : {1, 2, 3}) {
    for (double alpha : {0.0, 0.8, -0.8, 1.4}) {
      const OracleCase k{n, 1.0, alpha};
      const double want = (2 * n - 1) * alpha / 2.0 - std::numbers::pi / 2.0;
      const double diff = std::remainder(std::arg(tip_limit_closed_form(k)) - want, 2.0 * std::numbers::pi);
      CHECK(std::abs(diff) < 1e-14);
    }
    const OracleCase one{n, 1.0, 0.3}, two{n, 2.0, 0.3};
    CHECK(std::abs(tip_limit_closed_form(two)) / std::abs(tip_limit_closed_form(one)) ==
          doctest::Approx(std::pow(2.0, 2 * n - 1)).epsilon(1e-13));
  }
}

TEST_CASE("adaptive and fixed quadrature agree") {
  const double cases[][3] = {{1, 1, 0}, {2, 1, 0}, {1, 1, 0.8}, {1, 2, -0.8}, {1, 1, 1.4}, {1, 1, -1.4}};
  for (const auto& cs : cases) {
    const OracleCase c{static_cast<int>(cs[0]), cs[1], cs[2]};
    for (double tau : c.tau_list) {
      const auto a = scaled_tip_integral(c, tau);
      const auto f = scaled_tip_integral_fixed(c, tau);
      CHECK(std::abs(a.value - f.value) < 1e-10);
      // The unscaled integral is held to 1e-12 internally; the reported
      // estimate carries the tau-dependent prefactor on top of that.
      CHECK(a.error_estimate < 1e-8 * std::max(1.0, std::abs(a.value)));
    }
  }
}

TEST_CASE("base case converges to the limit") {
  const auto rep = verify_tip_limit(OracleCase{});
  CHECK(rep.pass);
  CHECK(rep.monotone);
  CHECK(rep.rows.back().ratio_error < 0.02);
  CHECK(rep.fitted_rate < 0.0);

  const auto j = nlohmann::json::parse(rep.to_json());
  CHECK(j["pass"] == true);
  CHECK(j["rows"].size() == 5);
  CHECK(rep.to_text().find("PASS") != std::string::npos);

  const OracleCase edge{1, 1.0, 1.4};
  CHECK(verify_tip_limit(edge).slow);
}

TEST_CASE("geometric tau list: error non-increasing after the first two entries") {
  OracleCase c;
  c.tau_list = {1, 2, 4, 8, 16, 32, 64, 128};
  const auto rep = verify_tip_limit(c);
  for (std::size_t k = 3; k < rep.rows.size(); ++k) CHECK(rep.rows[k].ratio_error <= rep.rows[k - 1].ratio_error);
}

TEST_CASE("invalid oracle cases are rejected") {
  CHECK_THROWS_AS(verify_tip_limit(OracleCase{0, 1.0, 0.0}), Error);
  CHECK_THROWS_AS(verify_tip_limit(OracleCase{1, -1.0, 0.0}), Error);
  CHECK_THROWS_AS(verify_tip_limit(OracleCase{1, 1.0, 1.6}), Error);
  OracleCase c;
  c.tau_list = {8, 4};
  CHECK_THROWS_AS(verify_tip_limit(c), Error);
}

TEST_CASE("decay dichotomy") {
  const auto rep = verify_decay_dichotomy(1.0, {0.0, 0.0}, {{0.0, -1.0}, {2.0, 0.0}});
  CHECK(rep.points[0].rate == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rep.points[0].inside);
  CHECK(rep.points[1].rate == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK_FALSE(rep.points[1].inside);
  CHECK(rep.all_agree);
  CHECK_THROWS_AS(verify_decay_dichotomy(1.0, {0.0, 0.0}, {{1.0, -1.0}}), Error);
  CHECK_THROWS_AS(verify_decay_dichotomy(1.0, {0.0, 0.0}, {{0.0, 0.0}}), Error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<Vec2> pts;
  while (pts.size() < 20) {
    const Vec2 p{u(rng), u(rng)};
    if (std::abs(std::hypot(p.x, p.y + 1.0) - 1.0) > 1e-6) pts.push_back(p);
  }
  CHECK(verify_decay_dichotomy(1.0, {0.0, 0.0}, pts).all_agree);
}
