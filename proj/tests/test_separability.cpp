#include <cmath>
#include <vector>

#include "cusplab/errors.hpp"
#include "cusplab/separability.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cusplab;
using testsupport::rel;

namespace {
PotentialModel power(double g, double a) {
  PotentialModel m;
  m.terms.push_back({g, a});
  return m;
}
PotentialModel yukawa(double g, double range) {
  PotentialModel m;
  m.yukawa = YukawaTerm{g, range};
  return m;
}

// Pair (0, 1) at separation r along `axis` about the origin, spectators at `others`.
ParticleConfig three_body(double mi, double mj, double mk, double r, Vec3 axis, Vec3 spectator,
                          const PotentialModel& vik, const PotentialModel& vjk) {
  ParticleConfig c;
  c.masses = {mi, mj, mk};
  const double M = mi + mj, n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  Vec3 a{}, b{};
  for (int d = 0; d < 3; ++d) {
    a[d] = mj / M * r * axis[d] / n;
    b[d] = -mi / M * r * axis[d] / n;
  }
  c.positions = {a, b, spectator};
  c.pair_potentials[{0, 1}] = power(1.0, 1.0);
  c.pair_potentials[{0, 2}] = vik;
  c.pair_potentials[{1, 2}] = vjk;
  return c;
}
}  // namespace

TEST_CASE("separable potential examples") {
  const PotentialModel c = power(-1.0, 1.0);
  const ParticleConfig cfg = three_body(1, 1, 1, 0.3, {1, 0, 0}, {10, 0, 0}, c, c);
  CHECK(separable_potential(cfg) == doctest::Approx(-0.2).epsilon(1e-15));
  // Exact: -1/(10 - 0.15) - 1/(10 + 0.15).
  CHECK(rel(full_potential(cfg), -1 / 9.85 - 1 / 10.15) < 1e-15);
  ParticleConfig at0 = cfg;
  at0.positions[0] = at0.positions[1] = Vec3{0, 0, 0};
  CHECK(full_potential(at0) == separable_potential(at0));
  const SeparabilityReport rep = separability_report(cfg);
  CHECK(rep.residual == rep.V_full - rep.V_sp);
  CHECK(rep.r_rho == doctest::Approx(10.0));
}

TEST_CASE("config validation") {
  const PotentialModel c = power(1.0, 1.0);
  ParticleConfig cfg = three_body(1, 1, 1, 0.3, {1, 0, 0}, {10, 0, 0}, c, c);
  ParticleConfig two = cfg;
  two.masses.pop_back();
  two.positions.pop_back();
  CHECK_THROWS_AS(two.validate(), InvalidModel);
  ParticleConfig neg = cfg;
  neg.masses[2] = 0.0;
  CHECK_THROWS_AS(neg.validate(), InvalidModel);
  ParticleConfig same = cfg;
  same.positions[2] = same.positions[0];
  CHECK_THROWS_AS(full_potential(same), CoincidentParticles);
  ParticleConfig missing = cfg;
  missing.pair_potentials.erase({1, 2});
  CHECK_THROWS_AS(full_potential(missing), InvalidModel);
  CHECK(cfg.potential(2, 0).terms[0].strength == 1.0);
}

TEST_CASE("expansion term examples") {
  const PotentialModel c = power(1.0, 1.0);
  CHECK(expansion_terms(c, c, 1, 1, 10, 0.1, 0.3).first == 0.0);
  CHECK(std::fabs(expansion_terms(c, c, 1, 2, 10, 0.1, 0.0).first + 3.3333e-4) < 1e-8);
  CHECK(std::fabs(expansion_terms(c, c, 1, 1, 10, 0.1, 0.0).second - 5.0e-6) < 1e-12);
  CHECK(expansion_terms(c, c, 1, 1, 10, 0.1, 0.0).zeroth == doctest::Approx(0.2));
  CHECK_THROWS_AS(expansion_terms(c, c, 1, 1, 1.0, 2.0, 0.0), DomainError);
}

TEST_CASE("small parameter examples") {
  CHECK(small_parameter(power(1.0, 6.0), 0.01, 1.0) == doctest::Approx(0.06));
  CHECK(small_parameter(yukawa(1.0, 1.0), 0.1, 10.0) == doctest::Approx(0.11));
  CHECK(small_parameter(power(1.0, 1.0), 0.05, 1.0) == doctest::Approx(0.05));
  PotentialModel zero = power(1.0, 1.0);
  zero.terms.push_back({-10.0, 2.0});  // v(10) = 0.1 - 10 / 100 = 0
  CHECK_THROWS_AS(small_parameter(zero, 0.1, 10.0), DomainError);
}

TEST_CASE("property: expansion against brute force, general masses and potentials") {
  testsupport::Gen g(61);
  for (int t = 0; t < 200; ++t) {
    const double mi = g.log_uniform(0.2, 5), mj = g.log_uniform(0.2, 5);
    const PotentialModel vik = power(g.uniform(-2, 2), g.uniform(-1, 6));
    const PotentialModel vjk = g.sign() > 0 ? yukawa(g.uniform(-2, 2), g.log_uniform(0.5, 5))
                                            : power(g.uniform(-2, 2), g.uniform(-1, 6));
    const double R = g.log_uniform(2, 20), gamma = g.uniform(0, 3.14159);
    const Vec3 axis{std::cos(gamma), std::sin(gamma), 0};
    std::vector<double> rs, res;
    for (double x = 1e-3; x <= 1.0001e-2; x *= 1.26) {
      const double r = x * R;
      const ParticleConfig cfg = three_body(mi, mj, 1, r, axis, {R, 0, 0}, vik, vjk);
      // gamma is measured from r_i - r_j to c - r_k, which here points along -x.
      const ExpansionTerms e = expansion_terms(vik, vjk, mi, mj, R, r, testsupport::kPi - gamma);
      rs.push_back(r);
      res.push_back(full_potential(cfg) - e.zeroth - e.first - e.second);
    }
    CAPTURE(t);
    CHECK(testsupport::log_slope(rs, res) >= 2.8);
  }
}

TEST_CASE("property: rigid rotations and translations leave the report unchanged") {
  testsupport::Gen g(62);
  for (int t = 0; t < 100; ++t) {
    ParticleConfig cfg;
    const int n = g.integer(3, 6);
    for (int k = 0; k < n; ++k) {
      cfg.masses.push_back(g.log_uniform(0.3, 3));
      cfg.positions.push_back({g.uniform(-8, 8), g.uniform(-8, 8), g.uniform(-8, 8)});
    }
    cfg.positions[1] = cfg.positions[0];
    for (int d = 0; d < 3; ++d) cfg.positions[1][d] += g.uniform(-0.05, 0.05);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        cfg.pair_potentials[{a, b}] = (a + b) % 2 ? power(g.uniform(-2, 2), g.uniform(0.5, 6))
                                                  : yukawa(g.uniform(-2, 2), g.log_uniform(0.5, 4));
    // Random rotation from a unit quaternion, then a shift.
    double q[4];
    double qn = 0;
    for (double& x : q) {
      x = g.uniform(-1, 1);
      qn += x * x;
    }
    for (double& x : q) x /= std::sqrt(qn);
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    const double Rm[3][3] = {{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
                             {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
                             {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}};
    const Vec3 shift{g.uniform(-5, 5), g.uniform(-5, 5), g.uniform(-5, 5)};
    ParticleConfig moved = cfg;
    for (int k = 0; k < n; ++k)
      for (int d = 0; d < 3; ++d)
        moved.positions[k][d] = Rm[d][0] * cfg.positions[k][0] + Rm[d][1] * cfg.positions[k][1] +
                                Rm[d][2] * cfg.positions[k][2] + shift[d];
    const SeparabilityReport a = separability_report(cfg), b = separability_report(moved);
    CHECK(std::fabs(a.V_full - b.V_full) < 1e-12);
    CHECK(std::fabs(a.V_sp - b.V_sp) < 1e-12);
    CHECK(std::fabs(a.residual - b.residual) < 1e-12);
    CHECK(std::fabs(a.first_order_pred - b.first_order_pred) < 1e-12);
    CHECK(std::fabs(a.gamma_max - b.gamma_max) < 1e-9);
  }
}

TEST_CASE("residual scaling fits") {
  const PotentialModel c = power(1.0, 1.0);
  const ParticleConfig distinct = three_body(1, 2, 1, 0.1, {1, 1, 0}, {10, 0, 0}, c, c);
  const ScalingFit d = residual_scaling_fit(distinct, default_sweep(distinct));
  CHECK(std::fabs(d.slope - 1.0) < 0.02);
  CHECK(d.order == 1);
  CHECK(d.prefactor_rel_error < 1e-3);
  const ParticleConfig identical = three_body(1, 1, 1, 0.1, {1, 1, 0}, {10, 0, 0}, c, c);
  CHECK(identical.identical_pair());
  const ScalingFit s = residual_scaling_fit(identical, default_sweep(identical));
  CHECK(std::fabs(s.slope - 2.0) < 0.02);
  CHECK(s.order == 2);
  CHECK(s.prefactor_rel_error < 1e-3);
  CHECK_THROWS_AS(residual_scaling_fit(distinct, {0.01, 0.02, 0.05}), DomainError);
  CHECK_THROWS_AS(residual_scaling_fit(distinct, {0.01, 0.1, 2.0}), DomainError);
  // Perpendicular identical pair on a Coulomb spectator: the residual is pure r^2.
  const ParticleConfig perp = three_body(1, 1, 1, 0.1, {0, 1, 0}, {10, 0, 0}, c, c);
  CHECK(std::fabs(residual_scaling_fit(perp, default_sweep(perp)).slope - 2.0) < 0.02);
}

TEST_CASE("orientation average") {
  // Spherical mean value: for v = g e^(-r/b)/r the ring average of a point
  // at distance s from the spectator is v(R) sinh(s/b)/(s/b).
  const double b = 1.3, R = 7.0, r = 0.8;
  const PotentialModel y = yukawa(-1.0, b);
  const ParticleConfig cfg = three_body(1, 1, 1, r, {1, 0, 0}, {R, 0, 0}, y, y);
  const double s = r / 2, vR = -std::exp(-R / b) / R;
  const double want = 2 * vR * (std::sinh(s / b) / (s / b) - 1);
  CHECK(rel(orientation_averaged_residual(cfg, r), want) < 1e-9);
}

TEST_CASE("Yukawa curves collapse in r / range, power laws in r / R") {
  const std::vector<double> x = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  const CollapseReport y = collapse_study(yukawa(-1.0, 1.0), 1.0, {5.0, 50.0}, x);
  CHECK(y.metric_range < 0.05);
  CHECK(y.metric_distance > 0.5);
  const CollapseReport p = collapse_study(power(1.0, 6.0), 1.0, {5.0, 50.0}, x);
  CHECK(p.metric_distance < 0.05);
  CHECK(p.metric_range > 0.5);
  CHECK(collapse_metric({{1, 2}, {1, 2}}) == 0.0);
  CHECK(collapse_metric({{1, 2}, {0.5, 2}}) == doctest::Approx(0.5));
}

TEST_CASE("nearest-spectator statistics") {
  const NearestSpectatorStats one = nearest_spectator_stats(0.1, 10000, 7, 1);
  const NearestSpectatorStats four = nearest_spectator_stats(0.1, 10000, 7, 4);
  CHECK(one.mean == four.mean);
  CHECK(one.std_error == four.std_error);
  CHECK(one.radius == doctest::Approx(std::cbrt(3 / (4 * testsupport::kPi * 0.1))));
  // Poisson gas: P(d > s) = exp(-s^3 / a^3), so E[d] = Gamma(4/3) a.
  CHECK(one.expectation == doctest::Approx(std::tgamma(4.0 / 3.0) * one.radius));
  CHECK(std::fabs(one.mean - one.expectation) < 4 * one.std_error);
  CHECK(nearest_spectator_stats(0.1, 10000, 8, 2).mean != one.mean);
}
