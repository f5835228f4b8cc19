#include <cmath>
#include <vector>

#include "cusplab/energyseries.hpp"
#include "cusplab/errors.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cusplab;
using testsupport::kPi;
using testsupport::rel;

namespace {
PotentialModel power(double g, double a) {
  PotentialModel m;
  m.terms.push_back({g, a});
  return m;
}

// Free coefficients: f r^(2j) (-1/4)^j / (j! (l + 3/2)_j).
double free_x(int l, int j, double r) {
  double c = 1.0;
  for (int i = 1; i <= j; ++i) c *= -0.25 / (i * (l + 0.5 + i));
  return std::pow(r, l + 1 + 2 * j) / (std::pow(2.0, l + 0.5) * std::tgamma(l + 1.5)) * c;
}
}  // namespace

TEST_CASE("free series examples") {
  const PotentialModel free;
  const EnergySeries s = build_series(free, 0, default_grid(free, 0, 3.0, 400, {0.5, 1.0}), 4);
  CHECK(s.analytic_companion);
  CHECK(rel(s.wronskian, 2 / kPi) < 1e-10);
  CHECK(std::fabs(s.profile(1, 1.0) + 0.1329807) < 1e-7);
  CHECK(rel(s.profile(1, 1.0), -std::sqrt(2 / kPi) / 6) < 1e-9);
  CHECK(series_eval(s, 0.0, 0.8) == s.profile(0, 0.8));
  CHECK(std::fabs(series_eval(s, 1.0, 0.5) - std::sqrt(2 / kPi) * std::sin(0.5)) < 1e-6);
  CHECK(std::fabs(series_eval(s, 1.0, 0.5) - 0.3825262) < 1e-7);
  CHECK_THROWS_AS(build_series(free, 0, default_grid(free, 0, 3.0), 7), DomainError);
}

TEST_CASE("property: free coefficients against the closed form") {
  const PotentialModel free;
  for (int l = 0; l <= 2; ++l) {
    const EnergySeries s = build_series(free, l, default_grid(free, l, 4.0), 6);
    for (int j = 0; j <= 4; ++j) {
      double worst = 0;
      for (double r : s.grid.points) worst = std::max(worst, rel(s.profile(j, r), free_x(l, j, r)));
      CAPTURE(l);
      CAPTURE(j);
      CHECK(worst < 1e-8);
    }
  }
}

TEST_CASE("zeroth order is the analytic cusp function") {
  const std::vector<PotentialModel> ms = {power(-2.0, 1.0), power(1.0, 0.5), power(0.6, 2.0), power(1.0, 6.0)};
  for (const PotentialModel& m : ms) {
    const ShortRangeClass cls = classify(m);
    const double len = cls.beta_alpha.value_or(1.0);
    const EnergySeries s = build_series(m, 1, default_grid(m, 1, 5.0 * len), 2);
    const CuspSpec spec = make_cusp_spec(cls, 1);
    for (std::size_t i = 0; i < s.grid.points.size(); i += 7) {
      const double r = s.grid.points[i];
      CHECK(std::fabs(std::log(std::fabs(s.f_cp[i])) - cusp_f(spec, r).log_abs()) < 1e-8);
    }
  }
}

TEST_CASE("property: coefficients vanish against f near the origin") {
  // Power-law classes: the ratio goes like r^(2j).
  for (const PotentialModel& m : {power(-2.0, 1.0), power(1.0, 0.5), power(0.6, 2.0), power(-0.2, 2.0)}) {
    const ShortRangeClass cls = classify(m);
    const RadialGrid grid = default_grid(m, 0, 3.0 * cls.beta_alpha.value_or(1.0));
    const EnergySeries s = build_series(m, 0, grid, 3);
    const double r0 = grid.points.front();
    for (int j = 1; j <= 3; ++j) {
      std::vector<double> rs, ratio;
      for (double r = r0; r <= 10 * r0; r *= 1.25) {
        rs.push_back(r);
        ratio.push_back(s.profile(j, r) / s.profile(0, r));
      }
      CAPTURE(to_string(cls.tag));
      CAPTURE(j);
      CHECK(testsupport::log_slope(rs, ratio) >= 1.5);
      CHECK(std::fabs(ratio.front()) < 1e-4);
    }
  }
  // rVdW: the integrals start at r_min, where the series matches the direct
  // solve's normalisation, so x_1(r_min) = 0. Away from it the ratio follows
  // the WKB energy shift of log u,
  //   w(r) = 1 / (4 v) - r^(a/2+1) / ((a+2) sqrt(D)),
  // relative to r_min, up to O(1/y^2).
  for (double a : {4.0, 6.0}) {
    const PotentialModel m = power(1.0, a);
    const RadialGrid grid = default_grid(m, 0, 3.0);
    const EnergySeries s = build_series(m, 0, grid, 3);
    const double r0 = grid.r_min;
    auto w = [&](double r) { return std::pow(r, a) / 4 - std::pow(r, a / 2 + 1) / (a + 2); };
    CAPTURE(a);
    for (int j = 1; j <= 3; ++j) CHECK(std::fabs(s.profile(j, r0) / s.profile(0, r0)) < 1e-10);
    for (double r = 2 * r0; r <= 5 * r0; r *= 1.1) {
      const double y = (2 / (a - 2)) * std::pow(r, 1 - a / 2);
      CAPTURE(r / r0);
      CHECK(rel(s.profile(1, r) / s.profile(0, r), w(r) - w(r0)) < 3 / (y * y));
    }
  }
}

TEST_CASE("property: coefficients solve the inhomogeneous equation") {
  // x_j'' = q x_j - x_{j-1}, with x_j'' by a central difference of the profile.
  const std::vector<PotentialModel> ms = {PotentialModel{}, power(-2.0, 1.0), power(0.6, 2.0), power(1.0, 6.0)};
  for (const PotentialModel& m : ms) {
    const int l = 1;
    const RadialGrid grid = default_grid(m, l, 5.0);
    const EnergySeries s = build_series(m, l, grid, 4);
    for (int j = 1; j <= 4; ++j) {
      double worst = 0, scale = 0;
      for (double r = 0.5; r <= 4.5; r += 0.25) {
        const double h = 1e-3;
        const double d2 = (s.profile(j, r + h) - 2 * s.profile(j, r) + s.profile(j, r - h)) / (h * h);
        const double q = l * (l + 1) / (r * r) + m.evaluate(r);
        worst = std::max(worst, std::fabs(d2 - q * s.profile(j, r) + s.profile(j - 1, r)));
        scale = std::max(scale, std::fabs(s.profile(j - 1, r)));
      }
      CHECK(worst < 1e-6 * scale);
    }
  }
}

TEST_CASE("series against direct solves") {
  const PotentialModel h = power(-2.0, 1.0);
  const double beta = *classify(h).beta_alpha, sE = 1 / (beta * beta);
  const RadialGrid grid = default_grid(h, 0, 3.0, 400, {beta});
  const EnergySeries s = build_series(h, 0, grid, 6);
  const RadialSolution u = solve_regular(h, 0, 0.1 * sE, grid);
  CHECK(rel(series_eval(s, 0.1 * sE, beta), u.value(beta)) < 1e-5);
  CHECK(s.validity_energy > 0.1 * sE);
}

TEST_CASE("entirety check") {
  const PotentialModel free;
  for (const EntiretyRow& row : entirety_check(free, 0, 1.0, {0.5, -0.5})) {
    CHECK(row.monotone);
    CHECK(row.errors.back() < 1e-9);
  }
  const PotentialModel v6 = power(1.0, 6.0);
  const std::vector<EntiretyRow> rows = entirety_check(v6, 0, 1.0, {0.2});
  CHECK(rows[0].errors[2] < rows[0].errors[0]);
  // Every class, positive and negative energies.
  for (const PotentialModel& m : {power(-2.0, 1.0), power(1.0, 0.5), power(0.6, 2.0), power(1.0, 4.0)})
    for (const EntiretyRow& row : entirety_check(m, 1, 1.0, {-0.3, 0.3})) CHECK(row.monotone);
}
