#include <algorithm>
#include <cmath>
#include <vector>

#include "cusplab/errors.hpp"
#include "cusplab/radial.hpp"
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

// sqrt(2/pi) r j_l(kr) / k^l and its continuation below zero energy.
double free_oracle(int l, double e, double r) {
  if (e > 0) {
    const double k = std::sqrt(e);
    return std::sqrt(2 / kPi) * r * std::sph_bessel(l, k * r) / std::pow(k, l);
  }
  if (e < 0) {
    const double k = std::sqrt(-e), x = k * r;
    return std::sqrt(2 / kPi) * r * std::sqrt(kPi / (2 * x)) * std::cyl_bessel_i(l + 0.5, x) / std::pow(k, l);
  }
  return testsupport::free_u(l, 0.0, r);
}
}  // namespace

TEST_CASE("grid construction") {
  const RadialGrid g = make_grid(1e-6, 10.0, 200, {3.3});
  CHECK(g.points.back() == 10.0);
  CHECK(g.points.front() > g.r_min);
  CHECK(std::is_sorted(g.points.begin(), g.points.end()));
  CHECK(std::adjacent_find(g.points.begin(), g.points.end()) == g.points.end());
  CHECK(std::find(g.points.begin(), g.points.end(), 3.3) != g.points.end());
  CHECK(g.points.size() >= 64);
  CHECK_THROWS(make_grid(0.0, 1.0));
  CHECK_THROWS(make_grid(2.0, 1.0));
}

TEST_CASE("free examples") {
  const PotentialModel free;
  const double pi = kPi;
  const RadialSolution a = solve_regular(free, 0, 1.0, default_grid(free, 0, 4.0, 400, {pi / 4, pi / 2}));
  CHECK(std::fabs(a.value(pi / 2) - 0.7978846) < 1e-7);
  CHECK(std::fabs(log_derivative(a, pi / 4) - 1.0) < 1e-8);
  const RadialSolution b = solve_regular(free, 0, -1.0, default_grid(free, 0, 4.0, 400, {1.0}));
  CHECK(std::fabs(b.value(1.0) - 0.9376748) < 1e-7);
  CHECK(std::fabs(log_derivative(b, 1.0) - 1.3130353) < 1e-7);
  CHECK(rel(r_matrix(b, 1.0), std::tanh(1.0)) < 1e-9);
}

TEST_CASE("hydrogen ground state") {
  const PotentialModel h = power(-2.0, 1.0);
  const RadialSolution s = solve_regular(h, 0, -1.0, default_grid(h, 0, 6.0, 400, {1.0}));
  CHECK(std::fabs(log_derivative(s, 1.0)) < 1e-8);
  // u = r e^(-r) up to the cusp normalisation.
  for (double r : {0.1, 0.5, 2.0, 4.0}) CHECK(rel(s.value(r) / s.value(1.0), r * std::exp(1.0 - r)) < 1e-8);
}

TEST_CASE("Kato cusp limit") {
  for (double G : {-2.0, 4.0, -0.3}) {
    const PotentialModel m = power(G, 1.0);
    const RadialSolution s = solve_regular(m, 0, 0.7, default_grid(m, 0, 5.0));
    CHECK(kato_limit(s) == doctest::Approx(G / 2).epsilon(1e-5).scale(1.0));
  }
  const PotentialModel free;
  CHECK(std::fabs(kato_limit(solve_regular(free, 0, 1.0, default_grid(free, 0, 5.0)))) < 1e-5);
  const PotentialModel v6 = power(1.0, 6.0);
  CHECK_THROWS_AS(kato_limit(solve_regular(v6, 0, 0.0, default_grid(v6, 0, 5.0))), DomainError);
}

TEST_CASE("pole side information") {
  const PotentialModel free;
  const double pi = kPi;
  const RadialSolution s = solve_regular(free, 0, 1.0, default_grid(free, 0, 4.0, 400, {pi, pi / 2}));
  const double L = log_derivative(s, pi), R = r_matrix(s, pi / 2);
  CHECK((std::isinf(L) || std::fabs(L) > 1e6));
  CHECK((std::isinf(R) || std::fabs(R) > 1e6));
  const std::vector<double> nodes = nodes_of_u(s);
  REQUIRE(nodes.size() >= 1);
  CHECK(std::fabs(nodes[0] - pi) < 1e-8);
  const std::vector<double> dn = nodes_of_du(s);
  REQUIRE(dn.size() >= 1);
  CHECK(std::fabs(dn[0] - pi / 2) < 1e-8);
}

TEST_CASE("nonphysical and out-of-range inputs") {
  const PotentialModel a6 = power(-1.0, 6.0);
  CHECK_THROWS_AS(solve_regular(a6, 0, 0.0, make_grid(1e-3, 2.0)), NonphysicalPotential);
  const PotentialModel npcd = power(-1.0, 2.0);
  CHECK_THROWS_AS(solve_regular(npcd, 0, 0.0, make_grid(1e-3, 2.0)), NonphysicalPotential);
  const PotentialModel free;
  CHECK_THROWS_AS(solve_regular(free, 0, 2e6, default_grid(free, 0, 2.0)), DomainError);
}

TEST_CASE("free-particle oracle") {
  const PotentialModel free;
  for (int l = 0; l <= 3; ++l) {
    for (double e : {0.25, -0.25, 1.0, -1.0, 4.0}) {
      const RadialSolution s = solve_regular(free, l, e, default_grid(free, l, 8.0));
      double worst = 0.0;
      for (std::size_t i = 0; i < s.grid.points.size(); ++i) {
        const double r = s.grid.points[i];
        const double want = free_oracle(l, e, r);
        const double env = free_oracle(l, -std::fabs(e), r);  // growing envelope, never zero
        if (std::fabs(want) < 1e-3 * env) continue;
        worst = std::max(worst, rel(s.u[i] * std::exp(s.scale_offsets[i]), want));
      }
      CAPTURE(l);
      CAPTURE(e);
      CHECK(worst < 1e-8);
    }
  }
}

namespace {
std::vector<PotentialModel> model_suite() {
  std::vector<PotentialModel> ms;
  ms.push_back({});
  ms.push_back(power(-2.0, 1.0));
  ms.push_back(power(1.5, 1.0));
  ms.push_back(power(-1.0, 0.0));
  ms.push_back(power(0.8, -1.0));
  ms.push_back(power(-0.2, 2.0));
  ms.push_back(power(2.0, 2.0));
  ms.push_back(power(1.0, 4.0));
  ms.push_back(power(1.0, 6.0));
  PotentialModel y;
  y.yukawa = YukawaTerm{-3.0, 1.0};
  ms.push_back(y);
  PotentialModel mix = power(-2.0, 1.0);
  mix.terms.push_back({0.5, 0.0});
  ms.push_back(mix);
  return ms;
}
}  // namespace

TEST_CASE("property: solution invariants across models") {
  testsupport::Gen g(41);
  for (const PotentialModel& m : model_suite()) {
    const ShortRangeClass cls = classify(m);
    const double sE = natural_energy_scale(cls);
    for (int l = 0; l <= 2; ++l) {
      const double e = g.uniform(-2.0, 2.0) * sE;
      const double len = cls.beta_alpha.value_or(1.0);
      const RadialSolution s = solve_regular(m, l, e, default_grid(m, l, 6.0 * len));
      CAPTURE(to_string(cls.tag));
      CAPTURE(l);
      CAPTURE(e);
      // L * R = 1 wherever both are finite.
      for (std::size_t i = 0; i < s.grid.points.size(); ++i)
        if (std::isfinite(s.logderiv[i]) && std::isfinite(s.rmatrix[i]))
          CHECK(std::fabs(s.logderiv[i] * s.rmatrix[i] - 1.0) < 1e-9);
      // Cusp normalisation at the start. The rVdW start sits at y = 60 on
      // the cusp function, where f / F - 1 is the leading K asymptotic term.
      const double r0 = s.grid.r_min;
      const double lu = std::log(std::fabs(s.knots->u.front())) + s.knots->offset.front();
      CHECK(std::fabs(std::exp(lu - cusp_f(s.cusp, r0).log_abs()) - 1.0) < 1e-6);
      const double toF = std::exp(lu - strict_cusp(s.cusp, r0).log_abs()) - 1.0;
      if (s.cusp.family == CuspFamily::RVDW) {
        const double nu = s.cusp.nu0, p = s.cusp.alpha - 2;
        const double y = (2 / p) * std::pow(r0 / *s.cusp.beta, -p / 2);
        CHECK(std::fabs(toF - (4 * nu * nu - 1) / (8 * y)) <=
              std::fabs((4 * nu * nu - 1) * (4 * nu * nu - 9)) / (64 * y * y) + 1e-12);
      } else {
        CHECK(std::fabs(toF) < 1e-6);
      }
    }
  }
}

TEST_CASE("property: u / f approaches the cusp constant at small r") {
  // Classes whose cusp function is analytic in energy and strength; rVdW is not.
  const std::vector<PotentialModel> ms = {PotentialModel{}, power(-2.0, 1.0), power(3.0, 0.5), power(0.7, 2.0),
                                          power(-0.2, 2.0), power(-1.0, -0.5)};
  for (const PotentialModel& m : ms) {
    const ShortRangeClass cls = classify(m);
    const double sE = natural_energy_scale(cls), len = cls.beta_alpha.value_or(1.0);
    for (int l : {0, 1}) {
      double prev_window = 0.0;
      for (double k : {1e-2, 1e-3, 1e-4}) {
        const RadialSolution s = solve_regular(m, l, k * sE, default_grid(m, l, 20.0 * len, 600));
        const CuspSpec& c = s.cusp;
        const double r0 = s.grid.points.front();
        CAPTURE(to_string(cls.tag));
        CAPTURE(l);
        CAPTURE(k);
        CAPTURE(r0);
        // Smallest decade.
        for (double r = r0; r <= 10 * r0; r *= 1.25) {
          const double d = std::exp(std::log(std::fabs(s.value(r))) - cusp_f(c, r).log_abs()) - 1;
          CHECK(std::fabs(d) < 1e-5);
        }
        // Largest radius up to which u / f stays within 1e-5.
        double window = r0;
        for (double r = r0; r <= s.grid.r_max; r *= 1.05) {
          const double d = std::exp(std::log(std::fabs(s.value(r))) - cusp_f(c, r).log_abs()) - 1;
          if (std::fabs(d) > 1e-5) break;
          window = r;
        }
        CAPTURE(to_string(cls.tag));
        CAPTURE(k);
        CHECK(window > prev_window);
        prev_window = window;
      }
    }
  }
}

TEST_CASE("property: energy independence of L at coalescence") {
  const std::vector<PotentialModel> ms = {PotentialModel{}, power(-2.0, 1.0), power(0.7, 2.0), power(1.0, 0.0)};
  for (const PotentialModel& m : ms) {
    const RadialGrid grid = default_grid(m, 0, 5.0);
    const std::vector<RadialSolution> s = solve_family(m, 0, {0.3, 1.1}, grid);
    const double r0 = grid.points.front();
    std::vector<double> rs, d;
    for (double r = 2 * r0; r <= 20 * r0; r *= 1.3) {
      rs.push_back(r);
      d.push_back((log_derivative(s[0], r) - log_derivative(s[1], r)) * r);
    }
    CHECK(testsupport::log_slope(rs, d) >= 1.8);
  }
}

TEST_CASE("property: node count is non-decreasing in energy") {
  const std::vector<PotentialModel> ms = {PotentialModel{}, power(-2.0, 1.0), power(1.0, 6.0)};
  for (const PotentialModel& m : ms) {
    for (int l : {0, 2}) {
      std::size_t prev = 0;
      for (double e = -3.0; e <= 12.0; e += 0.5) {
        const RadialSolution s = solve_regular(m, l, e, default_grid(m, l, 8.0));
        const std::size_t n = nodes_of_u(s).size();
        CHECK(n >= prev);
        prev = n;
      }
      CHECK(prev >= 3);
    }
  }
}

TEST_CASE("shared schedule across energies") {
  const PotentialModel m = power(-2.0, 1.0);
  const RadialGrid grid = default_grid(m, 0, 5.0);
  const std::vector<RadialSolution> fam = solve_family(m, 0, {-0.5, 0.5}, grid);
  REQUIRE(fam.size() == 2);
  CHECK(fam[0].knots->r == fam[1].knots->r);
  const RadialSolution one = solve_regular(m, 0, 0.5, grid);
  CHECK(rel(fam[1].value(3.0), one.value(3.0)) < 1e-9);
}
