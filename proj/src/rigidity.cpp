#include "cusplab/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cusplab/errors.hpp"
#include "propagate.hpp"

namespace cusplab {

double probability_integral(const RadialSolution& sol, double r) { return sol.probability(r); }

double rigidity_at(const RadialSolution& sol, double r) { return 1.0 / sol.probability(r); }

RigidityProfile FundamentalReport::profile() const {
  RigidityProfile p;
  for (const auto& pt : points) {
    p.radii.push_back(pt.r);
    p.prob_integral.push_back(pt.P);
    p.rigidity.push_back(pt.rigidity);
    p.dL_de.push_back(pt.dL_de);
    p.dR_de.push_back(pt.dR_de);
  }
  return p;
}

namespace {

// True when r lies within kNodeExclusion local spacings of one of the nodes.
// The origin counts as a neighbour for spacing only.
bool near_node(const std::vector<double>& nodes, double r, bool origin_is_node) {
  std::vector<double> all;
  if (origin_is_node) all.push_back(0.0);
  all.insert(all.end(), nodes.begin(), nodes.end());
  for (std::size_t i = origin_is_node ? 1 : 0; i < all.size(); ++i) {
    double spacing = std::numeric_limits<double>::infinity();
    if (i > 0) spacing = all[i] - all[i - 1];
    if (i + 1 < all.size()) spacing = std::min(spacing, all[i + 1] - all[i]);
    if (!std::isfinite(spacing)) spacing = all[i];
    if (std::fabs(r - all[i]) < kNodeExclusion * spacing) return true;
  }
  return false;
}

double five_point(double fm2, double fm1, double fp1, double fp2, double h) {
  return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
}

}  // namespace

FundamentalReport verify_fundamental(const PotentialModel& model, int l, double energy,
                                     const std::vector<double>& r_list, double d_eps) {
  if (r_list.empty()) throw DomainError("verify_fundamental needs at least one radius");
  const ShortRangeClass cls = classify(model);
  const double sE = natural_energy_scale(cls);
  const double scale = std::max(std::fabs(energy), sE);
  if (d_eps <= 0.0) d_eps = 1e-4 * scale;
  if (d_eps > 1e-3 * scale) throw DomainError("d_eps above 1e-3 max(|e|, s_E)");
  // Run a little past the last radius so that a node sitting on it is seen.
  const double r_max = 1.1 * *std::max_element(r_list.begin(), r_list.end());
  const RadialGrid grid = default_grid(model, l, r_max, 400, r_list);

  const double h = d_eps;
  const std::vector<double> es = {energy - 4 * h, energy - 2 * h, energy - h, energy,
                                  energy + h,     energy + 2 * h, energy + 4 * h};
  const auto fam = solve_family(model, l, es, grid);
  const RadialSolution& c = fam[3];
  const auto nu = nodes_of_u(c);
  const auto ndu = nodes_of_du(c);

  auto deriv = [&](auto&& f) {
    const double d1 = five_point(f(fam[1]), f(fam[2]), f(fam[4]), f(fam[5]), h);
    const double d2 = five_point(f(fam[0]), f(fam[1]), f(fam[5]), f(fam[6]), 2 * h);
    return (16.0 * d1 - d2) / 15.0;
  };

  FundamentalReport rep;
  rep.d_eps = d_eps;
  bool any1 = false, any2 = false;
  for (double r : r_list) {
    FundamentalPoint pt;
    pt.r = r;
    pt.P = c.probability(r);
    pt.rigidity = 1.0 / pt.P;
    const double u = c.value(r), du = c.derivative(r);
    pt.skip1 = near_node(nu, r, true);
    pt.skip2 = near_node(ndu, r, false);
    if (!pt.skip1) {
      pt.dL_de = deriv([&](const RadialSolution& s) { return log_derivative(s, r); });
      pt.residual1 = std::fabs(-pt.dL_de * u * u - pt.P) / pt.P;
      rep.max_residual1 = std::max(rep.max_residual1, pt.residual1);
      any1 = true;
    }
    if (!pt.skip2) {
      pt.dR_de = deriv([&](const RadialSolution& s) { return r_matrix(s, r); });
      pt.residual2 = std::fabs(pt.dR_de * du * du - pt.P) / pt.P;
      rep.max_residual2 = std::max(rep.max_residual2, pt.residual2);
      any2 = true;
    }
    rep.points.push_back(pt);
  }
  if (!any1 || !any2) throw NodeProximity("every radius lies next to a node of u or u'");
  return rep;
}

namespace {

struct Sample {
  double L, R;
  bool u_neg, du_neg;
};

Sample sample_at(const PotentialModel& model, int l, double r, double e, const RadialGrid& grid) {
  const RadialSolution s = solve_regular(model, l, e, grid);
  const double u = s.u.back(), du = s.du.back();
  if (u == 0.0 || du == 0.0)
    throw PoleStraddle("energy sample " + std::to_string(e) + " sits on a pole of L or R");
  (void)r;
  return {du / u, u / du, u < 0.0, du < 0.0};
}

}  // namespace

MonotonicityReport monotonicity_scan(const PotentialModel& model, int l, double r,
                                     const std::vector<double>& energy_grid) {
  MonotonicityReport rep;
  if (energy_grid.size() < 2) return rep;
  const RadialGrid grid = default_grid(model, l, r, 128);
  std::vector<Sample> s;
  for (double e : energy_grid) s.push_back(sample_at(model, l, r, e, grid));

  // which = 0 for L (decreasing, poles at zeros of u), 1 for R (increasing,
  // poles at zeros of u').
  auto check = [&](auto&& self, int which, double ea, double eb, const Sample& a, const Sample& b,
                   int depth) -> void {
    const bool pole = which == 0 ? a.u_neg != b.u_neg : a.du_neg != b.du_neg;
    if (pole) {
      (which == 0 ? rep.poles_L : rep.poles_R)++;
      return;
    }
    const bool ok = which == 0 ? b.L < a.L : b.R > a.R;
    if (ok) return;
    if (depth >= 10) {
      (which == 0 ? rep.violations_L : rep.violations_R)++;
      return;
    }
    ++rep.refinements;
    const double em = 0.5 * (ea + eb);
    const Sample m = sample_at(model, l, r, em, grid);
    self(self, which, ea, em, a, m, depth + 1);
    self(self, which, em, eb, m, b, depth + 1);
  };
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (!(energy_grid[i + 1] > energy_grid[i])) throw DomainError("energy grid must increase");
    ++rep.intervals;
    check(check, 0, energy_grid[i], energy_grid[i + 1], s[i], s[i + 1], 0);
    check(check, 1, energy_grid[i], energy_grid[i + 1], s[i], s[i + 1], 0);
  }
  return rep;
}

OverlapPair cross_energy_overlap(const PotentialModel& model, int l, double e1, double e2, double r) {
  if (e1 == e2) throw DomainError("cross_energy_overlap needs e1 != e2");
  const RadialGrid grid = default_grid(model, l, r, 128);
  const detail::StartData sd = detail::start_data(model, l, grid.r_min);
  std::vector<detail::ChannelStart> st = {sd.channel(e1), sd.channel(e2)};
  const detail::Trace tr = detail::propagate(model, l, st, {{0, 1}}, {sd.cross_tail(e1, e2)}, grid.r_min,
                                             {r}, {kRadialTolerance, 0.1, 4000000});
  const std::size_t k = tr.r.size() - 1;
  const double u1 = tr.u[0][k], du1 = tr.du[0][k], u2 = tr.u[1][k], du2 = tr.du[1][k];
  const double scale = std::exp(tr.off[0][k] + tr.off[1][k]);
  OverlapPair out;
  out.lhs = tr.cross[0][k] * scale;
  out.rhs = (u2 * du1 - du2 * u1) / (e2 - e1) * scale;
  return out;
}

}  // namespace cusplab
