#include "cusplab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "cusplab/errors.hpp"
#include "propagate.hpp"

namespace cusplab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogRepresentable = 690.0;

// Start exponent of the rVdW cusp function, y = (2/(alpha-2)) r_s^(-(alpha-2)/2).
constexpr double kRvdwStartY = 60.0;
constexpr double kMaxStartY = 1e4;
constexpr double kSubdominantShare = 1e-6;

double rvdw_y(const ShortRangeClass& cls, double r) {
  const double p = cls.dominant_alpha - 2.0;
  return (2.0 / p) * std::pow(r / *cls.beta_alpha, -p / 2.0);
}

struct Located {
  std::size_t k;
  double t, h;
};

Located locate(const RadialKnots& kn, double r) {
  if (!(r >= kn.r.front() * (1 - 1e-14)) || !(r <= kn.r.back() * (1 + 1e-14)))
    throw DomainError("radius outside the solution grid: " + std::to_string(r));
  auto it = std::upper_bound(kn.r.begin(), kn.r.end(), r);
  std::size_t k = (it == kn.r.begin()) ? 0 : static_cast<std::size_t>(it - kn.r.begin()) - 1;
  if (k + 1 >= kn.r.size()) k = kn.r.size() - 2;
  const double h = kn.r[k + 1] - kn.r[k];
  return {k, std::clamp((r - kn.r[k]) / h, 0.0, 1.0), h};
}

// u and u' mantissas at r in the offset of the left knot.
void interpolate(const RadialKnots& kn, const Located& at, double& u, double& du) {
  const std::size_t k = at.k;
  const double c = std::exp(kn.offset[k + 1] - kn.offset[k]);
  const double h = at.h, h2 = h * h;
  if (at.t == 0.0) {
    u = kn.u[k];
    du = kn.du[k];
    return;
  }
  if (at.t == 1.0) {
    u = c * kn.u[k + 1];
    du = c * kn.du[k + 1];
    return;
  }
  detail::Hermite5 pu{kn.u[k], h * kn.du[k], h2 * kn.ddu[k],
                      c * kn.u[k + 1], c * h * kn.du[k + 1], c * h2 * kn.ddu[k + 1]};
  detail::Hermite5 pd{kn.du[k], h * kn.ddu[k], h2 * kn.dddu[k],
                      c * kn.du[k + 1], c * h * kn.ddu[k + 1], c * h2 * kn.dddu[k + 1]};
  u = pu.value(at.t);
  du = pd.value(at.t);
}

double fold(double mantissa, double offset) {
  return offset == 0.0 ? mantissa : mantissa * std::exp(offset);
}

void check_allowed(const ShortRangeClass& cls) {
  if (!cls.physical())
    throw NonphysicalPotential("model is " + to_string(cls.tag) + " at the origin");
}

// Exponent lambda of the power-law start (F, GC, alCD): u ~ r^(lambda+1).
double start_power(const CuspSpec& spec) {
  return spec.family == CuspFamily::ALCD ? *spec.lt : static_cast<double>(spec.l);
}

}  // namespace

namespace detail {

StartData start_data(const PotentialModel& model, int l, double r_min) {
  const ShortRangeClass cls = classify(model);
  check_allowed(cls);
  StartData sd;
  sd.spec = make_cusp_spec(cls, l, 1.0);
  sd.r_min = r_min;
  sd.f0 = cusp_f(sd.spec, r_min);
  if (sd.spec.family != CuspFamily::RVDW)
    sd.tail = sd.f0.f * sd.f0.f * r_min / (2.0 * start_power(sd.spec) + 3.0);
  return sd;
}

// Power starts: u = f (1 - c e r^2), c = 1 / (2 (2 lambda + 3)), the first
// term of the free energy series. The rVdW start is left on f: its energy
// correction is of the size of the cusp-normalisation tolerance at y = 60.
ChannelStart StartData::channel(double e) const {
  double d = 0.0, dd = 0.0;
  if (spec.family != CuspFamily::RVDW) {
    const double c = 1.0 / (2.0 * (2.0 * start_power(spec) + 3.0));
    d = -c * e * r_min * r_min;
    dd = -2.0 * c * e * r_min;
  }
  return {e, f0.f * (1 + d), f0.df * (1 + d) + f0.f * dd, cross_tail(e, e), f0.log_offset};
}

double StartData::cross_tail(double e1, double e2) const {
  if (spec.family == CuspFamily::RVDW) return 0.0;
  // integral_0^r r'^(2 lambda + 2) (1 - c (e1 + e2) r'^2) relative to the leading term.
  const double lam = start_power(spec), c = 1.0 / (2.0 * (2.0 * lam + 3.0));
  return tail * (1 - c * (e1 + e2) * r_min * r_min * (2 * lam + 3) / (2 * lam + 5));
}

}  // namespace detail

void RadialGrid::validate() const {
  if (!(r_min > 0.0) || !std::isfinite(r_min)) throw DomainError("grid r_min must be positive");
  if (points.size() < 64) throw DomainError("grid needs at least 64 points");
  if (!(points.front() > r_min)) throw DomainError("grid points must lie above r_min");
  for (std::size_t k = 1; k < points.size(); ++k)
    if (!(points[k] > points[k - 1])) throw DomainError("grid points must increase strictly");
  if (points.back() != r_max) throw DomainError("last grid point must equal r_max");
}

RadialGrid make_grid(double r_min, double r_max, int n_points, const std::vector<double>& extra) {
  if (!(r_min > 0.0) || !(r_max > r_min)) throw DomainError("make_grid needs 0 < r_min < r_max");
  n_points = std::max(n_points, 64);
  RadialGrid g;
  g.r_min = r_min;
  g.r_max = r_max;
  const double knee = std::min(r_max, std::max(0.05 * r_max, 1e3 * r_min));
  const int n_log = n_points / 2;
  const int n_lin = n_points - n_log;
  const double q = std::log(knee / r_min) / n_log;
  for (int k = 1; k <= n_log; ++k) g.points.push_back(r_min * std::exp(q * k));
  for (int k = 1; k <= n_lin; ++k) g.points.push_back(knee + (r_max - knee) * k / n_lin);
  for (double e : extra)
    if (e > r_min && e <= r_max) g.points.push_back(e);
  std::sort(g.points.begin(), g.points.end());
  std::vector<double> uniq;
  for (double p : g.points)
    if (uniq.empty() || p > uniq.back() * (1.0 + 1e-13)) uniq.push_back(p);
  uniq.back() = r_max;
  g.points = std::move(uniq);
  return g;
}

double default_r_min(const PotentialModel& model, int l, double r_max) {
  (void)l;
  const ShortRangeClass cls = classify(model);
  check_allowed(cls);
  double r;
  switch (cls.single_term_family) {
    case CuspFamily::RVDW: {
      const double p = cls.dominant_alpha - 2.0;
      r = *cls.beta_alpha * std::pow(2.0 / (p * kRvdwStartY), 2.0 / p);
      r = std::min(r, 0.5 * r_max);
      break;
    }
    case CuspFamily::GC: r = 1e-6 * std::min(*cls.beta_alpha, r_max); break;
    default: r = 1e-6 * std::min(1.0, r_max); break;
  }
  if (cls.tag == ClassTag::F) return r;
  auto share = [&](double rr) {
    const double vd = cls.dominant_strength * std::pow(rr, -cls.dominant_alpha);
    return std::fabs(model.evaluate_extended(rr) - vd) / std::fabs(vd);
  };
  int guard = 0;
  while (share(r) > kSubdominantShare) {
    r *= 0.5;
    if (++guard > 2000) throw StiffnessLimit("no start radius found where the dominant term controls v");
    if (cls.single_term_family == CuspFamily::RVDW && rvdw_y(cls, r) > kMaxStartY)
      throw StiffnessLimit("rVdW start exponent exceeds 1e4 before subdominant terms become negligible");
  }
  return r;
}

RadialGrid default_grid(const PotentialModel& model, int l, double r_max, int n_points,
                        const std::vector<double>& extra) {
  return make_grid(default_r_min(model, l, r_max), r_max, n_points, extra);
}

std::vector<RadialSolution> solve_family(const PotentialModel& model, int l,
                                         const std::vector<double>& energies,
                                         const RadialGrid& grid) {
  if (l < 0) throw DomainError("negative partial wave");
  grid.validate();
  const ShortRangeClass cls = classify(model);
  check_allowed(cls);
  const double sE = natural_energy_scale(cls);
  for (double e : energies)
    if (!std::isfinite(e) || std::fabs(e) > 1e6 * sE)
      throw DomainError("energy outside |e| <= 1e6 s_E: " + std::to_string(e));

  const detail::StartData sd = detail::start_data(model, l, grid.r_min);
  const CuspSpec& spec = sd.spec;
  const CuspValue& f0 = sd.f0;

  std::vector<detail::ChannelStart> start;
  for (double e : energies) start.push_back(sd.channel(e));
  detail::Trace tr = detail::propagate(model, l, start, {}, {}, grid.r_min, grid.points,
                                       {kRadialTolerance, 0.1, 4000000});

  std::vector<RadialSolution> out;
  const std::size_t nk = tr.r.size();
  std::vector<double> q(nk), dq(nk);
  for (std::size_t k = 0; k < nk; ++k) {
    q[k] = detail::effective_q(model, l, tr.r[k]);
    dq[k] = detail::effective_dq(model, l, tr.r[k]);
  }
  for (std::size_t c = 0; c < energies.size(); ++c) {
    const double e = energies[c];
    auto kn = std::make_shared<RadialKnots>();
    kn->r = tr.r;
    kn->u = std::move(tr.u[c]);
    kn->du = std::move(tr.du[c]);
    kn->P = std::move(tr.P[c]);
    kn->offset = std::move(tr.off[c]);
    kn->ddu.resize(nk);
    kn->dddu.resize(nk);
    for (std::size_t k = 0; k < nk; ++k) {
      kn->ddu[k] = (q[k] - e) * kn->u[k];
      kn->dddu[k] = dq[k] * kn->u[k] + (q[k] - e) * kn->du[k];
    }
    RadialSolution s;
    s.grid = grid;
    s.l = l;
    s.energy = e;
    s.cusp = spec;
    s.tail = fold(fold(start[c].P, f0.log_offset), f0.log_offset);
    const std::size_t n = grid.points.size();
    s.u.resize(n);
    s.du.resize(n);
    s.logderiv.resize(n);
    s.rmatrix.resize(n);
    s.prob.resize(n);
    s.scale_offsets.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = tr.stop[i];
      const double u = kn->u[k], du = kn->du[k], off = kn->offset[k];
      const double lg = std::log(std::max(std::fabs(u), std::fabs(du))) + off;
      if (std::fabs(lg) < kLogRepresentable || off == 0.0) {
        s.u[i] = fold(u, off);
        s.du[i] = fold(du, off);
      } else {
        s.u[i] = u;
        s.du[i] = du;
        s.scale_offsets[i] = off;
      }
      s.prob[i] = fold(kn->P[k], 2.0 * off);
      s.logderiv[i] = u != 0.0 ? du / u : std::copysign(kInf, du);
      s.rmatrix[i] = du != 0.0 ? u / du : std::copysign(kInf, u);
    }
    s.knots = std::move(kn);
    out.push_back(std::move(s));
  }
  return out;
}

RadialSolution solve_regular(const PotentialModel& model, int l, double energy,
                             const RadialGrid& grid) {
  return std::move(solve_family(model, l, {energy}, grid).front());
}

double RadialSolution::value(double r) const {
  const Located at = locate(*knots, r);
  double u, du;
  interpolate(*knots, at, u, du);
  return fold(u, knots->offset[at.k]);
}

double RadialSolution::derivative(double r) const {
  const Located at = locate(*knots, r);
  double u, du;
  interpolate(*knots, at, u, du);
  return fold(du, knots->offset[at.k]);
}

double RadialSolution::probability(double r) const {
  const RadialKnots& kn = *knots;
  const Located at = locate(kn, r);
  const std::size_t k = at.k;
  double p = kn.P[k];
  if (at.t > 0.0) {
    const double c = std::exp(kn.offset[k + 1] - kn.offset[k]);
    const double h = at.h, h2 = h * h;
    if (at.t == 1.0) {
      p = c * c * kn.P[k + 1];
    } else {
      detail::Hermite5 pu{kn.u[k], h * kn.du[k], h2 * kn.ddu[k],
                          c * kn.u[k + 1], c * h * kn.du[k + 1], c * h2 * kn.ddu[k + 1]};
      auto sq = [&](double t) {
        const double v = pu.value(t);
        return v * v;
      };
      p += h * boost::math::quadrature::gauss<double, 10>::integrate(sq, 0.0, at.t);
    }
  }
  return fold(p, 2.0 * kn.offset[k]);
}

double log_derivative(const RadialSolution& sol, double r) {
  const Located at = locate(*sol.knots, r);
  double u, du;
  interpolate(*sol.knots, at, u, du);
  if (u == 0.0 && du == 0.0) throw EvaluationAtNode("u and u' vanish together at r = " + std::to_string(r));
  return u != 0.0 ? du / u : std::copysign(kInf, du);
}

double r_matrix(const RadialSolution& sol, double r) {
  const Located at = locate(*sol.knots, r);
  double u, du;
  interpolate(*sol.knots, at, u, du);
  if (u == 0.0 && du == 0.0) throw EvaluationAtNode("u and u' vanish together at r = " + std::to_string(r));
  return du != 0.0 ? u / du : std::copysign(kInf, u);
}

double kato_limit(const RadialSolution& sol) {
  if (sol.l != 0) throw DomainError("kato_limit needs l = 0");
  const bool coulomb = sol.cusp.family == CuspFamily::Free ||
                       (sol.cusp.family == CuspFamily::GC && sol.cusp.alpha == 1.0);
  if (!coulomb) throw DomainError("kato_limit needs a Coulomb-dominated model");
  const double* r = sol.grid.points.data();
  double e[3];
  for (int i = 0; i < 3; ++i) e[i] = sol.logderiv[i] - 1.0 / r[i];
  double a = 0.0;
  for (int i = 0; i < 3; ++i) {
    double w = 1.0;
    for (int j = 0; j < 3; ++j)
      if (j != i) w *= (0.0 - r[j]) / (r[i] - r[j]);
    a += w * e[i];
  }
  const double spread = std::max({std::fabs(e[0] - a), std::fabs(e[1] - a), std::fabs(e[2] - a)});
  if (!std::isfinite(a) || spread > 1e-2 * (1.0 + std::fabs(a)))
    throw ExtrapolationDiverged("L - 1/r does not settle over the smallest radii");
  return a;
}

namespace {

std::vector<double> sign_change_roots(const RadialSolution& sol, bool derivative) {
  const RadialKnots& kn = *sol.knots;
  const auto& y = derivative ? kn.du : kn.u;
  std::vector<double> roots;
  for (std::size_t k = 0; k + 1 < kn.r.size(); ++k) {
    if (y[k] == 0.0 && k > 0) {
      roots.push_back(kn.r[k]);
      continue;
    }
    if ((y[k] < 0.0) == (y[k + 1] < 0.0) || y[k + 1] == 0.0) continue;
    auto fn = [&](double r) {
      const Located at = locate(kn, r);
      double u, du;
      interpolate(kn, at, u, du);
      return derivative ? du : u;
    };
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t it = 100;
    auto [lo, hi] = boost::math::tools::toms748_solve(fn, kn.r[k], kn.r[k + 1], tol, it);
    roots.push_back(0.5 * (lo + hi));
  }
  return roots;
}

}  // namespace

std::vector<double> nodes_of_u(const RadialSolution& sol) { return sign_change_roots(sol, false); }
std::vector<double> nodes_of_du(const RadialSolution& sol) { return sign_change_roots(sol, true); }

}  // namespace cusplab
