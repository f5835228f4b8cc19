#include "cusplab/energyseries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cusplab/errors.hpp"
#include "propagate.hpp"

namespace cusplab {
namespace {

constexpr double kWronskianSpread = 1e-6;
// Truncation errors below this are at the propagation noise floor and are not
// required to keep decreasing.
constexpr double kErrorFloor = 1e-10;

bool single_term(const PotentialModel& m) {
  if (m.empty()) return true;
  return m.terms.size() == 1 && !m.yukawa && !m.table;
}

struct Companion {
  std::vector<double> g, dg;
};

Companion analytic_companion(const CuspSpec& spec, const std::vector<double>& r) {
  Companion c;
  for (double rr : r) {
    const CuspValue v = irregular_g(spec, rr);
    c.g.push_back(v.value());
    c.dg.push_back(v.derivative());
  }
  return c;
}

// Inward propagation from r_max at zero energy with data chosen so that
// W(f, g) = 2/pi there.
Companion numerical_companion(const PotentialModel& model, int l, const std::vector<double>& r,
                              double f_end, double df_end) {
  const double n = (f_end * f_end + df_end * df_end) * 3.14159265358979323846 / 2.0;
  detail::ChannelStart st{0.0, -df_end / n, f_end / n, 0.0, 0.0};
  std::vector<double> stops(r.rbegin() + 1, r.rend());
  const detail::Trace tr = detail::propagate(model, l, {st}, {}, {}, r.back(), stops,
                                             {kRadialTolerance, 0.1, 4000000});
  Companion c;
  const std::size_t n_r = r.size();
  c.g.resize(n_r);
  c.dg.resize(n_r);
  c.g[n_r - 1] = st.u;
  c.dg[n_r - 1] = st.du;
  for (std::size_t i = 0; i < stops.size(); ++i) {
    const std::size_t k = tr.stop[i];
    const double e = std::exp(tr.off[0][k]);
    c.g[n_r - 2 - i] = tr.u[0][k] * e;
    c.dg[n_r - 2 - i] = tr.du[0][k] * e;
  }
  return c;
}

// Two-point Hermite rule exact through degree 7, from value and the first
// three derivatives at each end.
double hermite7_integral(double h, const double* a, const double* b) {
  return h * (a[0] + b[0]) / 2.0 + h * h * 3.0 / 28.0 * (a[1] - b[1]) +
         h * h * h / 84.0 * (a[2] + b[2]) + h * h * h * h / 1680.0 * (a[3] - b[3]);
}

// Septic Hermite on [0, 1]; derivatives pre-scaled by powers of h.
double hermite7_value(const double* a, const double* b, double t) {
  const double c4 = -35 * a[0] - 20 * a[1] - 5 * a[2] - 2 * a[3] / 3 + 35 * b[0] - 15 * b[1] + 5 * b[2] / 2 - b[3] / 6;
  const double c5 = 84 * a[0] + 45 * a[1] + 10 * a[2] + a[3] + -84 * b[0] + 39 * b[1] - 7 * b[2] + b[3] / 2;
  const double c6 = -70 * a[0] - 36 * a[1] - 15 * a[2] / 2 - 2 * a[3] / 3 + 70 * b[0] - 34 * b[1] + 13 * b[2] / 2 - b[3] / 2;
  const double c7 = 20 * a[0] + 10 * a[1] + 2 * a[2] + a[3] / 6 - 20 * b[0] + 10 * b[1] - 2 * b[2] + b[3] / 6;
  return a[0] + t * (a[1] + t * (a[2] / 2 + t * (a[3] / 6 + t * (c4 + t * (c5 + t * (c6 + t * c7))))));
}

}  // namespace

double EnergySeries::profile(int j, double r) const {
  const SeriesKnots& kn = *knots;
  if (j < 0 || j > j_max) throw DomainError("series order out of range");
  if (!(r >= kn.r.front() * (1 - 1e-14)) || !(r <= kn.r.back() * (1 + 1e-14)))
    throw DomainError("radius outside the series grid: " + std::to_string(r));
  auto it = std::upper_bound(kn.r.begin(), kn.r.end(), r);
  std::size_t k = (it == kn.r.begin()) ? 0 : static_cast<std::size_t>(it - kn.r.begin()) - 1;
  if (k + 1 >= kn.r.size()) k = kn.r.size() - 2;
  const double h = kn.r[k + 1] - kn.r[k];
  const double t = std::clamp((r - kn.r[k]) / h, 0.0, 1.0);
  const auto& x = kn.x[j];
  const auto& dx = kn.dx[j];
  auto jet = [&](std::size_t i, double* out) {
    out[0] = x[i];
    out[1] = h * dx[i];
    out[2] = h * h * (kn.q[i] * x[i] - (j > 0 ? kn.x[j - 1][i] : 0.0));
    out[3] = h * h * h * (kn.dq[i] * x[i] + kn.q[i] * dx[i] - (j > 0 ? kn.dx[j - 1][i] : 0.0));
  };
  double a[4], b[4];
  jet(k, a);
  jet(k + 1, b);
  return hermite7_value(a, b, t);
}

EnergySeries build_series(const PotentialModel& model, int l, const RadialGrid& grid, int j_max) {
  if (j_max < 0 || j_max > kMaxSeriesOrder) throw DomainError("j_max must lie in [0, 6]");
  const RadialSolution f = solve_regular(model, l, 0.0, grid);
  const RadialKnots& fk = *f.knots;
  const std::size_t n = fk.r.size();

  auto kn = std::make_shared<SeriesKnots>();
  kn->r = fk.r;
  kn->q.resize(n);
  std::vector<double> fv(n), dfv(n);
  auto& dq = kn->dq;
  dq.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    kn->q[k] = detail::effective_q(model, l, fk.r[k]);
    dq[k] = detail::effective_dq(model, l, fk.r[k]);
    const double e = fk.offset[k] == 0.0 ? 1.0 : std::exp(fk.offset[k]);
    fv[k] = fk.u[k] * e;
    dfv[k] = fk.du[k] * e;
  }

  EnergySeries s;
  s.grid = grid;
  s.l = l;
  s.j_max = j_max;
  s.analytic_companion = single_term(model);
  const Companion g = s.analytic_companion ? analytic_companion(f.cusp, fk.r)
                                           : numerical_companion(model, l, fk.r, fv.back(), dfv.back());

  // The Wronskian must be constant along the grid.
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = fv[k] * g.dg[k] - dfv[k] * g.g[k];
  const double W = w[n / 2];
  double spread = 0.0;
  for (double wk : w) spread = std::max(spread, std::fabs(wk / W - 1.0));
  if (!std::isfinite(W) || W == 0.0 || spread > kWronskianSpread)
    throw CompanionUnavailable("Wronskian of (f, g) varies by " + std::to_string(spread));
  s.wronskian = W;

  // Leading small-r forms f ~ c_f r^(lam+1), g ~ c_g r^(-lam),
  // x_p ~ a_p r^(lam+1+2p) with a_p = -a_{p-1} / (2p (2 lam + 2p + 1)).
  const bool power_start = f.cusp.family != CuspFamily::RVDW;
  const double lam = f.cusp.family == CuspFamily::ALCD ? *f.cusp.lt : static_cast<double>(l);
  const double r0 = fk.r[0];
  const double c_f = fv[0] / std::pow(r0, lam + 1.0);
  const double c_g = g.g[0] * std::pow(r0, lam);
  std::vector<double> a(kMaxSeriesOrder + 1);
  a[0] = c_f;
  for (int p = 1; p <= kMaxSeriesOrder; ++p) a[p] = -a[p - 1] / (2.0 * p * (2.0 * lam + 2.0 * p + 1.0));

  kn->x.push_back(fv);
  kn->dx.push_back(dfv);
  for (int j = 1; j <= j_max; ++j) {
    const auto& xp = kn->x[j - 1];
    const auto& dxp = kn->dx[j - 1];
    std::vector<double> xj(n, 0.0), dxj(n, 0.0);
    // Integrals of g x_{j-1} and f x_{j-1}. For power-law starts the part
    // below r_min is added in closed form from the leading small-r powers.
    double A = 0.0, B = 0.0;
    if (power_start) {
      const int p = j - 1;
      A = c_g * a[p] * std::pow(r0, 2.0 * p + 2.0) / (2.0 * p + 2.0);
      B = c_f * a[p] * std::pow(r0, 2.0 * lam + 2.0 * p + 3.0) / (2.0 * lam + 2.0 * p + 3.0);
      xj[0] = (fv[0] * A - g.g[0] * B) / W;
      dxj[0] = (dfv[0] * A - g.dg[0] * B) / W;
    }
    // Jets (p, p', p'', p''') of g x_{j-1} and f x_{j-1}.
    auto jets = [&](std::size_t i, double* gx, double* fx) {
      const double q = kn->q[i];
      const double x0 = xp[i], x1 = dxp[i];
      const double x2 = q * x0 - (j >= 2 ? kn->x[j - 2][i] : 0.0);
      const double x3 = dq[i] * x0 + q * x1 - (j >= 2 ? kn->dx[j - 2][i] : 0.0);
      auto jet = [&](double y0, double y1, double* out) {
        const double y2 = q * y0, y3 = dq[i] * y0 + q * y1;
        out[0] = y0 * x0;
        out[1] = y1 * x0 + y0 * x1;
        out[2] = y2 * x0 + 2.0 * y1 * x1 + y0 * x2;
        out[3] = y3 * x0 + 3.0 * y2 * x1 + 3.0 * y1 * x2 + y0 * x3;
      };
      jet(g.g[i], g.dg[i], gx);
      jet(fv[i], dfv[i], fx);
    };
    double ga[4], fa[4], gb[4], fb[4];
    jets(0, ga, fa);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double h = kn->r[k + 1] - kn->r[k];
      jets(k + 1, gb, fb);
      A += hermite7_integral(h, ga, gb);
      B += hermite7_integral(h, fa, fb);
      std::copy(gb, gb + 4, ga);
      std::copy(fb, fb + 4, fa);
      xj[k + 1] = (fv[k + 1] * A - g.g[k + 1] * B) / W;
      dxj[k + 1] = (dfv[k + 1] * A - g.dg[k + 1] * B) / W;
    }
    kn->x.push_back(std::move(xj));
    kn->dx.push_back(std::move(dxj));
  }

  const std::size_t ng = grid.points.size();
  s.f_cp = f.u;
  for (std::size_t i = 0; i < ng; ++i)
    if (f.scale_offsets[i] != 0.0) s.f_cp[i] = f.u[i] * std::exp(f.scale_offsets[i]);
  // Grid points are knots of the f propagation, in order.
  std::vector<std::size_t> at(ng);
  {
    std::size_t k = 0;
    for (std::size_t i = 0; i < ng; ++i) {
      while (k < n && kn->r[k] < grid.points[i] * (1 - 1e-15)) ++k;
      at[i] = std::min(k, n - 1);
    }
  }
  for (int j = 1; j <= j_max; ++j) {
    std::vector<double> col(ng);
    for (std::size_t i = 0; i < ng; ++i) col[i] = kn->x[j][at[i]];
    s.x.push_back(std::move(col));
  }
  if (j_max >= 1) {
    const double a = kn->x[j_max - 1].back(), b = kn->x[j_max].back();
    s.validity_energy = b != 0.0 ? std::fabs(a / b) : std::numeric_limits<double>::infinity();
  }
  s.knots = std::move(kn);
  return s;
}

double series_eval(const EnergySeries& series, double energy, double r, int j_max) {
  const int top = (j_max < 0) ? series.j_max : std::min(j_max, series.j_max);
  double sum = 0.0, p = 1.0;
  for (int j = 0; j <= top; ++j) {
    sum += p * series.profile(j, r);
    p *= energy;
  }
  return sum;
}

std::vector<EntiretyRow> entirety_check(const PotentialModel& model, int l, double r,
                                        const std::vector<double>& energies) {
  const RadialGrid grid = default_grid(model, l, r, 400);
  const EnergySeries s = build_series(model, l, grid, kMaxSeriesOrder);
  std::vector<EntiretyRow> rows;
  for (double e : energies) {
    const RadialSolution sol = solve_regular(model, l, e, grid);
    const double u = sol.value(r);
    EntiretyRow row;
    row.energy = e;
    for (int j : {2, 4, 6}) {
      row.orders.push_back(j);
      row.errors.push_back(std::fabs(series_eval(s, e, r, j) - u) / std::fabs(u));
    }
    for (std::size_t i = 1; i < row.errors.size(); ++i)
      if (!(row.errors[i] < row.errors[i - 1]) && row.errors[i] > kErrorFloor) row.monotone = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cusplab
