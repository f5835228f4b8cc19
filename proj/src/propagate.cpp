#include "propagate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint/stepper/runge_kutta_fehlberg78.hpp>

#include "cusplab/errors.hpp"

namespace cusplab::detail {

double effective_q(const PotentialModel& model, int l, double r) {
  return l * (l + 1.0) / (r * r) + model.evaluate_extended(r);
}

double effective_dq(const PotentialModel& model, int l, double r) {
  return -2.0 * l * (l + 1.0) / (r * r * r) + model.derivative_extended(r);
}

namespace {

using State = std::vector<double>;

struct System {
  const PotentialModel* model;
  int l;
  const std::vector<double>* energy;
  const std::vector<std::pair<int, int>>* pairs;

  void operator()(const State& x, State& dxdt, double r) const {
    const double q = effective_q(*model, l, r);
    const std::size_t m = energy->size();
    for (std::size_t c = 0; c < m; ++c) {
      const double u = x[3 * c], du = x[3 * c + 1];
      dxdt[3 * c] = du;
      dxdt[3 * c + 1] = (q - (*energy)[c]) * u;
      dxdt[3 * c + 2] = u * u;
    }
    for (std::size_t k = 0; k < pairs->size(); ++k) {
      const auto [a, b] = (*pairs)[k];
      dxdt[3 * m + k] = x[3 * a] * x[3 * b];
    }
  }
};

constexpr double kRescaleHigh = 1e100;
constexpr double kRescaleLow = 1e-100;

}  // namespace

Trace propagate(const PotentialModel& model, int l, const std::vector<ChannelStart>& start,
                const std::vector<std::pair<int, int>>& pairs, const std::vector<double>& cross_start,
                double a, const std::vector<double>& stops, const PropagateOptions& opt) {
  namespace odeint = boost::numeric::odeint;
  const std::size_t m = start.size();
  const std::size_t np = pairs.size();
  if (stops.empty()) throw StepFailure("propagate: no end point");
  const double dir = stops.back() >= a ? 1.0 : -1.0;

  std::vector<double> energy(m);
  State x(3 * m + np), xout(3 * m + np), xerr(3 * m + np), dxdt(3 * m + np);
  std::vector<double> off(m);
  for (std::size_t c = 0; c < m; ++c) {
    energy[c] = start[c].energy;
    x[3 * c] = start[c].u;
    x[3 * c + 1] = start[c].du;
    x[3 * c + 2] = start[c].P;
    off[c] = start[c].offset;
  }
  for (std::size_t k = 0; k < np; ++k) x[3 * m + k] = k < cross_start.size() ? cross_start[k] : 0.0;

  Trace tr;
  tr.u.assign(m, {});
  tr.du.assign(m, {});
  tr.P.assign(m, {});
  tr.off.assign(m, {});
  tr.cross.assign(np, {});
  auto record = [&](double r) {
    tr.r.push_back(r);
    for (std::size_t c = 0; c < m; ++c) {
      tr.u[c].push_back(x[3 * c]);
      tr.du[c].push_back(x[3 * c + 1]);
      tr.P[c].push_back(x[3 * c + 2]);
      tr.off[c].push_back(off[c]);
    }
    for (std::size_t k = 0; k < np; ++k) tr.cross[k].push_back(x[3 * m + k]);
  };

  System sys{&model, l, &energy, &pairs};
  odeint::runge_kutta_fehlberg78<State> stepper;

  auto step_cap = [&](double r) {
    const double q = effective_q(model, l, r);
    double w = 0.0;
    for (double e : energy) w = std::max(w, std::fabs(q - e));
    return opt.step_fraction / std::sqrt(w + 1.0 / (r * r));
  };

  double r = a;
  record(r);
  double h = 0.25 * step_cap(r);
  std::size_t n_steps = 0;
  for (double target : stops) {
    if ((target - r) * dir < 0.0) throw StepFailure("propagate: stops are not monotone");
    while ((target - r) * dir > 0.0) {
      if (++n_steps > opt.max_steps) throw StepFailure("propagate: step budget exhausted");
      h = std::min(h, step_cap(r));
      bool last = false;
      if (r + dir * h * 1.0000001 >= target && dir > 0) last = true;
      if (r - h * 1.0000001 <= target && dir < 0) last = true;
      const double dt = last ? target - r : dir * h;
      stepper.do_step(sys, x, r, xout, dt, xerr);
      const double ad = std::fabs(dt);
      sys(x, dxdt, r);
      double err = 0.0;
      for (std::size_t c = 0; c < m; ++c) {
        const double u0 = x[3 * c], du0 = x[3 * c + 1], p0 = x[3 * c + 2];
        const double u1 = xout[3 * c], du1 = xout[3 * c + 1], p1 = xout[3 * c + 2];
        const double su = std::max(std::fabs(u0), std::fabs(u1)) + ad * std::fabs(du0);
        const double sd = std::max(std::fabs(du0), std::fabs(du1)) + ad * std::fabs(dxdt[3 * c + 1]);
        const double sp = std::max(std::fabs(p0), std::fabs(p1)) + ad * u0 * u0;
        err = std::max(err, std::fabs(xerr[3 * c]) / su);
        err = std::max(err, std::fabs(xerr[3 * c + 1]) / sd);
        if (sp > 0.0) err = std::max(err, std::fabs(xerr[3 * c + 2]) / sp);
      }
      for (std::size_t k = 0; k < np; ++k) {
        const auto [ia, ib] = pairs[k];
        const double s = std::max(std::fabs(x[3 * m + k]), std::fabs(xout[3 * m + k])) +
                         std::sqrt(std::fabs(xout[3 * ia + 2] * xout[3 * ib + 2]));
        if (s > 0.0) err = std::max(err, std::fabs(xerr[3 * m + k]) / s);
      }
      if (!std::isfinite(err)) throw StepFailure("propagate: non-finite state at r = " + std::to_string(r));
      err /= opt.tol;
      if (err <= 1.0) {
        r = last ? target : r + dt;
        x.swap(xout);
        // Keep mantissas in range; offsets are exact powers of two.
        for (std::size_t c = 0; c < m; ++c) {
          const double big = std::max(std::fabs(x[3 * c]), std::fabs(x[3 * c + 1]));
          if (big > kRescaleHigh || (big < kRescaleLow && big > 0.0)) {
            const int e = std::ilogb(big);
            x[3 * c] = std::ldexp(x[3 * c], -e);
            x[3 * c + 1] = std::ldexp(x[3 * c + 1], -e);
            x[3 * c + 2] = std::ldexp(x[3 * c + 2], -2 * e);
            off[c] += e * std::log(2.0);
            for (std::size_t k = 0; k < np; ++k) {
              if (pairs[k].first == static_cast<int>(c)) x[3 * m + k] = std::ldexp(x[3 * m + k], -e);
              if (pairs[k].second == static_cast<int>(c)) x[3 * m + k] = std::ldexp(x[3 * m + k], -e);
            }
          }
        }
        record(r);
        const double grow = err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(err, -1.0 / 8.0), 0.2, 4.0);
        if (!last) h = ad * grow;
      } else {
        h = ad * std::clamp(0.9 * std::pow(err, -1.0 / 8.0), 0.1, 0.9);
        if (h < 1e-15 * std::max(std::fabs(r), 1e-300))
          throw StepFailure("propagate: step size underflow at r = " + std::to_string(r));
      }
    }
    tr.stop.push_back(tr.r.size() - 1);
  }
  return tr;
}

double Hermite5::value(double t) const {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
  const double h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
  const double h5 = 10 * t3 - 15 * t4 + 6 * t5;
  const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
  const double h3 = 0.5 * t3 - t4 + 0.5 * t5;
  return p0 * h0 + d0 * h1 + s0 * h2 + p1 * h5 + d1 * h4 + s1 * h3;
}

double Hermite5::slope(double t) const {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double h0 = -30 * t2 + 60 * t3 - 30 * t4;
  const double h1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
  const double h2 = t - 4.5 * t2 + 6 * t3 - 2.5 * t4;
  const double h5 = 30 * t2 - 60 * t3 + 30 * t4;
  const double h4 = -12 * t2 + 28 * t3 - 15 * t4;
  const double h3 = 1.5 * t2 - 4 * t3 + 2.5 * t4;
  return p0 * h0 + d0 * h1 + s0 * h2 + p1 * h5 + d1 * h4 + s1 * h3;
}

double hermite5_integral(double h, double p0, double d0, double s0, double p1, double d1,
                         double s1) {
  return 0.5 * h * (p0 + p1) + h * h / 10.0 * (d0 - d1) + h * h * h / 120.0 * (s0 + s1);
}

}  // namespace cusplab::detail
