#pragma once

// Shared radial propagation engine: several energies of one partial wave are
// integrated together under a single step-size controller, so every channel
// sees the same step schedule. Optional cross integrals of u_a u_b ride along.

#include <utility>
#include <vector>

#include "cusplab/cuspfn.hpp"
#include "cusplab/potential.hpp"

namespace cusplab::detail {

struct ChannelStart {
  double energy = 0.0;
  double u = 0.0, du = 0.0, P = 0.0;
  double offset = 0.0;  // true values are mantissas * exp(offset), P * exp(2 offset)
};

struct Trace {
  std::vector<double> r;          // every accepted step end, starting point included
  std::vector<std::size_t> stop;  // knot index of each requested stop
  // [channel][knot]
  std::vector<std::vector<double>> u, du, P, off;
  // [pair][knot], mantissa relative to off_a + off_b
  std::vector<std::vector<double>> cross;
};

struct PropagateOptions {
  double tol = 1e-11;
  // Step cap as a fraction of the local length 1/sqrt(|q - e| + 1/r^2).
  double step_fraction = 0.1;
  std::size_t max_steps = 4000000;
};

// l(l+1)/r^2 + v(r), with the extended potential.
double effective_q(const PotentialModel& model, int l, double r);
double effective_dq(const PotentialModel& model, int l, double r);

// Integrates from a through the stops (monotone in the direction of travel,
// last stop is the end point). Throws StepFailure when the tolerance cannot
// be met.
Trace propagate(const PotentialModel& model, int l, const std::vector<ChannelStart>& start,
                const std::vector<std::pair<int, int>>& pairs, const std::vector<double>& cross_start,
                double a, const std::vector<double>& stops, const PropagateOptions& opt = {});

// Cusp-function start shared by every regular propagation.
struct StartData {
  CuspSpec spec;
  double r_min = 0.0;
  CuspValue f0;       // value at r_min
  double tail = 0.0;  // mantissa of integral_0^r_min F^2, offset 2 f0.log_offset

  // f0 with its leading energy correction, so that the start carries the
  // right dL/de as well as the right L.
  ChannelStart channel(double e) const;
  // Mantissa of integral_0^r_min u_e1 u_e2 at the same offset as tail.
  double cross_tail(double e1, double e2) const;
};
StartData start_data(const PotentialModel& model, int l, double r_min);

// Quintic Hermite on [0,1] from value, first and second derivative at both
// ends (derivatives already multiplied by h and h^2). Returns value and
// d/dt.
struct Hermite5 {
  double p0, d0, s0, p1, d1, s1;
  double value(double t) const;
  double slope(double t) const;
};

// Integral over [0, h] of the quintic with the given end data (not scaled).
double hermite5_integral(double h, double p0, double d0, double s0, double p1, double d1,
                         double s1);

}  // namespace cusplab::detail
