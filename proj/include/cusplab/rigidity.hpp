#pragma once

#include <vector>

#include "cusplab/potential.hpp"
#include "cusplab/radial.hpp"

// Rigidity G = 1 / integral_0^r u^2 and the identities
//   integral_0^r u^2 = -(dL/de) u^2 = (dR/de) u'^2.

namespace cusplab {

double probability_integral(const RadialSolution& sol, double r);
double rigidity_at(const RadialSolution& sol, double r);

struct RigidityProfile {
  std::vector<double> radii, prob_integral, rigidity, dL_de, dR_de;
};

struct FundamentalPoint {
  double r = 0.0;
  double P = 0.0, rigidity = 0.0;
  double dL_de = 0.0, dR_de = 0.0;
  double residual1 = 0.0, residual2 = 0.0;
  bool skip1 = false, skip2 = false;  // near a node of u (resp. u')
};

struct FundamentalReport {
  std::vector<FundamentalPoint> points;
  double max_residual1 = 0.0, max_residual2 = 0.0;
  double d_eps = 0.0;

  double max_residual() const { return max_residual1 > max_residual2 ? max_residual1 : max_residual2; }
  RigidityProfile profile() const;
};

// Near-node exclusion radius in units of the local node spacing.
inline constexpr double kNodeExclusion = 1e-3;

// d_eps <= 0 selects 1e-4 max(|e|, s_E). Energy derivatives use the 5-point
// central rule at steps h and 2h, Richardson-combined. Points near a node are
// skipped; NodeProximity when every point is skipped for one identity.
FundamentalReport verify_fundamental(const PotentialModel& model, int l, double energy,
                                     const std::vector<double>& r_list, double d_eps = 0.0);

struct MonotonicityReport {
  int intervals = 0;
  int poles_L = 0, poles_R = 0;
  int violations_L = 0, violations_R = 0;
  int refinements = 0;
  bool pass() const { return violations_L == 0 && violations_R == 0; }
};

// Checks L(r, e) decreasing and R(r, e) increasing between poles, tracking poles
// by sign changes of u and u'. Apparent violations are bisected up to 10
// times before they count. PoleStraddle when a sample lands exactly on a pole.
MonotonicityReport monotonicity_scan(const PotentialModel& model, int l, double r,
                                     const std::vector<double>& energy_grid);

struct OverlapPair {
  double lhs = 0.0;  // integral_0^r u_e2 u_e1
  double rhs = 0.0;  // W_r(u_e2, u_e1) / (e2 - e1), W(a, b) = a b' - a' b
};

OverlapPair cross_energy_overlap(const PotentialModel& model, int l, double e1, double e2, double r);

}  // namespace cusplab
