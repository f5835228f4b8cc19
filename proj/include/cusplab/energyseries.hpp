#pragma once

#include <memory>
#include <vector>

#include "cusplab/potential.hpp"
#include "cusplab/radial.hpp"

// Energy-Taylor structure of the cusp solution,
//   u(r, e) = f(r) + sum_j e^j x_j(r),
// where x_j'' - q x_j = -x_{j-1}, solved by variation of parameters against
// the zero-energy pair (f, g). Lower limits sit at the origin for power-law
// starts (closed-form tails below r_min) and at r_min for rVdW.

namespace cusplab {

inline constexpr int kMaxSeriesOrder = 6;

struct SeriesKnots {
  std::vector<double> r, q, dq;
  // x[0] = f; each profile with its r-derivative
  std::vector<std::vector<double>> x, dx;
};

struct EnergySeries {
  RadialGrid grid;
  int l = 0;
  int j_max = 0;
  std::vector<double> f_cp;           // on grid points
  std::vector<std::vector<double>> x;  // x[j-1] on grid points, j = 1..j_max
  bool analytic_companion = false;
  double wronskian = 0.0;        // W_r(f, g) of the pair used
  double validity_energy = 0.0;  // ratio-test radius |x_{j_max-1} / x_{j_max}| at r_max
  std::shared_ptr<const SeriesKnots> knots;

  // x_j at an arbitrary radius of the grid range (j = 0 returns f).
  double profile(int j, double r) const;
};

// CompanionUnavailable when the numerically built g fails the Wronskian check.
EnergySeries build_series(const PotentialModel& model, int l, const RadialGrid& grid, int j_max = 4);

// Truncated sum up to order j_max (negative: all orders of the series).
double series_eval(const EnergySeries& series, double energy, double r, int j_max = -1);

struct EntiretyRow {
  double energy = 0.0;
  std::vector<int> orders;
  std::vector<double> errors;  // |series - solve| / |solve|
  bool monotone = true;
};

// Compares truncations j_max = 2, 4, 6 with direct solves at radius r.
std::vector<EntiretyRow> entirety_check(const PotentialModel& model, int l, double r,
                                        const std::vector<double>& energies);

}  // namespace cusplab
