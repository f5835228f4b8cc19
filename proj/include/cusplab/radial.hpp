#pragma once

#include <memory>
#include <vector>

#include "cusplab/cuspfn.hpp"
#include "cusplab/potential.hpp"

// Regular, cusp-normalised solutions of
//   u'' = [l(l+1)/r^2 + v(r) - e] u
// started from the zero-energy cusp function of the model's dominant term.

namespace cusplab {

inline constexpr double kRadialTolerance = 1e-11;

struct RadialGrid {
  double r_min = 0.0;
  double r_max = 0.0;
  std::vector<double> points;  // r_min < points.front(), points.back() == r_max

  void validate() const;
};

// Half the points log-spaced above r_min, the rest linear out to r_max.
// Extra radii are merged in.
RadialGrid make_grid(double r_min, double r_max, int n_points = 400,
                     const std::vector<double>& extra = {});

// Start radius used for a model: 1e-6 min(beta or 1, r_max) for free, GC and
// alCD, y = 60 for rVdW; shrunk further until the non-dominant part of v is
// below 1e-6 of the dominant term. StiffnessLimit when the rVdW exponent at
// the start would exceed 1e4.
double default_r_min(const PotentialModel& model, int l, double r_max);
RadialGrid default_grid(const PotentialModel& model, int l, double r_max, int n_points = 400,
                        const std::vector<double>& extra = {});

// Dense data at every accepted integration step.
struct RadialKnots {
  std::vector<double> r, u, du, ddu, dddu, P, offset;
};

struct RadialSolution {
  RadialGrid grid;
  int l = 0;
  double energy = 0.0;
  CuspSpec cusp;
  // On grid points. u, du are true values unless they leave the double range,
  // in which case the mantissa is kept and scale_offsets holds log(scale).
  std::vector<double> u, du, logderiv, rmatrix, prob;
  std::vector<double> scale_offsets;
  double tail = 0.0;  // closed-form integral of u^2 over (0, r_min)
  std::shared_ptr<const RadialKnots> knots;

  double value(double r) const;
  double derivative(double r) const;
  double probability(double r) const;  // integral of u^2 over (0, r)
};

// Throws NonphysicalPotential for aVdW/npCD models, DomainError for
// |e| > 1e6 s_E, StepFailure or StiffnessLimit from the propagation.
RadialSolution solve_regular(const PotentialModel& model, int l, double energy,
                             const RadialGrid& grid);

// Several energies integrated under one shared step schedule, so that
// differences across energies are smooth.
std::vector<RadialSolution> solve_family(const PotentialModel& model, int l,
                                         const std::vector<double>& energies,
                                         const RadialGrid& grid);

// L = u'/u and R = u/u'. At an exact zero the right-side limit is returned
// as a signed infinity. EvaluationAtNode if u and u' both vanish.
double log_derivative(const RadialSolution& sol, double r);
double r_matrix(const RadialSolution& sol, double r);

// lim_{r->0} (L - 1/r) from a quadratic through the three smallest grid
// radii; requires l = 0 and a Coulomb-dominated GC model.
double kato_limit(const RadialSolution& sol);

// Nodes of u on the knot set, by sign change and linear refinement.
std::vector<double> nodes_of_u(const RadialSolution& sol);
std::vector<double> nodes_of_du(const RadialSolution& sol);

}  // namespace cusplab
