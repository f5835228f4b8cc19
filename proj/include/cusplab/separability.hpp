#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "cusplab/potential.hpp"

// Potential-level separability of a pair (i, j) from spectators k: the sum
// of v_ik + v_jk compared with its value with both particles moved to the
// pair centre of mass c.

namespace cusplab {

using Vec3 = std::array<double, 3>;

struct ParticleConfig {
  std::vector<double> masses;
  std::vector<Vec3> positions;
  std::pair<int, int> pair{0, 1};
  // Keyed by (min, max) index; unordered lookup through potential().
  std::map<std::pair<int, int>, PotentialModel> pair_potentials;

  // InvalidModel for shape problems, CoincidentParticles for repeated positions.
  void validate() const;
  const PotentialModel& potential(int a, int b) const;
  Vec3 pair_centre() const;
  double pair_separation() const;
  bool identical_pair() const;  // equal masses and identical spectator potentials
  std::vector<int> spectators() const;
};

// Sum over spectators of v_ik(|r_ik|) + v_jk(|r_jk|).
double full_potential(const ParticleConfig& config);
// Same with both pair members placed at c.
double separable_potential(const ParticleConfig& config);

struct ExpansionTerms {
  double zeroth = 0.0, first = 0.0, second = 0.0;
};

// Taylor terms of v_ik + v_jk in the pair separation r about R = |c - r_k|;
// gamma is the angle between r_i - r_j and c - r_k.
ExpansionTerms expansion_terms(const PotentialModel& v_ik, const PotentialModel& v_jk, double m_i,
                               double m_j, double R, double r, double gamma);

// r |v'(R)| / |v(R)|. DomainError when v(R) = 0.
double small_parameter(const PotentialModel& model, double r, double R);

struct SpectatorTerms {
  int k = 0;
  double R = 0.0, gamma = 0.0;
  ExpansionTerms terms;
};

struct SeparabilityReport {
  double V_full = 0.0, V_sp = 0.0, residual = 0.0;
  double first_order_pred = 0.0, second_order_pred = 0.0;
  double small_param = 0.0;
  double r_rho = 0.0;  // nearest spectator distance from c
  double gamma_max = 0.0, gamma_mean = 0.0;
  std::vector<SpectatorTerms> spectators;
};

SeparabilityReport separability_report(const ParticleConfig& config);

// The template with the pair re-placed at separation r about the same centre
// and along the same direction.
ParticleConfig with_separation(const ParticleConfig& config, double r);

struct ScalingFit {
  double slope = 0.0, intercept = 0.0;  // log|residual| = intercept + slope log r
  int order = 0;                        // nearest integer to slope
  double prefactor = 0.0;               // signed residual / r^order, log-averaged
  double predicted_prefactor = 0.0;     // from expansion_terms
  double prefactor_rel_error = 0.0;
  std::vector<double> r, residual;
};

inline constexpr double kResidualFloor = 1e-14;

// Log-log fit of the residual over the sweep. FitDegenerate when a residual
// sits below the floor; DomainError when the sweep spans under 2 decades or
// reaches beyond 0.1 r_rho.
ScalingFit residual_scaling_fit(const ParticleConfig& config, const std::vector<double>& r_sweep);

// Log-spaced sweep, [1e-5, 1e-3] r_rho for distinct pairs and [1e-4, 1e-2]
// r_rho for identical ones.
std::vector<double> default_sweep(const ParticleConfig& config, int points = 21);

// Residual averaged over all orientations of the pair axis.
double orientation_averaged_residual(const ParticleConfig& config, double r);

// Largest spread between curves sampled on a common abscissa, relative to
// the largest magnitude at that abscissa.
double collapse_metric(const std::vector<std::vector<double>>& curves);

struct CollapseReport {
  std::vector<double> x;
  std::vector<double> spectator_R;
  // [R][x], orientation-averaged residual / V_sp
  std::vector<std::vector<double>> vs_range, vs_distance;
  double metric_range = 0.0;     // abscissa r / range
  double metric_distance = 0.0;  // abscissa r / R
};

// Identical pair, one spectator at each distance in R_values, all pair
// potentials equal to `model`. Curves are sampled at r = x * range and at
// r = x * R.
CollapseReport collapse_study(const PotentialModel& model, double range,
                              const std::vector<double>& R_values, const std::vector<double>& x);

struct NearestSpectatorStats {
  double density = 0.0;
  std::size_t samples = 0;
  double mean = 0.0, std_error = 0.0;
  double radius = 0.0;      // (4 pi rho / 3)^(-1/3)
  double expectation = 0.0;  // Gamma(4/3) * radius for a Poisson gas
};

// Monte-Carlo nearest-neighbour distance from a point in a homogeneous
// Poisson gas. Each task draws from its own stream seeded by (seed, task),
// so results do not depend on the thread count.
NearestSpectatorStats nearest_spectator_stats(double density, std::size_t samples,
                                              std::uint64_t seed, int threads = 1);

}  // namespace cusplab
