#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

// Pair potentials in scaled units (hbar^2 / 2mu = 1): every strength is the
// pre-scaled 2mu G / hbar^2, so v(r) enters the radial equation as is.

namespace cusplab {

// v(r) = strength / r^exponent
struct PowerTerm {
  double strength = 0.0;
  double exponent = 0.0;
};

// v(r) = strength * exp(-r / range) / r
struct YukawaTerm {
  double strength = 0.0;
  double range = 1.0;
};

// Leading small-r power law v ~ strength / r^alpha fitted to a table.
struct PowerFit {
  double alpha = 0.0;
  double strength = 0.0;
  double r_squared = 1.0;
};

// Natural cubic spline through (r_k, v_k).
class Table {
 public:
  Table(std::vector<double> r, std::vector<double> v);

  double r_front() const { return r_.front(); }
  double r_back() const { return r_.back(); }
  const std::vector<double>& r() const { return r_; }
  const std::vector<double>& v() const { return v_; }

  bool contains(double r) const { return r >= r_.front() && r <= r_.back(); }
  double value(double r) const;
  double derivative(double r) const;
  double second_derivative(double r) const;

  // Leading small-r power law, fitted once at construction.
  const PowerFit& leading_fit() const { return fit_; }

 private:
  struct Spline;
  std::vector<double> r_, v_;
  std::shared_ptr<const Spline> spline_;
  PowerFit fit_;
};

// Least squares of log|v| against log r over the three smallest knots.
PowerFit fit_leading_power(const std::vector<double>& r, const std::vector<double>& v);

// v, v', v'' at one radius.
struct PotentialJet {
  double v = 0.0, dv = 0.0, d2v = 0.0;
};

class PotentialModel {
 public:
  PotentialModel() = default;  // the free particle

  std::vector<PowerTerm> terms;
  std::optional<YukawaTerm> yukawa;
  std::optional<Table> table;

  // Throws InvalidModel when a term is malformed.
  void validate() const;

  bool empty() const { return terms.empty() && !yukawa && !table; }
  bool table_only() const { return table && terms.empty() && !yukawa; }

  // Sum of all components. Outside the table range a table-only model throws
  // OutOfTableRange; in a mixed model the table contributes nothing there.
  double evaluate(double r) const;

  // Analytic derivatives for power and Yukawa parts, spline derivatives for
  // the table. Derivatives closer than two knots to a table edge throw
  // DifferentiationFailure.
  PotentialJet jet(double r) const;

  // Variant used by the radial propagator: below the table the fitted leading
  // power stands in for the table, above it the table contributes nothing.
  double evaluate_extended(double r) const;
  double derivative_extended(double r) const;
};

enum class ClassTag { F, GC, ALCD, RVDW, ALIMTS, NONPHYSICAL_AVDW, NONPHYSICAL_NPCD };

std::string to_string(ClassTag tag);
ClassTag class_tag_from_string(const std::string& s);

// Single-term cusp family governing the start of a propagation.
enum class CuspFamily { Free, GC, ALCD, RVDW };

struct ShortRangeClass {
  ClassTag tag = ClassTag::F;
  double dominant_alpha = 0.0;
  double dominant_strength = 0.0;
  std::optional<double> gamma2;
  std::optional<double> beta_alpha;
  std::optional<double> lt;
  CuspFamily single_term_family = CuspFamily::Free;
  // Every diverging component (alpha > 0) after merging equal exponents,
  // in decreasing alpha. Used to size the start radius for alImtS models.
  std::vector<PowerTerm> diverging;
  // Fraction of the summed diverging |v| carried by the dominant term at the
  // probe radius r0 (1 for single-term models).
  double dominant_share = 1.0;

  bool physical() const {
    return tag != ClassTag::NONPHYSICAL_AVDW && tag != ClassTag::NONPHYSICAL_NPCD;
  }
};

// beta = s^(1/(alpha-2))
double length_scale(double alpha, double scaled_strength);
// s_E = 1/beta^2
double energy_scale(double beta_alpha);
// l_t = sqrt((l+1/2)^2 + gamma2) - 1/2
double transformed_l(int l, double gamma2);

// Dominant-term share of |v| below which a multi-term model is alImtS.
inline constexpr double kDominanceThreshold = 0.9;
// R^2 below which a fitted tabulated leading power is rejected.
inline constexpr double kFitRSquaredMin = 0.999;

ShortRangeClass classify(const PotentialModel& model);

// Natural energy unit of a model: 1/beta^2 of the dominant term, else 1.
double natural_energy_scale(const ShortRangeClass& cls);

}  // namespace cusplab
