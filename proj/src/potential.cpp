#include "cusplab/potential.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_interp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cusplab/errors.hpp"

namespace cusplab {

struct Table::Spline {
  gsl_interp* interp = nullptr;
  ~Spline() { gsl_interp_free(interp); }
};

namespace {

// GSL reports through errno-style codes once its abort handler is disabled.
struct GslHandlerOff {
  GslHandlerOff() { gsl_set_error_handler_off(); }
};
const GslHandlerOff gsl_handler_off;

}  // namespace

PowerFit fit_leading_power(const std::vector<double>& r, const std::vector<double>& v) {
  if (r.size() < 3) throw InvalidModel("table needs at least three knots");
  double x[3], y[3];
  for (int k = 0; k < 3; ++k) {
    if (v[k] == 0.0) return {0.0, 0.0, 0.0};
    x[k] = std::log(r[k]);
    y[k] = std::log(std::fabs(v[k]));
  }
  const double mx = (x[0] + x[1] + x[2]) / 3.0, my = (y[0] + y[1] + y[2]) / 3.0;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int k = 0; k < 3; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  const double slope = sxy / sxx;
  PowerFit fit;
  fit.alpha = -slope;
  fit.strength = std::copysign(std::exp(my - slope * mx), v[0]);
  // A constant table is fitted exactly by alpha = 0.
  fit.r_squared = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  const bool same_sign = (v[0] > 0) == (v[1] > 0) && (v[1] > 0) == (v[2] > 0);
  if (!same_sign) fit.r_squared = 0.0;
  return fit;
}

Table::Table(std::vector<double> r, std::vector<double> v) : r_(std::move(r)), v_(std::move(v)) {
  if (r_.size() != v_.size()) throw InvalidModel("table columns differ in length");
  if (r_.size() < 3) throw InvalidModel("table needs at least three knots");
  for (std::size_t k = 0; k < r_.size(); ++k) {
    if (!std::isfinite(r_[k]) || !std::isfinite(v_[k]))
      throw InvalidModel("table entries must be finite");
    if (r_[k] <= 0.0) throw InvalidModel("table radii must be positive");
    if (k > 0 && !(r_[k] > r_[k - 1])) throw InvalidModel("table radii must increase strictly");
  }
  auto spline = std::make_shared<Spline>();
  spline->interp = gsl_interp_alloc(gsl_interp_cspline, r_.size());
  if (gsl_interp_init(spline->interp, r_.data(), v_.data(), r_.size()) != GSL_SUCCESS)
    throw InvalidModel("spline construction failed");
  spline_ = std::move(spline);
  fit_ = fit_leading_power(r_, v_);
}

double Table::value(double r) const {
  if (!contains(r)) throw OutOfTableRange("r outside tabulated range: " + std::to_string(r));
  return gsl_interp_eval(spline_->interp, r_.data(), v_.data(), r, nullptr);
}

double Table::derivative(double r) const {
  if (!contains(r)) throw OutOfTableRange("r outside tabulated range: " + std::to_string(r));
  return gsl_interp_eval_deriv(spline_->interp, r_.data(), v_.data(), r, nullptr);
}

double Table::second_derivative(double r) const {
  if (!contains(r)) throw OutOfTableRange("r outside tabulated range: " + std::to_string(r));
  return gsl_interp_eval_deriv2(spline_->interp, r_.data(), v_.data(), r, nullptr);
}

void PotentialModel::validate() const {
  for (const auto& t : terms) {
    if (!std::isfinite(t.strength) || !std::isfinite(t.exponent))
      throw InvalidModel("power term must be finite");
    if (t.strength == 0.0) throw InvalidModel("power term strength must be nonzero");
  }
  if (yukawa) {
    if (!std::isfinite(yukawa->strength) || !(yukawa->range > 0.0) || !std::isfinite(yukawa->range))
      throw InvalidModel("yukawa range must be positive and finite");
  }
}

namespace {

double analytic_part(const PotentialModel& m, double r) {
  double v = 0.0;
  for (const auto& t : m.terms) v += t.strength * std::pow(r, -t.exponent);
  if (m.yukawa) v += m.yukawa->strength * std::exp(-r / m.yukawa->range) / r;
  return v;
}

double analytic_derivative(const PotentialModel& m, double r) {
  double d = 0.0;
  for (const auto& t : m.terms) d += -t.exponent * t.strength * std::pow(r, -t.exponent - 1.0);
  if (m.yukawa) {
    const double b = m.yukawa->range;
    d += -m.yukawa->strength * std::exp(-r / b) * (1.0 / (b * r) + 1.0 / (r * r));
  }
  return d;
}

}  // namespace

double PotentialModel::evaluate(double r) const {
  if (!(r > 0.0)) throw DomainError("potential evaluated at r <= 0");
  double v = analytic_part(*this, r);
  if (table) {
    if (table->contains(r))
      v += table->value(r);
    else if (table_only())
      throw OutOfTableRange("r outside tabulated range: " + std::to_string(r));
  }
  return v;
}

PotentialJet PotentialModel::jet(double r) const {
  if (!(r > 0.0)) throw DomainError("potential evaluated at r <= 0");
  PotentialJet j;
  for (const auto& t : terms) {
    const double p = t.strength * std::pow(r, -t.exponent);
    j.v += p;
    j.dv += -t.exponent * p / r;
    j.d2v += t.exponent * (t.exponent + 1.0) * p / (r * r);
  }
  if (yukawa) {
    const double b = yukawa->range, e = yukawa->strength * std::exp(-r / b);
    j.v += e / r;
    j.dv += -e * (1.0 / (b * r) + 1.0 / (r * r));
    j.d2v += e * (1.0 / (b * b * r) + 2.0 / (b * r * r) + 2.0 / (r * r * r));
  }
  if (table) {
    const auto& rr = table->r();
    if (!table->contains(r)) {
      if (table_only()) throw OutOfTableRange("r outside tabulated range: " + std::to_string(r));
    } else {
      const std::size_t n = rr.size();
      if (n < 5 || r < rr[2] || r > rr[n - 3])
        throw DifferentiationFailure("spline derivative requested within two knots of a table edge");
      j.v += table->value(r);
      j.dv += table->derivative(r);
      j.d2v += table->second_derivative(r);
    }
  }
  return j;
}

double PotentialModel::evaluate_extended(double r) const {
  double v = analytic_part(*this, r);
  if (table) {
    if (r < table->r_front()) {
      const auto& f = table->leading_fit();
      v += f.strength * std::pow(r, -f.alpha);
    } else if (r <= table->r_back()) {
      v += table->value(r);
    }
  }
  return v;
}

double PotentialModel::derivative_extended(double r) const {
  double d = analytic_derivative(*this, r);
  if (table) {
    if (r < table->r_front()) {
      const auto& f = table->leading_fit();
      d += -f.alpha * f.strength * std::pow(r, -f.alpha - 1.0);
    } else if (r <= table->r_back()) {
      d += table->derivative(r);
    }
  }
  return d;
}

std::string to_string(ClassTag tag) {
  switch (tag) {
    case ClassTag::F: return "F";
    case ClassTag::GC: return "SR-GC";
    case ClassTag::ALCD: return "SR-alCD";
    case ClassTag::RVDW: return "SR-rVdW";
    case ClassTag::ALIMTS: return "SR-alImtS";
    case ClassTag::NONPHYSICAL_AVDW: return "NONPHYSICAL-aVdW";
    case ClassTag::NONPHYSICAL_NPCD: return "NONPHYSICAL-npCD";
  }
  return "?";
}

ClassTag class_tag_from_string(const std::string& s) {
  for (ClassTag t : {ClassTag::F, ClassTag::GC, ClassTag::ALCD, ClassTag::RVDW, ClassTag::ALIMTS,
                     ClassTag::NONPHYSICAL_AVDW, ClassTag::NONPHYSICAL_NPCD})
    if (to_string(t) == s) return t;
  throw InvalidModel("unknown class tag: " + s);
}

double length_scale(double alpha, double scaled_strength) {
  if (alpha == 2.0) throw DomainError("length_scale: alpha = 2 has no length scale");
  if (!(scaled_strength > 0.0)) throw DomainError("length_scale: strength must be positive");
  return std::pow(scaled_strength, 1.0 / (alpha - 2.0));
}

double energy_scale(double beta_alpha) {
  if (!(beta_alpha > 0.0)) throw DomainError("energy_scale: beta must be positive");
  return 1.0 / (beta_alpha * beta_alpha);
}

double transformed_l(int l, double gamma2) {
  if (l < 0) throw DomainError("transformed_l: negative l");
  const double h = l + 0.5;
  const double radicand = h * h + gamma2;
  if (radicand < 0.0) throw DomainError("transformed_l: (l+1/2)^2 + gamma2 < 0");
  return std::sqrt(radicand) - 0.5;
}

ShortRangeClass classify(const PotentialModel& model) {
  model.validate();
  // Merge components by exponent. Yukawa behaves as G/r at the origin.
  std::map<double, double, std::greater<>> by_alpha;
  for (const auto& t : model.terms) by_alpha[t.exponent] += t.strength;
  if (model.yukawa) by_alpha[1.0] += model.yukawa->strength;
  if (model.table) {
    const PowerFit& fit = model.table->leading_fit();
    if (fit.r_squared < kFitRSquaredMin)
      throw ClassificationAmbiguous("tabulated leading-power fit has R^2 = " +
                                    std::to_string(fit.r_squared));
    if (fit.strength != 0.0) by_alpha[fit.alpha] += fit.strength;
  }
  std::vector<PowerTerm> active;
  for (const auto& [a, g] : by_alpha)
    if (g != 0.0) active.push_back({g, a});

  ShortRangeClass cls;
  if (active.empty()) return cls;  // free particle

  const PowerTerm dom = active.front();
  cls.dominant_alpha = dom.exponent;
  cls.dominant_strength = dom.strength;
  for (const auto& t : active)
    if (t.exponent > 0.0) cls.diverging.push_back(t);

  if (dom.exponent < 2.0) {
    cls.tag = ClassTag::GC;
    cls.single_term_family = CuspFamily::GC;
  } else if (dom.exponent == 2.0) {
    cls.gamma2 = dom.strength;
    cls.tag = dom.strength <= -0.25 ? ClassTag::NONPHYSICAL_NPCD : ClassTag::ALCD;
    cls.single_term_family = CuspFamily::ALCD;
  } else {
    cls.tag = dom.strength > 0.0 ? ClassTag::RVDW : ClassTag::NONPHYSICAL_AVDW;
    cls.single_term_family = CuspFamily::RVDW;
  }
  if (dom.exponent != 2.0) cls.beta_alpha = length_scale(dom.exponent, std::fabs(dom.strength));
  if (!cls.physical()) return cls;

  if (cls.diverging.size() >= 2) {
    double r0;
    if (dom.exponent != 2.0) {
      r0 = 0.1 * *cls.beta_alpha;
    } else {
      double bmin = std::numeric_limits<double>::infinity();
      for (std::size_t k = 1; k < cls.diverging.size(); ++k)
        bmin = std::min(bmin, length_scale(cls.diverging[k].exponent,
                                           std::fabs(cls.diverging[k].strength)));
      r0 = 0.1 * bmin;
    }
    double total = 0.0;
    for (const auto& t : cls.diverging) total += std::fabs(t.strength) * std::pow(r0, -t.exponent);
    const double share = std::fabs(dom.strength) * std::pow(r0, -dom.exponent) / total;
    cls.dominant_share = share;
    if (share < kDominanceThreshold) cls.tag = ClassTag::ALIMTS;
  }
  return cls;
}

double natural_energy_scale(const ShortRangeClass& cls) {
  return cls.beta_alpha ? energy_scale(*cls.beta_alpha) : 1.0;
}

}  // namespace cusplab
