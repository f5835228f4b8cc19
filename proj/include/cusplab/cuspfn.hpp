#pragma once

#include <cmath>
#include <optional>

#include "cusplab/potential.hpp"

// Zero-energy cusp functions f^cp, strict cusp functions F^cp and irregular
// companions g^cp for the single-term families. Radii are in user units; all
// derivatives returned here are d/dr.

namespace cusplab {

// Value and r-derivative of a cusp function. When the value leaves the
// representable range the pair is stored as mantissas times exp(log_offset).
struct CuspValue {
  double f = 0.0;
  double df = 0.0;
  bool underflow_scaled = false;
  double log_offset = 0.0;

  double value() const { return underflow_scaled ? f * std::exp(log_offset) : f; }
  double derivative() const { return underflow_scaled ? df * std::exp(log_offset) : df; }
  // log|f| including the offset
  double log_abs() const { return std::log(std::fabs(f)) + log_offset; }
};

struct CuspSpec {
  ShortRangeClass cls;
  CuspFamily family = CuspFamily::Free;
  int l = 0;
  double alpha = 0.0;     // dominant exponent
  double strength = 0.0;  // dominant signed scaled strength
  double nu0 = 0.5;       // 2(l+1/2)/|alpha-2|; l+1/2 for the free family
  std::optional<double> lt;
  std::optional<double> beta;
  double sL = 1.0;
  double b_l = 1.0;  // GC normalisation, 1 otherwise
};

// Descriptor for the single-term family of cls. alImtS and the
// nonphysical tags resolve to the family of their dominant term.
CuspSpec make_cusp_spec(const ShortRangeClass& cls, int l, double sL = 1.0);

// Length unit of the Wronskian convention: beta for GC and rVdW, sL otherwise.
double cusp_length(const CuspSpec& spec);

// b_l = (2-alpha)^(nu0+1/2) Gamma(nu0+1) / (2^(l+1) Gamma(l+3/2))
double gc_normalisation(int l, double alpha);

CuspValue cusp_f_free(int l, double r, double sL = 1.0);
// Combined GC form f^F(r, sL) I^a_nu0(z), z = G r^(2-alpha) / (2-alpha)^2,
// using spec.alpha, spec.l and spec.sL with the strength given here.
CuspValue cusp_f_gc(const CuspSpec& spec, double r, double signed_strength);
// Separated J (attractive) or I (repulsive) GC form in r_s = r/beta.
CuspValue cusp_f_gc_separated(const CuspSpec& spec, double r);
CuspValue cusp_f_alcd(int l, double r, double gamma2, double sL = 1.0);
CuspValue cusp_f_rvdw(const CuspSpec& spec, double r);

// f^cp normalised like the radial solutions start: GC combined at sL,
// alCD and free at sL, rVdW Bessel-K form.
CuspValue cusp_f(const CuspSpec& spec, double r);

// F^cp: free form (at l_t for alCD), rVdW pi^-1/2 r_s^(alpha/4) e^-y.
CuspValue strict_cusp(const CuspSpec& spec, double r);

// g^cp normalised so that W_{r_s}(f, g) = 2/pi with f the separated GC form,
// the rVdW K form, or the free/alCD power forms.
CuspValue irregular_g(const CuspSpec& spec, double r);

// W_{r_s}(f, g) = f dg/dr_s - df/dr_s g with the pairing of irregular_g.
double wronskian_check(const CuspSpec& spec, double r);

}  // namespace cusplab
