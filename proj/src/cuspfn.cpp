#include "cusplab/cuspfn.hpp"

#include <cmath>
#include <numbers>

#include "cusplab/errors.hpp"
#include "cusplab/specialfn.hpp"

namespace cusplab {
namespace {

using std::numbers::pi;
namespace sf = specialfn;

constexpr double kLogTiny = -644.7;  // log(1e-280)
constexpr double kLogHuge = 644.7;

// Mantissas with an exponential offset, folded back when representable.
CuspValue scaled(double f, double df, double offset) {
  CuspValue out{f, df, false, 0.0};
  if (offset == 0.0 || f == 0.0) {
    if (offset != 0.0) out.df = df * std::exp(offset);
    return out;
  }
  const double lg = std::log(std::fabs(f)) + offset;
  if (lg > kLogTiny && lg < kLogHuge) {
    const double e = std::exp(offset);
    out.f = f * e;
    out.df = df * e;
  } else {
    out.underflow_scaled = true;
    out.log_offset = offset;
  }
  return out;
}

void require_positive_r(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("cusp function needs finite r > 0");
}

CuspValue free_form(double lam, double r, double sL) {
  require_positive_r(r);
  if (!(sL > 0.0)) throw DomainError("free length scale sL must be positive");
  const double x = r / sL;
  const double f = std::pow(x, lam + 1.0) / (std::pow(2.0, lam + 0.5) * sf::gamma(lam + 1.5));
  return {f, (lam + 1.0) * f / r, false, 0.0};
}

CuspValue free_irregular(double lam, double r, double sL) {
  require_positive_r(r);
  const double x = r / sL;
  const double g = -std::pow(2.0, lam + 0.5) * sf::gamma(lam + 0.5) / pi * std::pow(x, -lam);
  return {g, -lam * g / r, false, 0.0};
}

void require_gc(const CuspSpec& s) {
  if (s.family != CuspFamily::GC) throw DomainError("GC cusp function requested for a non-GC spec");
}

void require_rvdw(const CuspSpec& s) {
  if (s.family != CuspFamily::RVDW) throw DomainError("rVdW cusp function requested for a non-rVdW spec");
  if (!(s.strength > 0.0)) throw DomainError("attractive alpha > 2 has no regular cusp function");
}

}  // namespace

double gc_normalisation(int l, double alpha) {
  const double p = 2.0 - alpha;
  const double nu0 = 2.0 * (l + 0.5) / p;
  return std::pow(p, nu0 + 0.5) * sf::gamma(nu0 + 1.0) /
         (std::pow(2.0, l + 1.0) * sf::gamma(l + 1.5));
}

CuspSpec make_cusp_spec(const ShortRangeClass& cls, int l, double sL) {
  if (l < 0) throw DomainError("negative partial wave");
  if (!(sL > 0.0)) throw DomainError("free length scale sL must be positive");
  CuspSpec s;
  s.cls = cls;
  s.family = cls.single_term_family;
  s.l = l;
  s.alpha = cls.dominant_alpha;
  s.strength = cls.dominant_strength;
  s.sL = sL;
  s.beta = cls.beta_alpha;
  switch (s.family) {
    case CuspFamily::Free:
      s.nu0 = l + 0.5;
      break;
    case CuspFamily::GC:
      s.nu0 = 2.0 * (l + 0.5) / (2.0 - s.alpha);
      s.b_l = gc_normalisation(l, s.alpha);
      break;
    case CuspFamily::ALCD:
      s.lt = transformed_l(l, cls.gamma2.value_or(s.strength));
      s.nu0 = *s.lt + 0.5;
      break;
    case CuspFamily::RVDW:
      s.nu0 = 2.0 * (l + 0.5) / (s.alpha - 2.0);
      break;
  }
  s.cls.lt = s.lt;
  return s;
}

double cusp_length(const CuspSpec& spec) {
  if (spec.family == CuspFamily::GC || spec.family == CuspFamily::RVDW) return *spec.beta;
  return spec.sL;
}

CuspValue cusp_f_free(int l, double r, double sL) { return free_form(l, r, sL); }

CuspValue cusp_f_gc(const CuspSpec& spec, double r, double signed_strength) {
  require_gc(spec);
  CuspValue base = free_form(spec.l, r, spec.sL);
  const double p = 2.0 - spec.alpha;
  const double z = signed_strength * std::pow(r, p) / (p * p);
  const double ia = sf::analytic_i(spec.nu0, z);
  const double dia = sf::analytic_i_derivative(spec.nu0, z);
  const double dz = p * z / r;
  return {base.f * ia, base.df * ia + base.f * dia * dz, false, 0.0};
}

CuspValue cusp_f_gc_separated(const CuspSpec& spec, double r) {
  require_gc(spec);
  require_positive_r(r);
  const double beta = *spec.beta, p = 2.0 - spec.alpha, nu = spec.nu0;
  const double x = r / beta, sx = std::sqrt(x);
  const double y = (2.0 / p) * std::pow(x, p / 2.0);
  const double dy = std::pow(x, p / 2.0 - 1.0);
  const double c = spec.b_l * std::sqrt(2.0 / p);
  if (spec.strength < 0.0) {
    const auto jy = sf::bessel_jy(nu, y);
    const double f = c * sx * jy.first;
    const double dfx = c * (jy.first / (2.0 * sx) + sx * jy.dfirst * dy);
    return {f, dfx / beta, false, 0.0};
  }
  const auto ik = sf::bessel_ik_scaled(nu, y);
  const double f = c * sx * ik.first;
  const double dfx = c * (ik.first / (2.0 * sx) + sx * ik.dfirst * dy);
  return scaled(f, dfx / beta, y);
}

CuspValue cusp_f_alcd(int l, double r, double gamma2, double sL) {
  if (!(gamma2 > -0.25)) throw DomainError("alCD needs gamma2 > -1/4");
  return free_form(transformed_l(l, gamma2), r, sL);
}

CuspValue cusp_f_rvdw(const CuspSpec& spec, double r) {
  require_rvdw(spec);
  require_positive_r(r);
  const double beta = *spec.beta, p = spec.alpha - 2.0, nu = spec.nu0;
  const double x = r / beta, sx = std::sqrt(x);
  const double y = (2.0 / p) * std::pow(x, -p / 2.0);
  const double dy = -std::pow(x, -spec.alpha / 2.0);
  const double c = (2.0 / pi) / std::sqrt(p);
  const auto ik = sf::bessel_ik_scaled(nu, y);
  const double f = c * sx * ik.second;
  const double dfx = c * (ik.second / (2.0 * sx) + sx * (ik.dsecond) * dy);
  return scaled(f, dfx / beta, -y);
}

CuspValue cusp_f(const CuspSpec& spec, double r) {
  switch (spec.family) {
    case CuspFamily::Free: return free_form(spec.l, r, spec.sL);
    case CuspFamily::GC: return cusp_f_gc(spec, r, spec.strength);
    case CuspFamily::ALCD: return free_form(*spec.lt, r, spec.sL);
    case CuspFamily::RVDW: return cusp_f_rvdw(spec, r);
  }
  throw DomainError("unknown cusp family");
}

CuspValue strict_cusp(const CuspSpec& spec, double r) {
  switch (spec.family) {
    case CuspFamily::Free:
    case CuspFamily::GC: return free_form(spec.l, r, spec.sL);
    case CuspFamily::ALCD: return free_form(*spec.lt, r, spec.sL);
    case CuspFamily::RVDW: {
      require_rvdw(spec);
      require_positive_r(r);
      const double beta = *spec.beta, p = spec.alpha - 2.0;
      const double x = r / beta;
      const double y = (2.0 / p) * std::pow(x, -p / 2.0);
      const double h = std::pow(x, spec.alpha / 4.0) / std::sqrt(pi);
      const double dhx = h * (spec.alpha / (4.0 * x) + std::pow(x, -spec.alpha / 2.0));
      return scaled(h, dhx / beta, -y);
    }
  }
  throw DomainError("unknown cusp family");
}

CuspValue irregular_g(const CuspSpec& spec, double r) {
  require_positive_r(r);
  switch (spec.family) {
    case CuspFamily::Free: return free_irregular(spec.l, r, spec.sL);
    case CuspFamily::ALCD: return free_irregular(*spec.lt, r, spec.sL);
    case CuspFamily::GC: {
      const double beta = *spec.beta, p = 2.0 - spec.alpha, nu = spec.nu0;
      const double x = r / beta, sx = std::sqrt(x);
      const double y = (2.0 / p) * std::pow(x, p / 2.0);
      const double dy = std::pow(x, p / 2.0 - 1.0);
      const double c = std::sqrt(2.0 / p) / spec.b_l;
      if (spec.strength < 0.0) {
        const auto jy = sf::bessel_jy(nu, y);
        const double g = c * sx * jy.second;
        const double dgx = c * (jy.second / (2.0 * sx) + sx * jy.dsecond * dy);
        return {g, dgx / beta, false, 0.0};
      }
      const auto ik = sf::bessel_ik_scaled(nu, y);
      const double c2 = -(2.0 / pi) * c;
      const double g = c2 * sx * ik.second;
      const double dgx = c2 * (ik.second / (2.0 * sx) + sx * ik.dsecond * dy);
      return scaled(g, dgx / beta, -y);
    }
    case CuspFamily::RVDW: {
      require_rvdw(spec);
      const double beta = *spec.beta, p = spec.alpha - 2.0, nu = spec.nu0;
      const double x = r / beta, sx = std::sqrt(x);
      const double y = (2.0 / p) * std::pow(x, -p / 2.0);
      const double dy = -std::pow(x, -spec.alpha / 2.0);
      double s, ds;
      sf::bessel_i_sym_scaled(nu, y, s, ds);
      const double c = -2.0 / std::sqrt(p);
      const double g = c * sx * s;
      const double dgx = c * (s / (2.0 * sx) + sx * ds * dy);
      return scaled(g, dgx / beta, y);
    }
  }
  throw DomainError("unknown cusp family");
}

double wronskian_check(const CuspSpec& spec, double r) {
  CuspValue f;
  switch (spec.family) {
    case CuspFamily::GC: f = cusp_f_gc_separated(spec, r); break;
    default: f = cusp_f(spec, r); break;
  }
  const CuspValue g = irregular_g(spec, r);
  // Offsets of f and g cancel in the products when both are scaled.
  const double w = (f.f * g.df - f.df * g.f) * std::exp(f.log_offset + g.log_offset);
  return w * cusp_length(spec);
}

}  // namespace cusplab
