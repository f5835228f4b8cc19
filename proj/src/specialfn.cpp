#include "cusplab/specialfn.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cusplab/errors.hpp"

// Bessel functions of real order follow the classical scheme:
//   * CF1 (continued fraction for the ratio f_nu = Z'_nu / Z_nu) at the
//     requested order, then downward recurrence to a reduced order
//     mu in [-1/2, 1/2] (J/Y: mu chosen so that CF2 is well conditioned);
//   * at the reduced order, Temme's series for y < 2 and Steed's complex
//     continued fraction (J/Y) or the Thompson-Barnett CF2 (I/K) for y >= 2;
//   * Wronskian normalisation and upward recurrence for the second kind.
// Everything runs in long double; the API is double.

namespace cusplab::specialfn {
namespace {

using real = long double;

constexpr real kPi = std::numbers::pi_v<long double>;
constexpr real kEps = std::numeric_limits<real>::epsilon();
constexpr real kTiny = std::numeric_limits<real>::min() / kEps;
constexpr real kSwitch = 2.0L;  // Temme series below, continued fractions above
constexpr int kMaxIter = 2000000;

void check_domain(double nu, double y, const char* fn) {
  if (!(nu >= 0.0) || nu > kMaxOrder || !std::isfinite(nu))
    throw DomainError(std::string(fn) + ": order outside [0, 50]: " + std::to_string(nu));
  if (!(y > 0.0) || y > kMaxArgument || !std::isfinite(y))
    throw DomainError(std::string(fn) + ": argument outside (0, 1e4]: " + std::to_string(y));
}

// Coefficients of 1/Gamma(x) = sum_k c_k x^k (c_1 = 1).
constexpr real kInvGammaCoeff[] = {
    1.0L,
    0.5772156649015328606065120900824024L,
    -0.6558780715202538810770195151453905L,
    -0.0420026350340952355290039348754298L,
    0.1665386113822914895017007951021052L,
    -0.0421977345555443367482083012891874L,
    -0.0096219715278769735621149216723481L,
    0.0072189432466630995423950103404465L,
    -0.0011651675918590651121139710840183L,
    -0.0002152416741149509728157299630536L,
};

// Temme's auxiliary functions:
//   gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu),
//   gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2,
// plus gampl = 1/Gamma(1+mu) and gammi = 1/Gamma(1-mu).
void temme_gammas(real mu, real& gam1, real& gam2, real& gampl, real& gammi) {
  if (std::fabs(mu) < 0.05L) {
    // 1/Gamma(1+mu) = sum_k c_{k+1} mu^k; split into odd and even parts.
    real even = 0.0L, odd = 0.0L, m2 = mu * mu, p = 1.0L;
    for (int k = 0; k < 10; k += 2) {
      even += kInvGammaCoeff[k] * p;
      if (k + 1 < 10) odd += kInvGammaCoeff[k + 1] * p;
      p *= m2;
    }
    gam1 = -odd;
    gam2 = even;
    gampl = even + mu * odd;
    gammi = even - mu * odd;
  } else {
    gampl = 1.0L / std::tgamma(1.0L + mu);
    gammi = 1.0L / std::tgamma(1.0L - mu);
    gam1 = (gammi - gampl) / (2.0L * mu);
    gam2 = (gammi + gampl) / 2.0L;
  }
}

struct JY {
  real j, y, jp, yp;
};

JY bessel_jy_impl(real nu, real x) {
  const int nl = (x < kSwitch) ? static_cast<int>(nu + 0.5L)
                               : std::max(0, static_cast<int>(nu - x + 1.5L));
  const real mu = nu - nl;
  const real mu2 = mu * mu;
  const real xi = 1.0L / x;
  const real xi2 = 2.0L * xi;
  const real w = xi2 / kPi;

  // CF1 for J'_nu / J_nu (modified Lentz).
  int isign = 1;
  real h = nu * xi;
  if (h < kTiny) h = kTiny;
  real b = xi2 * nu, d = 0.0L, c = h;
  int i = 0;
  for (; i < kMaxIter; ++i) {
    b += xi2;
    d = b - d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b - 1.0L / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0L / d;
    const real del = c * d;
    h *= del;
    if (d < 0.0L) isign = -isign;
    if (std::fabs(del - 1.0L) < kEps) break;
  }
  if (i >= kMaxIter) throw NonConvergence("bessel_jy: CF1 did not converge");

  // Downward recurrence from nu to mu.
  real jl = isign * kTiny;
  real jpl = h * jl;
  const real jl1 = jl, jp1 = jpl;
  real fact = nu * xi;
  for (int l = nl - 1; l >= 0; --l) {
    const real tmp = fact * jl + jpl;
    fact -= xi;
    jpl = fact * tmp - jl;
    jl = tmp;
  }
  if (jl == 0.0L) jl = kEps;
  const real f = jpl / jl;

  real jmu, ymu, ymup, y1;
  if (x < kSwitch) {
    const real x2 = 0.5L * x;
    const real pimu = kPi * mu;
    const real fct = (std::fabs(pimu) < kEps) ? 1.0L : pimu / std::sin(pimu);
    real dd = -std::log(x2);
    real e = mu * dd;
    const real fct2 = (std::fabs(e) < kEps) ? 1.0L : std::sinh(e) / e;
    real gam1, gam2, gampl, gammi;
    temme_gammas(mu, gam1, gam2, gampl, gammi);
    real ff = 2.0L / kPi * fct * (gam1 * std::cosh(e) + gam2 * fct2 * dd);
    e = std::exp(e);
    real p = e / (gampl * kPi);
    real q = 1.0L / (e * kPi * gammi);
    const real pimu2 = 0.5L * pimu;
    const real fct3 = (std::fabs(pimu2) < kEps) ? 1.0L : std::sin(pimu2) / pimu2;
    const real r = kPi * pimu2 * fct3 * fct3;
    real cc = 1.0L;
    dd = -x2 * x2;
    real sum = ff + r * q;
    real sum1 = p;
    int k = 1;
    for (; k < kMaxIter; ++k) {
      ff = (k * ff + p + q) / (k * static_cast<real>(k) - mu2);
      cc *= dd / k;
      p /= (k - mu);
      q /= (k + mu);
      const real del = cc * (ff + r * q);
      sum += del;
      const real del1 = cc * p - k * del;
      sum1 += del1;
      if (std::fabs(del) < (1.0L + std::fabs(sum)) * kEps) break;
    }
    if (k >= kMaxIter) throw NonConvergence("bessel_jy: Temme series did not converge");
    ymu = -sum;
    y1 = -sum1 * xi2;
    ymup = mu * xi * ymu - y1;
    jmu = w / (ymup - f * ymu);
  } else {
    // Steed's CF2 for p + i q = (J' + i Y') / (J + i Y).
    real a = 0.25L - mu2;
    real p = -0.5L * xi;
    real q = 1.0L;
    const real br = 2.0L * x;
    real bi = 2.0L;
    real fct = a * xi / (p * p + q * q);
    real cr = br + q * fct;
    real ci = bi + p * fct;
    real den = br * br + bi * bi;
    real dr = br / den;
    real di = -bi / den;
    real dlr = cr * dr - ci * di;
    real dli = cr * di + ci * dr;
    real tmp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = tmp;
    int k = 1;
    for (; k < kMaxIter; ++k) {
      a += 2 * k;
      bi += 2.0L;
      dr = a * dr + br;
      di = a * di + bi;
      if (std::fabs(dr) + std::fabs(di) < kTiny) dr = kTiny;
      fct = a / (cr * cr + ci * ci);
      cr = br + cr * fct;
      ci = bi - ci * fct;
      if (std::fabs(cr) + std::fabs(ci) < kTiny) cr = kTiny;
      den = dr * dr + di * di;
      dr /= den;
      di = -di / den;
      dlr = cr * dr - ci * di;
      dli = cr * di + ci * dr;
      tmp = p * dlr - q * dli;
      q = p * dli + q * dlr;
      p = tmp;
      if (std::fabs(dlr - 1.0L) + std::fabs(dli) < kEps) break;
    }
    if (k >= kMaxIter) throw NonConvergence("bessel_jy: CF2 did not converge");
    const real gam = (p - f) / q;
    jmu = std::sqrt(w / ((p - f) * gam + q));
    jmu = std::copysign(jmu, jl);
    ymu = jmu * gam;
    ymup = ymu * (p + q / gam);
    y1 = mu * xi * ymu - ymup;
  }
  const real scale = jmu / jl;
  JY out;
  out.j = jl1 * scale;
  out.jp = jp1 * scale;
  for (int k = 1; k <= nl; ++k) {
    const real tmp = (mu + k) * xi2 * y1 - ymu;
    ymu = y1;
    y1 = tmp;
  }
  out.y = ymu;
  out.yp = nu * xi * ymu - y1;
  return out;
}

struct IK {
  real i, k, ip, kp;  // scaled: e^{-x} I, e^{x} K
};

IK bessel_ik_impl(real nu, real x) {
  const int nl = static_cast<int>(nu + 0.5L);
  const real mu = nu - nl;
  const real mu2 = mu * mu;
  const real xi = 1.0L / x;
  const real xi2 = 2.0L * xi;

  // CF1 for I'_nu / I_nu.
  real h = nu * xi;
  if (h < kTiny) h = kTiny;
  real b = xi2 * nu, d = 0.0L, c = h;
  int i = 0;
  for (; i < kMaxIter; ++i) {
    b += xi2;
    d = 1.0L / (b + d);
    c = b + 1.0L / c;
    const real del = c * d;
    h *= del;
    if (std::fabs(del - 1.0L) < kEps) break;
  }
  if (i >= kMaxIter) throw NonConvergence("bessel_ik: CF1 did not converge");

  real il = kTiny;
  real ipl = h * il;
  const real il1 = il, ip1 = ipl;
  real fact = nu * xi;
  for (int l = nl - 1; l >= 0; --l) {
    const real tmp = fact * il + ipl;
    fact -= xi;
    ipl = fact * tmp + il;
    il = tmp;
  }
  const real f = ipl / il;

  real kmu, k1;  // scaled by e^{x}
  if (x < kSwitch) {
    const real x2 = 0.5L * x;
    const real pimu = kPi * mu;
    const real fct = (std::fabs(pimu) < kEps) ? 1.0L : pimu / std::sin(pimu);
    real dd = -std::log(x2);
    real e = mu * dd;
    const real fct2 = (std::fabs(e) < kEps) ? 1.0L : std::sinh(e) / e;
    real gam1, gam2, gampl, gammi;
    temme_gammas(mu, gam1, gam2, gampl, gammi);
    real ff = fct * (gam1 * std::cosh(e) + gam2 * fct2 * dd);
    real sum = ff;
    e = std::exp(e);
    real p = 0.5L * e / gampl;
    real q = 0.5L / (e * gammi);
    real cc = 1.0L;
    dd = x2 * x2;
    real sum1 = p;
    int k = 1;
    for (; k < kMaxIter; ++k) {
      ff = (k * ff + p + q) / (k * static_cast<real>(k) - mu2);
      cc *= dd / k;
      p /= (k - mu);
      q /= (k + mu);
      const real del = cc * ff;
      sum += del;
      const real del1 = cc * (p - k * ff);
      sum1 += del1;
      if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    if (k >= kMaxIter) throw NonConvergence("bessel_ik: Temme series did not converge");
    const real ex = std::exp(x);
    kmu = sum * ex;
    k1 = sum1 * xi2 * ex;
  } else {
    // Thompson-Barnett / Steed CF2 for K, evaluated without the e^{-x}.
    real bb = 2.0L * (1.0L + x);
    real dd = 1.0L / bb;
    real hh = dd, delh = dd;
    real q1 = 0.0L, q2 = 1.0L;
    const real a1 = 0.25L - mu2;
    real q = a1, cc = a1;
    real a = -a1;
    real s = 1.0L + q * delh;
    int k = 1;
    for (; k < kMaxIter; ++k) {
      a -= 2 * k;
      cc = -a * cc / (k + 1.0L);
      const real qnew = (q1 - bb * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += cc * qnew;
      bb += 2.0L;
      dd = 1.0L / (bb + a * dd);
      delh = (bb * dd - 1.0L) * delh;
      hh += delh;
      const real dels = q * delh;
      s += dels;
      if (std::fabs(dels / s) < kEps) break;
    }
    if (k >= kMaxIter) throw NonConvergence("bessel_ik: CF2 did not converge");
    hh = a1 * hh;
    kmu = std::sqrt(kPi / (2.0L * x)) / s;
    k1 = kmu * (mu + x + 0.5L - hh) * xi;
  }
  const real kmup = mu * xi * kmu - k1;
  // Wronskian I K' - I' K = -1/x fixes the normalisation of I.
  const real imu = xi / (f * kmu - kmup);
  IK out;
  out.i = imu * il1 / il;
  out.ip = imu * ip1 / il;
  for (int k = 1; k <= nl; ++k) {
    const real tmp = (mu + k) * xi2 * k1 + kmu;
    kmu = k1;
    k1 = tmp;
  }
  out.k = kmu;
  out.kp = nu * xi * kmu - k1;
  return out;
}

}  // namespace

double gamma(double x) {
  if (!(x > 0.0) || x > 170.0)
    throw DomainError("gamma: argument outside (0, 170]: " + std::to_string(x));
  return std::tgamma(x);
}

BesselPair bessel_jy(double nu, double y) {
  check_domain(nu, y, "bessel_jy");
  const JY r = bessel_jy_impl(nu, y);
  return {static_cast<double>(r.j), static_cast<double>(r.y), static_cast<double>(r.jp),
          static_cast<double>(r.yp)};
}

double bessel_j(double nu, double y) { return bessel_jy(nu, y).first; }
double bessel_y(double nu, double y) { return bessel_jy(nu, y).second; }

BesselPair bessel_ik_scaled(double nu, double y) {
  check_domain(nu, y, "bessel_ik");
  const IK r = bessel_ik_impl(nu, y);
  return {static_cast<double>(r.i), static_cast<double>(r.k), static_cast<double>(r.ip),
          static_cast<double>(r.kp)};
}

double bessel_i_scaled(double nu, double y) { return bessel_ik_scaled(nu, y).first; }
double bessel_k_scaled(double nu, double y) { return bessel_ik_scaled(nu, y).second; }

double bessel_i(double nu, double y) {
  check_domain(nu, y, "bessel_i");
  if (y > kMaxIArgument) throw OverflowError("bessel_i: argument above 700 overflows");
  const IK r = bessel_ik_impl(nu, y);
  return static_cast<double>(r.i * std::exp(static_cast<real>(y)));
}

double bessel_k(double nu, double y) {
  check_domain(nu, y, "bessel_k");
  const IK r = bessel_ik_impl(nu, y);
  return static_cast<double>(r.k * std::exp(-static_cast<real>(y)));
}

void bessel_i_sym_scaled(double nu, double y, double& value, double& derivative) {
  check_domain(nu, y, "bessel_i_sym");
  const IK r = bessel_ik_impl(nu, y);
  const real s = std::sin(kPi * static_cast<real>(nu)) / kPi;
  const real damp = std::exp(-2.0L * static_cast<real>(y));
  value = static_cast<double>(r.i + s * r.k * damp);
  derivative = static_cast<double>(r.ip + s * r.kp * damp);
}

double bessel_i_sym(double nu, double y) {
  check_domain(nu, y, "bessel_i_sym");
  if (y > kMaxIArgument) throw OverflowError("bessel_i_sym: argument above 700 overflows");
  double v, dv;
  bessel_i_sym_scaled(nu, y, v, dv);
  return v * std::exp(y);
}

double analytic_i(double nu, double z) {
  if (!(nu >= 0.0) || nu > kMaxOrder + 1.0 || !std::isfinite(nu))
    throw DomainError("analytic_i: order outside [0, 51]");
  if (!std::isfinite(z) || std::fabs(z) > kMaxArgument)
    throw DomainError("analytic_i: |z| above 1e4");
  const real zz = z;
  const int kSeriesCap = 10000;
  if ((z >= 0.0 && z <= 100.0) || (z < 0.0 && z >= -1.0)) {
    real term = 1.0L, sum = 1.0L;
    int j = 1;
    for (; j < kSeriesCap; ++j) {
      term *= zz / (j * (static_cast<real>(nu) + j));
      sum += term;
      if (std::fabs(term) <= kEps * std::fabs(sum)) break;
    }
    if (j >= kSeriesCap) throw NonConvergence("analytic_i: term cap exceeded");
    return static_cast<double>(sum);
  }
  const real y = 2.0L * std::sqrt(std::fabs(zz));
  const real log_pref = std::lgamma(static_cast<real>(nu) + 1.0L) - nu * std::log(0.5L * y);
  if (z > 0.0) {
    const IK r = bessel_ik_impl(nu, y);
    return static_cast<double>(r.i * std::exp(log_pref + y));
  }
  const JY r = bessel_jy_impl(nu, y);
  return static_cast<double>(r.j * std::exp(log_pref));
}

double analytic_i_derivative(double nu, double z) { return analytic_i(nu + 1.0, z) / (nu + 1.0); }

double legendre(int l, double x) {
  if (l < 0) throw DomainError("legendre: negative degree");
  if (l == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int n = 1; n < l; ++n) {
    const double p2 = ((2 * n + 1) * x * p1 - n * p0) / (n + 1);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

}  // namespace cusplab::specialfn
