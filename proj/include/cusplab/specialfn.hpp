#pragma once

// Real-order Bessel functions, Gamma, the analytic part of I_nu and Legendre
// polynomials. All functions are pure and reentrant.
//
// Supported domain: 0 <= nu <= 50, 0 < y <= 1e4. Outside it a DomainError is
// thrown. I_nu overflows beyond y = 700 (OverflowError); use the scaled
// variants when the exponential factor has to be carried separately.

namespace cusplab::specialfn {

inline constexpr double kMaxOrder = 50.0;
inline constexpr double kMaxArgument = 1.0e4;
inline constexpr double kMaxIArgument = 700.0;

// A Bessel-type pair together with first derivatives in the argument.
struct BesselPair {
  double first = 0.0;    // J_nu or I_nu
  double second = 0.0;   // Y_nu or K_nu
  double dfirst = 0.0;
  double dsecond = 0.0;
};

// Gamma function for 0 < x <= 170.
double gamma(double x);

double bessel_j(double nu, double y);
double bessel_y(double nu, double y);
double bessel_i(double nu, double y);
double bessel_k(double nu, double y);

// J_nu, Y_nu and their derivatives in one evaluation.
BesselPair bessel_jy(double nu, double y);

// e^{-y} I_nu(y), e^{y} K_nu(y) and their (equally scaled) derivatives:
// first = e^{-y} I, dfirst = e^{-y} I', second = e^{y} K, dsecond = e^{y} K'.
// No overflow restriction on y.
BesselPair bessel_ik_scaled(double nu, double y);

double bessel_i_scaled(double nu, double y);
double bessel_k_scaled(double nu, double y);

// (I_nu(y) + I_{-nu}(y)) / 2, using I_{-nu} = I_nu + (2/pi) sin(nu pi) K_nu.
double bessel_i_sym(double nu, double y);
// e^{-y} (I_nu + I_{-nu}) / 2 and its derivative (scaled the same way).
void bessel_i_sym_scaled(double nu, double y, double& value, double& derivative);

// Analytic portion of I_nu:
//   I^a_nu(z) = sum_j Gamma(nu+1) / (j! Gamma(nu+j+1)) z^j,
// so that I_nu(y) = (y/2)^nu / Gamma(nu+1) I^a_nu((y/2)^2). Negative z is
// resummed through J_nu. Valid for |z| <= 1e4 (and z <= 700^2/4 is not
// required: large positive z goes through the scaled I).
double analytic_i(double nu, double z);

// d/dz I^a_nu(z) = I^a_{nu+1}(z) / (nu + 1).
double analytic_i_derivative(double nu, double z);

// Legendre polynomial P_l(x), exact three-term recurrence.
double legendre(int l, double x);

}  // namespace cusplab::specialfn
