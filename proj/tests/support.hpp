#pragma once

// Shared test helpers: a small deterministic generator for property tests
// and closed-form oracles that do not go through the library.

#include <cmath>
#include <cstdint>
#include <vector>

namespace testsupport {

// splitmix64; fixed seeds keep every property test reproducible.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform(double a, double b) { return a + (b - a) * static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
  int integer(int a, int b) { return a + static_cast<int>(next() % static_cast<std::uint64_t>(b - a + 1)); }
  double sign() { return (next() & 1) ? 1.0 : -1.0; }

 private:
  std::uint64_t s_;
};

inline constexpr double kPi = 3.14159265358979323846;
inline const double kSqrt2OverPi = std::sqrt(2.0 / kPi);

// Cusp-normalised free solution sqrt(2/pi) r j_l(kr) / k^l for e = k^2, and
// its i_l continuation for e < 0, summed as the spherical Bessel power series
//   r^(l+1) / (2^(l+1/2) Gamma(l+3/2)) sum_j (-e r^2 / 4)^j / (j! (l+3/2)_j)
// in long double.
inline double free_u(int l, double e, double r) {
  const long double x = -static_cast<long double>(e) * r * r / 4.0L;
  long double term = 1.0L, sum = 1.0L;
  for (int j = 1; j < 600; ++j) {
    term *= x / (j * (l + 0.5L + j));
    sum += term;
    if (std::fabs(term) < 1e-24L * std::fabs(sum)) break;
  }
  const long double lead = std::pow(static_cast<long double>(r), l + 1.0L) /
                           (std::pow(2.0L, l + 0.5L) * std::tgamma(l + 1.5L));
  return static_cast<double>(lead * sum);
}

// Relative difference with a floor for values at zero.
inline double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

// Least-squares slope of log|y| against log x.
inline double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(std::fabs(y[i]));
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace testsupport
