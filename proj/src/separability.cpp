#include "cusplab/separability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cusplab/errors.hpp"

namespace cusplab {
namespace {

constexpr double kPi = 3.14159265358979323846;

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

bool same_model(const PotentialModel& a, const PotentialModel& b) {
  if (a.terms.size() != b.terms.size() || a.yukawa.has_value() != b.yukawa.has_value() ||
      a.table.has_value() != b.table.has_value())
    return false;
  for (std::size_t i = 0; i < a.terms.size(); ++i)
    if (a.terms[i].strength != b.terms[i].strength || a.terms[i].exponent != b.terms[i].exponent)
      return false;
  if (a.yukawa && (a.yukawa->strength != b.yukawa->strength || a.yukawa->range != b.yukawa->range))
    return false;
  if (a.table && (a.table->r() != b.table->r() || a.table->v() != b.table->v())) return false;
  return true;
}

double angle_between(const Vec3& a, const Vec3& b) {
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::acos(std::clamp(dot(a, b) / (na * nb), -1.0, 1.0));
}

}  // namespace

void ParticleConfig::validate() const {
  const std::size_t n = masses.size();
  if (n < 3) throw InvalidModel("a configuration needs at least 3 particles");
  if (positions.size() != n) throw InvalidModel("masses and positions differ in length");
  for (double m : masses)
    if (!(m > 0.0) || !std::isfinite(m)) throw InvalidModel("masses must be positive");
  const auto [i, j] = pair;
  if (i < 0 || j < 0 || i >= static_cast<int>(n) || j >= static_cast<int>(n) || i == j)
    throw InvalidModel("pair indices out of range");
  // The pair itself may coalesce; every other coincidence is an error.
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (positions[a] == positions[b] &&
          !(static_cast<int>(a) == std::min(i, j) && static_cast<int>(b) == std::max(i, j)))
        throw CoincidentParticles("particles " + std::to_string(a) + " and " + std::to_string(b) +
                                  " coincide");
  for (int k : spectators()) {
    potential(i, k).validate();
    potential(j, k).validate();
  }
}

const PotentialModel& ParticleConfig::potential(int a, int b) const {
  const auto it = pair_potentials.find({std::min(a, b), std::max(a, b)});
  if (it == pair_potentials.end())
    throw InvalidModel("no potential for pair (" + std::to_string(a) + ", " + std::to_string(b) + ")");
  return it->second;
}

Vec3 ParticleConfig::pair_centre() const {
  const auto [i, j] = pair;
  const double mi = masses[i], mj = masses[j], M = mi + mj;
  Vec3 c;
  for (int d = 0; d < 3; ++d) c[d] = (mi * positions[i][d] + mj * positions[j][d]) / M;
  return c;
}

double ParticleConfig::pair_separation() const {
  return norm(sub(positions[pair.first], positions[pair.second]));
}

bool ParticleConfig::identical_pair() const {
  const auto [i, j] = pair;
  if (masses[i] != masses[j]) return false;
  for (int k : spectators())
    if (!same_model(potential(i, k), potential(j, k))) return false;
  return true;
}

std::vector<int> ParticleConfig::spectators() const {
  std::vector<int> out;
  for (int k = 0; k < static_cast<int>(masses.size()); ++k)
    if (k != pair.first && k != pair.second) out.push_back(k);
  return out;
}

double full_potential(const ParticleConfig& config) {
  config.validate();
  const auto [i, j] = config.pair;
  double s = 0.0;
  for (int k : config.spectators()) {
    s += config.potential(i, k).evaluate(norm(sub(config.positions[i], config.positions[k])));
    s += config.potential(j, k).evaluate(norm(sub(config.positions[j], config.positions[k])));
  }
  return s;
}

double separable_potential(const ParticleConfig& config) {
  config.validate();
  const auto [i, j] = config.pair;
  const Vec3 c = config.pair_centre();
  double s = 0.0;
  for (int k : config.spectators()) {
    const double R = norm(sub(config.positions[k], c));
    if (R == 0.0) throw CoincidentParticles("spectator " + std::to_string(k) + " sits at the pair centre");
    s += config.potential(i, k).evaluate(R) + config.potential(j, k).evaluate(R);
  }
  return s;
}

ExpansionTerms expansion_terms(const PotentialModel& v_ik, const PotentialModel& v_jk, double m_i,
                               double m_j, double R, double r, double gamma) {
  if (!(R > r) || !(r >= 0.0)) throw DomainError("expansion needs 0 <= r < R");
  if (!(m_i > 0.0) || !(m_j > 0.0)) throw DomainError("masses must be positive");
  const PotentialJet a = v_ik.jet(R), b = v_jk.jet(R);
  const double M = m_i + m_j;
  // Particle i sits at c + (m_j/M) r, particle j at c - (m_i/M) r.
  const double ci = m_j / M, cj = m_i / M;
  const double mu = std::cos(gamma);
  const double p2 = 0.5 * (3.0 * mu * mu - 1.0);
  auto quad = [&](const PotentialJet& v) {
    return (v.d2v + 2.0 * v.dv / R) / 6.0 + (v.d2v - v.dv / R) / 3.0 * p2;
  };
  ExpansionTerms t;
  t.zeroth = a.v + b.v;
  t.first = (m_j * a.dv - m_i * b.dv) / M * r * mu;
  t.second = r * r * (ci * ci * quad(a) + cj * cj * quad(b));
  return t;
}

double small_parameter(const PotentialModel& model, double r, double R) {
  if (!(R > 0.0) || !(r > 0.0)) throw DomainError("small_parameter needs r > 0 and R > 0");
  const PotentialJet j = model.jet(R);
  if (j.v == 0.0) throw DomainError("v(R) = 0, small parameter undefined");
  return r * std::fabs(j.dv) / std::fabs(j.v);
}

SeparabilityReport separability_report(const ParticleConfig& config) {
  config.validate();
  SeparabilityReport rep;
  rep.V_full = full_potential(config);
  rep.V_sp = separable_potential(config);
  rep.residual = rep.V_full - rep.V_sp;
  const auto [i, j] = config.pair;
  const Vec3 c = config.pair_centre();
  const Vec3 rij = sub(config.positions[i], config.positions[j]);
  const double r = norm(rij);
  rep.r_rho = std::numeric_limits<double>::infinity();
  int nearest = -1;
  double gsum = 0.0;
  for (int k : config.spectators()) {
    SpectatorTerms st;
    st.k = k;
    const Vec3 ck = sub(c, config.positions[k]);
    st.R = norm(ck);
    st.gamma = angle_between(rij, ck);
    if (st.R > r)
      st.terms = expansion_terms(config.potential(i, k), config.potential(j, k), config.masses[i],
                                 config.masses[j], st.R, r, st.gamma);
    else
      st.terms = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
                  std::numeric_limits<double>::quiet_NaN()};
    rep.first_order_pred += st.terms.first;
    rep.second_order_pred += st.terms.second;
    rep.gamma_max = std::max(rep.gamma_max, st.gamma);
    gsum += st.gamma;
    if (st.R < rep.r_rho) {
      rep.r_rho = st.R;
      nearest = k;
    }
    rep.spectators.push_back(st);
  }
  rep.gamma_mean = gsum / static_cast<double>(rep.spectators.size());
  // Larger of the two nearest-spectator ratios, skipping a vanishing v.
  rep.small_param = 0.0;
  if (r > 0.0)
    for (int a : {i, j}) {
      const PotentialModel& m = config.potential(a, nearest);
      if (m.evaluate(rep.r_rho) != 0.0)
        rep.small_param = std::max(rep.small_param, small_parameter(m, r, rep.r_rho));
    }
  return rep;
}

ParticleConfig with_separation(const ParticleConfig& config, double r) {
  const auto [i, j] = config.pair;
  const Vec3 c = config.pair_centre();
  const Vec3 d = sub(config.positions[i], config.positions[j]);
  const double n = norm(d);
  if (n == 0.0) throw CoincidentParticles("template pair has no direction");
  const double M = config.masses[i] + config.masses[j];
  ParticleConfig out = config;
  for (int k = 0; k < 3; ++k) {
    out.positions[i][k] = c[k] + config.masses[j] / M * r * d[k] / n;
    out.positions[j][k] = c[k] - config.masses[i] / M * r * d[k] / n;
  }
  return out;
}

ScalingFit residual_scaling_fit(const ParticleConfig& config, const std::vector<double>& r_sweep) {
  config.validate();
  if (r_sweep.size() < 3) throw DomainError("the sweep needs at least 3 radii");
  const auto [lo, hi] = std::minmax_element(r_sweep.begin(), r_sweep.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0 * (1 - 1e-12)) throw DomainError("the sweep must span 2 decades");
  const SeparabilityReport base = separability_report(config);
  if (*hi > 0.1 * base.r_rho) throw DomainError("sweep reaches beyond 0.1 r_rho");

  ScalingFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double r : r_sweep) {
    const ParticleConfig cfg = with_separation(config, r);
    const double res = full_potential(cfg) - separable_potential(cfg);
    if (std::fabs(res) < kResidualFloor * std::max(1.0, std::fabs(base.V_sp)))
      throw FitDegenerate("residual " + std::to_string(res) + " below the floor at r = " + std::to_string(r));
    fit.r.push_back(r);
    fit.residual.push_back(res);
    const double x = std::log(r), y = std::log(std::fabs(res));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(fit.r.size());
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.order = static_cast<int>(std::lround(fit.slope));
  if (fit.order < 1) throw FitDegenerate("fitted slope below 1: " + std::to_string(fit.slope));

  double mean_log = 0.0;
  int sign = 0;
  for (std::size_t k = 0; k < fit.r.size(); ++k) {
    mean_log += std::log(std::fabs(fit.residual[k])) - fit.order * std::log(fit.r[k]);
    sign += fit.residual[k] > 0 ? 1 : -1;
  }
  fit.prefactor = (sign >= 0 ? 1.0 : -1.0) * std::exp(mean_log / n);

  // The prediction comes from the lowest non-vanishing expansion order, at unit r.
  const ParticleConfig unit = with_separation(config, 1.0);
  double pred = 0.0;
  const auto [i, j] = config.pair;
  const Vec3 c = unit.pair_centre();
  const Vec3 rij = sub(unit.positions[i], unit.positions[j]);
  for (int k : unit.spectators()) {
    const Vec3 ck = sub(c, unit.positions[k]);
    const double R = norm(ck), g = angle_between(rij, ck);
    // Evaluate the terms at a small r, then divide out the power.
    const double rs = 1e-3 * R;
    const ExpansionTerms t = expansion_terms(unit.potential(i, k), unit.potential(j, k), unit.masses[i],
                                             unit.masses[j], R, rs, g);
    pred += fit.order == 1 ? t.first / rs : (fit.order == 2 ? t.second / (rs * rs) : 0.0);
  }
  fit.predicted_prefactor = pred;
  fit.prefactor_rel_error = pred != 0.0 ? std::fabs(fit.prefactor / pred - 1.0)
                                        : std::numeric_limits<double>::infinity();
  return fit;
}

std::vector<double> default_sweep(const ParticleConfig& config, int points) {
  if (points < 3) throw DomainError("sweep needs at least 3 points");
  const double rr = separability_report(config).r_rho;
  const double a = config.identical_pair() ? 1e-4 : 1e-5;
  std::vector<double> out(points);
  for (int k = 0; k < points; ++k) out[k] = rr * a * std::pow(100.0, static_cast<double>(k) / (points - 1));
  return out;
}

double orientation_averaged_residual(const ParticleConfig& config, double r) {
  config.validate();
  const double V_sp = separable_potential(config);
  const auto [i, j] = config.pair;
  const Vec3 c = config.pair_centre();
  const double M = config.masses[i] + config.masses[j];
  const double si = config.masses[j] / M * r, sj = config.masses[i] / M * r;
  struct Spec {
    Vec3 d;  // c - r_k
    const PotentialModel *vi, *vj;
  };
  std::vector<Spec> sp;
  for (int k : config.spectators())
    sp.push_back({sub(c, config.positions[k]), &config.potential(i, k), &config.potential(j, k)});

  constexpr int kPhi = 32;
  auto ring = [&](double mu) {
    const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    double s = 0.0;
    for (int p = 0; p < kPhi; ++p) {
      const double phi = 2.0 * kPi * (p + 0.5) / kPhi;
      const Vec3 m = {st * std::cos(phi), st * std::sin(phi), mu};
      for (const Spec& k : sp) {
        const Vec3 di = {k.d[0] + si * m[0], k.d[1] + si * m[1], k.d[2] + si * m[2]};
        const Vec3 dj = {k.d[0] - sj * m[0], k.d[1] - sj * m[1], k.d[2] - sj * m[2]};
        s += k.vi->evaluate(norm(di)) + k.vj->evaluate(norm(dj));
      }
    }
    return s / kPhi;
  };
  const double I = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(ring, -1.0, 1.0, 12, 1e-13);
  return 0.5 * I - V_sp;
}

double collapse_metric(const std::vector<std::vector<double>>& curves) {
  if (curves.size() < 2) throw DomainError("collapse needs at least 2 curves");
  const std::size_t n = curves.front().size();
  double worst = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, mag = 0.0;
    for (const auto& c : curves) {
      if (c.size() != n) throw DomainError("curves differ in length");
      lo = std::min(lo, c[x]);
      hi = std::max(hi, c[x]);
      mag = std::max(mag, std::fabs(c[x]));
    }
    if (mag > 0.0) worst = std::max(worst, (hi - lo) / mag);
  }
  return worst;
}

CollapseReport collapse_study(const PotentialModel& model, double range,
                              const std::vector<double>& R_values, const std::vector<double>& x) {
  if (!(range > 0.0)) throw DomainError("range must be positive");
  CollapseReport rep;
  rep.x = x;
  rep.spectator_R = R_values;
  for (double R : R_values) {
    ParticleConfig cfg;
    cfg.masses = {1.0, 1.0, 1.0};
    cfg.positions = {Vec3{0, 0, 0.5}, Vec3{0, 0, -0.5}, Vec3{R, 0, 0}};
    cfg.pair = {0, 1};
    cfg.pair_potentials = {{{0, 2}, model}, {{1, 2}, model}};
    const double V_sp = separable_potential(cfg);
    std::vector<double> a, b;
    for (double xx : x) {
      a.push_back(orientation_averaged_residual(cfg, xx * range) / V_sp);
      b.push_back(orientation_averaged_residual(cfg, xx * R) / V_sp);
    }
    rep.vs_range.push_back(std::move(a));
    rep.vs_distance.push_back(std::move(b));
  }
  rep.metric_range = collapse_metric(rep.vs_range);
  rep.metric_distance = collapse_metric(rep.vs_distance);
  return rep;
}

NearestSpectatorStats nearest_spectator_stats(double density, std::size_t samples, std::uint64_t seed,
                                              int threads) {
  if (!(density > 0.0)) throw DomainError("density must be positive");
  if (samples == 0) throw DomainError("need at least one sample");
  NearestSpectatorStats st;
  st.density = density;
  st.samples = samples;
  st.radius = std::cbrt(3.0 / (4.0 * kPi * density));
  st.expectation = std::tgamma(4.0 / 3.0) * st.radius;

  // The gas fills a ball holding 40 particles on average; an empty ball
  // (probability e^-40) would report its radius.
  const double L = st.radius * std::cbrt(40.0);
  const double mean_count = density * 4.0 / 3.0 * kPi * L * L * L;
  constexpr std::size_t kChunk = 1024;
  const std::size_t tasks = (samples + kChunk - 1) / kChunk;
  std::vector<double> sum(tasks, 0.0), sum2(tasks, 0.0);

  auto run_task = [&](std::size_t t) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
    std::mt19937_64 rng(seq);
    std::poisson_distribution<int> count(mean_count);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t begin = t * kChunk, end = std::min(samples, begin + kChunk);
    for (std::size_t s = begin; s < end; ++s) {
      const int n = count(rng);
      double best2 = L * L;
      for (int p = 0; p < n; ++p) {
        double x, y, z, d2;
        do {
          x = u(rng);
          y = u(rng);
          z = u(rng);
          d2 = x * x + y * y + z * z;
        } while (d2 > 1.0);
        best2 = std::min(best2, d2 * L * L);
      }
      const double d = std::sqrt(best2);
      sum[t] += d;
      sum2[t] += d * d;
    }
  };

  const int nt = std::max(1, threads);
  if (nt == 1) {
    for (std::size_t t = 0; t < tasks; ++t) run_task(t);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nt; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t t = static_cast<std::size_t>(w); t < tasks; t += static_cast<std::size_t>(nt)) run_task(t);
      });
    for (auto& th : pool) th.join();
  }
  double s = 0.0, s2 = 0.0;
  for (std::size_t t = 0; t < tasks; ++t) {
    s += sum[t];
    s2 += sum2[t];
  }
  const double n = static_cast<double>(samples);
  st.mean = s / n;
  st.std_error = std::sqrt(std::max(0.0, s2 / n - st.mean * st.mean) / n);
  return st;
}

}  // namespace cusplab
