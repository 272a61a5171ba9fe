#include "eqsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "eqsim/constants.hpp"
#include "eqsim/errors.hpp"

namespace eqsim {

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap_principal(double phi) {
  phi = std::fmod(phi + kPi, 2.0 * kPi);
  if (phi < 0.0) phi += 2.0 * kPi;
  phi -= kPi;
  if (phi <= -kPi) phi = kPi;
  return phi;
}
}  // namespace

QubitDensityMatrix PumpConfig::prepare() const {
  if (sequence.empty()) return bloch_state(theta_a, phi_a);
  QubitDensityMatrix rho = bloch_state(kPi, 0.0);  // ground state
  for (const auto& pulse : sequence)
    rho = apply_rotation(rho, pulse.axis, pulse.angle);
  return rho;
}

ElectronLadderState ProbeConfig::make_state(double phi_e_override) const {
  switch (kind) {
    case Kind::unshaped:
      return make_unshaped();
    case Kind::duo:
      return make_duo(phi_e_override);
    case Kind::pinem: {
      ElectronLadderState s = make_pinem(pinem_g, pinem_phi, window);
      if (chi != 0.0) s = disperse(s, chi);
      return s;
    }
  }
  throw std::invalid_argument("ProbeConfig: unknown probe kind");
}

void ExperimentConfig::validate() const {
  if (!(decay.t1 > 0.0) || !(decay.t2 > 0.0))
    throw std::invalid_argument("ExperimentConfig: decay times must be > 0");
  if (decay.t2 > 2.0 * decay.t1 * (1.0 + 1e-12))
    throw std::invalid_argument("ExperimentConfig: t2 <= 2 t1 violated");
  if (tau_grid.empty())
    throw std::invalid_argument("ExperimentConfig: tau_grid is empty");
  for (std::size_t i = 1; i < tau_grid.size(); ++i)
    if (!(tau_grid[i] > tau_grid[i - 1]))
      throw std::invalid_argument(
          "ExperimentConfig: tau_grid must be strictly increasing");
  if (tau_grid.front() < 0.0)
    throw std::invalid_argument("ExperimentConfig: tau must be >= 0");
  if (shots < 0)
    throw std::invalid_argument("ExperimentConfig: shots must be >= 0");
  if (!coupling && !physical)
    throw std::invalid_argument(
        "ExperimentConfig: provide either a coupling constant or physical "
        "parameters");
  if (physical) physical->validate();
}

CouplingConstant ExperimentConfig::effective_coupling() const {
  if (coupling) return *coupling;
  if (physical) return coupling_g(*physical);
  throw std::invalid_argument("ExperimentConfig: no coupling available");
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ull * (index + 1));
  for (int round = 0; round < 2; ++round) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z = z ^ (z >> 31);
  }
  return z;
}

namespace {

// Exact binomial sampling by inversion: walk the pmf outward from the mode
// (seeded through lgamma, extended by the exact ratio recurrence). The
// standard-library binomial_distribution is measurably over-dispersed at
// large n, which would corrupt the shot-noise error budget.
long long binomial_draw(std::mt19937_64& rng, long long n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);

  long long mode = static_cast<long long>(std::floor((n + 1) * p));
  if (mode > n) mode = n;
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(mode);
  const double log_pm = std::lgamma(nd + 1.0) - std::lgamma(md + 1.0) -
                        std::lgamma(nd - md + 1.0) + md * std::log(p) +
                        (nd - md) * std::log1p(-p);
  const double pm = std::exp(log_pm);

  double cum = pm;
  if (u < cum) return mode;
  long long lo = mode, hi = mode;
  double lo_p = pm, hi_p = pm;
  const double odds = p / (1.0 - p);
  while (lo > 0 || hi < n) {
    if (hi < n) {
      hi_p *= static_cast<double>(n - hi) / static_cast<double>(hi + 1) * odds;
      ++hi;
      cum += hi_p;
      if (u < cum) return hi;
    }
    if (lo > 0) {
      lo_p *= static_cast<double>(lo) / static_cast<double>(n - lo + 1) / odds;
      --lo;
      cum += lo_p;
      if (u < cum) return lo;
    }
  }
  return n;  // u landed in the roundoff sliver past the accumulated mass
}

}  // namespace

std::map<double, long long> sample_counts(const Spectrum& s, long long shots,
                                          std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("sample_counts: shots >= 1");
  const double total = s.total();
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("sample_counts: spectrum is not normalized");

  std::mt19937_64 rng(seed);
  std::map<double, long long> counts;
  long long remaining = shots;
  double rem_p = total - s.leak;
  for (std::size_t i = 0; i < s.probabilities.size(); ++i) {
    const double lbl = s.label(i);
    if (i + 1 == s.probabilities.size() && s.leak == 0.0) {
      counts[lbl] = remaining;  // last bin takes the remainder
      remaining = 0;
      break;
    }
    long long n = 0;
    if (remaining > 0 && rem_p > 0.0) {
      const double pr = std::clamp(s.probabilities[i] / rem_p, 0.0, 1.0);
      n = binomial_draw(rng, remaining, pr);
    }
    counts[lbl] = n;
    remaining -= n;
    rem_p -= s.probabilities[i];
  }
  return counts;
}

namespace {

struct Measured {
  double value = 0.0;
  double std_error = 0.0;
};

Measured measure_delta_p(const Spectrum& spec, long long shots,
                         std::uint64_t stream) {
  if (shots == 0) return {delta_p(spec), 0.0};
  const auto counts = sample_counts(spec, shots, stream);
  auto at = [&](double lbl) {
    const auto it = counts.find(lbl);
    return it == counts.end() ? 0.0
                              : static_cast<double>(it->second) / shots;
  };
  const double pp = at(0.5);
  const double pm = at(-0.5);
  const double dp = pp - pm;
  const double var = std::max(0.0, pp + pm - dp * dp);
  return {dp, std::sqrt(var / static_cast<double>(shots))};
}

Measured measure_average_gain(const Spectrum& spec, long long shots,
                              std::uint64_t stream) {
  if (shots == 0) return {spec.mean_label(), 0.0};
  const auto counts = sample_counts(spec, shots, stream);
  double m1 = 0.0, m2 = 0.0;
  for (const auto& [lbl, n] : counts) {
    const double f = static_cast<double>(n) / shots;
    m1 += lbl * f;
    m2 += lbl * lbl * f;
  }
  const double var = std::max(0.0, m2 - m1 * m1);
  return {m1, std::sqrt(var / static_cast<double>(shots))};
}

}  // namespace

ScanSeries run_t1_scan(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.probe.kind == ProbeConfig::Kind::pinem)
    throw std::invalid_argument(
        "run_t1_scan: probe must be unshaped, or duo for the shaped variant");
  const CouplingConstant g = cfg.effective_coupling();
  const QubitDensityMatrix pumped = cfg.pump.prepare();
  const bool shaped = cfg.probe.kind == ProbeConfig::Kind::duo;
  // The pi/2 x-pulse leaves the coherence at phase pi/2; contrast peaks at
  // phi_e = -phi_g (shifted by pi/2 from the T2 scheme's Phi = pi/2 choice).
  const double phi_e =
      cfg.probe.phi_e_auto ? -g.phase : cfg.probe.phi_e;

  ScanSeries out;
  out.kind = shaped ? ScanSeries::Observable::delta_p
                    : ScanSeries::Observable::average_gain;
  out.points.reserve(cfg.tau_grid.size());
  for (std::size_t i = 0; i < cfg.tau_grid.size(); ++i) {
    const double tau = cfg.tau_grid[i];
    QubitDensityMatrix rho = evolve(pumped, tau, cfg.decay);
    Measured m;
    if (shaped) {
      rho = apply_rotation(rho, {1.0, 0.0, 0.0}, 0.5 * kPi);
      const Spectrum spec = eels_spectrum(make_duo(phi_e), rho, g);
      m = measure_delta_p(spec, cfg.shots, derive_stream(cfg.seed, i));
    } else {
      const Spectrum spec = eels_spectrum(make_unshaped(), rho, g);
      m = measure_average_gain(spec, cfg.shots, derive_stream(cfg.seed, i));
    }
    out.points.push_back({tau, m.value, m.std_error});
  }
  return out;
}

ScanSeries run_t2_scan(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.probe.kind != ProbeConfig::Kind::duo)
    throw std::invalid_argument("run_t2_scan: probe must be a duo electron");
  const CouplingConstant g = cfg.effective_coupling();
  const QubitDensityMatrix pumped = cfg.pump.prepare();
  // Maximum contrast Phi = phi_a - phi_e - phi_g = pi/2.
  const double phi_e = cfg.probe.phi_e_auto
                           ? cfg.pump.phi_a - g.phase - 0.5 * kPi
                           : cfg.probe.phi_e;
  const ElectronLadderState probe = make_duo(phi_e);

  ScanSeries out;
  out.kind = ScanSeries::Observable::delta_p;
  out.points.reserve(cfg.tau_grid.size());
  for (std::size_t i = 0; i < cfg.tau_grid.size(); ++i) {
    const double tau = cfg.tau_grid[i];
    const QubitDensityMatrix rho = evolve(pumped, tau, cfg.decay);
    const Spectrum spec = eels_spectrum(probe, rho, g);
    const Measured m =
        measure_delta_p(spec, cfg.shots, derive_stream(cfg.seed, i));
    out.points.push_back({tau, m.value, m.std_error});
  }
  return out;
}

TomographyResult tomography(const ExperimentConfig& cfg,
                            const std::vector<double>& phi_e_grid) {
  cfg.validate();
  if (cfg.probe.kind != ProbeConfig::Kind::duo)
    throw std::invalid_argument("tomography: probe must be a duo electron");
  if (phi_e_grid.size() < 4)
    throw std::invalid_argument("tomography: need >= 4 phase points");
  const CouplingConstant g = cfg.effective_coupling();
  const double tau = cfg.tau_grid.front();
  const QubitDensityMatrix rho = evolve(cfg.pump.prepare(), tau, cfg.decay);

  std::vector<double> dps;
  dps.reserve(phi_e_grid.size());
  double gain_lobe = 0.0, loss_lobe = 0.0, se_sum = 0.0;
  for (std::size_t i = 0; i < phi_e_grid.size(); ++i) {
    const Spectrum spec = eels_spectrum(make_duo(phi_e_grid[i]), rho, g);
    if (cfg.shots == 0) {
      dps.push_back(delta_p(spec));
      gain_lobe += spec.prob_at(1.5);
      loss_lobe += spec.prob_at(-1.5);
    } else {
      const auto counts =
          sample_counts(spec, cfg.shots, derive_stream(cfg.seed, i));
      auto at = [&](double lbl) {
        const auto it = counts.find(lbl);
        return it == counts.end() ? 0.0
                                  : static_cast<double>(it->second) / cfg.shots;
      };
      const double dp = at(0.5) - at(-0.5);
      dps.push_back(dp);
      gain_lobe += at(1.5);
      loss_lobe += at(-1.5);
      se_sum += std::sqrt(std::max(0.0, at(0.5) + at(-0.5) - dp * dp) /
                          static_cast<double>(cfg.shots));
    }
  }
  gain_lobe /= static_cast<double>(phi_e_grid.size());
  loss_lobe /= static_cast<double>(phi_e_grid.size());

  const FitResult fit = fit_sinusoid(phi_e_grid, dps);

  TomographyResult res;
  res.amplitude = fit.amplitude;
  res.hemisphere = gain_lobe >= loss_lobe
                       ? TomographyResult::Hemisphere::upper
                       : TomographyResult::Hemisphere::lower;

  const double noise_floor =
      cfg.shots == 0
          ? 1e-9
          : 3.0 * se_sum / static_cast<double>(phi_e_grid.size()) *
                std::sqrt(2.0 / static_cast<double>(phi_e_grid.size()));
  if (fit.amplitude < noise_floor) {
    res.phase_indeterminate = true;
    res.theta_est =
        res.hemisphere == TomographyResult::Hemisphere::upper ? 0.0 : kPi;
    res.phi_est = 0.0;
    return res;
  }

  // delta-P(phi_e) = bias + cos|g| sin|g| sin(theta) e^{-tau/T2}
  //                  sin(phi_a - phi_g - phi_e); invert the amplitude exactly.
  const double decay_factor = std::exp(-tau / cfg.decay.t2);
  const double denom =
      std::cos(g.magnitude) * std::sin(g.magnitude) * decay_factor;
  const double s = std::clamp(fit.amplitude / denom, 0.0, 1.0);
  res.theta_est = res.hemisphere == TomographyResult::Hemisphere::upper
                      ? std::asin(s)
                      : kPi - std::asin(s);
  res.phi_est = wrap_principal(fit.phase + g.phase);
  return res;
}

FitResult fit_sinusoid(const std::vector<double>& x,
                       const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("fit_sinusoid: need >= 3 matching points");
  // Normal equations for [1, cos x, sin x].
  double m[3][3] = {{0}};
  double rhs[3] = {0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double b[3] = {1.0, std::cos(x[i]), std::sin(x[i])};
    for (int a = 0; a < 3; ++a) {
      rhs[a] += b[a] * y[i];
      for (int c = 0; c < 3; ++c) m[a][c] += b[a] * b[c];
    }
  }
  // Cholesky solve (fixed order).
  double l[3][3] = {{0}};
  for (int a = 0; a < 3; ++a) {
    for (int c = 0; c <= a; ++c) {
      double s = m[a][c];
      for (int k = 0; k < c; ++k) s -= l[a][k] * l[c][k];
      if (a == c) {
        if (s <= 0.0)
          throw std::invalid_argument("fit_sinusoid: degenerate phase grid");
        l[a][a] = std::sqrt(s);
      } else {
        l[a][c] = s / l[c][c];
      }
    }
  }
  double zv[3], coef[3];
  for (int a = 0; a < 3; ++a) {
    double s = rhs[a];
    for (int k = 0; k < a; ++k) s -= l[a][k] * zv[k];
    zv[a] = s / l[a][a];
  }
  for (int a = 2; a >= 0; --a) {
    double s = zv[a];
    for (int k = a + 1; k < 3; ++k) s -= l[k][a] * coef[k];
    coef[a] = s / l[a][a];
  }

  FitResult r;
  r.offset = coef[0];
  // c1 cos + c2 sin = A sin(psi - x)  =>  c1 = A sin psi, c2 = -A cos psi.
  r.amplitude = std::hypot(coef[1], coef[2]);
  r.phase = std::atan2(coef[1], -coef[2]);
  double chi2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f =
        coef[0] + coef[1] * std::cos(x[i]) + coef[2] * std::sin(x[i]);
    chi2 += (y[i] - f) * (y[i] - f);
  }
  r.residual_norm = std::sqrt(chi2);
  return r;
}

namespace {

// 3x3 SPD solve, fixed-order Cholesky; returns false when not SPD.
bool cholesky_solve3(const double m[3][3], const double rhs[3], double out[3],
                     double inv_diag[3] = nullptr) {
  double l[3][3] = {{0}};
  for (int a = 0; a < 3; ++a) {
    for (int c = 0; c <= a; ++c) {
      double s = m[a][c];
      for (int k = 0; k < c; ++k) s -= l[a][k] * l[c][k];
      if (a == c) {
        if (s <= 0.0) return false;
        l[a][a] = std::sqrt(s);
      } else {
        l[a][c] = s / l[c][c];
      }
    }
  }
  double zv[3];
  for (int a = 0; a < 3; ++a) {
    double s = rhs[a];
    for (int k = 0; k < a; ++k) s -= l[a][k] * zv[k];
    zv[a] = s / l[a][a];
  }
  for (int a = 2; a >= 0; --a) {
    double s = zv[a];
    for (int k = a + 1; k < 3; ++k) s -= l[k][a] * out[k];
    out[a] = s / l[a][a];
  }
  if (inv_diag) {
    // Diagonal of (L L^T)^{-1} column by column.
    for (int col = 0; col < 3; ++col) {
      double ei[3] = {0, 0, 0};
      ei[col] = 1.0;
      double zz[3], xx[3];
      for (int a = 0; a < 3; ++a) {
        double s = ei[a];
        for (int k = 0; k < a; ++k) s -= l[a][k] * zz[k];
        zz[a] = s / l[a][a];
      }
      for (int a = 2; a >= 0; --a) {
        double s = zz[a];
        for (int k = a + 1; k < 3; ++k) s -= l[k][a] * xx[k];
        xx[a] = s / l[a][a];
      }
      inv_diag[col] = xx[col];
    }
  }
  return true;
}

}  // namespace

FitResult fit_exp_decay(const ScanSeries& series) {
  const auto& pts = series.points;
  if (pts.size() < 4)
    throw std::invalid_argument("fit_exp_decay: need >= 4 points");
  const std::size_t n = pts.size();
  bool weighted = true;
  for (const auto& p : pts) weighted = weighted && p.std_error > 0.0;

  auto sigma = [&](std::size_t i) { return weighted ? pts[i].std_error : 1.0; };

  // Initial guess: offset from the tail, rate from a log-linear fit.
  const std::size_t ntail = std::max<std::size_t>(1, n / 5);
  double off = 0.0;
  for (std::size_t i = n - ntail; i < n; ++i) off += pts[i].value;
  off /= static_cast<double>(ntail);
  double amp = pts.front().value - off;
  {
    double ymin = pts[0].value, ymax = pts[0].value;
    for (const auto& p : pts) {
      ymin = std::min(ymin, p.value);
      ymax = std::max(ymax, p.value);
    }
    if (!(ymax - ymin > 0.0) || std::abs(amp) < 1e-300)
      throw std::invalid_argument("fit_exp_decay: degenerate (constant) data");
  }
  double rate;
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (pts[i].value - off) / amp;
      if (d > 0.05) {
        const double ly = std::log(d);
        sx += pts[i].tau;
        sy += ly;
        sxx += pts[i].tau * pts[i].tau;
        sxy += pts[i].tau * ly;
        ++cnt;
      }
    }
    const double denom = cnt * sxx - sx * sx;
    rate = (cnt >= 2 && denom > 0.0) ? -(cnt * sxy - sx * sy) / denom : 0.0;
    if (!(rate > 0.0))
      rate = 1.0 / std::max(pts.back().tau - pts.front().tau, 1e-300);
  }

  auto chi2_of = [&](double a, double r, double o) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double res = (pts[i].value - (a * std::exp(-r * pts[i].tau) + o)) /
                         sigma(i);
      c += res * res;
    }
    return c;
  };

  double chi2 = chi2_of(amp, rate, off);
  const double yscale = [&] {
    double m = 0.0;
    for (const auto& p : pts) m = std::max(m, std::abs(p.value));
    return std::max(m, 1e-300);
  }();

  int iter = 0;
  double jtj[3][3];
  for (; iter < 200; ++iter) {
    double rhs[3] = {0, 0, 0};
    for (auto& row : jtj) row[0] = row[1] = row[2] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = 1.0 / sigma(i);
      const double ex = std::exp(-rate * pts[i].tau);
      const double res = (pts[i].value - (amp * ex + off)) * w;
      const double j[3] = {ex * w, -amp * pts[i].tau * ex * w, w};
      for (int a = 0; a < 3; ++a) {
        rhs[a] += j[a] * res;
        for (int c = 0; c < 3; ++c) jtj[a][c] += j[a] * j[c];
      }
    }
    double step[3];
    if (!cholesky_solve3(jtj, rhs, step))
      throw accuracy_error("fit_exp_decay: singular normal equations");

    double scale = 1.0;
    double na = amp, nr = rate, no = off, nchi = chi2;
    bool accepted = false;
    for (int h = 0; h < 30; ++h) {
      na = amp + scale * step[0];
      nr = rate + scale * step[1];
      no = off + scale * step[2];
      nchi = chi2_of(na, nr, no);
      if (nchi <= chi2 * (1.0 + 1e-14)) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted)
      throw accuracy_error("fit_exp_decay: damping failed to reduce chi^2");

    const double rel =
        std::max({std::abs(na - amp) / std::max(std::abs(na), yscale * 1e-6),
                  std::abs(nr - rate) / std::max(std::abs(nr), 1e-300),
                  std::abs(no - off) / yscale});
    amp = na;
    rate = nr;
    off = no;
    chi2 = nchi;
    if (rel < 1e-10) break;
  }
  if (iter >= 200)
    throw accuracy_error("fit_exp_decay: no convergence in 200 iterations");

  // Covariance from the converged normal matrix.
  double inv_diag[3] = {0, 0, 0};
  double dummy[3];
  double rhs0[3] = {0, 0, 0};
  cholesky_solve3(jtj, rhs0, dummy, inv_diag);
  const double s2 =
      weighted ? 1.0
               : chi2 / static_cast<double>(n > 3 ? n - 3 : 1);

  FitResult r;
  r.amplitude = amp;
  r.rate = rate;
  r.offset = off;
  r.amplitude_stderr = std::sqrt(std::max(0.0, inv_diag[0] * s2));
  r.rate_stderr = std::sqrt(std::max(0.0, inv_diag[1] * s2));
  r.offset_stderr = std::sqrt(std::max(0.0, inv_diag[2] * s2));
  r.residual_norm = std::sqrt(chi2);
  r.iterations = iter + 1;
  return r;
}

double gamma_from_ldos(double dipole_debye, double omega0, double rho_z) {
  if (rho_z < 0.0)
    throw std::invalid_argument("gamma_from_ldos: rho_z must be >= 0");
  if (!(omega0 > 0.0))
    throw std::invalid_argument("gamma_from_ldos: omega0 must be > 0");
  const double d = debye_to_si(dipole_debye);
  return omega0 * d * d * rho_z /
         (consts::hbar * consts::vacuum_permittivity);
}

}  // namespace eqsim
