#include "eqsim/scattering.hpp"

#include <utility>
#include <cmath>
#include <stdexcept>

#include "eqsim/errors.hpp"

namespace eqsim {

namespace {
using cd = std::complex<double>;
constexpr double kSupportThreshold = 1e-16;  // |C_n|^2 below this is guard
}  // namespace

double Spectrum::prob_at(double lbl) const {
  const double base = offset + (half_integer ? 0.5 : 0.0);
  const double di = lbl - base;
  const long i = std::lround(di);
  if (std::abs(di - i) > 1e-9) return 0.0;
  if (i < 0 || static_cast<std::size_t>(i) >= probabilities.size()) return 0.0;
  return probabilities[static_cast<std::size_t>(i)];
}

double Spectrum::total() const {
  double s = leak;
  for (double p : probabilities) s += p;
  return s;
}

double Spectrum::mean_label() const {
  double s = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i)
    s += label(i) * probabilities[i];
  return s;
}

double JointState::norm() const {
  double s = 0.0;
  for (const auto& c : components) {
    double n = 0.0;
    for (const auto& a : c.amp_g) n += std::norm(a);
    for (const auto& a : c.amp_e) n += std::norm(a);
    s += c.weight * n;
  }
  return s;
}

namespace {

// In-place S application on one pure joint component over window [w0, w1]
// (absolute ladder indices, amp arrays indexed relative to w0). The window
// edges must be unpopulated guards.
void apply_s_inplace(std::vector<cd>& amp_g, std::vector<cd>& amp_e,
                     const CouplingConstant& g) {
  const double mag = g.magnitude;
  const double omega = std::sqrt(mag * mag + g.kappa * g.kappa);
  const double cs = std::cos(omega);
  const double snc = omega > 0.0 ? std::sin(omega) / omega : 1.0;
  const cd gval = g.value();
  const cd i(0.0, 1.0);
  const std::size_t n = amp_g.size();
  // Invariant 2x2 blocks pair |n+1, g> with |n, e>:
  //   exp(-i [[-kappa, g*],[g, kappa]]) applied to (amp_g[k+1], amp_e[k]).
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const cd a = amp_g[k + 1];
    const cd b = amp_e[k];
    amp_g[k + 1] = cs * a - i * snc * (-g.kappa * a + std::conj(gval) * b);
    amp_e[k] = cs * b - i * snc * (gval * a + g.kappa * b);
  }
  // Leftover edge states |w0, g> and |w1, e> pair with states outside the
  // window; guards guarantee they carry no amplitude.
  if (std::norm(amp_g.front()) > kSupportThreshold ||
      std::norm(amp_e.back()) > kSupportThreshold)
    throw truncation_error(
        "apply_scattering: populated amplitude on the window edge");
}

}  // namespace

JointState apply_scattering(const ElectronLadderState& e,
                            const QubitDensityMatrix& rho,
                            const CouplingConstant& g, int extra_guard) {
  e.validate();
  rho.validate();
  if (extra_guard < 0)
    throw std::invalid_argument("apply_scattering: extra_guard >= 0");

  // Window: the full stored range plus guard slots, so the one-step shift
  // of S never crosses the edge (populated support always sits inside).
  const int guard = 1 + extra_guard;
  const int w0 = e.offset - guard;
  const int w1 = e.offset + static_cast<int>(e.amplitudes.size()) - 1 + guard;
  const std::size_t width = static_cast<std::size_t>(w1 - w0 + 1);

  JointState out;
  out.offset = w0;
  out.half_integer = e.half_integer;

  for (const auto& comp : decompose(rho)) {
    if (comp.weight <= 0.0) continue;
    JointState::Component c;
    c.weight = comp.weight;
    c.amp_g.assign(width, cd(0.0, 0.0));
    c.amp_e.assign(width, cd(0.0, 0.0));
    for (std::size_t i = 0; i < e.amplitudes.size(); ++i) {
      const std::size_t j =
          static_cast<std::size_t>(e.offset + static_cast<int>(i) - w0);
      c.amp_g[j] = comp.amp_g * e.amplitudes[i];
      c.amp_e[j] = comp.amp_e * e.amplitudes[i];
    }
    apply_s_inplace(c.amp_g, c.amp_e, g);
    out.components.push_back(std::move(c));
  }
  return out;
}

Spectrum electron_spectrum(const JointState& js) {
  Spectrum s;
  s.offset = js.offset;
  s.half_integer = js.half_integer;
  if (js.components.empty()) return s;
  s.probabilities.assign(js.components.front().amp_g.size(), 0.0);
  for (const auto& c : js.components)
    for (std::size_t i = 0; i < s.probabilities.size(); ++i)
      s.probabilities[i] +=
          c.weight * (std::norm(c.amp_g[i]) + std::norm(c.amp_e[i]));
  return s;
}

Spectrum eels_spectrum(const ElectronLadderState& e,
                       const QubitDensityMatrix& rho,
                       const CouplingConstant& g) {
  if (g.kappa != 0.0)
    return electron_spectrum(apply_scattering(e, rho, g));

  e.validate();
  rho.validate();
  const double cs = std::cos(g.magnitude);
  const double sn = std::sin(g.magnitude);
  const double p = rho.p_excited;
  const cd q = rho.coherence;
  const cd eip = std::polar(1.0, g.phase);
  const cd i(0.0, 1.0);

  const std::size_t nin = e.amplitudes.size();
  auto amp = [&](long k) -> cd {  // C at storage index offset+k, 0 outside
    return (k >= 0 && static_cast<std::size_t>(k) < nin)
               ? e.amplitudes[static_cast<std::size_t>(k)]
               : cd(0.0, 0.0);
  };

  Spectrum s;
  s.offset = e.offset - 1;
  s.half_integer = e.half_integer;
  s.probabilities.resize(nin + 2);
  for (long n = -1; n <= static_cast<long>(nin); ++n) {
    const cd cn = amp(n);
    const cd cm = amp(n - 1);
    const cd cp = amp(n + 1);
    double pn = std::norm(cn) * cs * cs + p * std::norm(cm) * sn * sn +
                (1.0 - p) * std::norm(cp) * sn * sn;
    pn += 2.0 * (i * cs * sn *
                 (cn * std::conj(cm) * q * eip +
                  cn * std::conj(cp) * std::conj(q) * std::conj(eip)))
                    .real();
    if (pn < 0.0) {
      if (pn < -1e-14)
        throw accuracy_error("eels_spectrum: negative probability " +
                             std::to_string(pn));
      pn = 0.0;
    }
    s.probabilities[static_cast<std::size_t>(n + 1)] = pn;
  }
  return s;
}

double delta_p(const Spectrum& s) {
  if (!s.half_integer)
    throw std::invalid_argument(
        "delta_p: spectrum does not have duo-class half-integer peaks");
  const double base = s.offset + 0.5;
  const long ip = std::lround(0.5 - base);
  const long im = std::lround(-0.5 - base);
  if (im < 0 || ip < 0 || static_cast<std::size_t>(ip) >= s.probabilities.size())
    throw std::invalid_argument("delta_p: principal peaks +-1/2 not in window");
  return s.probabilities[static_cast<std::size_t>(ip)] -
         s.probabilities[static_cast<std::size_t>(im)];
}

double average_gain(const ElectronLadderState& e, const QubitDensityMatrix& rho,
                    const CouplingConstant& g) {
  return eels_spectrum(e, rho, g).mean_label();
}

}  // namespace eqsim
