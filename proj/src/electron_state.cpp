#include "eqsim/electron_state.hpp"

#include <cmath>
#include <stdexcept>

#include "eqsim/constants.hpp"
#include "eqsim/errors.hpp"

namespace eqsim {

double ElectronLadderState::norm_sq() const {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return s;
}

void ElectronLadderState::validate() const {
  if (amplitudes.empty())
    throw std::invalid_argument("ElectronLadderState: empty window");
  if (std::abs(norm_sq() - 1.0) > 1e-12)
    throw std::invalid_argument("ElectronLadderState: state is not normalized");
}

ElectronLadderState make_unshaped() {
  ElectronLadderState s;
  s.offset = 0;
  s.amplitudes = {1.0};
  return s;
}

ElectronLadderState make_duo(double phi_e) {
  ElectronLadderState s;
  s.offset = -1;
  s.half_integer = true;
  const double r = 1.0 / std::sqrt(2.0);
  s.amplitudes = {r, std::polar(r, phi_e)};
  return s;
}

namespace {

// J_0..J_nmax by Miller's backward recurrence, normalized through
// J_0 + 2 sum J_{2k} = 1.
std::vector<double> bessel_j_row(int nmax, double x) {
  std::vector<double> j(nmax + 1, 0.0);
  if (x == 0.0) {
    j[0] = 1.0;
    return j;
  }
  const int start = nmax + 16 + static_cast<int>(std::ceil(std::abs(x)));
  double jp = 0.0;          // J_{k+1}
  double jc = 1e-300;       // J_k (arbitrary tiny seed)
  double norm = 0.0;
  for (int k = start; k >= 1; --k) {
    const double jm = (2.0 * k / x) * jc - jp;
    jp = jc;
    jc = jm;
    if (k - 1 <= nmax) j[k - 1] = jc;
    if (((k - 1) & 1) == 0) norm += (k == 1 ? 1.0 : 2.0) * jc;
    if (std::abs(jc) > 1e250) {  // rescale to avoid overflow
      const double inv = 1.0 / std::abs(jc);
      jp *= inv;
      jc *= inv;
      norm *= inv;
      for (auto& v : j) v *= inv;
    }
  }
  for (auto& v : j) v /= norm;
  return j;
}

}  // namespace

ElectronLadderState make_pinem(double g_mag, double phi, int window) {
  if (g_mag < 0.0) throw std::invalid_argument("make_pinem: g_mag >= 0");
  if (window < 0) throw std::invalid_argument("make_pinem: window >= 0");
  const double x = 2.0 * g_mag;
  const auto j = bessel_j_row(window, x);

  ElectronLadderState s;
  s.offset = -window;
  s.amplitudes.resize(2 * window + 1);
  double captured = 0.0;
  for (int n = -window; n <= window; ++n) {
    const int a = std::abs(n);
    double jn = j[a];
    if (n < 0 && (a & 1)) jn = -jn;  // J_{-n} = (-1)^n J_n
    s.amplitudes[n + window] = std::polar(jn, phi * n);
    captured += jn * jn;
  }
  const double deficit = std::abs(1.0 - captured);  // sum_n J_n^2 = 1
  if (deficit > 1e-10)
    throw truncation_error("make_pinem: window too small, norm deficit " +
                           std::to_string(deficit));
  const double scale = 1.0 / std::sqrt(captured);
  for (auto& a : s.amplitudes) a *= scale;
  return s;
}

ElectronLadderState disperse(const ElectronLadderState& s, double chi) {
  ElectronLadderState out = s;
  for (std::size_t i = 0; i < out.amplitudes.size(); ++i) {
    const double n = out.label(i);
    out.amplitudes[i] *= std::polar(1.0, chi * n * n);
  }
  return out;
}

std::complex<double> ladder_moment(const ElectronLadderState& s, int l) {
  if (l < 1) throw std::invalid_argument("ladder_moment: l >= 1");
  std::complex<double> m = 0.0;
  const std::size_t n = s.amplitudes.size();
  for (std::size_t i = 0; i + l < n; ++i)
    m += std::conj(s.amplitudes[i]) * s.amplitudes[i + l];
  return m;
}

double dispersion_chi(double length_m, double beta, double omega0) {
  const double gamma = lorentz_gamma_of_beta(beta);
  const double v = beta * consts::speed_of_light;
  return -length_m * consts::hbar * omega0 * omega0 /
         (2.0 * gamma * gamma * gamma * consts::electron_mass * v * v * v);
}

}  // namespace eqsim
