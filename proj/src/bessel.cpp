#include "eqsim/bessel.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace eqsim {
namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSeriesCrossover = 2.0;

// Ascending series on x <= 2 (DLMF 10.31):
//   K0(x) = -ln(x/2) I0(x) + sum_k psi(k+1) t^k / (k!)^2,          t = x^2/4
//   K1(x) = 1/x + ln(x/2) I1(x)
//           - (x/4) sum_k [psi(k+1)+psi(k+2)] t^k / (k! (k+1)!)
std::pair<double, double> k01_series(double x) {
  const double t = 0.25 * x * x;
  const double lg = std::log(0.5 * x);

  double term = 1.0;          // t^k / (k!)^2
  double i0 = 1.0;
  double psi = -kEulerGamma;  // psi(k+1)
  double sum0 = psi;
  for (int k = 1; k < 64; ++k) {
    term *= t / (static_cast<double>(k) * k);
    psi += 1.0 / k;
    i0 += term;
    sum0 += psi * term;
    if (term < 1e-19 * i0) break;
  }
  const double k0 = -lg * i0 + sum0;

  term = 1.0;                 // t^k / (k! (k+1)!)
  double i1s = 1.0;
  double psi1 = -kEulerGamma;       // psi(k+1)
  double psi2 = 1.0 - kEulerGamma;  // psi(k+2)
  double sum1 = psi1 + psi2;
  for (int k = 1; k < 64; ++k) {
    term *= t / (static_cast<double>(k) * (k + 1));
    psi1 += 1.0 / k;
    psi2 += 1.0 / (k + 1);
    i1s += term;
    sum1 += (psi1 + psi2) * term;
    if (term * (psi1 + psi2 + 1.0) < 1e-19 * std::abs(sum1) && k > 3) break;
  }
  const double i1 = 0.5 * x * i1s;
  const double k1 = 1.0 / x + lg * i1 - 0.25 * x * sum1;
  return {k0, k1};
}

// Steed's continued fraction (CF2) for the scaled functions at x >= 2,
// order mu = 0 with the order-1 value from the K recurrence.
std::pair<double, double> k01_scaled_cf(double x) {
  const double a1 = 0.25;  // 1/4 - mu^2, mu = 0
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  double q = a1;
  double cc = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i < 20000; ++i) {
    a -= 2.0 * (i - 1);
    cc = -a * cc / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += cc * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels) < 1e-17 * std::abs(s)) {
      h *= a1;
      const double k0s = std::sqrt(kPi / (2.0 * x)) / s;
      const double k1s = k0s * (0.5 + x - h) / x;
      return {k0s, k1s};
    }
  }
  throw std::runtime_error("bessel_k: continued fraction failed to converge");
}

std::pair<double, double> k01_scaled(double x) {
  if (x <= kSeriesCrossover) {
    auto [k0, k1] = k01_series(x);
    const double ex = std::exp(x);
    return {k0 * ex, k1 * ex};
  }
  return k01_scaled_cf(x);
}

void check_domain(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("bessel_k: argument must be > 0 (K diverges at 0)");
  }
}

}  // namespace

double bessel_k0(double x) {
  check_domain(x);
  if (x <= kSeriesCrossover) return k01_series(x).first;
  return k01_scaled_cf(x).first * std::exp(-x);
}

double bessel_k1(double x) {
  check_domain(x);
  if (x <= kSeriesCrossover) return k01_series(x).second;
  return k01_scaled_cf(x).second * std::exp(-x);
}

double bessel_k0_scaled(double x) {
  check_domain(x);
  return k01_scaled(x).first;
}

double bessel_k1_scaled(double x) {
  check_domain(x);
  return k01_scaled(x).second;
}

double bessel_k(int order, double x) {
  if (order == 0) return bessel_k0(x);
  if (order == 1) return bessel_k1(x);
  throw std::invalid_argument("bessel_k: order must be 0 or 1");
}

}  // namespace eqsim
