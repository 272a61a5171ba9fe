// Modified Bessel functions of the second kind, orders 0 and 1.
//
// Ascending series for x <= 2, Steed's continued fraction for the
// exponentially scaled functions above. Relative error is at the few-ulp
// level across [1e-6, 700]; results underflow to 0 near x ~ 745.
#pragma once

namespace eqsim {

/// K_0(x), x > 0. Throws std::domain_error for x <= 0.
double bessel_k0(double x);

/// K_1(x), x > 0. Throws std::domain_error for x <= 0.
double bessel_k1(double x);

/// e^x K_0(x) — usable far beyond the unscaled underflow point.
double bessel_k0_scaled(double x);

/// e^x K_1(x).
double bessel_k1_scaled(double x);

/// Dispatch on order in {0, 1}; other orders throw std::invalid_argument.
double bessel_k(int order, double x);

}  // namespace eqsim
