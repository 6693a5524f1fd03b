// SPDX-License-Identifier: Apache-2.0
#include "snoma/capacity.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "snoma/errors.hpp"

namespace snoma {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void require_positive_argument(double one_plus, const char* what) {
  if (!(one_plus > 0.0) || !std::isfinite(one_plus)) {
    throw DomainError(std::string("log argument of ") + what + " is not positive: " +
                      std::to_string(one_plus));
  }
}

// sqrt(G) - 1 with a = y - (1-sqrt z)^2 and b = y - (1+sqrt z)^2 supplied
// directly, so that callers holding exact rationals avoid the cancellation in b.
double sqrt_g_minus_one(double x, double a, double b, double z) {
  const double rz = std::sqrt(z);
  const double p = x * (1.0 + rz) * (1.0 + rz) + 1.0;
  const double q = x * (1.0 - rz) * (1.0 - rz) + 1.0;
  const double sa = std::sqrt(a);
  const double sb = std::sqrt(b);
  const double sp_minus_one = x * (1.0 + rz) * (1.0 + rz) / (std::sqrt(p) + 1.0);
  const double sq_minus_one = x * (1.0 - rz) * (1.0 - rz) / (std::sqrt(q) + 1.0);
  const double denominator = 4.0 * rz / (sa + sb);  // sqrt(a) - sqrt(b)
  return (sa * sp_minus_one - sb * sq_minus_one) / denominator;
}

}  // namespace

double kernel_F(double x, double z) {
  if (!(x >= 0.0) || !(z >= 0.0) || !std::isfinite(x) || !std::isfinite(z)) {
    throw DomainError("kernel_F requires finite x >= 0 and z >= 0");
  }
  const double rz = std::sqrt(z);
  const double p = x * (1.0 + rz) * (1.0 + rz) + 1.0;
  const double q = x * (1.0 - rz) * (1.0 - rz) + 1.0;
  // difference of radicals in conjugate form: (p - q) / (sqrt p + sqrt q)
  const double diff = 4.0 * x * rz / (std::sqrt(p) + std::sqrt(q));
  return diff * diff;
}

double kernel_G(double x, double y, double z) {
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("kernel_G requires z > 0");
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("kernel_G requires x >= 0");
  const double rz = std::sqrt(z);
  const double edge = (1.0 + rz) * (1.0 + rz);
  if (!(y >= edge)) {
    throw DomainError("kernel_G requires y >= (1+sqrt z)^2 (y=" + std::to_string(y) +
                      ", bound=" + std::to_string(edge) + ")");
  }
  const double a = y - (1.0 - rz) * (1.0 - rz);
  const double b = y - edge;
  const double g = 1.0 + sqrt_g_minus_one(x, a, b, z);
  return g * g;
}

CapacityResult capacity_optimum(const SystemConfig& config) {
  const double snr = config.snr();
  if (snr == 0.0) return {config, Receiver::optimum, 0.0, Route::closed_form};

  const DerivedParams p = derive_params(config);
  const double d = p.d;
  const double beta_d = p.beta_d;
  const double beta = p.beta.value();
  const double alpha = p.alpha.value();
  const double gamma = p.gamma.value();
  const double beta_tilde = p.beta_tilde.value();

  const double x = gamma * snr;
  const double f4 = kernel_F(x, beta_tilde) / 4.0;

  const double u1 = (gamma + alpha) * snr - f4;
  const double u2 = alpha * snr - f4;
  require_positive_argument(1.0 + u1, "the first term");
  require_positive_argument(1.0 + u2, "the second term");

  double total = 0.5 * (beta * (d - 1.0) + 1.0) * std::log1p(u1) + (beta - 1.0) * std::log1p(u2);

  // (beta(d-1) - 1)/2 vanishes exactly when beta_d (d-1) == d, i.e. d = beta_d = 2.
  const bool third_term_vanishes =
      static_cast<std::int64_t>(p.beta_d) * (p.d - 1) == static_cast<std::int64_t>(p.d);
  if (!third_term_vanishes) {
    // y - (1 -+ sqrt z)^2 at y = zeta, z = beta_tilde, from the integer form
    // zeta - 1 - beta_tilde = (x' + 1)/(beta_d - 1), x' = (d-1)(beta_d-1).
    const double xi = (d - 1.0) * (beta_d - 1.0);
    const double two_root = 2.0 * std::sqrt(beta_tilde);
    const double center = (xi + 1.0) / (beta_d - 1.0);
    const double a = center + two_root;
    const double sqrt_xi = std::sqrt(xi);
    const double root_gap = (xi - 1.0) / (sqrt_xi + 1.0);
    const double b = root_gap * root_gap / (beta_d - 1.0);
    const double g1 = sqrt_g_minus_one(x, a, b, beta_tilde);
    require_positive_argument(1.0 + g1, "G");
    const double coefficient = 0.5 * (beta * (d - 1.0) - 1.0);
    total -= coefficient * 2.0 * (std::log1p(beta_d * snr) - std::log1p(g1));
  }

  const double value = total / kLn2;
  if (!std::isfinite(value)) throw NumericalError("capacity_optimum produced a non-finite value");
  return {config, Receiver::optimum, value, Route::closed_form};
}

CapacityResult capacity_integral_oracle(const SystemConfig& config) {
  const double snr = config.snr();
  if (snr == 0.0) return {config, Receiver::optimum, 0.0, Route::integral_oracle};
  const SpectralDensity density(config);
  const double value = integrate_against_density(
      density, [snr](double lambda) { return std::log1p(snr * lambda) / kLn2; });
  return {config, Receiver::optimum, value, Route::integral_oracle};
}

CapacityResult capacity_lmmse(const SystemConfig& config) {
  const double snr = config.snr();
  if (snr == 0.0) return {config, Receiver::lmmse, 0.0, Route::closed_form};

  const DerivedParams p = derive_params(config);
  const double d = p.d;
  const double beta = p.beta.value();
  const double gamma = p.gamma.value();
  const double f = kernel_F(gamma * snr, p.beta_tilde.value());
  const double v = d * (gamma * snr - f / 4.0);
  require_positive_argument(1.0 + v, "the LMMSE denominator");
  const double value = beta * (std::log1p(p.beta_d * snr) - std::log1p(v)) / kLn2;
  if (!std::isfinite(value)) throw NumericalError("capacity_lmmse produced a non-finite value");
  return {config, Receiver::lmmse, value, Route::closed_form};
}

MmseError lmmse_error(const SystemConfig& config) {
  const double snr = config.snr();
  if (snr == 0.0) return {1.0, 0.0};

  const DerivedParams p = derive_params(config);
  const double beta = p.beta.value();
  // R = (1/d) A^H A shares the spectrum of (1/d) A A^H up to |K-N| zeros:
  // m_R(z) = m(z)/beta - (1 - 1/beta)/z.
  const StieltjesValue s = stieltjes(p, {-1.0 / snr, 0.0});
  const double m1 = s.m_outer.real() / (beta * snr) + (1.0 - 1.0 / beta);
  if (!(m1 > 0.0 && m1 <= 1.0 + 1e-12)) {
    throw NumericalError("lmmse_error: M1 = " + std::to_string(m1) + " outside (0, 1]");
  }
  return {m1, 1.0 / m1 - 1.0};
}

}  // namespace snoma
