// SPDX-License-Identifier: Apache-2.0
//
// Limiting spectrum of (1/d) A A^H for a random (beta*d, d)-semiregular
// signature matrix A with unit-modulus nonzeros.
//
// With alpha = (d-1)/d and gamma = (beta*d - 1)/d, the Stieltjes transform of
// the limiting eigenvalue law is
//
//   m(z)   = -1 / (z - beta  / (1 + alpha*m_in(z)))
//   m_in(z) = -1 / (z - gamma / (1 + alpha*m_in(z)))
//
// and the law itself is [1-beta]^+ delta(lambda) plus a continuous part
//
//   rho_c(lambda) = (beta*d / 2pi) sqrt((lambda-l-)(l+-lambda)) / (lambda (beta*d - lambda))
//
// supported on [l-, l+] with l+- = (sqrt(alpha) +- sqrt(gamma))^2.
#pragma once

#include <complex>
#include <cstdint>
#include <functional>

namespace snoma {

/// Exact non-negative rational built from the integer degree pair.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Ratio of(std::int64_t num, std::int64_t den);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_zero() const { return num == 0; }

  friend bool operator==(const Ratio&, const Ratio&) = default;
};

/// Ensemble description: column degree d, row degree beta_d and the
/// per-user linear SNR. The load beta = beta_d / d is always derived.
class SystemConfig {
 public:
  static constexpr int kMaxDegree = 1 << 24;

  SystemConfig(int d, int beta_d, double snr = 0.0);

  int d() const { return d_; }
  int beta_d() const { return beta_d_; }
  double snr() const { return snr_; }
  Ratio load() const { return Ratio::of(beta_d_, d_); }
  double beta() const { return load().value(); }

  SystemConfig with_snr(double snr) const { return {d_, beta_d_, snr}; }

 private:
  int d_;
  int beta_d_;
  double snr_;
};

/// Parameters shared by the density, the Stieltjes fixed point and the
/// closed-form capacities. Rational fields are exact.
struct DerivedParams {
  int d = 0;
  int beta_d = 0;
  Ratio beta;
  Ratio alpha;       // (d-1)/d
  Ratio gamma;       // (beta_d-1)/d
  Ratio beta_tilde;  // alpha/gamma
  Ratio zeta;        // beta_d/gamma
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
  // beta_d - lambda_plus, evaluated without cancellation. Zero only for
  // d = beta_d = 2.
  double upper_gap = 0.0;
  // lambda_plus - lambda_minus
  double support_width = 0.0;
};

DerivedParams derive_params(int d, int beta_d);
inline DerivedParams derive_params(const SystemConfig& config) {
  return derive_params(config.d(), config.beta_d());
}

/// Which root of the quadratic for m_in to take. `reflected` is the
/// non-physical root; it exists for fault-injection in the validation suite.
enum class Branch { physical, reflected };

struct StieltjesValue {
  std::complex<double> z;
  std::complex<double> m_inner;
  std::complex<double> m_outer;
  double residual = 0.0;  // relative residual of the quadratic at m_inner
};

inline constexpr double kFixedPointTolerance = 1e-12;

/// Evaluates the limiting Stieltjes transform at z. Throws DomainError when
/// z lies on the support of the limiting law (real z in [l-, l+], or z = 0
/// when the law has an atom there).
StieltjesValue stieltjes(const DerivedParams& params, std::complex<double> z,
                         Branch branch = Branch::physical);

struct DensitySample {
  double value = 0.0;
  // lambda coincided with a support edge; value is the one-sided limit,
  // +infinity at inverse-square-root contact.
  bool at_boundary = false;
};

class SpectralDensity {
 public:
  explicit SpectralDensity(const DerivedParams& params);
  explicit SpectralDensity(const SystemConfig& config) : SpectralDensity(derive_params(config)) {}

  const DerivedParams& params() const { return params_; }
  double point_mass_at_zero() const { return point_mass_; }
  double lambda_minus() const { return params_.lambda_minus; }
  double lambda_plus() const { return params_.lambda_plus; }

  /// Continuous part rho_c(lambda); the atom at zero is not included.
  DensitySample at(double lambda) const;

  /// Limiting CDF, atom included.
  double cdf(double x) const;

  /// Weight of the substituted integrand, lambda = l- + width*sin^2(theta):
  /// rho_c(lambda(theta)) * dlambda/dtheta. Smooth on [0, pi/2].
  double theta_weight(double theta) const;
  double lambda_of_theta(double theta) const;

 private:
  DerivedParams params_;
  double point_mass_;
};

inline DensitySample density_at(const SpectralDensity& density, double lambda) {
  return density.at(lambda);
}

inline constexpr double kQuadratureTarget = 1e-10;

/// point_mass * f(0) + integral of f against rho_c. The endpoint
/// singularities are removed by lambda = l- + width*sin^2(theta) and the
/// theta integral uses a midpoint (Chebyshev-type) rule doubled until two
/// consecutive estimates agree well below the 1e-10 target.
double integrate_against_density(const SpectralDensity& density,
                                 const std::function<double(double)>& f);

}  // namespace snoma
