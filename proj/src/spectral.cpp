// SPDX-License-Identifier: Apache-2.0
#include "snoma/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "snoma/errors.hpp"
#include "quadrature.hpp"

namespace snoma {

Ratio Ratio::of(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("Ratio with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  return g > 1 ? Ratio{num / g, den / g} : Ratio{num, den};
}

SystemConfig::SystemConfig(int d, int beta_d, double snr) : d_(d), beta_d_(beta_d), snr_(snr) {
  if (d < 2) throw ConfigError("column degree d must be >= 2 (got " + std::to_string(d) + ")");
  if (beta_d < 2) {
    throw ConfigError("row degree beta_d must be >= 2 (got " + std::to_string(beta_d) + ")");
  }
  if (d > kMaxDegree || beta_d > kMaxDegree) {
    throw ConfigError("degrees must not exceed " + std::to_string(kMaxDegree));
  }
  if (!(snr >= 0.0) || !std::isfinite(snr)) {
    throw ConfigError("snr must be finite and >= 0 (got " + std::to_string(snr) + ")");
  }
}

DerivedParams derive_params(int d, int beta_d) {
  const SystemConfig admissible(d, beta_d);
  (void)admissible;

  DerivedParams p;
  p.d = d;
  p.beta_d = beta_d;
  p.beta = Ratio::of(beta_d, d);
  p.alpha = Ratio::of(d - 1, d);
  p.gamma = Ratio::of(beta_d - 1, d);
  p.beta_tilde = Ratio::of(d - 1, beta_d - 1);
  p.zeta = Ratio::of(static_cast<std::int64_t>(beta_d) * d, beta_d - 1);

  // zeta - (1 + sqrt(beta_tilde))^2 = (sqrt(x) - 1)^2 / (beta_d - 1) with
  // x = (d-1)(beta_d-1), so the domain of G holds iff (x+1)^2 >= 4x.
  const std::int64_t x = static_cast<std::int64_t>(d - 1) * (beta_d - 1);
  __extension__ typedef __int128 wide;
  const wide lhs = static_cast<wide>(x + 1) * (x + 1);
  const wide rhs = static_cast<wide>(4) * x;
  if (lhs < rhs) {
    throw ConfigError("zeta >= (1 + sqrt(beta_tilde))^2 violated for d=" + std::to_string(d) +
                      ", beta_d=" + std::to_string(beta_d));
  }

  // lambda+- = (sqrt(d-1) +- sqrt(beta_d-1))^2 / d, lower edge via the
  // conjugate form so that it is exactly zero when d == beta_d.
  const double dd = d;
  const double root_sum = std::sqrt(dd - 1.0) + std::sqrt(static_cast<double>(beta_d) - 1.0);
  const double degree_diff = static_cast<double>(d - beta_d);
  const double xd = static_cast<double>(x);
  const double sqrt_x = std::sqrt(xd);
  p.lambda_plus = root_sum * root_sum / dd;
  p.lambda_minus = degree_diff * degree_diff / (dd * root_sum * root_sum);
  p.support_width = 4.0 * sqrt_x / dd;
  const double gap_root = (xd - 1.0) / (sqrt_x + 1.0);  // sqrt(x) - 1
  p.upper_gap = gap_root * gap_root / dd;

  if (!(p.alpha.value() > 0.0 && p.alpha.value() < 1.0 && p.gamma.value() > 0.0 &&
        p.lambda_minus < p.lambda_plus && p.upper_gap >= 0.0)) {
    throw NumericalError("derived parameters violate 0<alpha<1, gamma>0, l- < l+ <= beta_d");
  }
  return p;
}

namespace {

bool on_support(const DerivedParams& p, std::complex<double> z) {
  if (z.imag() != 0.0) return false;
  const double x = z.real();
  const bool atom_at_zero = p.beta.num < p.beta.den;
  if (x == 0.0 && (atom_at_zero || p.lambda_minus == 0.0)) return true;
  return x >= p.lambda_minus && x <= p.lambda_plus;
}

}  // namespace

StieltjesValue stieltjes(const DerivedParams& p, std::complex<double> z, Branch branch) {
  using cd = std::complex<double>;
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError("stieltjes: non-finite evaluation point");
  }
  if (on_support(p, z)) {
    throw DomainError("stieltjes: z = " + std::to_string(z.real()) +
                      " lies on the support of the limiting law");
  }
  const double alpha = p.alpha.value();
  const double gamma = p.gamma.value();
  const double beta = p.beta.value();

  // alpha z m^2 + (z - gamma + alpha) m + 1 = 0. The discriminant factors as
  // (z - l-)(z - l+); the product of principal roots has its cut exactly on
  // [l-, l+] and behaves like z at infinity, which selects the root in the
  // upper half plane for Im z > 0 and the m ~ -1/z root on the real axis.
  const cd a = alpha * z;
  const cd b = z - gamma + alpha;
  cd s = std::sqrt(z - p.lambda_minus) * std::sqrt(z - p.lambda_plus);
  if (branch == Branch::reflected) s = -s;

  const cd plus = -b + s;
  const cd minus = -b - s;
  cd m;
  if (std::abs(minus) >= std::abs(plus)) {
    m = 2.0 / minus;
  } else {
    m = plus / (2.0 * a);
  }

  const double scale = std::abs(a) * std::norm(m) + std::abs(b) * std::abs(m) + 1.0;
  const double residual = std::abs(a * m * m + b * m + 1.0) / scale;
  if (!(residual < kFixedPointTolerance)) {
    throw DomainError("stieltjes: fixed-point residual " + std::to_string(residual) +
                      " above tolerance at z = (" + std::to_string(z.real()) + ", " +
                      std::to_string(z.imag()) + ")");
  }

  const cd inner_denominator = 1.0 + alpha * m;
  const cd outer_denominator = z - beta / inner_denominator;
  if (inner_denominator == 0.0 || outer_denominator == 0.0) {
    throw DomainError("stieltjes: pole of the outer transform");
  }
  return {z, m, -1.0 / outer_denominator, residual};
}

SpectralDensity::SpectralDensity(const DerivedParams& params)
    : params_(params), point_mass_(0.0) {
  const Ratio& b = params_.beta;
  if (b.num < b.den) point_mass_ = static_cast<double>(b.den - b.num) / static_cast<double>(b.den);
}

DensitySample SpectralDensity::at(double lambda) const {
  const auto& p = params_;
  const double edge_tol = 4.0 * std::numeric_limits<double>::epsilon();
  const auto near = [&](double edge) {
    return std::abs(lambda - edge) <= edge_tol * std::max(1.0, edge);
  };
  const double inf = std::numeric_limits<double>::infinity();
  if (near(p.lambda_minus)) return {p.lambda_minus == 0.0 ? inf : 0.0, true};
  if (near(p.lambda_plus)) return {p.upper_gap == 0.0 ? inf : 0.0, true};
  if (lambda <= p.lambda_minus || lambda >= p.lambda_plus) return {0.0, false};

  const double bd = p.beta_d;
  const double root = std::sqrt((lambda - p.lambda_minus) * (p.lambda_plus - lambda));
  return {bd / (2.0 * std::numbers::pi) * root / (lambda * (bd - lambda)), false};
}

double SpectralDensity::lambda_of_theta(double theta) const {
  const double s = std::sin(theta);
  return params_.lambda_minus + params_.support_width * s * s;
}

double SpectralDensity::theta_weight(double theta) const {
  // rho_c(lambda) dlambda/dtheta = (beta_d W^2 / pi) * (s^2/lambda) * (c^2/(beta_d - lambda))
  const auto& p = params_;
  const double w = p.support_width;
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const double s2 = s * s;
  const double c2 = c * c;
  const double lower = p.lambda_minus == 0.0 ? 1.0 / w : s2 / (p.lambda_minus + w * s2);
  const double upper = p.upper_gap == 0.0 ? 1.0 / w : c2 / (p.upper_gap + w * c2);
  return p.beta_d * w * w / std::numbers::pi * lower * upper;
}

double SpectralDensity::cdf(double x) const {
  if (x < 0.0) return 0.0;
  const auto& p = params_;
  if (x <= p.lambda_minus) return point_mass_;
  if (x >= p.lambda_plus) return 1.0;
  const double u = std::clamp((x - p.lambda_minus) / p.support_width, 0.0, 1.0);
  const double theta_x = std::asin(std::sqrt(u));
  const double continuous =
      detail::gauss_legendre_integrate([this](double t) { return theta_weight(t); }, 0.0, theta_x);
  return std::min(1.0, point_mass_ + continuous);
}

double integrate_against_density(const SpectralDensity& density,
                                 const std::function<double(double)>& f) {
  double total_atom = 0.0;
  if (density.point_mass_at_zero() > 0.0) {
    const double f0 = f(0.0);
    if (!std::isfinite(f0)) throw NumericalError("integrand is not finite at lambda = 0");
    total_atom = density.point_mass_at_zero() * f0;
  }

  const double half_pi = std::numbers::pi / 2.0;
  const auto midpoint = [&](int n) {
    const double h = half_pi / n;
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double theta = (j + 0.5) * h;
      const double lambda = density.lambda_of_theta(theta);
      const double value = f(lambda);
      if (!std::isfinite(value)) {
        throw NumericalError("integrand is not finite at lambda = " + std::to_string(lambda));
      }
      sum += value * density.theta_weight(theta);
    }
    return sum * h;
  };

  constexpr int kMaxNodes = 1 << 22;
  double previous = midpoint(16);
  for (int n = 32; n <= kMaxNodes; n *= 2) {
    const double current = midpoint(n);
    if (std::abs(current - previous) <= 1e-13 * std::max(1.0, std::abs(current))) {
      return total_atom + current;
    }
    previous = current;
  }
  throw NumericalError("density quadrature did not converge within " +
                       std::to_string(kMaxNodes) + " nodes");
}

}  // namespace snoma
