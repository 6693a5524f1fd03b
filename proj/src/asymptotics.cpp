// SPDX-License-Identifier: Apache-2.0
#include "snoma/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "snoma/errors.hpp"

namespace snoma {

namespace {

enum class LoadRegime { under, critical, over };

LoadRegime regime_of(int d, int beta_d) {
  if (beta_d < d) return LoadRegime::under;
  return beta_d == d ? LoadRegime::critical : LoadRegime::over;
}

double to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace

LowSnrParams low_snr_optimum(int d, int beta_d) {
  const SystemConfig config(d, beta_d);
  const double beta = config.beta();
  return {std::numbers::ln2, 2.0 * beta_d / (d * (beta + 1.0) - 1.0)};
}

HighSnrParams high_snr_optimum(int d, int beta_d) {
  const SystemConfig config(d, beta_d);
  const double beta = config.beta();
  const double dd = d;
  switch (regime_of(d, beta_d)) {
    case LoadRegime::under:
      return {beta, (1.0 / beta - 1.0) * std::log2(1.0 - beta) -
                        (dd - 1.0) * std::log2(1.0 - 1.0 / dd)};
    case LoadRegime::critical:
      return {1.0, -(dd - 1.0) * std::log2(1.0 - 1.0 / dd)};
    case LoadRegime::over:
      break;
  }
  const double bd = beta_d;
  return {1.0, (beta - 1.0) * std::log2(beta - 1.0) - beta * std::log2(beta) -
                   (bd - 1.0) * std::log2(1.0 - 1.0 / bd)};
}

LowSnrParams low_snr_lmmse(int d, int beta_d) {
  const SystemConfig config(d, beta_d);
  const double beta = config.beta();
  return {std::numbers::ln2, 2.0 * beta_d / ((2.0 * beta + 1.0) * d - 2.0)};
}

HighSnrParams high_snr_lmmse(int d, int beta_d) {
  const SystemConfig config(d, beta_d);
  const double beta = config.beta();
  const double dd = d;
  switch (regime_of(d, beta_d)) {
    case LoadRegime::under:
      return {beta, std::log2(1.0 / (1.0 - beta)) + std::log2((dd - 1.0) / dd)};
    case LoadRegime::critical:
      return {0.5, std::log2((dd - 1.0) / dd)};
    case LoadRegime::over:
      break;
  }
  return {0.0, std::nullopt};
}

LowSnrParams low_snr(Receiver receiver, int d, int beta_d) {
  return receiver == Receiver::optimum ? low_snr_optimum(d, beta_d) : low_snr_lmmse(d, beta_d);
}

HighSnrParams high_snr(Receiver receiver, int d, int beta_d) {
  return receiver == Receiver::optimum ? high_snr_optimum(d, beta_d)
                                       : high_snr_lmmse(d, beta_d);
}

double approx_rate(const LowSnrParams& params, double ebn0) {
  if (!(ebn0 > 0.0)) throw DomainError("approx_rate: Eb/N0 must be positive");
  return params.s0 / kThreeDb * (to_db(ebn0) - to_db(params.ebn0_min));
}

double approx_rate(const HighSnrParams& params, double snr) {
  if (!(snr > 0.0)) throw DomainError("approx_rate: snr must be positive");
  if (!params.l_inf) throw DomainError("approx_rate: power offset undefined for zero slope");
  return params.s_inf * (std::log2(snr) - *params.l_inf);
}

}  // namespace snoma
