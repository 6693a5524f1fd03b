// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "snoma/spectral.hpp"

namespace snoma {

enum class Receiver { optimum, lmmse };
enum class Route { closed_form, integral_oracle };

struct CapacityResult {
  SystemConfig config;
  Receiver receiver;
  double spectral_efficiency;  // bits/s/Hz per dimension
  Route route;
};

struct MmseError {
  double m1 = 1.0;    // limiting diagonal entry of (I + snr R)^-1
  double sinr = 0.0;  // 1/m1 - 1
};

/// F(x, z) = (sqrt(x(1+sqrt z)^2 + 1) - sqrt(x(1-sqrt z)^2 + 1))^2, x, z >= 0.
double kernel_F(double x, double z);

/// The squared-ratio kernel G(x, y, z); requires z > 0 and y >= (1+sqrt z)^2.
double kernel_G(double x, double y, double z);

CapacityResult capacity_optimum(const SystemConfig& config);
CapacityResult capacity_integral_oracle(const SystemConfig& config);
CapacityResult capacity_lmmse(const SystemConfig& config);

MmseError lmmse_error(const SystemConfig& config);

}  // namespace snoma
