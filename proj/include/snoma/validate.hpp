// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace snoma {

/// Deliberate defects for exercising the harness itself.
enum class Fault {
  none,
  wrong_branch,   // take the non-physical root of the Stieltjes quadratic
  oracle_offset,  // perturb the closed-form capacity by 1e-6 bits
};

std::optional<Fault> fault_from_string(std::string_view name);

struct ValidationOptions {
  bool quick = false;
  Fault fault = Fault::none;
  std::uint64_t seed = 0;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the invariant suite over the (d, beta_d) in {2..6} x {2..12} grid.
/// The quick subset swaps the acceptance-size Monte Carlo cells for
/// smaller ones.
std::vector<CheckResult> run_validation(const ValidationOptions& options);

}  // namespace snoma
