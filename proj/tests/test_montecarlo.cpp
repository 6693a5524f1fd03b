// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "snoma/capacity.hpp"
#include "snoma/errors.hpp"
#include "snoma/montecarlo.hpp"

using namespace snoma;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Connected components of the resource side, following shared users.
std::vector<std::vector<int>> resource_components(const SignatureMatrix& a) {
  std::vector<int> parent(a.rows());
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int k = 0; k < a.cols(); ++k) {
    const auto rows = a.column_rows(k);
    for (std::size_t j = 1; j < rows.size(); ++j) parent[find(rows[j])] = find(rows[0]);
  }
  std::vector<std::vector<int>> groups(a.rows());
  for (int n = 0; n < a.rows(); ++n) groups[find(n)].push_back(n);
  std::erase_if(groups, [](const auto& g) { return g.empty(); });
  return groups;
}

}  // namespace

TEST_CASE("degrees of a small overloaded ensemble") {
  const SignatureMatrix a = generate_signature(3, 2, 4, PhaseScheme::uniform, 1);
  CHECK(a.rows() == 3);
  CHECK(a.cols() == 6);
  CHECK(a.row_degree() == 4);
  CHECK_NOTHROW(a.check_invariants());
  const Eigen::MatrixXcd dense = a.to_dense();
  for (int n = 0; n < 3; ++n) CHECK((dense.row(n).array().abs() > 0.5).count() == 4);
  for (int k = 0; k < 6; ++k) CHECK((dense.col(k).array().abs() > 0.5).count() == 2);
}

TEST_CASE("generation is deterministic in the seed") {
  const auto a = generate_signature(60, 3, 6, PhaseScheme::uniform, 42).to_dense();
  const auto b = generate_signature(60, 3, 6, PhaseScheme::uniform, 42).to_dense();
  const auto c = generate_signature(60, 3, 6, PhaseScheme::uniform, 43).to_dense();
  CHECK(a == b);
  CHECK(a != c);
  CHECK(substream_seed(5, 0) != substream_seed(5, 1));
  CHECK(substream_seed(5, 1) != substream_seed(6, 1));
}

TEST_CASE("infeasible ensembles are rejected") {
  CHECK_THROWS_AS(generate_signature(5, 2, 3, PhaseScheme::uniform, 0), ConfigError);
  CHECK_THROWS_AS(generate_signature(1, 2, 2, PhaseScheme::uniform, 0), ConfigError);
  CHECK_THROWS_AS(generate_signature(0, 2, 2, PhaseScheme::uniform, 0), ConfigError);
  CHECK_THROWS_AS(generate_signature(4, 5, 5, PhaseScheme::uniform, 0), ConfigError);
  CHECK_NOTHROW(generate_signature(2, 2, 4, PhaseScheme::uniform, 0));  // K_{2,4}
}

TEST_CASE("every generated matrix has exact degrees and unit weights") {
  for (PhaseScheme phase : {PhaseScheme::uniform, PhaseScheme::binary, PhaseScheme::repetition}) {
    for (auto [n, d, bd] : {std::tuple{12, 2, 2}, {30, 3, 2}, {40, 3, 6}, {500, 5, 11},
                            {7, 7, 7}, {4, 3, 6}}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const SignatureMatrix a = generate_signature(n, d, bd, phase, seed);
        CHECK_NOTHROW(a.check_invariants());
        double worst = 0.0;
        for (int k = 0; k < a.cols(); ++k) {
          for (auto w : a.column_weights(k)) worst = std::max(worst, std::abs(std::abs(w) - 1.0));
          if (phase == PhaseScheme::binary) {
            for (auto w : a.column_weights(k)) CHECK((w == 1.0 || w == -1.0));
          }
          if (phase == PhaseScheme::repetition) {
            for (auto w : a.column_weights(k)) CHECK(w == 1.0);
          }
        }
        CHECK(worst < 1e-15);
      }
    }
  }
}

TEST_CASE("2-regular graphs split into cycles with eigenvalues 1 + cos(2 pi j / L)") {
  for (int n = 2; n <= 12; ++n) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const SignatureMatrix a = generate_signature(n, 2, 2, PhaseScheme::repetition, seed);
      std::vector<double> expected;
      for (const auto& cycle : resource_components(a)) {
        const int length = static_cast<int>(cycle.size());
        for (int j = 0; j < length; ++j) {
          expected.push_back(1.0 + std::cos(2.0 * std::numbers::pi * j / length));
        }
      }
      std::sort(expected.begin(), expected.end());
      const EmpiricalSpectrum spectrum = empirical_spectrum(a);
      REQUIRE(spectrum.eigenvalues.size() == expected.size());
      for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(spectrum.eigenvalues[i] == doctest::Approx(expected[i]).epsilon(1e-12));
      }
    }
  }
  // random phases keep every eigenvalue in [0, 2]
  const EmpiricalSpectrum s =
      empirical_spectrum(generate_signature(12, 2, 2, PhaseScheme::uniform, 3));
  for (double x : s.eigenvalues) {
    CHECK(x >= 0.0);
    CHECK(x <= 2.0);
  }
}

TEST_CASE("both Gram sides give the same nonzero spectrum") {
  const SignatureMatrix a = generate_signature(20, 2, 3, PhaseScheme::uniform, 9);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> rs(gram_matrix(a, GramSide::resources));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> us(gram_matrix(a, GramSide::users));
  const Eigen::VectorXd r = rs.eigenvalues();
  const Eigen::VectorXd u = us.eigenvalues();
  REQUIRE(u.size() == 30);
  for (int i = 0; i < 20; ++i) CHECK(r[i] == doctest::Approx(u[i + 10]).epsilon(1e-10));
  for (int i = 0; i < 10; ++i) CHECK(std::abs(u[i]) < 1e-10);
}

TEST_CASE("trace identities") {
  for (auto [n, d, bd] : {std::tuple{300, 3, 2}, {200, 3, 6}, {150, 2, 2}}) {
    const SignatureMatrix a = generate_signature(n, d, bd, PhaseScheme::uniform, 11);
    const EmpiricalSpectrum s = empirical_spectrum(a);
    const TraceMoments t = trace_moments(a);
    const double beta = static_cast<double>(bd) / d;
    CHECK(s.mean() == doctest::Approx(beta).epsilon(1e-12));
    CHECK(t.mean == doctest::Approx(beta).epsilon(1e-14));
    CHECK(t.second == doctest::Approx(s.second_moment()).epsilon(1e-10));
    CHECK(s.eigenvalues.size() == static_cast<std::size_t>(n));
    CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
    CHECK(s.eigenvalues.front() >= 0.0);
    CHECK(s.eigenvalues.back() <= bd);
    const auto hist = s.histogram(20);
    CHECK(std::accumulate(hist.begin(), hist.end(), std::size_t{0}) ==
          static_cast<std::size_t>(n));
  }
}

TEST_CASE("second moment at N=2000") {
  for (auto [n, d, bd] : {std::tuple{2000, 2, 2}, {2000, 3, 6}, {2001, 3, 2}}) {
    const TraceMoments t = trace_moments(generate_signature(n, d, bd, PhaseScheme::uniform, 0));
    const double beta = static_cast<double>(bd) / d;
    const double alpha = (d - 1.0) / d;
    CHECK(t.second == doctest::Approx(beta * beta + beta * alpha).epsilon(1e-2));
  }
}

TEST_CASE("capacity estimates at zero snr") {
  const McEstimate e = empirical_capacity_opt(60, SystemConfig(3, 6, 0.0), 4, 1);
  CHECK(e.mean == 0.0);
  CHECK(e.standard_error == 0.0);
  CHECK(e.trials == 4);
  CHECK_THROWS_AS(empirical_capacity_lmmse(60, SystemConfig(3, 6, 0.0), 4, 1), DomainError);
  CHECK_THROWS_AS(empirical_capacity_opt(60, SystemConfig(3, 6, 1.0), 0, 1), ConfigError);
}

TEST_CASE("estimates are reproducible and obey the Hadamard bound") {
  const SystemConfig c(3, 6, 10.0);
  const McEstimate a = empirical_capacity_opt(120, c, 6, 77);
  const McEstimate b = empirical_capacity_opt(120, c, 6, 77);
  CHECK(a.mean == b.mean);
  CHECK(a.standard_error == b.standard_error);
  CHECK(a.mean <= std::log2(1.0 + c.beta() * c.snr()));
  const McEstimate single = empirical_capacity_opt(120, c, 1, 3);
  CHECK(single.mean <= std::log2(1.0 + c.beta() * c.snr()));
}

TEST_CASE("LMMSE diagonal against a dense inverse") {
  for (auto [n, d, bd] : {std::tuple{12, 3, 2}, {10, 2, 4}, {9, 3, 3}}) {
    const SignatureMatrix a = generate_signature(n, d, bd, PhaseScheme::uniform, 5);
    const double snr = 3.0;
    const Eigen::MatrixXcd r = gram_matrix(a, GramSide::users);
    const Eigen::MatrixXcd m =
        (Eigen::MatrixXcd::Identity(a.cols(), a.cols()) + snr * r).inverse();
    const auto diag = lmmse_diagonal(a, snr);
    REQUIRE(diag.size() == static_cast<std::size_t>(a.cols()));
    for (int k = 0; k < a.cols(); ++k) {
      CHECK(diag[k] == doctest::Approx(m(k, k).real()).epsilon(1e-12));
      CHECK(diag[k] > 0.0);
      CHECK(diag[k] <= 1.0);
    }
  }
  CHECK_THROWS_AS(lmmse_diagonal(generate_signature(4, 2, 2, PhaseScheme::uniform, 0), 0.0),
                  DomainError);
}

TEST_CASE("per-user SINR at the arcsine point") {
  const SignatureMatrix a = generate_signature(2000, 2, 2, PhaseScheme::uniform, 1);
  const auto diag = lmmse_diagonal(a, 10.0);
  double sinr = 0.0;
  for (double m : diag) sinr += 1.0 / m - 1.0;
  sinr /= static_cast<double>(diag.size());
  CHECK(sinr == doctest::Approx(std::sqrt(21.0) - 1.0).epsilon(1e-2));
}

TEST_CASE("Monte Carlo capacity at the arcsine point") {
  const SystemConfig c(2, 2, 10.0);
  const double opt = capacity_optimum(c).spectral_efficiency;
  const double mmse = capacity_lmmse(c).spectral_efficiency;
  const McEstimate e_opt = empirical_capacity_opt(600, c, 12, 0);
  const McEstimate e_mmse = empirical_capacity_lmmse(600, c, 12, 0);
  CHECK(std::abs(e_opt.mean - opt) < std::max(3.0 * e_opt.standard_error, 0.01 * opt));
  CHECK(std::abs(e_mmse.mean - mmse) < std::max(3.0 * e_mmse.standard_error, 0.01 * mmse));
}

TEST_CASE("phase schemes share the limit") {
  // Random phases (uniform, binary) agree at finite N. All-ones weights keep
  // a finite-N bias from short cycles that shrinks as N grows.
  const SystemConfig c(3, 6, 10.0);
  const double limit = capacity_optimum(c).spectral_efficiency;
  const McEstimate uniform = empirical_capacity_opt(400, c, 16, 21, PhaseScheme::uniform);
  const McEstimate binary = empirical_capacity_opt(400, c, 16, 21, PhaseScheme::binary);
  CHECK(std::abs(uniform.mean - binary.mean) <
        3.0 * std::hypot(uniform.standard_error, binary.standard_error));

  double previous_gap = INFINITY;
  for (int n : {200, 800}) {
    const McEstimate u = empirical_capacity_opt(n, c, 16, 21, PhaseScheme::uniform);
    const McEstimate r = empirical_capacity_opt(n, c, 16, 21, PhaseScheme::repetition);
    const double gap = std::abs(u.mean - r.mean);
    MESSAGE("N=" << n << " repetition gap " << gap);
    CHECK(gap < previous_gap);
    CHECK(std::abs(r.mean - limit) < 0.01 * limit);
    previous_gap = gap;
  }
}

TEST_CASE("KS distance of samples drawn from the limit itself") {
  const SpectralDensity density(derive_params(3, 2));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n : {400, 4000}) {
    std::vector<double> samples;
    for (int i = 0; i < n; ++i) {
      const double target = u(rng);
      if (target <= density.point_mass_at_zero()) {
        samples.push_back(0.0);
        continue;
      }
      double lo = density.lambda_minus();
      double hi = density.lambda_plus();
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (density.cdf(mid) < target ? lo : hi) = mid;
      }
      samples.push_back(0.5 * (lo + hi));
    }
    std::sort(samples.begin(), samples.end());
    CHECK(ks_distance(samples, density) < 2.0 / std::sqrt(n));
  }
}

TEST_CASE("KS distance separates mismatched laws") {
  const EmpiricalSpectrum s =
      empirical_spectrum(generate_signature(600, 2, 2, PhaseScheme::uniform, 2));
  CHECK(ks_distance(s, SpectralDensity(derive_params(10, 10))) > 0.1);
  CHECK(ks_distance(s, SpectralDensity(derive_params(2, 2))) < 0.03);
  CHECK_THROWS_AS(ks_distance(std::span<const double>{}, SpectralDensity(derive_params(2, 2))),
                  ConfigError);
}

TEST_CASE("KS distance at N=2000 for d=3, beta_d=6") {
  const EmpiricalSpectrum s =
      empirical_spectrum(generate_signature(2000, 3, 6, PhaseScheme::uniform, 0));
  CHECK(ks_distance(s, SpectralDensity(derive_params(3, 6))) < 0.02);
}

TEST_CASE("KS distance does not grow with N") {
  // medians over 10 seeds; a 20% allowance covers seed noise
  const SpectralDensity density(derive_params(3, 6));
  double previous = 1.0;
  for (int n : {250, 500, 1000, 2000}) {
    std::vector<double> ks;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      ks.push_back(ks_distance(
          empirical_spectrum(generate_signature(n, 3, 6, PhaseScheme::uniform, seed)), density));
    }
    const double m = median(ks);
    MESSAGE("N=" << n << " median KS " << m);
    CHECK(m <= previous * 1.2);
    previous = m;
  }
}
