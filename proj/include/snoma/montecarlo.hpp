// SPDX-License-Identifier: Apache-2.0
//
// Finite-N validation harness. Signature matrices are sampled from the
// configuration model on K*d user stubs and N*beta_d resource stubs,
// repaired into a simple graph by random stub swaps. This is close to, but
// not exactly, the uniform law on simple semiregular bipartite graphs.
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "snoma/spectral.hpp"

namespace snoma {

enum class PhaseScheme { uniform, binary, repetition };

std::string_view to_string(PhaseScheme scheme);

/// N x K sparse matrix stored by column: column k owns entries
/// [k*d, (k+1)*d) of the row-index and weight arrays, rows ascending.
class SignatureMatrix {
 public:
  SignatureMatrix(int rows, int cols, int column_degree, PhaseScheme phase,
                  std::vector<int> row_index, std::vector<std::complex<double>> weights);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int column_degree() const { return column_degree_; }
  int row_degree() const { return static_cast<int>(
      static_cast<std::int64_t>(cols_) * column_degree_ / rows_); }
  PhaseScheme phase_scheme() const { return phase_; }

  std::span<const int> column_rows(int k) const;
  std::span<const std::complex<double>> column_weights(int k) const;

  /// Throws ConfigError unless every column has d distinct rows, every row
  /// has beta_d entries and every weight has unit modulus.
  void check_invariants() const;

  Eigen::MatrixXcd to_dense() const;

 private:
  int rows_;
  int cols_;
  int column_degree_;
  PhaseScheme phase_;
  std::vector<int> row_index_;
  std::vector<std::complex<double>> weights_;
};

/// Seed of the `index`-th independent substream of `master`.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index);

SignatureMatrix generate_signature(int n, int d, int beta_d, PhaseScheme phase,
                                   std::uint64_t seed);

/// (1/d) A A^H (N x N) for `resources`, (1/d) A^H A (K x K) for `users`.
enum class GramSide { resources, users };
Eigen::MatrixXcd gram_matrix(const SignatureMatrix& a, GramSide side);

struct EmpiricalSpectrum {
  std::vector<double> eigenvalues;  // of (1/d) A A^H, ascending, length N
  double beta = 0.0;
  double upper_bound = 0.0;  // beta_d

  double mean() const;
  double second_moment() const;
  std::vector<std::size_t> histogram(int bins) const;  // over [0, beta_d]
};

EmpiricalSpectrum empirical_spectrum(const SignatureMatrix& a);

/// First two spectral moments of (1/d) A A^H from traces, without an
/// eigendecomposition.
struct TraceMoments {
  double mean = 0.0;
  double second = 0.0;
};
TraceMoments trace_moments(const SignatureMatrix& a);

struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
};

McEstimate empirical_capacity_opt(int n, const SystemConfig& config, int trials,
                                  std::uint64_t seed, PhaseScheme phase = PhaseScheme::uniform);

McEstimate empirical_capacity_lmmse(int n, const SystemConfig& config, int trials,
                                    std::uint64_t seed, PhaseScheme phase = PhaseScheme::uniform);

/// Diagonal of (I_K + snr (1/d) A^H A)^-1 from a Cholesky factor of the
/// smaller Gram side; no explicit inverse is formed.
std::vector<double> lmmse_diagonal(const SignatureMatrix& a, double snr);

/// Sup distance between the empirical CDF and the limiting CDF.
double ks_distance(const EmpiricalSpectrum& spectrum, const SpectralDensity& density);
double ks_distance(std::span<const double> sorted_samples, const SpectralDensity& density);

}  // namespace snoma
