// SPDX-License-Identifier: Apache-2.0
#include "snoma/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "parallel.hpp"
#include "snoma/errors.hpp"

namespace snoma {

std::string_view to_string(PhaseScheme scheme) {
  switch (scheme) {
    case PhaseScheme::uniform:
      return "uniform";
    case PhaseScheme::binary:
      return "binary";
    case PhaseScheme::repetition:
      return "repetition";
  }
  return "unknown";
}

SignatureMatrix::SignatureMatrix(int rows, int cols, int column_degree, PhaseScheme phase,
                                 std::vector<int> row_index,
                                 std::vector<std::complex<double>> weights)
    : rows_(rows),
      cols_(cols),
      column_degree_(column_degree),
      phase_(phase),
      row_index_(std::move(row_index)),
      weights_(std::move(weights)) {
  const auto nnz = static_cast<std::size_t>(cols_) * static_cast<std::size_t>(column_degree_);
  if (rows_ <= 0 || cols_ <= 0 || column_degree_ <= 0 || row_index_.size() != nnz ||
      weights_.size() != nnz) {
    throw ConfigError("SignatureMatrix: inconsistent dimensions");
  }
}

std::span<const int> SignatureMatrix::column_rows(int k) const {
  return {row_index_.data() + static_cast<std::size_t>(k) * column_degree_,
          static_cast<std::size_t>(column_degree_)};
}

std::span<const std::complex<double>> SignatureMatrix::column_weights(int k) const {
  return {weights_.data() + static_cast<std::size_t>(k) * column_degree_,
          static_cast<std::size_t>(column_degree_)};
}

void SignatureMatrix::check_invariants() const {
  if (static_cast<std::int64_t>(cols_) * column_degree_ % rows_ != 0) {
    throw ConfigError("SignatureMatrix: K*d is not a multiple of N");
  }
  const int beta_d = row_degree();
  std::vector<int> row_count(rows_, 0);
  for (int k = 0; k < cols_; ++k) {
    const auto rows = column_rows(k);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (rows[j] < 0 || rows[j] >= rows_) throw ConfigError("SignatureMatrix: row out of range");
      if (j > 0 && rows[j] <= rows[j - 1]) {
        throw ConfigError("SignatureMatrix: duplicate or unsorted entry in column " +
                          std::to_string(k));
      }
      ++row_count[rows[j]];
    }
    for (const auto& w : column_weights(k)) {
      if (std::abs(std::abs(w) - 1.0) > 1e-15) {
        throw ConfigError("SignatureMatrix: weight off the unit circle in column " +
                          std::to_string(k));
      }
    }
  }
  for (int n = 0; n < rows_; ++n) {
    if (row_count[n] != beta_d) {
      throw ConfigError("SignatureMatrix: row " + std::to_string(n) + " has degree " +
                        std::to_string(row_count[n]) + ", expected " + std::to_string(beta_d));
    }
  }
}

Eigen::MatrixXcd SignatureMatrix::to_dense() const {
  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(rows_, cols_);
  for (int k = 0; k < cols_; ++k) {
    const auto rows = column_rows(k);
    const auto w = column_weights(k);
    for (std::size_t j = 0; j < rows.size(); ++j) dense(rows[j], k) = w[j];
  }
  return dense;
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer over (master, index)
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master) ^ (index * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

namespace {

std::mt19937_64 make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return std::mt19937_64(seq);
}

bool column_has(std::span<const int> column, int resource, std::size_t skip) {
  for (std::size_t j = 0; j < column.size(); ++j) {
    if (j != skip && column[j] == resource) return true;
  }
  return false;
}

// Index of a stub whose resource repeats earlier in the same column, or -1.
std::int64_t first_duplicate(const std::vector<int>& stubs, int d, std::int64_t start_column) {
  const auto columns = static_cast<std::int64_t>(stubs.size() / d);
  for (std::int64_t offset = 0; offset < columns; ++offset) {
    const std::int64_t k = (start_column + offset) % columns;
    const int* col = stubs.data() + k * d;
    for (int a = 1; a < d; ++a) {
      for (int b = 0; b < a; ++b) {
        if (col[a] == col[b]) return k * d + a;
      }
    }
  }
  return -1;
}

}  // namespace

SignatureMatrix generate_signature(int n, int d, int beta_d, PhaseScheme phase,
                                   std::uint64_t seed) {
  const SystemConfig admissible(d, beta_d);
  (void)admissible;
  if (n <= 0) throw ConfigError("generate_signature: N must be positive");
  const std::int64_t edges = static_cast<std::int64_t>(n) * beta_d;
  if (edges % d != 0) {
    throw ConfigError(
        "generate_signature: K = N*beta_d/d is not an integer (N=" + std::to_string(n) +
        ", d=" + std::to_string(d) + ", beta_d=" + std::to_string(beta_d) + ")");
  }
  const std::int64_t k_users = edges / d;
  if (n < d || k_users < beta_d) {
    throw ConfigError("generate_signature: need N >= d and K >= beta_d for a simple graph");
  }
  if (edges > (std::int64_t{1} << 31)) throw ConfigError("generate_signature: ensemble too large");

  std::mt19937_64 rng = make_rng(seed);
  std::vector<int> stubs(static_cast<std::size_t>(edges));
  const std::int64_t repair_cap = 100 * edges;
  constexpr int kMaxResamples = 20;

  bool simple = false;
  std::int64_t remaining_duplicates = 0;
  for (int attempt = 0; attempt < kMaxResamples && !simple; ++attempt) {
    for (std::int64_t i = 0; i < edges; ++i) stubs[i] = static_cast<int>(i / beta_d);
    std::shuffle(stubs.begin(), stubs.end(), rng);

    std::uniform_int_distribution<std::int64_t> pick(0, edges - 1);
    std::int64_t bad = first_duplicate(stubs, d, 0);
    for (std::int64_t iter = 0; bad >= 0 && iter < repair_cap; ++iter) {
      const std::int64_t other = pick(rng);
      const std::int64_t u = bad / d;
      const std::int64_t v = other / d;
      if (u == v) continue;
      const int r = stubs[bad];
      const int s = stubs[other];
      if (r == s) continue;
      const std::span<const int> col_u(stubs.data() + u * d, d);
      const std::span<const int> col_v(stubs.data() + v * d, d);
      if (column_has(col_u, s, bad - u * d) || column_has(col_v, r, other - v * d)) continue;
      std::swap(stubs[bad], stubs[other]);
      bad = first_duplicate(stubs, d, u);
    }
    simple = bad < 0;
    if (!simple) {
      remaining_duplicates = 0;
      for (std::int64_t k = 0; k < k_users; ++k) {
        std::vector<int> col(stubs.begin() + k * d, stubs.begin() + (k + 1) * d);
        std::sort(col.begin(), col.end());
        remaining_duplicates += col.end() - std::unique(col.begin(), col.end());
      }
    }
  }
  if (!simple) {
    throw GenerationError("generate_signature: repair loop exceeded " + std::to_string(repair_cap) +
                          " swaps in each of " + std::to_string(kMaxResamples) +
                          " attempts (N=" + std::to_string(n) + ", d=" + std::to_string(d) +
                          ", beta_d=" + std::to_string(beta_d) +
                          ", duplicates left=" + std::to_string(remaining_duplicates) + ")");
  }

  std::vector<std::complex<double>> weights(static_cast<std::size_t>(edges));
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::bernoulli_distribution coin(0.5);
  for (auto& w : weights) {
    switch (phase) {
      case PhaseScheme::uniform:
        w = std::polar(1.0, angle(rng));
        break;
      case PhaseScheme::binary:
        w = coin(rng) ? 1.0 : -1.0;
        break;
      case PhaseScheme::repetition:
        w = 1.0;
        break;
    }
  }
  for (std::int64_t k = 0; k < k_users; ++k)
    std::sort(stubs.begin() + k * d, stubs.begin() + (k + 1) * d);

  SignatureMatrix matrix(n, static_cast<int>(k_users), d, phase, std::move(stubs),
                         std::move(weights));
  matrix.check_invariants();
  return matrix;
}

Eigen::MatrixXcd gram_matrix(const SignatureMatrix& a, GramSide side) {
  const double scale = 1.0 / a.column_degree();
  if (side == GramSide::resources) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(a.rows(), a.rows());
    for (int k = 0; k < a.cols(); ++k) {
      const auto rows = a.column_rows(k);
      const auto w = a.column_weights(k);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows.size(); ++j) {
          g(rows[i], rows[j]) += scale * w[i] * std::conj(w[j]);
        }
      }
    }
    return g;
  }

  // Row-wise adjacency, then (A^H A)_{kl} = sum_n conj(A_nk) A_nl.
  std::vector<std::vector<std::pair<int, std::complex<double>>>> by_row(a.rows());
  for (int k = 0; k < a.cols(); ++k) {
    const auto rows = a.column_rows(k);
    const auto w = a.column_weights(k);
    for (std::size_t i = 0; i < rows.size(); ++i) by_row[rows[i]].emplace_back(k, w[i]);
  }
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(a.cols(), a.cols());
  for (const auto& entries : by_row) {
    for (const auto& [k, wk] : entries) {
      for (const auto& [l, wl] : entries) g(k, l) += scale * std::conj(wk) * wl;
    }
  }
  return g;
}

double EmpiricalSpectrum::mean() const {
  if (eigenvalues.empty()) return 0.0;
  return std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0) / eigenvalues.size();
}

double EmpiricalSpectrum::second_moment() const {
  if (eigenvalues.empty()) return 0.0;
  double sum = 0.0;
  for (double x : eigenvalues) sum += x * x;
  return sum / eigenvalues.size();
}

std::vector<std::size_t> EmpiricalSpectrum::histogram(int bins) const {
  if (bins <= 0) throw ConfigError("histogram: bins must be positive");
  std::vector<std::size_t> counts(bins, 0);
  for (double x : eigenvalues) {
    auto bin = static_cast<int>(x / upper_bound * bins);
    ++counts[std::clamp(bin, 0, bins - 1)];
  }
  return counts;
}

EmpiricalSpectrum empirical_spectrum(const SignatureMatrix& a) {
  const int n = a.rows();
  const int k = a.cols();
  const GramSide side = k < n ? GramSide::users : GramSide::resources;
  const Eigen::MatrixXcd g = gram_matrix(a, side);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(g, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("empirical_spectrum: Hermitian eigensolver did not converge");
  }

  EmpiricalSpectrum spectrum;
  spectrum.beta = static_cast<double>(k) / n;
  spectrum.upper_bound = a.row_degree();
  spectrum.eigenvalues.assign(static_cast<std::size_t>(n - std::min(n, k)), 0.0);
  const double slack = 1e-9 * spectrum.upper_bound;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double x = solver.eigenvalues()(i);
    if (x < -slack || x > spectrum.upper_bound + slack) {
      throw NumericalError("empirical_spectrum: eigenvalue " + std::to_string(x) +
                           " outside [0, beta_d]");
    }
    spectrum.eigenvalues.push_back(std::clamp(x, 0.0, spectrum.upper_bound));
  }
  std::sort(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end());
  return spectrum;
}

TraceMoments trace_moments(const SignatureMatrix& a) {
  const GramSide side = a.cols() < a.rows() ? GramSide::users : GramSide::resources;
  const Eigen::MatrixXcd g = gram_matrix(a, side);
  const double n = a.rows();
  return {g.trace().real() / n, g.squaredNorm() / n};
}

std::vector<double> lmmse_diagonal(const SignatureMatrix& a, double snr) {
  if (!(snr > 0.0) || !std::isfinite(snr)) throw DomainError("lmmse_diagonal: snr must be > 0");
  const int n = a.rows();
  const int k = a.cols();
  std::vector<double> diagonal(static_cast<std::size_t>(k));

  if (k <= n) {
    // M = (I + snr R)^-1 = L^-H L^-1, so M_kk is the squared norm of column k of L^-1.
    Eigen::MatrixXcd h = snr * gram_matrix(a, GramSide::users);
    h.diagonal().array() += 1.0;
    const Eigen::LLT<Eigen::MatrixXcd> llt(h);
    if (llt.info() != Eigen::Success) throw NumericalError("lmmse_diagonal: Cholesky failed");
    const Eigen::MatrixXcd l_inv = llt.matrixL().solve(Eigen::MatrixXcd::Identity(k, k));
    for (int i = 0; i < k; ++i) diagonal[i] = l_inv.col(i).squaredNorm();
  } else {
    // Woodbury on the resource side: M_kk = 1 - (snr/d) a_k^H (I + snr G)^-1 a_k.
    Eigen::MatrixXcd s = snr * gram_matrix(a, GramSide::resources);
    s.diagonal().array() += 1.0;
    const Eigen::LLT<Eigen::MatrixXcd> llt(s);
    if (llt.info() != Eigen::Success) throw NumericalError("lmmse_diagonal: Cholesky failed");
    const Eigen::MatrixXcd l_inv = llt.matrixL().solve(Eigen::MatrixXcd::Identity(n, n));
    const double scale = snr / a.column_degree();
    Eigen::VectorXcd v(n);
    for (int user = 0; user < k; ++user) {
      v.setZero();
      const auto rows = a.column_rows(user);
      const auto w = a.column_weights(user);
      for (std::size_t j = 0; j < rows.size(); ++j) v += w[j] * l_inv.col(rows[j]);
      diagonal[user] = 1.0 - scale * v.squaredNorm();
    }
  }
  for (double m : diagonal) {
    if (!(m > 0.0 && m <= 1.0 + 1e-12)) {
      throw NumericalError("lmmse_diagonal: M_kk = " + std::to_string(m) + " outside (0, 1]");
    }
  }
  return diagonal;
}

namespace {

McEstimate summarize(const std::vector<double>& samples, std::uint64_t seed) {
  McEstimate estimate;
  estimate.trials = static_cast<int>(samples.size());
  estimate.seed = seed;
  estimate.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - estimate.mean) * (x - estimate.mean);
    const double variance = ss / (samples.size() - 1);
    estimate.standard_error = std::sqrt(variance / samples.size());
  }
  return estimate;
}

void check_trials(int n, int trials) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (n < 1) throw ConfigError("N must be >= 1");
}

}  // namespace

McEstimate empirical_capacity_opt(int n, const SystemConfig& config, int trials, std::uint64_t seed,
                                  PhaseScheme phase) {
  check_trials(n, trials);
  const double snr = config.snr();
  std::vector<double> samples(static_cast<std::size_t>(trials), 0.0);
  if (snr == 0.0) {
    (void)generate_signature(n, config.d(), config.beta_d(), phase, substream_seed(seed, 0));
    return summarize(samples, seed);
  }
  detail::parallel_for(trials, [&](int t) {
    const SignatureMatrix a =
        generate_signature(n, config.d(), config.beta_d(), phase, substream_seed(seed, t));
    const EmpiricalSpectrum spectrum = empirical_spectrum(a);
    double sum = 0.0;
    for (double lambda : spectrum.eigenvalues) sum += std::log1p(snr * lambda);
    samples[t] = sum / (std::numbers::ln2 * n);
  });
  return summarize(samples, seed);
}

McEstimate empirical_capacity_lmmse(int n, const SystemConfig& config, int trials,
                                    std::uint64_t seed, PhaseScheme phase) {
  check_trials(n, trials);
  const double snr = config.snr();
  if (!(snr > 0.0)) throw DomainError("empirical_capacity_lmmse requires snr > 0");
  const double beta = config.beta();
  std::vector<double> samples(static_cast<std::size_t>(trials), 0.0);
  detail::parallel_for(trials, [&](int t) {
    const SignatureMatrix a =
        generate_signature(n, config.d(), config.beta_d(), phase, substream_seed(seed, t));
    const std::vector<double> m = lmmse_diagonal(a, snr);
    double sum = 0.0;
    for (double mkk : m) sum -= std::log2(mkk);
    samples[t] = beta * sum / static_cast<double>(m.size());
  });
  return summarize(samples, seed);
}

double ks_distance(std::span<const double> sorted, const SpectralDensity& density) {
  if (sorted.empty()) throw ConfigError("ks_distance: empty sample");
  const double n = static_cast<double>(sorted.size());
  double distance = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double x = sorted[i];
    const double at = density.cdf(x);
    // left limit differs from the value only at the atom in zero
    const double left = x == 0.0 ? 0.0 : at;
    distance = std::max({distance, std::abs(j / n - at), std::abs(i / n - left)});
    i = j;
  }
  return distance;
}

double ks_distance(const EmpiricalSpectrum& spectrum, const SpectralDensity& density) {
  return ks_distance(std::span<const double>(spectrum.eigenvalues), density);
}

}  // namespace snoma
