#pragma once

#include <Eigen/Dense>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "hpsym/bounds.hpp"
#include "hpsym/parallel.hpp"
#include "hpsym/radiation.hpp"
#include "hpsym/spectrum.hpp"

// Dense brute-force machinery for small systems. Conventions:
//   - a basis state of a q-qubit register is an index in [0, 2^q); a set bit
//     is an up-spin; the sector label is the popcount;
//   - S = A (high k bits) x B_in (low N bits);
//   - S_rad is the low ell bits of S, S_in the remaining high bits;
//   - joint S x R indices are (s << k) | r.
// Everything here works by enumeration over basis states, independent of the
// log-space combinatorics it is used to check.

namespace hpsym {

struct numerical_guard_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;

inline int popcount_u(std::uint64_t x) { return std::popcount(x); }

// ---- deterministic RNG ----------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent per-sample stream from (seed, index); reproducible regardless
// of scheduling.
inline std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed;
  const std::uint64_t a = splitmix64(s);
  s = a ^ (index * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL);
  return std::mt19937_64(splitmix64(s));
}

// Box-Muller on raw 64-bit draws; avoids std::normal_distribution so streams
// are identical across standard libraries.
inline double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
}

inline std::complex<double> standard_complex_gaussian(std::mt19937_64& rng) {
  const double u = uniform01(rng);
  const double v = uniform01(rng);
  const double r = std::sqrt(-std::log(u));  // |z| for complex normal, var 1/2 per part
  return std::polar(r, 2.0 * M_PI * v);
}

// ---- Haar sampling ---------------------------------------------------------

// Ginibre + QR with the R-diagonal phase fix, which makes the result exactly
// Haar-distributed.
inline cmat sample_haar_unitary(long dim, std::mt19937_64& rng) {
  cmat z(dim, dim);
  for (long j = 0; j < dim; ++j)
    for (long i = 0; i < dim; ++i) z(i, j) = standard_complex_gaussian(rng);
  Eigen::HouseholderQR<cmat> qr(z);
  cmat q = qr.householderQ();
  const cmat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (long j = 0; j < dim; ++j) {
    const std::complex<double> d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0) ? d / a : 1.0;
  }
  return q;
}

// Per-sector Haar blocks; block m has the caller-supplied dimension.
struct BlockHaarUnitary {
  std::vector<long> sector_dims;
  std::vector<cmat> blocks;
};

inline BlockHaarUnitary sample_block_haar(const std::vector<long>& sector_dims,
                                          std::uint64_t seed) {
  long total = 0;
  for (long d : sector_dims) total += d;
  if (total > 4096) throw numerical_guard_error("sample_block_haar: total dimension > 4096");
  BlockHaarUnitary u;
  u.sector_dims = sector_dims;
  std::mt19937_64 rng = derived_rng(seed, 0);
  for (long d : sector_dims) u.blocks.push_back(d > 0 ? sample_haar_unitary(d, rng) : cmat());
  return u;
}

// Basis indices of each up-spin sector of a q-qubit register.
inline std::vector<std::vector<long>> qubit_sector_basis(int q) {
  std::vector<std::vector<long>> sec(static_cast<std::size_t>(q) + 1);
  for (long s = 0; s < (1L << q); ++s) sec[popcount_u(static_cast<std::uint64_t>(s))].push_back(s);
  return sec;
}

inline cmat assemble_block_unitary(const BlockHaarUnitary& u,
                                   const std::vector<std::vector<long>>& sector_basis, long dim) {
  cmat full = cmat::Zero(dim, dim);
  for (std::size_t m = 0; m < sector_basis.size(); ++m) {
    const auto& basis = sector_basis[m];
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = 0; j < basis.size(); ++j)
        full(basis[i], basis[j]) = u.blocks[m](static_cast<long>(i), static_cast<long>(j));
  }
  return full;
}

// One symmetry-preserving scrambling unitary on q qubits.
inline cmat sampled_kerr_unitary(int q, std::uint64_t seed, std::uint64_t sample_index) {
  const auto sectors = qubit_sector_basis(q);
  std::mt19937_64 rng = derived_rng(seed, sample_index);
  const long dim = 1L << q;
  cmat full = cmat::Zero(dim, dim);
  for (const auto& basis : sectors) {
    if (basis.empty()) continue;
    const cmat blk = sample_haar_unitary(static_cast<long>(basis.size()), rng);
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = 0; j < basis.size(); ++j) full(basis[i], basis[j]) = blk(i, j);
  }
  return full;
}

// ---- dense states and distances --------------------------------------------

inline void check_hermitian(const cmat& a, double tol = 1e-8) {
  if (a.rows() != a.cols()) throw std::invalid_argument("check_hermitian: not square");
  const double dev = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (dev > tol) throw std::invalid_argument("check_hermitian: deviation above tolerance");
}

// Trace distance ||a - b||_1 via a dense Hermitian eigensolve.
inline double trace_distance(const cmat& a, const cmat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  check_hermitian(a);
  check_hermitian(b);
  Eigen::SelfAdjointEigenSolver<cmat> es(a - b, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

// Diagonal of the initial-BH state on B_in built from chi: pure states use
// the uniform in-sector fiducial vector, mixed ones the per-sector
// completely mixed marginal. Either way the diagonal per sector sums to
// chi_mu.
inline Eigen::VectorXd xi_diagonal(const BlackHoleSpec& spec, const SectorSpectrum& chi) {
  const long dim = 1L << spec.N;
  std::vector<long> cnt(static_cast<std::size_t>(spec.N) + 1, 0);
  for (long b = 0; b < dim; ++b) cnt[popcount_u(static_cast<std::uint64_t>(b))]++;
  Eigen::VectorXd d(dim);
  for (long b = 0; b < dim; ++b) {
    const int mu = popcount_u(static_cast<std::uint64_t>(b));
    d(b) = chi[mu] / static_cast<double>(cnt[mu]);
  }
  return d;
}

// Uniform in-sector fiducial amplitudes of the pure initial state.
inline Eigen::VectorXd xi_pure_amplitudes(const BlackHoleSpec& spec, const SectorSpectrum& chi) {
  return xi_diagonal(spec, chi).cwiseSqrt();
}

// ---- dense oracles (enumeration only) --------------------------------------

// Schur average: E_U[U rho U^dag] = sum_m tr[Pi_m rho] pi_m with
// rho = pi^A x xi; then p_n = tr[Pi_n^{S_rad} . ].
inline std::vector<double> dense_radiation_distribution(const BlackHoleSpec& spec,
                                                        const SectorSpectrum& chi, int ell) {
  const int M = spec.total_qubits();
  if (M > 24) throw numerical_guard_error("dense_radiation_distribution: N+k too large");
  const long dimS = 1L << M;
  const Eigen::VectorXd xid = xi_diagonal(spec, chi);
  const double piA = 1.0 / static_cast<double>(1L << spec.k);

  std::vector<double> w(static_cast<std::size_t>(M) + 1, 0.0);
  std::vector<long> d(static_cast<std::size_t>(M) + 1, 0);
  std::vector<std::vector<long>> joint(static_cast<std::size_t>(M) + 1,
                                       std::vector<long>(static_cast<std::size_t>(ell) + 1, 0));
  const long mask_rad = (1L << ell) - 1;
  for (long s = 0; s < dimS; ++s) {
    const int m = popcount_u(static_cast<std::uint64_t>(s));
    const long b = s & ((1L << spec.N) - 1);
    w[m] += piA * xid(b);
    d[m]++;
    joint[m][popcount_u(static_cast<std::uint64_t>(s & mask_rad))]++;
  }
  std::vector<double> p(static_cast<std::size_t>(ell) + 1, 0.0);
  for (int m = 0; m <= M; ++m) {
    if (d[m] == 0) continue;
    for (int n = 0; n <= ell; ++n)
      p[n] += w[m] * static_cast<double>(joint[m][n]) / static_cast<double>(d[m]);
  }
  return p;
}

// Diagonal of Gamma^{S_in R} (and its S_in marginal) assembled from the
// projector algebra pieces: A_m from the radiated replica, B_m from
// tr_S[Pi_m (Phi^{AR} x xi)].
struct GammaDiagonal {
  int ell = 0;
  long dim_sin = 0;
  long dim_r = 0;
  Eigen::VectorXd diag;      // index (i << k) | r
  Eigen::VectorXd sin_diag;  // marginal over R
};

inline GammaDiagonal gamma_diagonal(const BlackHoleSpec& spec, const SectorSpectrum& chi,
                                    int ell) {
  const int M = spec.total_qubits();
  if (M > 24) throw numerical_guard_error("gamma_diagonal: N+k too large");
  const long dimSin = 1L << (M - ell);
  const long dimR = 1L << spec.k;

  std::vector<long> cnt_rad(static_cast<std::size_t>(ell) + 1, 0);
  for (long x = 0; x < (1L << ell); ++x) cnt_rad[popcount_u(static_cast<std::uint64_t>(x))]++;
  std::vector<long> d(static_cast<std::size_t>(M) + 1, 0);
  for (long s = 0; s < (1L << M); ++s) d[popcount_u(static_cast<std::uint64_t>(s))]++;

  const Eigen::VectorXd xid = xi_diagonal(spec, chi);
  const double dimS = static_cast<double>(1L << M);

  // B_m[r] = 2^{-k} sum_{b : pop(b) + pop(r) = m} xi_bb
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(M + 1, dimR);
  for (long r = 0; r < dimR; ++r) {
    const int pr = popcount_u(static_cast<std::uint64_t>(r));
    for (long b = 0; b < (1L << spec.N); ++b) {
      const int m = pr + popcount_u(static_cast<std::uint64_t>(b));
      B(m, r) += xid(b) / static_cast<double>(dimR);
    }
  }
  GammaDiagonal g;
  g.ell = ell;
  g.dim_sin = dimSin;
  g.dim_r = dimR;
  g.diag = Eigen::VectorXd::Zero(dimSin * dimR);
  for (long i = 0; i < dimSin; ++i) {
    const int pi_ = popcount_u(static_cast<std::uint64_t>(i));
    for (int m = 0; m <= M; ++m) {
      if (d[m] == 0) continue;
      const int n = m - pi_;
      if (n < 0 || n > ell) continue;
      const double Am = static_cast<double>(cnt_rad[n]) / dimS;
      for (long r = 0; r < dimR; ++r)
        g.diag((i << spec.k) | r) += (dimS / static_cast<double>(d[m])) * Am * B(m, r);
    }
  }
  g.sin_diag = Eigen::VectorXd::Zero(dimSin);
  for (long i = 0; i < dimSin; ++i)
    for (long r = 0; r < dimR; ++r) g.sin_diag(i) += g.diag((i << spec.k) | r);
  return g;
}

// || Gamma^{S_in R} - Gamma^{S_in} x pi^R ||_1 evaluated from the diagonals.
inline double dense_eta(const BlackHoleSpec& spec, const SectorSpectrum& chi, int ell) {
  const GammaDiagonal g = gamma_diagonal(spec, chi, ell);
  double acc = 0.0;
  for (long i = 0; i < g.dim_sin; ++i)
    for (long r = 0; r < g.dim_r; ++r)
      acc += std::abs(g.diag((i << spec.k) | r) - g.sin_diag(i) / static_cast<double>(g.dim_r));
  return acc;
}

// Dense matrix form, guarded by dimension.
inline cmat exact_gamma(const BlackHoleSpec& spec, const SectorSpectrum& chi, int ell,
                        long max_dim = 4096) {
  const GammaDiagonal g = gamma_diagonal(spec, chi, ell);
  const long dim = g.dim_sin * g.dim_r;
  if (dim > max_dim) throw numerical_guard_error("exact_gamma: dense dimension guard");
  cmat out = cmat::Zero(dim, dim);
  for (long i = 0; i < dim; ++i) out(i, i) = g.diag(i);
  return out;
}

// ---- Monte-Carlo validation -------------------------------------------------

struct ValidationReport {
  BlackHoleSpec spec;
  int ell = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  double delta = 0.0;
  double epsilon = 0.0;
  double theta_bound = 0.0;       // Theta^{delta,eps} with the optimal smoothing set
  double expectation_bound = 0.0;  // non-smoothed 2^{-(k - log2 gamma_full)/2}
  double tail = 1.0;               // exp(-delta^2 d_min(eps)/48)
  double log_d_min = 0.0;
  bool d_min_defined = false;

  std::vector<double> distances;
  double mean_distance = 0.0;
  long violations = 0;
  double violation_fraction = 0.0;
  bool theta_vacuous = true;
  bool violation_ok = true;

  double mean_state_distance = 0.0;
  std::array<double, 4> quarter_distances{};
  double quarter_mean = 0.0;
  double quarter_std = 0.0;
  bool halving_ok = true;
  bool expectation_vacuous = true;
  bool expectation_ok = true;

  // optional refined-tail mode (threshold dimension d_th > 0): the bound
  // 2^{-H_min/2}/sqrt(1-eps) + delta + f(eps) with f(x) = 2 sqrt(x) + x +
  // x/(1-x), holding with probability >= 1 - exp(-delta^2 d_th / (48 C))
  long d_th = 0;
  double corollary_eps = 0.0;    // weight outside the d_m >= d_th sectors
  double corollary_bound = 0.0;
  double corollary_tail = 1.0;
  bool corollary_vacuous = true;
  bool corollary_ok = true;
};

namespace detail {

// rho^{S_in R} for one sampled unitary: columns of (U x I) applied to the
// purified input, partially traced over the low ell qubits of S.
inline cmat sample_reduced_state(const BlackHoleSpec& spec, const Eigen::VectorXd& xi_amp,
                                 const Eigen::VectorXd& xi_mix, bool pure, int ell,
                                 const cmat& U) {
  const int M = spec.total_qubits();
  const long dimS = 1L << M;
  const long dimR = 1L << spec.k;
  const long dimSin = 1L << (M - ell);
  const long dimRad = 1L << ell;
  const double amp = 1.0 / std::sqrt(static_cast<double>(dimR));

  cmat rho = cmat::Zero(dimSin * dimR, dimSin * dimR);
  auto add_pure_term = [&](const cmat& K, double weight) {
    // K is dimS x dimR; regroup s = (i << ell) | x and contract over x.
    cmat T = cmat::Zero(dimSin * dimR, dimRad);
    for (long i = 0; i < dimSin; ++i)
      for (long x = 0; x < dimRad; ++x)
        for (long r = 0; r < dimR; ++r) T(i * dimR + r, x) = K((i << ell) | x, r);
    cmat contrib = T * T.adjoint();
    // reorder (i, r) -> (i << k) | r is the identity layout here
    rho += weight * contrib;
  };

  if (pure) {
    cmat K0 = cmat::Zero(dimS, dimR);
    for (long r = 0; r < dimR; ++r)
      for (long b = 0; b < (1L << spec.N); ++b) K0((r << spec.N) | b, r) = amp * xi_amp(b);
    add_pure_term(U * K0, 1.0);
  } else {
    for (long b = 0; b < (1L << spec.N); ++b) {
      const double w = xi_mix(b);
      if (w <= 0.0) continue;
      cmat K = cmat::Zero(dimS, dimR);
      for (long r = 0; r < dimR; ++r) K.col(r) = amp * U.col((r << spec.N) | b);
      add_pure_term(K, w);
    }
  }
  return rho;
}

}  // namespace detail

// Monte-Carlo check of the partial-decoupling statements: per-sample trace
// distances against Theta^{delta,eps}, the empirical mean against the
// non-smoothed expectation bound, and the sample-mean state against Gamma.
inline ValidationReport run_validation(const BlackHoleSpec& spec, const SectorSpectrum& chi,
                                       int ell, int samples, std::uint64_t seed, double delta,
                                       std::size_t workers = 0, long d_th = 0) {
  spec.validate();
  const int M = spec.total_qubits();
  if (ell < 0 || ell > M) throw std::invalid_argument("run_validation: ell out of range");
  if (samples < 4) throw std::invalid_argument("run_validation: need at least 4 samples");
  if ((1L << M) > 1024 || (1L << (M - ell + spec.k)) > 4096)
    throw numerical_guard_error("run_validation: dense dimension guard");

  ValidationReport rep;
  rep.spec = spec;
  rep.ell = ell;
  rep.samples = samples;
  rep.seed = seed;
  rep.delta = delta;

  const BoundsReport br = theta(spec, chi, ell);
  rep.epsilon = br.opt_epsilon;
  rep.theta_bound = br.theta + 2.0 * delta;
  rep.d_min_defined = br.d_min_defined;
  rep.log_d_min = br.d_min_defined ? br.d_min_opt.log_mag : 0.0;
  rep.tail = br.d_min_defined ? failure_probability(br.d_min_opt, delta) : 1.0;

  std::vector<int> all_n(static_cast<std::size_t>(ell) + 1);
  for (int n = 0; n <= ell; ++n) all_n[n] = n;
  const LogReal gamma_full = detail::sum_members(detail::gamma_per_n(spec, chi, ell), all_n);
  rep.expectation_bound =
      gamma_full.is_zero()
          ? 0.0
          : std::exp(-0.5 * (spec.k * std::log(2.0) - gamma_full.log_mag));

  const cmat gamma = exact_gamma(spec, chi, ell);
  const Eigen::VectorXd xi_amp = xi_pure_amplitudes(spec, chi);
  const Eigen::VectorXd xi_mix = xi_diagonal(spec, chi);
  const bool pure = spec.kind == Purity::pure;

  rep.distances.assign(samples, 0.0);
  std::array<cmat, 4> qsum;
  const long dim = gamma.rows();
  for (auto& q : qsum) q = cmat::Zero(dim, dim);

  // Quarters run independently; per-sample RNG streams keep the result
  // independent of scheduling.
  parallel_for(
      4,
      [&](std::size_t q) {
        const int lo = static_cast<int>(q) * samples / 4;
        const int hi = static_cast<int>(q + 1) * samples / 4;
        for (int i = lo; i < hi; ++i) {
          const cmat U = sampled_kerr_unitary(M, seed, static_cast<std::uint64_t>(i));
          const cmat rho = detail::sample_reduced_state(spec, xi_amp, xi_mix, pure, ell, U);
          rep.distances[i] = trace_distance(rho, gamma);
          qsum[q] += rho;
        }
      },
      workers);

  double mean = 0.0;
  for (double d : rep.distances) mean += d;
  rep.mean_distance = mean / samples;

  rep.theta_vacuous = !(rep.theta_bound < 2.0);
  for (double d : rep.distances)
    if (d > rep.theta_bound) rep.violations++;
  rep.violation_fraction = static_cast<double>(rep.violations) / samples;
  if (!rep.theta_vacuous) {
    const double t = rep.tail;
    const double noise = 3.0 * std::sqrt(std::max(t * (1.0 - t), 1e-12) / samples);
    rep.violation_ok = rep.violation_fraction <= t + noise;
  }

  cmat total = cmat::Zero(dim, dim);
  for (int q = 0; q < 4; ++q) {
    const int lo = q * samples / 4, hi = (q + 1) * samples / 4;
    rep.quarter_distances[q] = trace_distance(cmat(qsum[q] / (hi - lo)), gamma);
    total += qsum[q];
  }
  rep.mean_state_distance = trace_distance(cmat(total / samples), gamma);
  double qm = 0.0;
  for (double d : rep.quarter_distances) qm += d;
  qm /= 4.0;
  double qv = 0.0;
  for (double d : rep.quarter_distances) qv += (d - qm) * (d - qm);
  rep.quarter_mean = qm;
  rep.quarter_std = std::sqrt(qv / 3.0);
  // 1/sqrt(samples) law: the full mean should sit at half the quarter-level
  // distance; both sides fluctuate at ~quarter_std/2 / sqrt(4).
  rep.halving_ok =
      std::abs(rep.mean_state_distance - qm / 2.0) <= 3.0 * (rep.quarter_std * M_SQRT2 / 4.0);

  rep.expectation_vacuous = !(rep.expectation_bound < 2.0);
  if (!rep.expectation_vacuous) {
    double sv = 0.0;
    for (double d : rep.distances) sv += (d - rep.mean_distance) * (d - rep.mean_distance);
    const double se = std::sqrt(sv / (samples - 1.0) / samples);
    rep.expectation_ok = rep.mean_distance <= rep.expectation_bound + 3.0 * se;
  }

  if (d_th > 0) {
    rep.d_th = d_th;
    // sector weights w_m and the weight left outside the large sectors
    std::vector<long> dm(static_cast<std::size_t>(M) + 1, 0);
    for (long s = 0; s < (1L << M); ++s) dm[popcount_u(static_cast<std::uint64_t>(s))]++;
    double inside = 0.0;
    const double lk = spec.k * std::log(2.0);
    for (int m = 0; m <= M; ++m) {
      if (dm[m] < d_th) continue;
      for (int kap = 0; kap <= spec.k; ++kap)
        inside += std::exp(log_binomial(spec.k, kap).log_mag - lk) * chi[m - kap];
    }
    const double eps = std::max(0.0, 1.0 - inside);
    rep.corollary_eps = eps;
    const double f = eps < 1.0 ? 2.0 * std::sqrt(eps) + eps + eps / (1.0 - eps) : kInf;
    rep.corollary_bound =
        eps < 1.0 ? rep.expectation_bound / std::sqrt(1.0 - eps) + delta + f : kInf;
    // ||pi^A x xi||_inf: a pure xi has operator norm 1, the per-sector
    // mixed family max_mu chi_mu / C(N, mu)
    double xi_inf = 1.0;
    if (spec.kind == Purity::mixed) {
      xi_inf = 0.0;
      for (int mu = 0; mu <= spec.N; ++mu)
        if (chi[mu] > 0.0)
          xi_inf = std::max(xi_inf, chi[mu] / log_binomial(spec.N, mu).to_linear());
    }
    const double rho_inf = xi_inf / static_cast<double>(1L << spec.k);
    const double C = std::min(1.0, eps < 1.0 ? rho_inf / (1.0 - eps) : 1.0);
    rep.corollary_tail = std::exp(-delta * delta * static_cast<double>(d_th) / (48.0 * C));
    rep.corollary_vacuous = !(rep.corollary_bound < 2.0);
    if (!rep.corollary_vacuous) {
      long v = 0;
      for (double d : rep.distances)
        if (d > rep.corollary_bound) v++;
      const double t = rep.corollary_tail;
      const double noise = 3.0 * std::sqrt(std::max(t * (1.0 - t), 1e-12) / samples);
      rep.corollary_ok = static_cast<double>(v) / samples <= t + noise;
    }
  }
  return rep;
}

}  // namespace hpsym
