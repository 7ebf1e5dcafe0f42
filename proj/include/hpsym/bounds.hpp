#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hpsym/logspace.hpp"
#include "hpsym/radiation.hpp"
#include "hpsym/spectrum.hpp"

namespace hpsym {

namespace detail {

// Per-n squared inner sums; gamma over a member set is their sum, which lets
// the epsilon sweep reuse one pass of the expensive double loops.
inline std::vector<LogReal> gamma_pure_per_n(const BlackHoleSpec& spec, const SectorSpectrum& chi,
                                             int ell) {
  const int M = spec.total_qubits();
  // h[m] = log( sum_kappa sqrt(chi_{m-kappa}) C(k,kappa) ) - 0.5 log C(M,m)
  std::vector<double> h(static_cast<std::size_t>(M) + 1, kNegInf);
  for (int m = 0; m <= M; ++m) {
    LogAccumulator acc;
    for (int kap = 0; kap <= spec.k; ++kap) {
      const double c = chi[m - kap];
      if (c <= 0.0) continue;
      acc.push_log(0.5 * std::log(c) + log_binomial(spec.k, kap).log_mag);
    }
    const LogReal r = acc.finalize();
    if (!r.is_zero()) h[m] = r.log_mag - 0.5 * log_binomial(M, m).log_mag;
  }
  std::vector<LogReal> v(static_cast<std::size_t>(ell) + 1);
  for (int n = 0; n <= ell; ++n) {
    LogAccumulator acc;
    for (int m = n; m <= M; ++m) {
      if (h[m] == kNegInf) continue;
      const LogReal b = log_binomial(M - ell, m - n);
      if (b.is_zero()) continue;
      acc.push_log(h[m] + b.log_mag);
    }
    v[n] = acc.finalize().squared();
  }
  return v;
}

inline std::vector<LogReal> gamma_mixed_per_n(const BlackHoleSpec& spec, const SectorSpectrum& chi,
                                              int ell) {
  const int M = spec.total_qubits();
  std::vector<LogReal> v(static_cast<std::size_t>(ell) + 1);
  std::vector<double> lw(static_cast<std::size_t>(spec.N) + 1, kNegInf);
  for (int mu = 0; mu <= spec.N; ++mu)
    if (chi[mu] > 0.0) lw[mu] = std::log(chi[mu]) - log_binomial(spec.N, mu).log_mag;
  for (int n = 0; n <= ell; ++n) {
    LogAccumulator outer;
    for (int mu = 0; mu <= spec.N; ++mu) {
      if (lw[mu] == kNegInf) continue;
      LogAccumulator inner;
      const int m_hi = std::min(mu + spec.k, M);
      for (int m = std::max(mu, n); m <= m_hi; ++m) {
        const LogReal bin = log_binomial(M - ell, m - n);
        if (bin.is_zero()) continue;
        inner.push_log(-0.5 * log_binomial(M, m).log_mag + bin.log_mag +
                       log_binomial(spec.k, m - mu).log_mag);
      }
      const LogReal in = inner.finalize();
      if (!in.is_zero()) outer.push_log(lw[mu] + 2.0 * in.log_mag);
    }
    v[n] = outer.finalize();
  }
  return v;
}

inline std::vector<LogReal> gamma_per_n(const BlackHoleSpec& spec, const SectorSpectrum& chi,
                                        int ell) {
  return spec.kind == Purity::pure ? gamma_pure_per_n(spec, chi, ell)
                                   : gamma_mixed_per_n(spec, chi, ell);
}

inline LogReal sum_members(const std::vector<LogReal>& per_n, const std::vector<int>& members) {
  LogAccumulator acc;
  for (int n : members) acc.push(per_n[static_cast<std::size_t>(n)]);
  return acc.finalize();
}

}  // namespace detail

// gamma over the given probable set for the pure initial state.
inline LogReal gamma_pure(const BlackHoleSpec& spec, const SectorSpectrum& chi, int ell,
                          const std::vector<int>& members) {
  spec.validate();
  if (spec.kind != Purity::pure) throw std::invalid_argument("gamma_pure: spec.kind must be pure");
  return detail::sum_members(detail::gamma_pure_per_n(spec, chi, ell), members);
}

inline LogReal gamma_mixed(const BlackHoleSpec& spec, const SectorSpectrum& chi, int ell,
                           const std::vector<int>& members) {
  spec.validate();
  if (spec.kind != Purity::mixed)
    throw std::invalid_argument("gamma_mixed: spec.kind must be mixed");
  return detail::sum_members(detail::gamma_mixed_per_n(spec, chi, ell), members);
}

struct BoundsReport {
  BlackHoleSpec spec;
  int ell = 0;
  double theta = 0.0;  // raw minimum of 2^{1-k/2} sqrt(gamma(eps)) + 2 w(eps)
  double eta = 0.0;
  double delta_inv_bound = 0.0;  // min(theta, 1)
  double delta_tot_bound = 0.0;  // min(theta + eta, 1)
  double opt_epsilon = 0.0;
  double w_opt = 0.0;
  LogReal d_min_opt;
  bool d_min_defined = false;
  LogReal gamma_log;
};

inline double theta_candidate_value(int k, const LogReal& gamma, double w) {
  double t = 2.0 * w;
  if (!gamma.is_zero()) t += std::exp((1.0 - k / 2.0) * std::log(2.0) + 0.5 * gamma.log_mag);
  return t;
}

// Best smoothed bound: min over the distinct thresholds of
// 2^{1-k/2} sqrt(gamma(eps)) + 2 w(eps). One pass of suffix sums in the
// p_n-sorted order covers every candidate.
inline BoundsReport theta(const BlackHoleSpec& spec, const SectorSpectrum& chi, int ell) {
  spec.validate();
  const int M = spec.total_qubits();
  if (ell < 0 || ell > M) throw std::invalid_argument("theta: ell out of [0, N+k]");

  const RadiationDistribution dist = radiation_distribution(spec, chi, ell);
  const std::vector<LogReal> per_n = detail::gamma_per_n(spec, chi, ell);

  std::vector<int> order(dist.p.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return dist.p[a] < dist.p[b]; });

  const std::size_t sz = order.size();
  // Suffix gamma sums and n-extents over the sorted order; prefix p sums.
  std::vector<LogReal> suf_gamma(sz + 1);
  std::vector<int> suf_min(sz + 1), suf_max(sz + 1);
  suf_gamma[sz] = LogReal::zero();
  suf_min[sz] = 1 << 30;
  suf_max[sz] = -1;
  for (std::size_t j = sz; j-- > 0;) {
    LogAccumulator acc;
    acc.push(suf_gamma[j + 1]);
    acc.push(per_n[static_cast<std::size_t>(order[j])]);
    suf_gamma[j] = acc.finalize();
    suf_min[j] = std::min(suf_min[j + 1], order[j]);
    suf_max[j] = std::max(suf_max[j + 1], order[j]);
  }

  BoundsReport rep;
  rep.spec = spec;
  rep.ell = ell;
  rep.theta = std::numeric_limits<double>::infinity();

  double prefix_w = 0.0;
  for (std::size_t j = 0; j < sz; ++j) {
    const double eps = (j == 0) ? 0.0 : dist.p[order[j]];
    // ties: evaluate only at the first index of each distinct threshold
    if (j > 0 && dist.p[order[j]] == dist.p[order[j - 1]]) {
      prefix_w += dist.p[order[j]];
      continue;
    }
    const double cand = theta_candidate_value(spec.k, suf_gamma[j], prefix_w);
    if (cand < rep.theta) {
      rep.theta = cand;
      rep.opt_epsilon = eps;
      rep.w_opt = prefix_w;
      rep.gamma_log = suf_gamma[j];
      std::vector<int> extent = {suf_min[j], suf_max[j]};
      rep.d_min_opt = smoothing_d_min(M, ell, extent);
      rep.d_min_defined = true;
    }
    prefix_w += dist.p[order[j]];
  }
  rep.delta_inv_bound = std::min(rep.theta, 1.0);
  return rep;
}

// Information remnant eta = 2^{-k} sum_{nu,kappa} F_{kappa,nu}
// C(N+k-ell,nu) C(k,kappa); the signed m-sum inside F runs through a
// LogAccumulator so the analytically cancelling terms snap to exact zero.
inline double eta(const BlackHoleSpec& spec, const SectorSpectrum& chi, int ell) {
  spec.validate();
  const int M = spec.total_qubits();
  if (ell < 0 || ell > M) throw std::invalid_argument("eta: ell out of [0, N+k]");

  std::vector<double> wbin(static_cast<std::size_t>(spec.k) + 1);
  const double lk = spec.k * std::log(2.0);
  for (int kap = 0; kap <= spec.k; ++kap)
    wbin[kap] = std::exp(log_binomial(spec.k, kap).log_mag - lk);
  std::vector<double> avg(static_cast<std::size_t>(M) + 1, 0.0);
  for (int m = 0; m <= M; ++m)
    for (int kap = 0; kap <= spec.k; ++kap) avg[m] += wbin[kap] * chi[m - kap];

  std::vector<double> lCM(static_cast<std::size_t>(M) + 1);
  for (int m = 0; m <= M; ++m) lCM[m] = log_binomial(M, m).log_mag;

  LogAccumulator total;
  for (int nu = 0; nu <= M - ell; ++nu) {
    const double lnu = log_binomial(M - ell, nu).log_mag;
    const int m_lo = nu, m_hi = std::min(nu + ell, M);
    for (int kap = 0; kap <= spec.k; ++kap) {
      LogAccumulator f;
      for (int m = m_lo; m <= m_hi; ++m) {
        const double diff = chi[m - kap] - avg[m];
        if (diff == 0.0) continue;
        f.push(LogReal{diff > 0 ? +1 : -1,
                       std::log(std::abs(diff)) + log_binomial(ell, m - nu).log_mag - lCM[m]});
      }
      const LogReal F = f.finalize();
      if (F.is_zero()) continue;
      total.push_log(F.log_mag + lnu + log_binomial(spec.k, kap).log_mag - lk);
    }
  }
  const LogReal r = total.finalize();
  return r.is_zero() ? 0.0 : std::exp(r.log_mag);
}

// Bound assembly: Delta_inv <= Theta, Delta_tot <= Theta + eta, clamped to
// the fidelity range.
inline BoundsReport recovery_bounds(const BlackHoleSpec& spec, const SectorSpectrum& chi,
                                    int ell) {
  BoundsReport rep = theta(spec, chi, ell);
  rep.eta = eta(spec, chi, ell);
  rep.delta_tot_bound = std::min(rep.theta + rep.eta, 1.0);
  return rep;
}

struct DelayReport {
  double Delta = 0.0;
  int ell_Delta = -1;  // -1 means unreached
  bool reached = false;
  int baseline = -1;
  bool baseline_reached = false;
  int delay = 0;  // meaningful when both reached
};

// Least ell with min(theta, 1) <= Delta; linear scan since theta is not
// proven monotone in ell.
inline int first_ell_reaching(const BlackHoleSpec& spec, const SectorSpectrum& chi, double Delta) {
  const int M = spec.total_qubits();
  for (int ell = 0; ell <= M; ++ell) {
    const BoundsReport r = theta(spec, chi, ell);
    if (std::min(r.theta, 1.0) <= Delta) return ell;
  }
  return -1;
}

inline DelayReport ell_delta(const BlackHoleSpec& spec, const SectorSpectrum& chi, double Delta) {
  if (!(Delta > 0.0)) throw std::invalid_argument("ell_delta: Delta must be > 0");
  DelayReport rep;
  rep.Delta = Delta;
  rep.ell_Delta = first_ell_reaching(spec, chi, Delta);
  rep.reached = rep.ell_Delta >= 0;

  BlackHoleSpec base = spec;
  base.L = 0.0;
  base.deltaL = 0.0;
  rep.baseline = first_ell_reaching(base, gaussian_spectrum(base), Delta);
  rep.baseline_reached = rep.baseline >= 0;
  if (rep.reached && rep.baseline_reached) rep.delay = rep.ell_Delta - rep.baseline;
  return rep;
}

// exp[-delta^2 d_min / 48] with graceful underflow to 0.
inline double failure_probability(const LogReal& d_min, double delta) {
  if (delta < 0) throw std::invalid_argument("failure_probability: delta must be >= 0");
  if (delta == 0.0) return 1.0;
  if (d_min.is_zero()) return 1.0;
  const double dm = std::exp(d_min.log_mag);  // may overflow to inf
  return std::exp(-delta * delta * dm / 48.0);
}

}  // namespace hpsym
