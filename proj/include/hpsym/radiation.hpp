#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hpsym/logspace.hpp"
#include "hpsym/spectrum.hpp"

namespace hpsym {

// Distribution p_n of the Z-axis AM (up-spin count n) in the new radiation
// of ell qubits.
struct RadiationDistribution {
  int ell = 0;
  std::vector<double> p;  // size ell + 1

  double sum() const {
    double s = 0.0;
    for (double x : p) s += x;
    return s;
  }
};

// p_n = 2^{-k} sum_{m=0}^{N+k} sum_{kappa=0}^{k}
//       chi_{m-kappa} C(ell,n) C(N+k-ell, m-n) C(k,kappa) / C(N+k, m),
// every term assembled in log space.
inline RadiationDistribution radiation_distribution(const BlackHoleSpec& spec,
                                                    const SectorSpectrum& chi, int ell) {
  spec.validate();
  const int M = spec.total_qubits();
  if (ell < 0 || ell > M) throw std::invalid_argument("radiation_distribution: ell out of [0, N+k]");

  // g[m] = log( sum_kappa chi_{m-kappa} C(k,kappa) ) - log C(M,m)
  std::vector<double> g(static_cast<std::size_t>(M) + 1, kNegInf);
  for (int m = 0; m <= M; ++m) {
    LogAccumulator acc;
    for (int kap = 0; kap <= spec.k; ++kap) {
      const double c = chi[m - kap];
      if (c <= 0.0) continue;
      acc.push_log(std::log(c) + log_binomial(spec.k, kap).log_mag);
    }
    const LogReal r = acc.finalize();
    if (!r.is_zero()) g[m] = r.log_mag - log_binomial(M, m).log_mag;
  }

  const double lk = spec.k * std::log(2.0);
  RadiationDistribution out{ell, std::vector<double>(static_cast<std::size_t>(ell) + 1, 0.0)};
  for (int n = 0; n <= ell; ++n) {
    const double ln_rad = log_binomial(ell, n).log_mag;
    LogAccumulator acc;
    for (int m = n; m <= M; ++m) {
      if (g[m] == kNegInf) continue;
      const LogReal b = log_binomial(M - ell, m - n);
      if (b.is_zero()) continue;
      acc.push_log(g[m] + b.log_mag + ln_rad);
    }
    const LogReal r = acc.finalize();
    out.p[n] = r.is_zero() ? 0.0 : std::exp(r.log_mag - lk);
  }
  return out;
}

// Probable set I_eps = { n : p_n >= eps } with the rare-event weight w and
// the minimum sector dimension d_min(eps) entering the tail bound.
struct SmoothingSet {
  double epsilon = 0.0;
  std::vector<int> members;  // ascending
  double w = 0.0;
  LogReal d_min;       // ln of min C(N+k, m+n); meaningless when undefined
  bool d_min_defined = false;
};

// d_min(eps) = min{ C(N+k, m+n) : m in [0, N+k-ell], n in members }.
// m+n sweeps a contiguous range, so the unimodal binomial attains its
// minimum at one of the two extremes.
inline LogReal smoothing_d_min(int M, int ell, const std::vector<int>& members) {
  const int n_lo = members.front();
  const int n_hi = members.back();
  const LogReal lo = log_binomial(M, n_lo);
  const LogReal hi = log_binomial(M, (M - ell) + n_hi);
  return lo.log_mag <= hi.log_mag ? lo : hi;
}

inline SmoothingSet smoothing_set(const RadiationDistribution& dist, double epsilon,
                                  const BlackHoleSpec& spec) {
  if (epsilon < 0) throw std::invalid_argument("smoothing_set: epsilon must be >= 0");
  SmoothingSet out;
  out.epsilon = epsilon;
  double w = 0.0;
  for (int n = 0; n <= dist.ell; ++n) {
    if (dist.p[n] >= epsilon)
      out.members.push_back(n);
    else
      w += dist.p[n];
  }
  if (out.members.empty()) {
    out.w = 1.0;
    out.d_min_defined = false;
    return out;
  }
  out.w = w;
  out.d_min = smoothing_d_min(spec.total_qubits(), dist.ell, out.members);
  out.d_min_defined = true;
  return out;
}

// Sorted distinct values of {0} U {p_n}; the map eps -> I_eps is a step
// function, so these thresholds enumerate every distinct probable set.
inline std::vector<double> candidate_thresholds(const RadiationDistribution& dist) {
  std::vector<double> c;
  c.reserve(dist.p.size() + 1);
  c.push_back(0.0);
  c.insert(c.end(), dist.p.begin(), dist.p.end());
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

}  // namespace hpsym
