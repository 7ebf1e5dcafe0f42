#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hpsym/bounds.hpp"
#include "hpsym/logspace.hpp"
#include "hpsym/spectrum.hpp"

namespace hpsym {

struct SinMarginal {
  int ell = 0;
  std::vector<double> P;  // index nu in [0, N+k-ell]
  double mean_nu = 0.0;   // in up-spin counts; AM moments differ by a shift only
  double var_nu = 0.0;
};

// P(nu) = 2^{-k} sum_{n,kappa} C(ell,n) C(k,kappa) C(N+k-ell,nu)
//         chi_{nu+n-kappa} / C(N+k, nu+n); the diagonal AM marginal of Gamma
// on the remaining BH.
inline SinMarginal sin_marginal_stats(const BlackHoleSpec& spec, const SectorSpectrum& chi,
                                      int ell) {
  spec.validate();
  const int M = spec.total_qubits();
  if (ell < 0 || ell > M) throw std::invalid_argument("sin_marginal_stats: ell out of [0, N+k]");
  SinMarginal out;
  out.ell = ell;
  out.P.assign(static_cast<std::size_t>(M - ell) + 1, 0.0);
  const double lk = spec.k * std::log(2.0);
  for (int nu = 0; nu <= M - ell; ++nu) {
    const double lnu = log_binomial(M - ell, nu).log_mag;
    LogAccumulator acc;
    for (int n = 0; n <= ell; ++n) {
      const double lm = log_binomial(M, nu + n).log_mag;
      const double lrad = log_binomial(ell, n).log_mag;
      for (int kap = 0; kap <= spec.k; ++kap) {
        const double c = chi[nu + n - kap];
        if (c <= 0.0) continue;
        acc.push_log(std::log(c) + lrad + lnu + log_binomial(spec.k, kap).log_mag - lm);
      }
    }
    const LogReal r = acc.finalize();
    out.P[nu] = r.is_zero() ? 0.0 : std::exp(r.log_mag - lk);
  }
  double mean = 0.0, norm = 0.0;
  for (int nu = 0; nu <= M - ell; ++nu) {
    mean += out.P[nu] * nu;
    norm += out.P[nu];
  }
  mean /= norm;
  double var = 0.0;
  for (int nu = 0; nu <= M - ell; ++nu) var += out.P[nu] * (nu - mean) * (nu - mean);
  out.mean_nu = mean;
  out.var_nu = var / norm;
  return out;
}

// Degree of symmetry-breaking of the initial BH: twice the AM variance of chi.
inline double zeta_initial(const SectorSpectrum& chi) {
  const SpectrumMoments m = moments(chi);
  return 2.0 * m.deltaL_realized * m.deltaL_realized;
}

struct RemnantReport {
  int ell = 0;
  double eta_exact = 0.0;
  double var_nu = 0.0;
  double zeta = 0.0;  // 2 var_nu
  double mad_kappa = 0.0;
  double bound_exact_variance = 0.0;  // sqrt(2/3) <|dk|> (1-ell/(N+k)) / sqrt(zeta)
  double bound_branch_small_ell = 0.0;  // a / (sqrt(2) deltaL)
  double bound_branch_large_ell = 0.0;  // a / sqrt(ell)
  bool zeta_positive = true;
};

// Heuristic symmetry-breaking lower bounds next to the exact eta. The two
// branch values cover the sqrt(ell) << deltaL and >> deltaL regimes; the
// exact-variance route is the headline number.
inline RemnantReport remnant_bounds(const BlackHoleSpec& spec, const SectorSpectrum& chi,
                                    int ell) {
  RemnantReport rep;
  rep.ell = ell;
  rep.eta_exact = eta(spec, chi, ell);
  const SinMarginal sm = sin_marginal_stats(spec, chi, ell);
  rep.var_nu = sm.var_nu;
  rep.zeta = 2.0 * sm.var_nu;

  double mad = 0.0;
  const double lk = spec.k * std::log(2.0);
  for (int kap = 0; kap <= spec.k; ++kap)
    mad += std::exp(log_binomial(spec.k, kap).log_mag - lk) * std::abs(kap - spec.k / 2.0);
  rep.mad_kappa = mad;

  const double shrink = 1.0 - static_cast<double>(ell) / spec.total_qubits();
  const double a = std::sqrt(2.0 / 3.0) * mad * shrink;
  rep.zeta_positive = rep.zeta > 0.0;
  rep.bound_exact_variance = rep.zeta_positive ? a / std::sqrt(rep.zeta) : kInf;
  rep.bound_branch_small_ell = spec.deltaL > 0.0 ? a / (std::sqrt(2.0) * spec.deltaL) : kInf;
  rep.bound_branch_large_ell = ell > 0 ? a / std::sqrt(static_cast<double>(ell)) : kInf;
  return rep;
}

// Spin-coherent overlap grid on the (x, z) = (2 L_X / N, 2 L_Z / N) disk.
// Convention: mu counts up-spins and pairs with one factor of cos(theta/2)
// per up-spin, so a chi one-hot at mu = N peaks at z = +1. The phi branch is
// fixed to sin(phi) >= 0; real-amplitude spectra give the same Q on both
// branches.
struct QGrid {
  int resolution = 0;
  struct Sample {
    double x, z, Q;
  };
  std::vector<Sample> samples;
};

inline double q_value(const SectorSpectrum& chi, double x, double z) {
  const int N = chi.N;
  const double theta = std::acos(std::clamp(z, -1.0, 1.0));
  const double st = std::sqrt(std::max(0.0, 1.0 - z * z));
  double phi = 0.0;
  if (st > 0.0) phi = std::acos(std::clamp(x / st, -1.0, 1.0));
  const double lc = std::log(std::cos(theta / 2.0));
  const double ls = std::log(std::sin(theta / 2.0));  // -inf at theta = 0 handled below

  std::vector<double> g(static_cast<std::size_t>(N) + 1, kNegInf);
  double gmax = kNegInf;
  for (int mu = 0; mu <= N; ++mu) {
    if (chi[mu] <= 0.0) continue;
    // 0 * (-inf) at the poles must read as an absent factor, not NaN
    const double a = (mu > 0 ? mu * lc : 0.0) + (mu < N ? (N - mu) * ls : 0.0);
    if (a == kNegInf) continue;
    g[mu] = 0.5 * (std::log(chi[mu]) + log_binomial(N, mu).log_mag) + a;
    gmax = std::max(gmax, g[mu]);
  }
  if (gmax == kNegInf) return 0.0;
  std::complex<double> acc = 0.0;
  for (int mu = 0; mu <= N; ++mu) {
    if (g[mu] == kNegInf) continue;
    acc += std::exp(g[mu] - gmax) * std::polar(1.0, mu * phi);
  }
  return std::exp(2.0 * gmax) * std::norm(acc);
}

inline QGrid q_function(const BlackHoleSpec& spec, const SectorSpectrum& chi, int resolution) {
  spec.validate();
  if (resolution < 8) throw std::invalid_argument("q_function: resolution must be >= 8");
  QGrid grid;
  grid.resolution = resolution;
  for (int iz = 0; iz < resolution; ++iz) {
    const double z = -1.0 + 2.0 * iz / (resolution - 1);
    for (int ix = 0; ix < resolution; ++ix) {
      const double x = -1.0 + 2.0 * ix / (resolution - 1);
      if (x * x + z * z > 1.0) continue;
      grid.samples.push_back({x, z, q_value(chi, x, z)});
    }
  }
  return grid;
}

}  // namespace hpsym
