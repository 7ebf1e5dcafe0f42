#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "hpsym/logspace.hpp"
#include "hpsym/spectrum.hpp"

namespace hpsym {

// Binary entropy density of a spin chain at polarization lambda = L/N.
// Derivatives are kept in nats: that convention reproduces the exact
// hypergeometric variance at lambda = 0 (base 2 would be off by ln 2).
struct EntropyDensity {
  double lambda = 0.0;
  double s_bits = 0.0;
  double s_nats = 0.0;
  double s1 = 0.0;  // d s_nats / d lambda
  double s2 = 0.0;  // d^2 s_nats / d lambda^2
  bool derivs_defined = true;
};

inline EntropyDensity entropy_density(double lambda) {
  if (std::abs(lambda) > 0.5) throw std::invalid_argument("entropy_density: |lambda| must be <= 1/2");
  EntropyDensity e;
  e.lambda = lambda;
  const double a = 0.5 - lambda, b = 0.5 + lambda;
  if (a == 0.0 || b == 0.0) {
    e.s_bits = e.s_nats = 0.0;
    e.s1 = a == 0.0 ? -kInf : kInf;
    e.s2 = -kInf;
    e.derivs_defined = false;
    return e;
  }
  e.s_nats = -a * std::log(a) - b * std::log(b);
  e.s_bits = e.s_nats / kLn2;
  e.s1 = std::log(a / b);
  e.s2 = -1.0 / (0.25 - lambda * lambda);
  return e;
}

// Fixed-AM sector index of S: round(lambda N + (N+k)/2) to nearest, with the
// half-integer tie broken away from the central sector so that
// sector_index(-lambda) = N+k - sector_index(lambda) exactly.
inline long sector_index(const BlackHoleSpec& spec, double lambda) {
  const int M = spec.total_qubits();
  const double x = lambda * spec.N + M / 2.0;
  if (lambda < 0) return M - std::lround(M - x);
  return std::lround(x);
}

// Degree of clipping C(H_n) = H(B_in) + log2 C(ell,n) - log2 C(N+k-ell, sigma-n).
// Either sector empty means the (n, sigma-n) split carries no states; that is
// reported as -inf ("unreachable sector").
inline double clipping_degree(const BlackHoleSpec& spec, double chi_entropy_bits, int ell, long n,
                              double lambda) {
  const int M = spec.total_qubits();
  const long sigma = sector_index(spec, lambda);
  const LogReal rad = log_binomial(ell, n);
  const LogReal in = log_binomial(M - ell, sigma - n);
  if (rad.is_zero() || in.is_zero()) return -kInf;
  return chi_entropy_bits + (rad.log_mag - in.log_mag) / kLn2;
}

struct SectorStats {
  double mean_n = 0.0;
  double var_n_exact = 0.0;
  double var_n_approx = 0.0;
};

// Moments of the hypergeometric W(n): ell draws from a population of N+k
// with sigma up-spins. var_n_approx is the Gaussian-step value
// (1 - ell/(N+k)) ell / |s''(lambda)|.
inline SectorStats sector_stats(const BlackHoleSpec& spec, double lambda, int ell) {
  const int M = spec.total_qubits();
  const double sigma = static_cast<double>(sector_index(spec, lambda));
  const double f = sigma / M;
  SectorStats st;
  st.mean_n = ell * f;
  st.var_n_exact = M > 1 ? ell * f * (1.0 - f) * (M - ell) / (M - 1.0) : 0.0;
  const EntropyDensity e = entropy_density(lambda);
  st.var_n_approx = e.derivs_defined ? (1.0 - static_cast<double>(ell) / M) * ell / std::abs(e.s2) : 0.0;
  return st;
}

// Least ell such that the clipping condition C > k holds for every reachable
// integer n with |n - mean| <= c sqrt(var_exact). The window always contains
// round(mean) so c -> 0+ stays well-defined; -1 when no ell works.
inline int ell_hat_exact(const BlackHoleSpec& spec, double lambda, double H_bits, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("ell_hat_exact: c must be > 0");
  const int M = spec.total_qubits();
  for (int ell = 0; ell <= M; ++ell) {
    const SectorStats st = sector_stats(spec, lambda, ell);
    const double sd = std::sqrt(std::max(st.var_n_exact, 0.0));
    std::set<long> window;
    const long lo = static_cast<long>(std::ceil(st.mean_n - c * sd));
    const long hi = static_cast<long>(std::floor(st.mean_n + c * sd));
    for (long n = lo; n <= hi; ++n) window.insert(n);
    window.insert(std::lround(st.mean_n));
    bool ok = true;
    for (long n : window) {
      if (n < 0 || n > ell) continue;
      const double C = clipping_degree(spec, H_bits, ell, n, lambda);
      if (C == -kInf) continue;  // empty sector, zero weight
      if (!(C > spec.k)) {
        ok = false;
        break;
      }
    }
    if (ok) return ell;
  }
  return -1;
}

struct ClosedForm {
  double ell0 = 0.0;
  double ell_fl = 0.0;
  double C_ini = 0.0;
  bool ell0_in_range = true;
};

// ell0 = (k - C_ini) / (2 s_bits); ell_fl = (|s'|/s) sqrt(ell0 (1 - ell0/(N+k)) / |s''|).
inline ClosedForm ell_closed_form(const BlackHoleSpec& spec, double lambda, double H_bits) {
  if (std::abs(lambda) >= 0.5) throw std::invalid_argument("ell_closed_form: |lambda| must be < 1/2");
  const int M = spec.total_qubits();
  const EntropyDensity e = entropy_density(lambda);
  ClosedForm cf;
  cf.C_ini = H_bits - M * e.s_bits;
  cf.ell0 = (spec.k - cf.C_ini) / (2.0 * e.s_bits);
  cf.ell0_in_range = cf.ell0 >= 0.0 && cf.ell0 <= M;
  const double arg = cf.ell0 / std::abs(e.s2) * (1.0 - cf.ell0 / M);
  cf.ell_fl = (std::abs(e.s1) / e.s_nats) * std::sqrt(std::max(arg, 0.0));
  return cf;
}

struct ThermoQuantities {
  double T = 1.0;
  double omega = 0.0;
  double alpha = 0.0;
  bool alpha_defined = true;
  double omega_alpha = 0.0;  // T cancels exactly
  double L0 = 0.0;
  double L_fl_direct = 0.0;  // hbar lambda ell_fl
  double L_fl_thermo = 0.0;  // Z-axis-AM form from (L/S) sqrt(kB |omega alpha| (1 - L0/L) L0)
};

// Default H(B_in) input: 0 for the pure family, log2 C(N, lambda N + N/2) for
// the per-sector maximally entangled mixed family at deltaL -> 0.
inline double default_chi_entropy_bits(const BlackHoleSpec& spec, double lambda) {
  if (spec.kind == Purity::pure) return 0.0;
  const long mu = std::lround(lambda * spec.N + spec.N / 2.0);
  const LogReal b = log_binomial(spec.N, mu);
  return b.is_zero() ? 0.0 : b.log_mag / kLn2;
}

// High-temperature Kerr-BH thermodynamics with S = kB s(lambda) N.
inline ThermoQuantities thermodynamics(const BlackHoleSpec& spec, double lambda, double T,
                                       double hbar = 1.0, double kB = 1.0) {
  if (!(T > 0.0)) throw std::invalid_argument("thermodynamics: T must be > 0");
  if (std::abs(lambda) >= 0.5) throw std::invalid_argument("thermodynamics: |lambda| must be < 1/2");
  const EntropyDensity e = entropy_density(lambda);
  const ClosedForm cf = ell_closed_form(spec, lambda, default_chi_entropy_bits(spec, lambda));

  ThermoQuantities tq;
  tq.T = T;
  tq.omega = kB * T * e.s1 / hbar;
  if (lambda == 0.0) {
    tq.alpha = std::numeric_limits<double>::quiet_NaN();
    tq.alpha_defined = false;
    tq.omega_alpha = std::numeric_limits<double>::quiet_NaN();
  } else {
    tq.alpha = -e.s1 / (e.s2 * lambda * T);
    tq.omega_alpha = tq.omega * tq.alpha;
  }
  tq.L0 = hbar * lambda * cf.ell0;
  tq.L_fl_direct = hbar * lambda * cf.ell_fl;
  if (tq.alpha_defined) {
    const double L = hbar * lambda * spec.N;
    const double S = kB * e.s_nats * spec.N;
    const double arg = kB * std::abs(tq.omega_alpha) * (1.0 - tq.L0 / L) * tq.L0;
    tq.L_fl_thermo = (L / S) * std::sqrt(std::max(arg, 0.0)) * (lambda < 0 ? -1.0 : 1.0);
  } else {
    tq.L_fl_thermo = 0.0;
  }
  return tq;
}

struct ClippingReport {
  double lambda = 0.0;
  double c = 0.0;
  double H_bits = 0.0;
  int ell_hat_exact = -1;
  double ell0 = 0.0;
  double ell_fl = 0.0;
  double ell_hat_closed = 0.0;
  double C_ini = 0.0;
  double mean_n = 0.0;
  double var_n = 0.0;
  ThermoQuantities thermo;
};

inline ClippingReport clipping_report(const BlackHoleSpec& spec, double lambda, double c,
                                      double H_bits, double T = 1.0) {
  ClippingReport rep;
  rep.lambda = lambda;
  rep.c = c;
  rep.H_bits = H_bits;
  rep.ell_hat_exact = ell_hat_exact(spec, lambda, H_bits, c);
  const ClosedForm cf = ell_closed_form(spec, lambda, H_bits);
  rep.ell0 = cf.ell0;
  rep.ell_fl = cf.ell_fl;
  rep.ell_hat_closed = cf.ell0 + c * cf.ell_fl;
  rep.C_ini = cf.C_ini;
  if (rep.ell_hat_exact >= 0) {
    const SectorStats st = sector_stats(spec, lambda, rep.ell_hat_exact);
    rep.mean_n = st.mean_n;
    rep.var_n = st.var_n_exact;
  }
  rep.thermo = thermodynamics(spec, lambda, T);
  return rep;
}

// Matched smoothing pairs (target error level Delta <-> window width c).
struct DeltaCPair {
  double Delta;
  double c;
};

inline std::vector<DeltaCPair> delta_c_presets(Purity kind) {
  if (kind == Purity::pure) return {{0.005, 3.4}, {0.05, 2.6}, {0.5, 1.6}};
  return {{0.005, 10.8}, {0.05, 8.7}, {0.5, 6.2}};
}

}  // namespace hpsym
