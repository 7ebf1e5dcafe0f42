#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpsym/logspace.hpp"

namespace hpsym {

enum class Purity { pure, mixed };

inline const char* to_string(Purity p) { return p == Purity::pure ? "pure" : "mixed"; }

inline Purity purity_from_string(const std::string& s) {
  if (s == "pure") return Purity::pure;
  if (s == "mixed") return Purity::mixed;
  throw std::invalid_argument("unknown purity kind: " + s);
}

// Protocol parameters for one scenario. N qubits in the initial BH, k thrown
// in, target Z-axis AM L and its standard deviation deltaL (spin-1/2 units,
// hbar = 1).
struct BlackHoleSpec {
  int N = 0;
  int k = 0;
  double L = 0.0;
  double deltaL = 0.0;
  Purity kind = Purity::pure;

  void validate() const {
    if (N < 1) throw std::invalid_argument("BlackHoleSpec: N must be >= 1");
    if (k < 1) throw std::invalid_argument("BlackHoleSpec: k must be >= 1");
    if (std::abs(L) > N / 2.0) throw std::invalid_argument("BlackHoleSpec: |L| must be <= N/2");
    if (deltaL < 0) throw std::invalid_argument("BlackHoleSpec: deltaL must be >= 0");
  }

  int total_qubits() const { return N + k; }
};

// Sector weights chi_mu = tr[xi Pi_mu] over up-spin counts mu in [0, N].
struct SectorSpectrum {
  int N = 0;
  std::vector<double> chi;  // size N + 1

  double operator[](long mu) const {
    if (mu < 0 || mu > N) return 0.0;
    return chi[static_cast<std::size_t>(mu)];
  }

  double sum() const {
    double s = 0.0;
    for (double c : chi) s += c;
    return s;
  }
};

// chi_mu proportional to exp[-(mu - L - N/2)^2 / (2 deltaL^2)], sampled on
// integer mu and renormalized; realized std matches deltaL away from the
// domain boundaries. deltaL = 0 degenerates to the indicator of
// round(L + N/2).
inline SectorSpectrum gaussian_spectrum(const BlackHoleSpec& spec) {
  spec.validate();
  const int N = spec.N;
  SectorSpectrum out{N, std::vector<double>(static_cast<std::size_t>(N) + 1, 0.0)};
  const double center = spec.L + N / 2.0;
  if (spec.deltaL == 0.0) {
    const long mu0 = std::lround(center);
    out.chi[static_cast<std::size_t>(std::min<long>(std::max<long>(mu0, 0), N))] = 1.0;
    return out;
  }
  const double inv = 1.0 / (2.0 * spec.deltaL * spec.deltaL);
  double emax = kNegInf;
  std::vector<double> e(out.chi.size());
  for (int mu = 0; mu <= N; ++mu) {
    const double d = mu - center;
    e[mu] = -d * d * inv;
    emax = std::max(emax, e[mu]);
  }
  double norm = 0.0;
  for (int mu = 0; mu <= N; ++mu) {
    out.chi[mu] = std::exp(e[mu] - emax);
    norm += out.chi[mu];
  }
  for (double& c : out.chi) c /= norm;
  return out;
}

struct SpectrumMoments {
  double L_realized = 0.0;
  double deltaL_realized = 0.0;
};

inline SpectrumMoments moments(const SectorSpectrum& s) {
  double mean = 0.0;
  for (int mu = 0; mu <= s.N; ++mu) mean += s.chi[mu] * (mu - s.N / 2.0);
  double var = 0.0;
  for (int mu = 0; mu <= s.N; ++mu) {
    const double d = mu - s.N / 2.0 - mean;
    var += s.chi[mu] * d * d;
  }
  return {mean, std::sqrt(var)};
}

}  // namespace hpsym
