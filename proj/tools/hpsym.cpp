// Command-line front end: reproduces the bounds, delay, clipping, remnant,
// Q-function, and Monte-Carlo validation outputs as CSV/JSON/SVG files.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hpsym/bounds.hpp"
#include "hpsym/clipping.hpp"
#include "hpsym/format.hpp"
#include "hpsym/parallel.hpp"
#include "hpsym/remnant.hpp"
#include "hpsym/validate.hpp"

namespace {

using json = nlohmann::json;
using namespace hpsym;

constexpr int kExitUsage = 2;
constexpr int kExitGuard = 3;

struct Range {
  double lo = 0.0, hi = 0.0, step = 1.0;
};

Range parse_range(const std::string& s) {
  Range r;
  char c1 = 0, c2 = 0;
  std::istringstream is(s);
  if (!(is >> r.lo >> c1 >> r.hi >> c2 >> r.step) || c1 != ':' || c2 != ':' || r.step <= 0)
    throw CLI::ValidationError("range", "expected lo:hi:step with step > 0, got '" + s + "'");
  return r;
}

std::vector<double> expand(const Range& r) {
  std::vector<double> v;
  for (double x = r.lo; x <= r.hi + 1e-9 * r.step; x += r.step) v.push_back(x);
  return v;
}

double resolve_dL(double coeff, const std::string& scale, int N) {
  if (scale == "sqrt") return coeff * std::sqrt(static_cast<double>(N));
  if (scale == "linear") return coeff * N;
  if (scale == "absolute") return coeff;
  throw CLI::ValidationError("dL-scale", "must be sqrt, linear or absolute");
}

// ---- output ----------------------------------------------------------------

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

void write_stream(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + out);
  f << text;
}

std::string csv_text(const Table& t, const json& config, std::uint64_t seed) {
  std::ostringstream os;
  os << "# hpsym " << kVersion << "\n";
  os << "# config " << config.dump() << "\n";
  os << "# seed " << seed << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    os << t.columns[i] << (i + 1 < t.columns.size() ? "," : "\n");
  for (const auto& row : t.rows)
    for (std::size_t i = 0; i < row.size(); ++i) os << row[i] << (i + 1 < row.size() ? "," : "\n");
  return os.str();
}

std::string json_text(const Table& t, const json& config, std::uint64_t seed) {
  json out;
  out["version"] = kVersion;
  out["config"] = config;
  out["seed"] = seed;
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r;
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = row[i];
    rows.push_back(r);
  }
  out["rows"] = rows;
  return out.dump(2) + "\n";
}

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> pts;
};

// Minimal SVG line plot; log-y when every value is positive and spans decades.
std::string svg_plot(const std::vector<Series>& series, const std::string& xlabel,
                     const std::string& ylabel, const json& config, std::uint64_t seed) {
  const int W = 720, H = 480, ML = 70, MR = 20, MT = 20, MB = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  bool logy = true;
  for (const auto& s : series)
    for (auto [x, y] : s.pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      if (y <= 0) logy = false;
    }
  const double floor_y = 1e-16;
  for (const auto& s : series)
    for (auto [x, y] : s.pts) {
      const double v = logy ? std::log10(std::max(y, floor_y)) : y;
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
  auto py = [&](double y) {
    const double v = logy ? std::log10(std::max(y, floor_y)) : y;
    return H - MB - (v - ymin) / (ymax - ymin) * (H - MT - MB);
  };
  static const char* colors[] = {"#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d35400", "#16a085"};
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  os << "<!-- hpsym " << kVersion << " seed " << seed << " config " << config.dump() << " -->\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<line x1='" << ML << "' y1='" << H - MB << "' x2='" << W - MR << "' y2='" << H - MB
     << "' stroke='black'/>\n";
  os << "<line x1='" << ML << "' y1='" << MT << "' x2='" << ML << "' y2='" << H - MB
     << "' stroke='black'/>\n";
  os << "<text x='" << (W / 2) << "' y='" << H - 12 << "' font-size='14'>" << xlabel
     << "</text>\n";
  os << "<text x='16' y='" << (H / 2) << "' font-size='14' transform='rotate(-90 16 " << (H / 2)
     << ")'>" << ylabel << (logy ? " (log)" : "") << "</text>\n";
  int ci = 0;
  for (const auto& s : series) {
    os << "<polyline fill='none' stroke='" << colors[ci % 6] << "' stroke-width='1.5' points='";
    for (auto [x, y] : s.pts) os << px(x) << "," << py(y) << " ";
    os << "'/>\n";
    os << "<text x='" << W - MR - 150 << "' y='" << MT + 16 * (ci + 1) << "' font-size='12' fill='"
       << colors[ci % 6] << "'>" << s.name << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
  return os.str();
}

// ---- shared options ---------------------------------------------------------

struct Common {
  int N = 0;
  int k = 1;
  double L = 0.0;
  double dL_coeff = 0.0;
  std::string dL_scale = "sqrt";
  std::string kind = "pure";
  std::string out;
  std::string format = "csv";
  std::size_t workers = 0;
  std::uint64_t seed = 0;

  BlackHoleSpec spec() const {
    BlackHoleSpec s;
    s.N = N;
    s.k = k;
    s.L = L;
    s.deltaL = resolve_dL(dL_coeff, dL_scale, N);
    s.kind = purity_from_string(kind);
    s.validate();
    return s;
  }
  json config(const char* cmd) const {
    json j;
    j["subcommand"] = cmd;
    j["N"] = N;
    j["k"] = k;
    j["L"] = L;
    j["dL-coeff"] = dL_coeff;
    j["dL-scale"] = dL_scale;
    j["kind"] = kind;
    j["format"] = format;
    // worker count is an execution knob, not part of the scientific config;
    // leaving it out keeps outputs byte-identical across --workers values
    return j;
  }
};

void add_common(CLI::App* cmd, Common& c, bool need_N = true) {
  auto* n = cmd->add_option("--N", c.N, "qubits in the initial BH");
  if (need_N) n->required();
  cmd->add_option("--k", c.k, "qubits thrown in");
  cmd->add_option("--L", c.L, "target Z-axis AM");
  cmd->add_option("--dL-coeff", c.dL_coeff, "deltaL coefficient");
  cmd->add_option("--dL-scale", c.dL_scale, "deltaL scale: sqrt|linear|absolute")
      ->check(CLI::IsMember({"sqrt", "linear", "absolute"}));
  cmd->add_option("--kind", c.kind, "pure|mixed")->check(CLI::IsMember({"pure", "mixed"}));
  cmd->add_option("--out", c.out, "output path (default stdout)");
  cmd->add_option("--format", c.format, "csv|json|svg")
      ->check(CLI::IsMember({"csv", "json", "svg"}));
  cmd->add_option("--workers", c.workers, "worker threads (overrides HPSYM_THREADS)");
  cmd->add_option("--seed", c.seed, "RNG seed where applicable");
}

void emit(const Table& t, const Common& c, const json& config,
          const std::vector<Series>& series, const std::string& xlabel,
          const std::string& ylabel) {
  if (c.format == "csv")
    write_stream(c.out, csv_text(t, config, c.seed));
  else if (c.format == "json")
    write_stream(c.out, json_text(t, config, c.seed));
  else
    write_stream(c.out, svg_plot(series, xlabel, ylabel, config, c.seed));
}

// ---- subcommands ------------------------------------------------------------

int cmd_bounds(const Common& c, const std::string& ell_range, const std::string& spectrum_out,
               const std::string& pn_out, int pn_ell) {
  const BlackHoleSpec spec = c.spec();
  const SectorSpectrum chi = gaussian_spectrum(spec);
  const int M = spec.total_qubits();

  if (!spectrum_out.empty()) {
    Table t;
    t.columns = {"mu", "chi"};
    for (int mu = 0; mu <= spec.N; ++mu)
      t.rows.push_back({fmt_int(mu), fmt_real(chi.chi[mu])});
    write_stream(spectrum_out, csv_text(t, c.config("bounds"), c.seed));
  }
  if (!pn_out.empty()) {
    const int le = pn_ell < 0 ? M : pn_ell;
    const auto d = radiation_distribution(spec, chi, le);
    Table t;
    t.columns = {"n", "p_n"};
    for (int n = 0; n <= le; ++n) t.rows.push_back({fmt_int(n), fmt_real(d.p[n])});
    write_stream(pn_out, csv_text(t, c.config("bounds"), c.seed));
  }

  Range r{0, static_cast<double>(M), 1};
  if (!ell_range.empty()) r = parse_range(ell_range);
  std::vector<double> ells = expand(r);

  std::vector<BoundsReport> reps(ells.size());
  parallel_for(
      ells.size(),
      [&](std::size_t i) { reps[i] = recovery_bounds(spec, chi, static_cast<int>(ells[i])); },
      c.workers);

  json config = c.config("bounds");
  config["ell-range"] = ell_range.empty() ? "0:" + std::to_string(M) + ":1" : ell_range;
  Table t;
  t.columns = {"N",       "k",     "kind",        "L",
               "dL",      "ell",   "theta",       "eta",
               "delta_inv_bound",  "delta_tot_bound", "opt_epsilon",
               "w_opt",   "log_d_min"};
  Series si{"delta_inv_bound", {}}, st{"delta_tot_bound", {}};
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& rep = reps[i];
    t.rows.push_back({fmt_int(spec.N), fmt_int(spec.k), to_string(spec.kind), fmt_real(spec.L),
                      fmt_real(spec.deltaL), fmt_int(rep.ell), fmt_real(rep.theta),
                      fmt_real(rep.eta), fmt_real(rep.delta_inv_bound),
                      fmt_real(rep.delta_tot_bound), fmt_real(rep.opt_epsilon),
                      fmt_real(rep.w_opt),
                      rep.d_min_defined ? fmt_real(rep.d_min_opt.log_mag) : "nan"});
    si.pts.push_back({static_cast<double>(rep.ell), rep.delta_inv_bound});
    st.pts.push_back({static_cast<double>(rep.ell), rep.delta_tot_bound});
  }
  emit(t, c, config, {si, st}, "ell", "recovery error bound");
  return 0;
}

int cmd_delay(const Common& c, double Delta, const std::string& lambda_grid,
              const std::string& sweep_N, bool fit, bool force_sweep) {
  json config = c.config("delay");
  config["Delta"] = Delta;
  Table t;
  t.columns = {"N", "k", "kind", "Delta", "lambda", "L", "dL", "ell_Delta", "baseline", "delay"};
  Series sd{"delay", {}};

  auto fmt_ell = [](const DelayReport& r) {
    return r.reached ? fmt_int(r.ell_Delta) : std::string("unreached");
  };

  if (!sweep_N.empty() || force_sweep) {
    if (sweep_N.empty()) throw CLI::ValidationError("--sweep-N", "scaling requires --sweep-N");
    config["sweep-N"] = sweep_N;
    const auto Ns = expand(parse_range(sweep_N));
    std::vector<DelayReport> reps(Ns.size());
    std::vector<BlackHoleSpec> specs(Ns.size());
    parallel_for(
        Ns.size(),
        [&](std::size_t i) {
          Common ci = c;
          ci.N = static_cast<int>(Ns[i]);
          specs[i] = ci.spec();
          reps[i] = ell_delta(specs[i], gaussian_spectrum(specs[i]), Delta);
        },
        c.workers);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < Ns.size(); ++i) {
      const auto& r = reps[i];
      t.rows.push_back({fmt_int(specs[i].N), fmt_int(specs[i].k), to_string(specs[i].kind),
                        fmt_real(Delta), "nan", fmt_real(specs[i].L), fmt_real(specs[i].deltaL),
                        fmt_ell(r), r.baseline_reached ? fmt_int(r.baseline) : "unreached",
                        (r.reached && r.baseline_reached) ? fmt_int(r.delay) : "nan"});
      if (r.reached && r.baseline_reached) {
        xs.push_back(Ns[i]);
        ys.push_back(r.delay);
        sd.pts.push_back({Ns[i], static_cast<double>(r.delay)});
      }
    }
    if (fit && xs.size() >= 2) {
      // least squares of a * N^p in linear space: scan p, closed-form a
      double best_sse = 1e300, best_a = 0, best_p = 0;
      for (double p = 0.0; p <= 2.0; p += 0.0005) {
        double num = 0, den = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          const double w = std::pow(xs[i], p);
          num += ys[i] * w;
          den += w * w;
        }
        const double a = num / den;
        double sse = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          const double e = a * std::pow(xs[i], p) - ys[i];
          sse += e * e;
        }
        if (sse < best_sse) {
          best_sse = sse;
          best_a = a;
          best_p = p;
        }
      }
      // and the a x + b sqrt(x) + c form via normal equations
      double A[3][4] = {};
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double basis[3] = {xs[i], std::sqrt(xs[i]), 1.0};
        for (int r0 = 0; r0 < 3; ++r0) {
          for (int c0 = 0; c0 < 3; ++c0) A[r0][c0] += basis[r0] * basis[c0];
          A[r0][3] += basis[r0] * ys[i];
        }
      }
      for (int col = 0; col < 3; ++col) {  // Gaussian elimination
        int piv = col;
        for (int r0 = col + 1; r0 < 3; ++r0)
          if (std::abs(A[r0][col]) > std::abs(A[piv][col])) piv = r0;
        std::swap(A[col], A[piv]);
        for (int r0 = 0; r0 < 3; ++r0) {
          if (r0 == col || A[col][col] == 0.0) continue;
          const double f = A[r0][col] / A[col][col];
          for (int c0 = col; c0 < 4; ++c0) A[r0][c0] -= f * A[col][c0];
        }
      }
      config["fit_power"] = {{"a", best_a}, {"p", best_p}};
      config["fit_sqrt"] = {{"a", A[0][3] / A[0][0]},
                            {"b", A[1][3] / A[1][1]},
                            {"c", A[2][3] / A[2][2]}};
    }
    emit(t, c, config, {sd}, "N", "delay");
    return 0;
  }

  if (!lambda_grid.empty()) {
    config["lambda-grid"] = lambda_grid;
    const auto lams = expand(parse_range(lambda_grid));
    std::vector<DelayReport> reps(lams.size());
    BlackHoleSpec proto = c.spec();
    parallel_for(
        lams.size(),
        [&](std::size_t i) {
          BlackHoleSpec s = proto;
          s.L = lams[i] * s.N;
          s.deltaL = 0.0;
          reps[i] = ell_delta(s, gaussian_spectrum(s), Delta);
        },
        c.workers);
    for (std::size_t i = 0; i < lams.size(); ++i) {
      const auto& r = reps[i];
      t.rows.push_back({fmt_int(proto.N), fmt_int(proto.k), to_string(proto.kind), fmt_real(Delta),
                        fmt_real(lams[i]), fmt_real(lams[i] * proto.N), fmt_real(0.0), fmt_ell(r),
                        r.baseline_reached ? fmt_int(r.baseline) : "unreached",
                        (r.reached && r.baseline_reached) ? fmt_int(r.delay) : "nan"});
      if (r.reached && r.baseline_reached)
        sd.pts.push_back({lams[i], static_cast<double>(r.delay)});
    }
    emit(t, c, config, {sd}, "lambda", "delay");
    return 0;
  }

  const BlackHoleSpec spec = c.spec();
  const auto r = ell_delta(spec, gaussian_spectrum(spec), Delta);
  t.rows.push_back({fmt_int(spec.N), fmt_int(spec.k), to_string(spec.kind), fmt_real(Delta), "nan",
                    fmt_real(spec.L), fmt_real(spec.deltaL), fmt_ell(r),
                    r.baseline_reached ? fmt_int(r.baseline) : "unreached",
                    (r.reached && r.baseline_reached) ? fmt_int(r.delay) : "nan"});
  emit(t, c, config, {sd}, "lambda", "delay");
  return 0;
}

int cmd_clipping(const Common& c, double cval, const std::string& lambda_grid, double lambda_one,
                 double H_override, bool has_H, double T) {
  BlackHoleSpec proto = c.spec();
  json config = c.config("clipping");
  config["c"] = cval;
  config["T"] = T;
  std::vector<double> lams =
      lambda_grid.empty() ? std::vector<double>{lambda_one} : expand(parse_range(lambda_grid));
  if (!lambda_grid.empty()) config["lambda-grid"] = lambda_grid;
  if (has_H) config["H"] = H_override;

  std::vector<ClippingReport> reps(lams.size());
  parallel_for(
      lams.size(),
      [&](std::size_t i) {
        const double H = has_H ? H_override : default_chi_entropy_bits(proto, lams[i]);
        reps[i] = clipping_report(proto, lams[i], cval, H, T);
      },
      c.workers);

  Table t;
  t.columns = {"lambda", "c",     "ell_hat_exact", "ell0", "ell_fl",
               "ell_hat_closed",  "C_ini",         "omega_alpha_product", "L_fl"};
  Series se{"ell_hat_exact", {}}, sc{"ell_hat_closed", {}};
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& r = reps[i];
    t.rows.push_back({fmt_real(r.lambda), fmt_real(r.c),
                      r.ell_hat_exact >= 0 ? fmt_int(r.ell_hat_exact) : "unreached",
                      fmt_real(r.ell0), fmt_real(r.ell_fl), fmt_real(r.ell_hat_closed),
                      fmt_real(r.C_ini), fmt_real(r.thermo.omega_alpha),
                      fmt_real(r.thermo.L_fl_direct)});
    if (r.ell_hat_exact >= 0) se.pts.push_back({r.lambda, static_cast<double>(r.ell_hat_exact)});
    sc.pts.push_back({r.lambda, r.ell_hat_closed});
  }
  emit(t, c, config, {se, sc}, "lambda", "ell");
  return 0;
}

int cmd_remnant(const Common& c, const std::string& ell_range) {
  const BlackHoleSpec spec = c.spec();
  const SectorSpectrum chi = gaussian_spectrum(spec);
  const int M = spec.total_qubits();
  Range r{0, static_cast<double>(M), 1};
  if (!ell_range.empty()) r = parse_range(ell_range);
  const auto ells = expand(r);

  std::vector<RemnantReport> reps(ells.size());
  parallel_for(
      ells.size(),
      [&](std::size_t i) { reps[i] = remnant_bounds(spec, chi, static_cast<int>(ells[i])); },
      c.workers);

  json config = c.config("remnant");
  config["ell-range"] = ell_range.empty() ? "0:" + std::to_string(M) + ":1" : ell_range;
  config["zeta_initial"] = zeta_initial(chi);
  Table t;
  t.columns = {"ell",        "eta_exact",      "var_nu",        "zeta",
               "bound_exact", "bound_small_ell", "bound_large_ell"};
  Series se{"eta_exact", {}}, sb{"bound_exact", {}};
  for (const auto& rep : reps) {
    t.rows.push_back({fmt_int(rep.ell), fmt_real(rep.eta_exact), fmt_real(rep.var_nu),
                      fmt_real(rep.zeta), fmt_real(rep.bound_exact_variance),
                      fmt_real(rep.bound_branch_small_ell),
                      fmt_real(rep.bound_branch_large_ell)});
    se.pts.push_back({static_cast<double>(rep.ell), rep.eta_exact});
    sb.pts.push_back({static_cast<double>(rep.ell), rep.bound_exact_variance});
  }
  emit(t, c, config, {se, sb}, "ell", "eta");
  return 0;
}

int cmd_qfunc(const Common& c, int resolution) {
  const BlackHoleSpec spec = c.spec();
  const SectorSpectrum chi = gaussian_spectrum(spec);
  const QGrid grid = q_function(spec, chi, resolution);
  json config = c.config("qfunc");
  config["resolution"] = resolution;
  Table t;
  t.columns = {"x", "z", "Q"};
  for (const auto& s : grid.samples)
    t.rows.push_back({fmt_real(s.x), fmt_real(s.z), fmt_real(s.Q)});
  if (c.format == "svg") {
    // density as shaded cells
    std::ostringstream os;
    const int W = 560;
    const double cell = static_cast<double>(W) / resolution;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << W << "'>\n";
    os << "<!-- hpsym " << kVersion << " config " << config.dump() << " -->\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    for (const auto& s : grid.samples) {
      const int shade = static_cast<int>(255.0 * (1.0 - std::min(1.0, s.Q)));
      os << "<rect x='" << (s.x + 1.0) / 2.0 * (W - cell) << "' y='"
         << (1.0 - (s.z + 1.0) / 2.0) * (W - cell) << "' width='" << cell << "' height='" << cell
         << "' fill='rgb(" << shade << "," << shade << ",255)'/>\n";
    }
    os << "</svg>\n";
    write_stream(c.out, os.str());
    return 0;
  }
  emit(t, c, config, {}, "x", "Q");
  return 0;
}

int cmd_validate(const Common& c, int ell, int samples, double delta, long d_th,
                 const std::string& distances_out) {
  if (c.format != "json" && c.format != "csv")
    throw CLI::ValidationError("--format", "validate emits json (report) or csv (distances)");
  const BlackHoleSpec spec = c.spec();
  const SectorSpectrum chi = gaussian_spectrum(spec);
  const ValidationReport rep =
      run_validation(spec, chi, ell, samples, c.seed, delta, c.workers, d_th);

  json config = c.config("validate");
  config["ell"] = ell;
  config["samples"] = samples;
  config["delta"] = delta;
  if (d_th > 0) config["d-th"] = d_th;

  if (!distances_out.empty()) {
    Table t;
    t.columns = {"sample", "trace_distance"};
    for (int i = 0; i < samples; ++i)
      t.rows.push_back({fmt_int(i), fmt_real(rep.distances[i])});
    write_stream(distances_out, csv_text(t, config, c.seed));
  }

  json out;
  out["version"] = kVersion;
  out["config"] = config;
  out["seed"] = rep.seed;
  out["epsilon"] = rep.epsilon;
  out["theta_bound"] = rep.theta_bound;
  out["theta_vacuous"] = rep.theta_vacuous;
  out["expectation_bound"] = rep.expectation_bound;
  out["expectation_vacuous"] = rep.expectation_vacuous;
  out["expectation_ok"] = rep.expectation_ok;
  out["tail"] = rep.tail;
  out["log_d_min"] = rep.log_d_min;
  out["mean_distance"] = rep.mean_distance;
  out["violations"] = rep.violations;
  out["violation_fraction"] = rep.violation_fraction;
  out["violation_ok"] = rep.violation_ok;
  out["mean_state_distance"] = rep.mean_state_distance;
  out["quarter_distances"] = rep.quarter_distances;
  out["quarter_mean"] = rep.quarter_mean;
  out["quarter_std"] = rep.quarter_std;
  out["halving_ok"] = rep.halving_ok;
  if (rep.d_th > 0) {
    out["d_th"] = rep.d_th;
    out["corollary_eps"] = rep.corollary_eps;
    out["corollary_bound"] = rep.corollary_bound;
    out["corollary_tail"] = rep.corollary_tail;
    out["corollary_vacuous"] = rep.corollary_vacuous;
    out["corollary_ok"] = rep.corollary_ok;
  }
  write_stream(c.out, out.dump(2) + "\n");
  return 0;
}

// Apply a flat JSON config file as option defaults; explicit flags win.
void apply_config_defaults(CLI::App& app, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CLI::ValidationError("--config", "cannot open " + path);
  json j = json::parse(f, nullptr, true, true);
  if (!j.is_object()) throw CLI::ValidationError("--config", "expected a flat JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string flag = "--" + it.key();
    bool found = false;
    auto apply = [&](CLI::App* a) {
      if (CLI::Option* opt = a->get_option_no_throw(flag)) {
        const std::string v =
            it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
        opt->default_val(v);
        opt->required(false);  // a config value satisfies a required option
        found = true;
      }
    };
    apply(&app);
    for (auto* sub : app.get_subcommands({})) apply(sub);
    if (!found) throw CLI::ValidationError("--config", "unknown key: " + it.key());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kerr-BH information leakage numerics (partial decoupling, clipping, remnant)"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "flat JSON config; flags override file values");

  Common cb, cd, cs, cc, cr, cq, cv;

  auto* bounds_cmd = app.add_subcommand("bounds", "recovery-error bounds vs ell");
  add_common(bounds_cmd, cb);
  std::string b_ell_range, b_spec_out, b_pn_out;
  int b_pn_ell = -1;
  bounds_cmd->add_option("--ell-range", b_ell_range, "lo:hi:step (default 0:N+k:1)");
  bounds_cmd->add_option("--export-spectrum", b_spec_out, "write mu,chi CSV");
  bounds_cmd->add_option("--export-pn", b_pn_out, "write n,p_n CSV");
  bounds_cmd->add_option("--pn-ell", b_pn_ell, "ell for --export-pn (default N+k)");

  auto* delay_cmd = app.add_subcommand("delay", "ell_Delta and delays");
  add_common(delay_cmd, cd);
  double d_Delta = 0.05;
  std::string d_lambda_grid, d_sweep_N;
  bool d_fit = false;
  delay_cmd->add_option("--Delta", d_Delta, "target error level");
  auto* lg_opt =
      delay_cmd->add_option("--lambda-grid", d_lambda_grid, "lo:hi:step over lambda = L/N (dL = 0)");
  delay_cmd->add_option("--sweep-N", d_sweep_N, "lo:hi:step over N (L = 0)")->excludes(lg_opt);
  delay_cmd->add_flag("--fit", d_fit, "fit a*N^p and a*x+b*sqrt(x)+c to the delay");

  auto* scaling_cmd = app.add_subcommand("scaling", "alias of delay --sweep-N");
  add_common(scaling_cmd, cs);
  double s_Delta = 0.1;
  std::string s_sweep_N;
  bool s_fit = false;
  scaling_cmd->add_option("--Delta", s_Delta, "target error level");
  scaling_cmd->add_option("--sweep-N", s_sweep_N, "lo:hi:step over N (L = 0)");
  scaling_cmd->add_flag("--fit", s_fit, "fit a*N^p and a*x+b*sqrt(x)+c");

  auto* clip_cmd = app.add_subcommand("clipping", "entanglement-clipping thresholds");
  add_common(clip_cmd, cc);
  double c_c = 2.6, c_lambda = 0.0, c_H = 0.0, c_T = 1.0;
  std::string c_lambda_grid;
  clip_cmd->add_option("--c", c_c, "window width parameter");
  clip_cmd->add_option("--lambda-grid", c_lambda_grid, "lo:hi:step over lambda");
  clip_cmd->add_option("--lambda", c_lambda, "single lambda");
  auto* h_opt = clip_cmd->add_option("--H", c_H, "override H(B_in) in bits");
  clip_cmd->add_option("--T", c_T, "temperature for the thermodynamic report");

  auto* rem_cmd = app.add_subcommand("remnant", "information-remnant diagnostics vs ell");
  add_common(rem_cmd, cr);
  std::string r_ell_range;
  rem_cmd->add_option("--ell-range", r_ell_range, "lo:hi:step (default 0:N+k:1)");

  auto* q_cmd = app.add_subcommand("qfunc", "spin-coherent Q function on the disk");
  add_common(q_cmd, cq);
  int q_res = 64;
  q_cmd->add_option("--resolution", q_res, "grid resolution per axis (>= 8)");

  auto* val_cmd = app.add_subcommand("validate", "Monte-Carlo partial-decoupling check");
  add_common(val_cmd, cv);
  int v_ell = 1, v_samples = 1000;
  double v_delta = 0.2;
  long v_dth = 0;
  std::string v_dist_out;
  val_cmd->add_option("--ell", v_ell, "radiated qubits");
  val_cmd->add_option("--samples", v_samples, "number of sampled unitaries");
  val_cmd->add_option("--delta", v_delta, "delta in Theta^{delta,eps}");
  val_cmd->add_option("--d-th", v_dth, "threshold dimension for the refined-tail check");
  val_cmd->add_option("--distances-out", v_dist_out, "write per-sample distances CSV");
  cv.format = "json";

  try {
    // pre-scan for --config so file values become defaults before parsing
    for (int i = 1; i + 1 < argc; ++i)
      if (std::string(argv[i]) == "--config") apply_config_defaults(app, argv[i + 1]);
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (bounds_cmd->parsed()) return cmd_bounds(cb, b_ell_range, b_spec_out, b_pn_out, b_pn_ell);
    if (delay_cmd->parsed()) return cmd_delay(cd, d_Delta, d_lambda_grid, d_sweep_N, d_fit, false);
    if (scaling_cmd->parsed()) return cmd_delay(cs, s_Delta, "", s_sweep_N, s_fit, true);
    if (clip_cmd->parsed())
      return cmd_clipping(cc, c_c, c_lambda_grid, c_lambda, c_H, h_opt->count() > 0, c_T);
    if (rem_cmd->parsed()) return cmd_remnant(cr, r_ell_range);
    if (q_cmd->parsed()) return cmd_qfunc(cq, q_res);
    if (val_cmd->parsed()) return cmd_validate(cv, v_ell, v_samples, v_delta, v_dth, v_dist_out);
  } catch (const numerical_guard_error& e) {
    std::cerr << "numerical guard: " << e.what() << "\n";
    return kExitGuard;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
