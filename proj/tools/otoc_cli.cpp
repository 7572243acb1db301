// Command-line driver for the correlator laboratory: one subcommand per
// pipeline stage, every stage reading the same plain-text run configuration
// and writing CSV/JSON artifacts with provenance sidecars into the
// configured output directory.  Reruns with identical inputs are
// byte-identical.  Exit codes: 0 ok, 1 configuration/usage error, 2
// computation failure.
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "otoc/classical_otoc.hpp"
#include "otoc/compare.hpp"
#include "otoc/config.hpp"
#include "otoc/dynamics.hpp"
#include "otoc/figures.hpp"
#include "otoc/geometry.hpp"
#include "otoc/periodic_orbits.hpp"
#include "otoc/quantum_otoc.hpp"
#include "otoc/rng.hpp"
#include "otoc/semiclassics.hpp"
#include "otoc/series.hpp"
#include "otoc/spectral.hpp"

namespace {

using otoc::io::ConfigError;
using otoc::io::OtocSeries;
using otoc::io::RunConfig;

struct CliState {
  std::string config_path;
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;
  bool force = false;
  int threads = 0;
};

RunConfig load_run_config(const CliState& st) {
  RunConfig cfg;
  if (!st.config_path.empty()) cfg = otoc::io::load_config(st.config_path);
  if (st.has_seed_override) cfg.seed = st.seed_override;
  otoc::io::validate(cfg);
  return cfg;
}

RunConfig prepare(const CliState& st) {
  RunConfig cfg = load_run_config(st);
  std::filesystem::create_directories(cfg.output_dir);
  return cfg;
}

// Independent sub-seed for temperature stream k of a run.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ULL * (k + 1));
  return otoc::splitmix64(s);
}

// File tag for one temperature: k_BT/E_0 in shortest decimal form with
// '.' replaced so tags stay extension-free ("16", "16p5").
std::string temp_tag(double kbt_over_e0) {
  std::string t = otoc::io::format_double(kbt_over_e0);
  for (char& c : t)
    if (c == '.') c = 'p';
  return t;
}

std::map<std::string, std::string> provenance(const RunConfig& cfg,
                                              const std::string& label) {
  return {{"config", otoc::io::config_hash(cfg)},
          {"seed", std::to_string(cfg.seed)},
          {"label", label},
          {"code_version", otoc::io::code_version()}};
}

// Write one series plus its sidecar; returns the CSV path.
std::string write_series(const RunConfig& cfg, const OtocSeries& s,
                         const std::string& stem,
                         std::map<std::string, double> extra) {
  const std::string path = cfg.output_dir + "/" + stem + ".csv";
  otoc::io::write_series_csv(path, s);
  if (s.meta.kbt > 0.0) {
    extra.emplace("kbt", s.meta.kbt);
    extra.emplace("beta", 1.0 / s.meta.kbt);
    extra.emplace("kbt_over_e0", s.meta.kbt / cfg.e0());
  }
  otoc::io::write_sidecar(path + ".json", provenance(cfg, s.meta.label), extra);
  return path;
}

OtocSeries make_series(const std::string& label, double kbt,
                       const std::vector<double>& t,
                       const std::vector<double>& v,
                       const otoc::domain::UnitSystem& u) {
  OtocSeries s;
  s.meta.label = label;
  s.meta.kbt = kbt;
  s.meta.beta = 1.0 / kbt;
  for (std::size_t i = 0; i < t.size(); ++i)
    s.push(t[i], u.ell(t[i], kbt), v[i]);
  return s;
}

OtocSeries read_artifact(const RunConfig& cfg, const std::string& stem,
                         const std::string& label, double kbt,
                         const char* producer) {
  const std::string path = cfg.output_dir + "/" + stem + ".csv";
  if (!std::filesystem::exists(path))
    throw ConfigError("missing artifact " + path + "; run `otoc " +
                      producer + "` first");
  OtocSeries s = otoc::io::read_series_csv(path);
  s.meta.label = label;
  s.meta.kbt = kbt;
  s.meta.beta = 1.0 / kbt;
  return s;
}

bool artifact_exists(const RunConfig& cfg, const std::string& stem) {
  return std::filesystem::exists(cfg.output_dir + "/" + stem + ".csv");
}

// ---------------------------------------------------------------------
// eigensolve and the basis cache

otoc::spectral::BasisCache ensure_basis(const RunConfig& cfg, bool force) {
  const std::string path = cfg.output_dir + "/basis_cache.bin";
  otoc::spectral::BasisCache cache;
  if (!force && otoc::spectral::load_basis_cache(path, cfg.a, cfg.ls, cfg.h(),
                                                 cfg.n_basis, cache)) {
    std::cout << "basis cache hit: " << path << " ("
              << cache.energies.size() << " states)\n";
    return cache;
  }
  const otoc::domain::StadiumGeometry dom(cfg.a, cfg.ls);
  const auto grid =
      otoc::spectral::DiscreteDomain::build(dom, cfg.h(), cfg.units());
  std::cout << "discretized domain: " << grid.n_nodes() << " nodes at h = "
            << otoc::io::format_double(cfg.h()) << "\n";
  otoc::spectral::SolveOptions opt;
  opt.n_states = cfg.n_basis;
  opt.seed = cfg.seed;
  opt.verbose = true;
  const auto basis = otoc::spectral::solve_dirichlet(grid, opt);

  cache.a = cfg.a;
  cache.ls = cfg.ls;
  cache.h = cfg.h();
  cache.energies = basis.energies;
  cache.x_mat = otoc::spectral::x_matrix(grid, basis);
  otoc::spectral::save_basis_cache(path, cache);

  double max_residual = 0.0;
  for (double r : basis.residuals) max_residual = std::max(max_residual, r);
  const double e_top = basis.energies.back();
  const double weyl = otoc::spectral::weyl_count(dom, e_top, cfg.units());
  otoc::io::write_sidecar(
      cfg.output_dir + "/eigensolve.json", provenance(cfg, "eigensolve"),
      {{"n_states", double(basis.size())},
       {"n_nodes", double(grid.n_nodes())},
       {"h", cfg.h()},
       {"e_min", basis.energies.front()},
       {"e_max", e_top},
       {"max_residual", max_residual},
       {"gram_error", basis.gram_error},
       {"weyl_count_at_top", weyl},
       {"weyl_relative_deviation",
        std::abs(weyl - double(basis.size())) / double(basis.size())}});
  return cache;
}

// K = P_X / i in the real eigenbasis; only the spectrum and X enter, so a
// cached basis (which drops the grid eigenvectors) suffices.
Eigen::MatrixXd k_matrix_from(const otoc::spectral::BasisCache& cache,
                              const otoc::domain::UnitSystem& u) {
  otoc::spectral::EigenBasis stub;
  stub.energies = cache.energies;
  return otoc::spectral::p_matrix_imag(stub, cache.x_mat, u);
}

int cmd_validate(const CliState& st) {
  const RunConfig cfg = load_run_config(st);
  std::cout << otoc::io::canonical_text(cfg);
  std::cout << "config_hash = " << otoc::io::config_hash(cfg) << "\n";
  return 0;
}

int cmd_eigensolve(const CliState& st) {
  const RunConfig cfg = prepare(st);
  const auto cache = ensure_basis(cfg, st.force);
  std::cout << "eigensolve: " << cache.energies.size() << " states, E in ["
            << otoc::io::format_double(cache.energies.front()) << ", "
            << otoc::io::format_double(cache.energies.back()) << "]\n";
  return 0;
}

int cmd_lyapunov(const CliState& st) {
  const RunConfig cfg = prepare(st);
  const otoc::domain::StadiumGeometry dom(cfg.a, cfg.ls);
  otoc::dynamics::LyapunovParams par;
  par.mass = cfg.m;
  par.tangent_scale = cfg.a;
  par.total_length = 4000.0 * cfg.a;
  par.renorm_length = cfg.a;
  const auto est = otoc::dynamics::lyapunov_geometric(dom, par, cfg.seed);
  otoc::io::write_sidecar(
      cfg.output_dir + "/lyapunov.json", provenance(cfg, "lyapunov"),
      {{"lambda_g", est.lambda_g},
       {"lambda_g_times_a", est.lambda_g * cfg.a},
       {"stderr", est.stderr_},
       {"n_traj", double(est.n_traj)},
       {"total_length", est.total_length},
       {"resampled", double(est.resampled)}});
  std::cout << "lambda_g * a = " << otoc::io::format_double(est.lambda_g * cfg.a)
            << " +- " << otoc::io::format_double(est.stderr_ * cfg.a) << "\n";
  return 0;
}

int cmd_classical(const CliState& st) {
  const RunConfig cfg = prepare(st);
  const otoc::domain::StadiumGeometry dom(cfg.a, cfg.ls);
  const auto kbts = cfg.kbt_values();
  for (std::size_t i = 0; i < kbts.size(); ++i) {
    const double kbt = kbts[i];
    otoc::classical::ThermalEnsemble ens{1.0 / kbt, cfg.m, cfg.hbar};
    otoc::classical::ClassicalOtocParams par;
    par.n_samples = cfg.mc_samples;
    par.n_blocks = cfg.mc_blocks;
    par.seed = stream_seed(cfg.seed, i);
    auto res = otoc::classical::o_classical(ens, dom, cfg.t_grid(kbt), par);
    res.series.meta.label = "classical";
    res.series.meta.kbt = kbt;
    res.series.meta.beta = 1.0 / kbt;
    const auto anchors = otoc::classical::analytic_anchors(ens, dom);
    const std::string path = write_series(
        cfg, res.series, "classical_T" + temp_tag(kbt / cfg.e0()),
        {{"n_samples", double(par.n_samples)},
         {"mean_speed", res.mean_speed},
         {"resampled", double(res.resampled)},
         {"anchor_t0", anchors.t0_value},
         {"anchor_quadratic", anchors.quadratic_coefficient}});
    std::cout << path << "  C(0) = "
              << otoc::io::format_double(res.series.value.front())
              << " (analytic "
              << otoc::io::format_double(anchors.t0_value) << ")\n";
  }
  return 0;
}

int cmd_quantum(const CliState& st) {
  const RunConfig cfg = prepare(st);
  const auto cache = ensure_basis(cfg, st.force);
  const Eigen::MatrixXd k_mat = k_matrix_from(cache, cfg.units());
  const auto u = cfg.units();
  for (const double kbt : cfg.kbt_values()) {
    const auto weights =
        otoc::quantum::thermal_weights(cache.energies, 1.0 / kbt, cfg.n_keep);
    const auto t_grid = cfg.t_grid(kbt);
    const auto res = otoc::quantum::otoc(cache.x_mat, k_mat, cache.energies,
                                         weights, t_grid, u);
    const std::string tag = temp_tag(kbt / cfg.e0());
    const std::map<std::string, double> extra = {
        {"n_keep", double(cfg.n_keep)},
        {"n_basis", double(cfg.n_basis)},
        {"leakage", res.leakage},
        {"leakage_warning", res.leakage_warning ? 1.0 : 0.0}};
    write_series(cfg, make_series("quantum-o1", kbt, res.t, res.o1_re, u),
                 "quantum_o1_T" + tag, extra);
    write_series(cfg, make_series("quantum-o1-im", kbt, res.t, res.o1_im, u),
                 "quantum_o1_im_T" + tag, extra);
    write_series(cfg, make_series("quantum-o2", kbt, res.t, res.o2, u),
                 "quantum_o2_T" + tag, extra);
    write_series(cfg, make_series("quantum-o3", kbt, res.t, res.o3, u),
                 "quantum_o3_T" + tag, extra);
    const std::string path =
        write_series(cfg, make_series("quantum-c", kbt, res.t, res.c, u),
                     "quantum_c_T" + tag, extra);
    std::cout << path << "  C(0) = "
              << otoc::io::format_double(res.c.front())
              << (res.leakage_warning ? "  [thermal tail leaks past the kept states]"
                                      : "")
              << "\n";
  }
  return 0;
}

int cmd_semiclassical(const CliState& st) {
  const RunConfig cfg = prepare(st);
  const auto u = cfg.units();
  const double lambda_g_abs = cfg.lambda_g / cfg.a;
  for (const double kbt : cfg.kbt_values()) {
    const auto pred =
        otoc::semi::predict(kbt, lambda_g_abs, u, cfg.t_grid(kbt));
    auto s = make_series("semiclassical", kbt, pred.t_grid, pred.c_quadrature, u);
    const std::string path = write_series(
        cfg, s, "semiclassical_T" + temp_tag(kbt / cfg.e0()),
        {{"lambda_g", lambda_g_abs},
         {"rate_paper", pred.rate_paper},
         {"mss_bound", pred.bound},
         {"threshold_kbt", pred.threshold_kbt}});
    std::cout << path << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------
// periodic orbits

// Boundary-parameter cycles of short unstable orbits of the a == ls
// quarter stadium, found once by a symmetry-line scan and kept as seeds;
// scaled by `a` at use.  Labels describe the bounce pattern.
const std::vector<std::pair<std::string, std::vector<double>>> kSeedCycles = {
    {"diamond", {4.863689546, 2.785398163, 1.707106781, 2.785398163}},
    {"fan3",
     {4.646916794, 3.178097245, 2.392699082, 1.923879533, 2.392699082,
      3.178097245}},
    {"fan4",
     {4.604870501, 3.308996939, 2.785398163, 2.261799388, 1.965925826,
      2.261799388, 2.785398163, 3.308996939}},
    {"bow8",
     {1.593070331, 2.935929456, 5.260295432, 1.0, 2.301062585, 1.0,
      5.260295432, 2.935929456}},
    {"bow10",
     {1.854526698, 2.546157406, 3.642833944, 5.052114008, 1.0, 2.478481515,
      1.0, 5.052114008, 3.642833944, 2.546157406}},
};

constexpr int kRepetitionsMax = 3;  // trace-formula repetition cutoff

int cmd_periodic_orbits(const CliState& st) {
  const RunConfig cfg = prepare(st);
  const otoc::domain::StadiumGeometry dom(cfg.a, cfg.ls);
  std::vector<otoc::orbits::PeriodicOrbit> atlas;
  std::vector<std::string> labels;

  atlas.push_back(otoc::orbits::axial_orbit(dom));
  labels.push_back("axial");
  {
    // Representative of the marginal bouncing-ball family at x = ls/2.
    const double j2 = (cfg.ls + cfg.a) + cfg.a * otoc::domain::StadiumGeometry::pi() / 2.0;
    atlas.push_back(otoc::orbits::find_orbit(
        dom, {0.5 * cfg.ls, j2 + 0.5 * cfg.ls}));
    labels.push_back("vertical");
  }
  if (cfg.a == cfg.ls) {
    for (const auto& [name, cycle] : kSeedCycles) {
      std::vector<double> scaled = cycle;
      for (double& s : scaled) s *= cfg.a;
      atlas.push_back(otoc::orbits::find_orbit(dom, scaled));
      labels.push_back(name);
    }
  } else {
    std::cout << "note: seed cycles cover the a == ls geometry only; "
                 "atlas restricted to the closed-form orbits\n";
  }

  nlohmann::json jorb;
  jorb["config"] = otoc::io::config_hash(cfg);
  jorb["seed"] = std::to_string(cfg.seed);
  jorb["code_version"] = otoc::io::code_version();
  jorb["p_max"] = kRepetitionsMax;
  for (std::size_t i = 0; i < atlas.size(); ++i) {
    const auto& orb = atlas[i];
    nlohmann::json j;
    j["label"] = labels[i];
    j["n_bounces"] = orb.bounces.size();
    j["length"] = orb.length;
    j["tr_m"] = orb.tr_m;
    j["nu"] = orb.nu;
    j["marginal"] = orb.marginal;
    j["closure_residual"] = orb.closure_residual;
    j["specular_residual"] = orb.specular_residual;
    j["det_err"] = orb.det_err;
    for (const auto& b : orb.bounces) j["s"].push_back(b.s);
    jorb["orbits"].push_back(j);
  }
  {
    std::ofstream out(cfg.output_dir + "/orbits.json");
    if (!out)
      throw std::runtime_error("cannot write " + cfg.output_dir + "/orbits.json");
    out << jorb.dump(2) << '\n';
  }
  std::cout << cfg.output_dir << "/orbits.json  (" << atlas.size()
            << " orbits)\n";

  std::vector<otoc::orbits::PeriodicOrbit> unstable;
  for (const auto& orb : atlas)
    if (!orb.marginal) unstable.push_back(orb);
  const auto u = cfg.units();
  for (const double kbt : cfg.kbt_values()) {
    auto s = otoc::orbits::po_correction(unstable, kRepetitionsMax, 1.0 / kbt,
                                         cfg.t_grid(kbt), u);
    s.meta.kbt = kbt;
    s.meta.beta = 1.0 / kbt;
    const std::string path = write_series(
        cfg, s, "po_correction_T" + temp_tag(kbt / cfg.e0()),
        {{"n_orbits", double(unstable.size())},
         {"p_max", double(kRepetitionsMax)}});
    std::cout << path << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------
// cross-pipeline comparison

nlohmann::json deviation_json(const otoc::io::DeviationReport& rep) {
  return {{"max_relative", rep.max_relative},
          {"at_ell", rep.at_ell},
          {"n_points", rep.n_points}};
}

int cmd_compare(const CliState& st) {
  const RunConfig cfg = prepare(st);
  const auto u = cfg.units();
  const auto kbts = cfg.kbt_values();
  const double lambda_g_abs = cfg.lambda_g / cfg.a;

  nlohmann::json report;
  report["config"] = otoc::io::config_hash(cfg);
  report["seed"] = std::to_string(cfg.seed);
  report["code_version"] = otoc::io::code_version();

  std::vector<OtocSeries> o1s, o2s, o3s, cs;
  for (const double kbt : kbts) {
    const std::string tag = temp_tag(kbt / cfg.e0());
    o1s.push_back(read_artifact(cfg, "quantum_o1_T" + tag, "quantum-o1", kbt,
                                "quantum-otoc"));
    o2s.push_back(read_artifact(cfg, "quantum_o2_T" + tag, "quantum-o2", kbt,
                                "quantum-otoc"));
    o3s.push_back(read_artifact(cfg, "quantum_o3_T" + tag, "quantum-o3", kbt,
                                "quantum-otoc"));
    cs.push_back(read_artifact(cfg, "quantum_c_T" + tag, "quantum-c", kbt,
                               "quantum-otoc"));
  }

  for (std::size_t i = 0; i < kbts.size(); ++i) {
    const double kbt = kbts[i];
    const std::string tag = temp_tag(kbt / cfg.e0());
    nlohmann::json jt;
    jt["kbt"] = kbt;
    jt["kbt_over_e0"] = kbt / cfg.e0();

    const auto classical = read_artifact(cfg, "classical_T" + tag, "classical",
                                         kbt, "classical-otoc");
    // Leading order in hbar, every component reduces to the classical
    // correlator; compare them over the ballistic window ell/a <= 2.
    const double lo = 0.0, hi = 2.0 * cfg.a;
    jt["quantum_vs_classical"] = {
        {"o1", deviation_json(
                   otoc::io::max_relative_deviation(classical, o1s[i], lo, hi))},
        {"o2", deviation_json(
                   otoc::io::max_relative_deviation(classical, o2s[i], lo, hi))},
        {"o3", deviation_json(
                   otoc::io::max_relative_deviation(classical, o3s[i], lo, hi))}};

    try {
      const auto fit = otoc::semi::fit_growth(cs[i], cfg.fit_ell_lo * cfg.a,
                                              cfg.fit_ell_hi * cfg.a, u);
      const double rate_paper = otoc::semi::growth_rate(kbt, lambda_g_abs, u);
      const auto bound = otoc::semi::mss_bound_check(kbt, lambda_g_abs,
                                                     fit.rate, u);
      jt["growth"] = {{"rate_fit", fit.rate},
                      {"rate_per_length_times_a", fit.rate_per_length * cfg.a},
                      {"rate_paper", rate_paper},
                      {"ratio", fit.rate / rate_paper},
                      {"prefactor", fit.prefactor},
                      {"rms_residual", fit.rms_residual},
                      {"points", double(fit.points)}};
      jt["mss"] = {{"bound", bound.bound},
                   {"threshold_kbt", bound.threshold_kbt},
                   {"above_threshold", kbt > bound.threshold_kbt},
                   {"paper_ok", bound.paper_ok},
                   {"fit_ok", bound.fit_ok}};
    } catch (const std::exception& e) {
      jt["growth"] = {{"error", e.what()}};
    }
    report["temperatures"].push_back(jt);
  }

  const double xi_point = cfg.xi_ell * cfg.a;
  auto xi_json = [&](const std::vector<OtocSeries>& set) -> nlohmann::json {
    try {
      const auto fit = otoc::io::fit_xi(set, xi_point);
      return {{"xi", fit.xi},
              {"log_prefactor", fit.log_prefactor},
              {"r2", fit.r2},
              {"n_temps", fit.n_temps}};
    } catch (const std::exception& e) {
      return {{"error", e.what()}};
    }
  };
  report["xi"] = {{"o1", xi_json(o1s)},
                  {"o2", xi_json(o2s)},
                  {"o3", xi_json(o3s)},
                  {"ell", xi_point}};

  try {
    const auto sat = otoc::semi::saturation_model(cs, cfg.a, u);
    report["saturation"] = {{"kappa", sat.kappa}, {"r2", sat.r2}};
  } catch (const std::exception& e) {
    report["saturation"] = {{"error", e.what()}};
  }

  const std::string path = cfg.output_dir + "/compare.json";
  {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << report.dump(2) << '\n';
  }
  std::cout << path << "\n";
  if (report.contains("xi") && report["xi"]["o2"].contains("xi"))
    std::cout << "xi(o2) = "
              << otoc::io::format_double(report["xi"]["o2"]["xi"].get<double>())
              << "\n";
  return 0;
}

int cmd_figure_data(const CliState& st) {
  const RunConfig cfg = prepare(st);
  const auto u = cfg.units();
  std::vector<otoc::io::TemperatureCurves> curves;
  bool any = false;
  for (const double kbt : cfg.kbt_values()) {
    const std::string tag = temp_tag(kbt / cfg.e0());
    otoc::io::TemperatureCurves tc;
    tc.kbt = kbt;
    auto maybe = [&](const std::string& stem, const std::string& label,
                     OtocSeries& dst) {
      if (!artifact_exists(cfg, stem)) return;
      dst = read_artifact(cfg, stem, label, kbt, "");
      any = true;
    };
    maybe("classical_T" + tag, "classical", tc.classical);
    maybe("quantum_o1_T" + tag, "quantum-o1", tc.quantum_o1);
    maybe("quantum_o2_T" + tag, "quantum-o2", tc.quantum_o2);
    maybe("quantum_o3_T" + tag, "quantum-o3", tc.quantum_o3);
    maybe("quantum_c_T" + tag, "quantum-c", tc.quantum_c);
    if (tc.quantum_c.size() > 0) {
      try {
        tc.growth = otoc::semi::fit_growth(tc.quantum_c, cfg.fit_ell_lo * cfg.a,
                                           cfg.fit_ell_hi * cfg.a, u);
        tc.has_growth = true;
      } catch (const std::exception&) {
        tc.has_growth = false;
      }
    }
    curves.push_back(std::move(tc));
  }
  if (!any)
    throw ConfigError("no series artifacts in " + cfg.output_dir +
                      "; run the pipeline subcommands first");
  const auto files = otoc::io::emit_figure_data(
      cfg.output_dir + "/figures", curves, cfg.lambda_g / cfg.a, cfg.a, u,
      {otoc::io::config_hash(cfg), std::to_string(cfg.seed)});
  for (const auto& f : files)
    std::cout << cfg.output_dir << "/figures/" << f << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"out-of-time-order correlator laboratory for the "
               "desymmetrized stadium billiard"};
  app.require_subcommand(1);
  CliState st;
  app.add_option("--config", st.config_path,
                 "run configuration file (defaults hard-wired otherwise)");
  auto* seed_opt =
      app.add_option("--seed", st.seed_override, "override the configured seed");
  app.add_flag("--force", st.force, "recompute cached artifacts");
  app.add_option("--threads", st.threads, "worker thread count");

  std::map<std::string, std::function<int(const CliState&)>> dispatch;
  auto add = [&](const char* name, const char* desc,
                 int (*fn)(const CliState&)) {
    auto* sub = app.add_subcommand(name, desc);
    sub->fallthrough();
    dispatch[name] = fn;
    return sub;
  };
  add("validate", "parse the configuration and print its canonical form",
      cmd_validate);
  add("eigensolve", "solve the Dirichlet spectrum and cache the X matrix",
      cmd_eigensolve);
  add("lyapunov", "estimate the geometric stretching rate", cmd_lyapunov);
  add("classical-otoc", "Monte Carlo correlator per temperature",
      cmd_classical);
  add("quantum-otoc", "eigenbasis correlator components per temperature",
      cmd_quantum);
  add("semiclassical", "ballistic-regime prediction per temperature",
      cmd_semiclassical);
  add("periodic-orbits", "orbit atlas and trace-formula correction",
      cmd_periodic_orbits);
  add("compare", "cross-pipeline deviations, growth and scaling fits",
      cmd_compare);
  add("figure-data", "emit figure datasets and plot scripts",
      cmd_figure_data);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  st.has_seed_override = seed_opt->count() > 0;
#ifdef _OPENMP
  if (st.threads > 0) omp_set_num_threads(st.threads);
#endif

  try {
    for (const auto& [name, fn] : dispatch)
      if (app.get_subcommand(name)->parsed()) return fn(st);
    return 1;  // unreachable: require_subcommand enforces one
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
