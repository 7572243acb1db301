#include "otoc/figures.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace otoc::io {

namespace {

std::string tag_for(double kbt_over_e0) {
  std::string t = format_double(kbt_over_e0);
  for (char& c : t)
    if (c == '.') c = 'p';
  return t;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::string fmt(double v) {
  return std::isfinite(v) ? format_double(v) : std::string("nan");
}

void check_grid(const OtocSeries& s, const OtocSeries& ref,
                const std::string& what) {
  if (s.size() == 0) return;
  if (s.size() != ref.size())
    throw std::invalid_argument(what + ": series grids differ in length");
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.t[i] != ref.t[i])
      throw std::invalid_argument(what + ": series grids differ at sample " +
                                  std::to_string(i));
}

}  // namespace

std::vector<std::string> emit_figure_data(
    const std::string& dir, const std::vector<TemperatureCurves>& curves,
    double lambda_g, double a, const domain::UnitSystem& u,
    const FigureProvenance& prov) {
  if (!(lambda_g > 0.0) || !(a > 0.0))
    throw std::invalid_argument("emit_figure_data: lambda_g and a must be positive");
  std::filesystem::create_directories(dir);

  std::vector<TemperatureCurves const*> order;
  for (const auto& c : curves) {
    if (!(c.kbt > 0.0))
      throw std::invalid_argument("emit_figure_data: curves need kbt > 0");
    order.push_back(&c);
  }
  std::sort(order.begin(), order.end(),
            [](auto* x, auto* y) { return x->kbt < y->kbt; });

  const double e0 = u.e0(a);
  const double ma2 = u.m * a * a;
  const double rate_len = std::sqrt(3.0) * lambda_g;  // per unit length
  std::vector<std::string> written;

  const std::map<std::string, std::string> text = {
      {"config", prov.config_hash},
      {"seed", prov.seed},
      {"code_version", code_version()},
  };

  auto sidecar = [&](const std::string& name,
                     std::map<std::string, double> extra) {
    extra.emplace("a", a);
    extra.emplace("lambda_g", lambda_g);
    write_sidecar(dir + "/" + name + ".json", text, extra);
    written.push_back(name + ".json");
  };

  // --- components per temperature: quantum O^(j)/k_BT and the classical
  // curve, all in units of m a^2, against ell/a -------------------------
  std::vector<std::string> fig2_files;
  for (auto* c : order) {
    const bool have_q = c->quantum_o1.size() > 0 && c->quantum_o2.size() > 0 &&
                        c->quantum_o3.size() > 0;
    if (!have_q && c->classical.size() == 0) continue;
    const OtocSeries& grid = have_q ? c->quantum_o1 : c->classical;
    if (have_q) {
      check_grid(c->quantum_o2, grid, "components");
      check_grid(c->quantum_o3, grid, "components");
      check_grid(c->quantum_c, grid, "components");
    }
    check_grid(c->classical, grid, "components");
    const std::string name = "components_T" + tag_for(c->kbt / e0) + ".dat";
    auto out = open_out(dir + "/" + name);
    out << "# kbt = " << format_double(c->kbt)
        << "  kbt/e0 = " << format_double(c->kbt / e0) << '\n';
    out << "# ell_over_a  o1  o2  o3  c  classical   (over k_BT, units m a^2)\n";
    const double scale = 1.0 / (c->kbt * ma2);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      out << fmt(grid.ell[i] / a) << ' '
          << fmt(have_q ? c->quantum_o1.value[i] * scale : nan) << ' '
          << fmt(have_q ? c->quantum_o2.value[i] * scale : nan) << ' '
          << fmt(have_q ? c->quantum_o3.value[i] * scale : nan) << ' '
          << fmt(c->quantum_c.size() ? c->quantum_c.value[i] * scale : nan)
          << ' '
          << fmt(c->classical.size() ? c->classical.value[i] * scale : nan)
          << '\n';
    }
    written.push_back(name);
    fig2_files.push_back(name);
    sidecar(name, {{"kbt", c->kbt}, {"kbt_over_e0", c->kbt / e0}});
  }
  if (!fig2_files.empty()) {
    auto gp = open_out(dir + "/components.gp");
    gp << "set datafile missing 'nan'\n"
       << "set xlabel 'ell/a'\n"
       << "set ylabel 'O^{(j)}/k_BT  [m a^2]'\n"
       << "set key outside\n";
    const char* panel[] = {"o1", "o2", "o3", "otoc", "classical"};
    for (int col = 2; col <= 6; ++col) {
      gp << "set title '" << panel[col - 2] << "'\n";
      gp << "plot ";
      for (std::size_t i = 0; i < fig2_files.size(); ++i) {
        if (i) gp << ", ";
        gp << "'" << fig2_files[i] << "' using 1:" << col
           << " with lines title '" << fig2_files[i] << "'";
      }
      gp << "\npause -1\n";
    }
    written.push_back("components.gp");
  }

  // --- exponential growth: quantum OTOC per temperature (one data block
  // each) on a log scale, with the reference slope ----------------------
  bool any_growth_data = false;
  double ref_prefactor = 0.0;
  {
    auto out = open_out(dir + "/growth.dat");
    out << "# quantum OTOC per temperature; columns: ell_over_a  c  "
           "c_over_kbt_ma2\n";
    bool first = true;
    for (auto* c : order) {
      if (c->quantum_c.size() == 0) continue;
      if (!first) out << "\n\n";
      first = false;
      any_growth_data = true;
      out << "# block kbt = " << format_double(c->kbt)
          << "  kbt/e0 = " << format_double(c->kbt / e0) << '\n';
      for (std::size_t i = 0; i < c->quantum_c.size(); ++i)
        out << fmt(c->quantum_c.ell[i] / a) << ' '
            << fmt(c->quantum_c.value[i]) << ' '
            << fmt(c->quantum_c.value[i] / (c->kbt * ma2)) << '\n';
      if (c->has_growth && ref_prefactor == 0.0)
        ref_prefactor = c->growth.prefactor;  // coldest fitted temperature
    }
  }
  if (any_growth_data) {
    written.push_back("growth.dat");
    sidecar("growth.dat", {{"rate_per_length", rate_len},
                           {"reference_prefactor", ref_prefactor}});
    auto gp = open_out(dir + "/growth.gp");
    gp << "set datafile missing 'nan'\n"
       << "set xlabel 'ell/a'\n"
       << "set ylabel 'C(t)'\n"
       << "set logscale y\n"
       << "ref(x) = " << format_double(ref_prefactor ? ref_prefactor : 1.0)
       << " * exp(" << format_double(rate_len * a) << " * x)\n"
       << "plot for [b=0:*] 'growth.dat' index b using 1:2 with lines "
          "title sprintf('block %d', b), ref(x) title 'exp(sqrt(3) "
          "lambda_g ell)' dashtype 2\n"
       << "pause -1\n";
    written.push_back("growth.gp");
  } else {
    std::filesystem::remove(dir + "/growth.dat");
  }

  // --- damped OTOC: C(t) exp(-sqrt(3) lambda_g ell), raw and divided by
  // the fitted prefactor alpha(T), against t/t0 -------------------------
  bool any_scaled = false;
  {
    auto out = open_out(dir + "/scaled.dat");
    out << "# columns: t_over_t0  c_damped  c_damped_over_alpha\n";
    const double t0 = u.t0(a);
    bool first = true;
    for (auto* c : order) {
      if (c->quantum_c.size() == 0) continue;
      if (!first) out << "\n\n";
      first = false;
      any_scaled = true;
      const double alpha =
          c->has_growth ? c->growth.prefactor
                        : std::numeric_limits<double>::quiet_NaN();
      out << "# block kbt = " << format_double(c->kbt)
          << "  kbt/e0 = " << format_double(c->kbt / e0)
          << "  alpha = " << fmt(alpha) << '\n';
      for (std::size_t i = 0; i < c->quantum_c.size(); ++i) {
        const double damp = std::exp(-rate_len * c->quantum_c.ell[i]);
        const double v = c->quantum_c.value[i] * damp;
        out << fmt(c->quantum_c.t[i] / t0) << ' ' << fmt(v) << ' '
            << fmt(v / alpha) << '\n';
      }
    }
  }
  if (any_scaled) {
    written.push_back("scaled.dat");
    sidecar("scaled.dat", {{"rate_per_length", rate_len}});
    auto gp = open_out(dir + "/scaled.gp");
    gp << "set datafile missing 'nan'\n"
       << "set xlabel 't/t_0'\n"
       << "set ylabel 'C(t) exp(-sqrt(3) lambda_g ell)'\n"
       << "plot for [b=0:*] 'scaled.dat' index b using 1:2 with lines "
          "title sprintf('block %d', b)\n"
       << "set ylabel 'C(t) exp(-sqrt(3) lambda_g ell) / alpha(T)'\n"
       << "plot for [b=0:*] 'scaled.dat' index b using 1:3 with lines "
          "title sprintf('block %d', b)\n"
       << "pause -1\n";
    written.push_back("scaled.gp");
  } else {
    std::filesystem::remove(dir + "/scaled.dat");
  }

  return written;
}

}  // namespace otoc::io
