#include "otoc/compare.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace otoc::io {

namespace {

void require_increasing(const OtocSeries& s, const char* who) {
  if (s.ell.size() < 2)
    throw std::invalid_argument(std::string(who) +
                                ": need at least two samples");
  for (std::size_t i = 1; i < s.ell.size(); ++i)
    if (!(s.ell[i] > s.ell[i - 1]))
      throw std::invalid_argument(std::string(who) +
                                  ": ell column must be strictly increasing");
}

}  // namespace

double value_at_ell(const OtocSeries& s, double ell) {
  require_increasing(s, "value_at_ell");
  if (ell < s.ell.front() || ell > s.ell.back())
    throw std::invalid_argument("value_at_ell: ell = " + std::to_string(ell) +
                                " outside sampled range [" +
                                std::to_string(s.ell.front()) + ", " +
                                std::to_string(s.ell.back()) + "]");
  const auto it = std::lower_bound(s.ell.begin(), s.ell.end(), ell);
  std::size_t hi = std::size_t(it - s.ell.begin());
  if (hi == 0) return s.value.front();
  if (hi == s.ell.size()) return s.value.back();
  const std::size_t lo = hi - 1;
  const double w = (ell - s.ell[lo]) / (s.ell[hi] - s.ell[lo]);
  return s.value[lo] + w * (s.value[hi] - s.value[lo]);
}

XiFit fit_xi(const std::vector<OtocSeries>& series_by_temperature,
             double ell_point) {
  std::vector<double> lx, ly;
  for (const auto& s : series_by_temperature) {
    if (!(s.meta.kbt > 0.0))
      throw std::invalid_argument(
          "fit_xi: every series needs a positive meta.kbt");
    const double v = value_at_ell(s, ell_point);
    if (!(v > 0.0))
      throw std::invalid_argument(
          "fit_xi: nonpositive value at ell = " + std::to_string(ell_point) +
          " for kbt = " + std::to_string(s.meta.kbt));
    lx.push_back(std::log(s.meta.kbt));
    ly.push_back(std::log(v));
  }
  std::vector<double> distinct = lx;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  if (distinct.size() < 4)
    throw std::invalid_argument(
        "fit_xi: need at least four distinct temperatures, got " +
        std::to_string(distinct.size()));

  const std::size_t n = lx.size();
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xbar += lx[i];
    ybar += ly[i];
  }
  xbar /= double(n);
  ybar /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - xbar) * (lx[i] - xbar);
    sxy += (lx[i] - xbar) * (ly[i] - ybar);
  }
  XiFit fit;
  fit.xi = sxy / sxx;
  fit.log_prefactor = ybar - fit.xi * xbar;
  fit.n_temps = int(distinct.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.log_prefactor + fit.xi * lx[i]);
    ss_res += r * r;
    ss_tot += (ly[i] - ybar) * (ly[i] - ybar);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

DeviationReport max_relative_deviation(const OtocSeries& ref,
                                       const OtocSeries& other,
                                       double ell_lo, double ell_hi) {
  if (!(ell_lo < ell_hi))
    throw std::invalid_argument(
        "max_relative_deviation: window must have ell_lo < ell_hi");
  require_increasing(ref, "max_relative_deviation");
  DeviationReport rep;
  for (std::size_t i = 0; i < other.ell.size(); ++i) {
    const double ell = other.ell[i];
    if (ell < ell_lo || ell > ell_hi) continue;
    const double r = value_at_ell(ref, ell);
    const double rel = std::abs(other.value[i] - r) / std::abs(r);
    ++rep.n_points;
    if (rel > rep.max_relative || rep.n_points == 1) {
      rep.max_relative = rel;
      rep.at_ell = ell;
    }
  }
  if (rep.n_points == 0)
    throw std::invalid_argument(
        "max_relative_deviation: no samples inside the window");
  return rep;
}

}  // namespace otoc::io
