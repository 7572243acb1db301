#include "otoc/semiclassics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "otoc/quadrature.hpp"

namespace otoc::semi {

namespace {

constexpr double kPi = std::numbers::pi;

void validate(const MomentumIntegralParams& par, double t) {
  if (!(par.beta > 0.0) || !(par.lambda_g > 0.0) || !(par.m > 0.0) ||
      !(par.hbar > 0.0))
    throw std::invalid_argument(
        "momentum integral needs positive beta, lambda_g, m, hbar");
  if (!std::isfinite(t) || t < 0.0)
    throw std::invalid_argument("time must be finite and nonnegative");
}

double log_prefactor(const MomentumIntegralParams& par) {
  return 2.0 * std::log(par.beta) + 2.0 * std::log(par.hbar) -
         std::log(64.0) - 2.0 * std::log(par.m);
}

}  // namespace

double log_c_integral(const MomentumIntegralParams& par, double t) {
  validate(par, t);
  const double b = par.beta / (2.0 * par.m);
  const double mu = 2.0 * par.lambda_g * t / par.beta;
  const double sigma = 1.0 / std::sqrt(b);
  // completing the square leaves a shifted Gaussian whose tail is below
  // 1e-16 of the peak past ~8.5 sigma even with the p^3 weight
  const double hi = mu + 8.5 * sigma;
  auto f = [b, mu](double p) {
    const double d = p - mu;
    return p * p * p * std::exp(-b * d * d);
  };
  auto q = quad::integrate(f, 0.0, hi, 1e-12, 0.0, 8000);
  if (!q.converged || !(q.value > 0.0))
    throw std::runtime_error("momentum quadrature did not converge");
  return log_prefactor(par) + b * mu * mu + std::log(q.value);
}

double log_c_closed(const MomentumIntegralParams& par, double t) {
  validate(par, t);
  const double b = par.beta / (2.0 * par.m);
  const double mu = 2.0 * par.lambda_g * t / par.beta;
  // int_0^inf p^3 exp(-b(p-mu)^2) dp * exp(b mu^2)
  //   = mu^2/(2b) + 1/(2b^2)
  //     + exp(b mu^2) * M0 * (3 mu / (2b) + mu^3),
  //   M0 = (1/2) sqrt(pi/b) (1 + erf(mu sqrt(b)))
  const double poly = mu * mu / (2.0 * b) + 0.5 / (b * b);
  if (mu == 0.0) return log_prefactor(par) + std::log(poly);
  const double z = mu * std::sqrt(b);
  const double ln_wing = std::log(0.5 * std::sqrt(kPi / b)) +
                         std::log1p(std::erf(z)) +
                         std::log(1.5 * mu / b + mu * mu * mu) + z * z;
  const double ln_poly = std::log(poly);
  const double mx = std::max(ln_poly, ln_wing);
  return log_prefactor(par) + mx +
         std::log(std::exp(ln_poly - mx) + std::exp(ln_wing - mx));
}

double c_integral(const MomentumIntegralParams& par, double t) {
  return std::exp(log_c_integral(par, t));
}

double c_closed(const MomentumIntegralParams& par, double t) {
  return std::exp(log_c_closed(par, t));
}

double growth_rate(double kbt, double lambda_g,
                   const domain::UnitSystem& u) {
  if (!(kbt > 0.0) || !(lambda_g > 0.0))
    throw std::invalid_argument(
        "growth rate needs positive temperature and stretching rate");
  return std::sqrt(3.0) * lambda_g * u.vtilde(kbt);
}

double effective_log_slope(const MomentumIntegralParams& par, double kbt,
                           double ell, const domain::UnitSystem& u) {
  if (!(kbt > 0.0) || !(ell > 0.0))
    throw std::invalid_argument(
        "log slope needs positive temperature and path length");
  const double vt = u.vtilde(kbt);
  const double h = std::min(1e-6 * std::max(ell, 1.0), 0.5 * ell);
  const double up = log_c_integral(par, (ell + h) / vt);
  const double dn = log_c_integral(par, (ell - h) / vt);
  return (up - dn) / (2.0 * h);
}

GrowthFit fit_growth(const io::OtocSeries& series, double ell_min,
                     double ell_max, const domain::UnitSystem& u) {
  if (!(ell_min < ell_max))
    throw std::invalid_argument("growth window must have ell_min < ell_max");
  if (!(series.meta.kbt > 0.0))
    throw std::invalid_argument(
        "growth fit needs a positive temperature in the series metadata");
  if (series.ell.size() != series.value.size())
    throw std::invalid_argument("series length mismatch");

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < series.ell.size(); ++i) {
    const double l = series.ell[i];
    if (l < ell_min || l > ell_max) continue;
    const double v = series.value[i];
    if (!(v > 0.0))
      throw std::invalid_argument(
          "growth fit window contains a nonpositive value at ell = " +
          std::to_string(l));
    xs.push_back(l);
    ys.push_back(std::log(v));
  }
  const std::size_t n = xs.size();
  if (n < 8)
    throw std::invalid_argument("growth fit needs at least 8 points in [" +
                                std::to_string(ell_min) + ", " +
                                std::to_string(ell_max) + "]; found " +
                                std::to_string(n));

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0))
    throw std::invalid_argument("growth fit window has no ell spread");

  GrowthFit fit;
  fit.ell_min = ell_min;
  fit.ell_max = ell_max;
  fit.points = n;
  fit.rate_per_length = sxy / sxx;
  fit.rate = fit.rate_per_length * u.vtilde(series.meta.kbt);
  const double intercept = my - fit.rate_per_length * mx;
  fit.prefactor = std::exp(intercept);
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (fit.rate_per_length * xs[i] + intercept);
    ss_res += r * r;
  }
  fit.rms_residual = std::sqrt(ss_res / double(n));
  fit.slope_stderr =
      n > 2 ? std::sqrt(ss_res / (double(n) - 2.0) / sxx) : 0.0;
  return fit;
}

SaturationFit saturation_model(const std::vector<io::OtocSeries>& series,
                               double a, const domain::UnitSystem& u,
                               double max_drift) {
  if (series.size() < 2)
    throw std::invalid_argument(
        "saturation fit needs at least two temperatures");
  if (!(a > 0.0)) throw std::invalid_argument("length scale must be positive");

  SaturationFit out;
  for (const auto& s : series) {
    if (!(s.meta.kbt > 0.0))
      throw std::invalid_argument(
          "saturation fit needs positive temperatures");
    const std::size_t n = s.value.size();
    if (n < 10)
      throw std::invalid_argument(
          "series too short for plateau detection (need >= 10 points)");
    const std::size_t tail = std::max<std::size_t>(2, n / 5);
    double mean = 0.0;
    double lo = s.value[n - tail], hi = lo;
    for (std::size_t i = n - tail; i < n; ++i) {
      mean += s.value[i];
      lo = std::min(lo, s.value[i]);
      hi = std::max(hi, s.value[i]);
    }
    mean /= double(tail);
    const double drift = mean > 0.0 ? (hi - lo) / mean : 2.0;
    if (!(mean > 0.0) || drift > max_drift)
      throw std::runtime_error(
          "no plateau detected for k_BT = " + std::to_string(s.meta.kbt) +
          ": trailing drift " + std::to_string(drift) + " exceeds " +
          std::to_string(max_drift));
    out.kbt.push_back(s.meta.kbt);
    out.plateau.push_back(mean);
    out.drift.push_back(drift);
  }

  double stt = 0.0, stp = 0.0;
  for (std::size_t i = 0; i < out.kbt.size(); ++i) {
    stt += out.kbt[i] * out.kbt[i];
    stp += out.kbt[i] * out.plateau[i];
  }
  const double slope = stp / stt;  // plateau ~ slope * k_B T through origin
  out.kappa = slope / (u.m * a * a);

  double pbar = 0.0;
  for (double p : out.plateau) pbar += p;
  pbar /= double(out.plateau.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < out.kbt.size(); ++i) {
    const double r = out.plateau[i] - slope * out.kbt[i];
    ss_res += r * r;
    ss_tot += (out.plateau[i] - pbar) * (out.plateau[i] - pbar);
  }
  out.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

BoundReport mss_bound_check(double kbt, double lambda_g, double rate_fit,
                            const domain::UnitSystem& u) {
  if (!(kbt > 0.0) || !(lambda_g > 0.0))
    throw std::invalid_argument(
        "bound check needs positive temperature and stretching rate");
  if (rate_fit < 0.0)
    throw std::invalid_argument("fitted rate must be nonnegative");
  BoundReport rep;
  rep.kbt = kbt;
  rep.rate_paper = growth_rate(kbt, lambda_g, u);
  rep.rate_fit = rate_fit;
  rep.bound = 4.0 * kPi * kbt / u.hbar;
  rep.threshold_kbt =
      3.0 * u.hbar * u.hbar * lambda_g * lambda_g / (16.0 * kPi * kPi * u.m);
  rep.paper_ok = rep.rate_paper <= rep.bound;
  rep.fit_ok = rate_fit <= rep.bound;
  return rep;
}

SemiclassicalPrediction predict(double kbt, double lambda_g,
                                const domain::UnitSystem& u,
                                const std::vector<double>& t_grid) {
  if (!(kbt > 0.0)) throw std::invalid_argument("temperature must be positive");
  if (t_grid.empty()) throw std::invalid_argument("time grid is empty");

  SemiclassicalPrediction pred;
  pred.params = MomentumIntegralParams{1.0 / kbt, lambda_g, u.m, u.hbar};
  pred.kbt = kbt;
  pred.t_grid = t_grid;
  pred.c_quadrature.reserve(t_grid.size());
  pred.c_closed_form.reserve(t_grid.size());
  for (double t : t_grid) {
    const double lq = log_c_integral(pred.params, t);
    const double lc = log_c_closed(pred.params, t);
    const double rel = std::abs(std::expm1(lc - lq));
    if (rel > 1e-10)
      throw std::runtime_error(
          "closed form disagrees with quadrature at t = " +
          std::to_string(t) + " (relative " + std::to_string(rel) + ")");
    pred.c_quadrature.push_back(std::exp(lq));
    pred.c_closed_form.push_back(std::exp(lc));
  }
  pred.rate_paper = growth_rate(kbt, lambda_g, u);
  pred.bound = 4.0 * kPi * kbt / u.hbar;
  pred.threshold_kbt =
      3.0 * u.hbar * u.hbar * lambda_g * lambda_g / (16.0 * kPi * kPi * u.m);
  return pred;
}

}  // namespace otoc::semi
