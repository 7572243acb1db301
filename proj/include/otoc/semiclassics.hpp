#pragma once

#include <cstddef>
#include <vector>

#include "otoc/series.hpp"
#include "otoc/units.hpp"

// Analytic predictions for the correlator of a hard-wall billiard in the
// ballistic regime.  The central object is the hbar^2-order momentum
// integral
//
//   C(t) = (beta^2 hbar^2 / 64 m^2) * int_0^inf dp p^3
//            exp[-beta p^2 / 2m + 2 lambda_g t p / m],
//
// where lambda_g is the geometric stretching rate per unit path length of
// the billiard map.  Completing the square turns the integrand into a
// shifted Gaussian of width sigma = sqrt(2m/beta) centred at
// mu = 2 lambda_g t / beta, with an overall factor exp(beta mu^2 / 2m)
// that is kept in log space so the evaluation never overflows.  The same
// split yields a closed expression in terms of the error function, which
// is certified against the quadrature.
namespace otoc::semi {

struct MomentumIntegralParams {
  double beta = 1.0;      // inverse temperature
  double lambda_g = 1.0;  // stretching rate per unit length
  double m = 0.5;         // particle mass
  double hbar = 1.0;
};

// ln C(t) evaluated by adaptive quadrature of the shifted-Gaussian form.
// Valid for arbitrarily large exponents; relative accuracy ~1e-10.
double log_c_integral(const MomentumIntegralParams& par, double t);

// ln C(t) from the error-function closed form.
double log_c_closed(const MomentumIntegralParams& par, double t);

// Linear-scale wrappers (may overflow to +inf for extreme arguments; use
// the log forms beyond exponent ~700).
double c_integral(const MomentumIntegralParams& par, double t);
double c_closed(const MomentumIntegralParams& par, double t);

// Low-temperature growth rate sqrt(3) * lambda_g * vtilde (inverse time).
double growth_rate(double kbt, double lambda_g, const domain::UnitSystem& u);

// d ln C / d ell of the momentum integral at path length ell = vtilde * t,
// by central difference.  Reported alongside growth_rate; the two are not
// forced to agree.
double effective_log_slope(const MomentumIntegralParams& par, double kbt,
                           double ell, const domain::UnitSystem& u);

struct GrowthFit {
  double ell_min = 0.0, ell_max = 0.0;  // fitted window (path length)
  double rate_per_length = 0.0;         // d ln C / d ell
  double rate = 0.0;                    // rate_per_length * vtilde
  double prefactor = 0.0;               // exp(intercept at ell = 0)
  double rms_residual = 0.0;            // RMS of ln-residuals
  double slope_stderr = 0.0;            // standard error of the slope
  std::size_t points = 0;
};

// Least squares of ln(value) against ell over [ell_min, ell_max].
// Requires >= 8 points in the window, all strictly positive, and a
// positive temperature in the series metadata (for the time conversion).
GrowthFit fit_growth(const io::OtocSeries& series, double ell_min,
                     double ell_max, const domain::UnitSystem& u);

struct SaturationFit {
  double kappa = 0.0;  // C_s = kappa * m * a^2 * k_B T
  double r2 = 0.0;     // coefficient of determination about the mean
  std::vector<double> kbt;      // one entry per input series
  std::vector<double> plateau;  // trailing-window mean of each series
  std::vector<double> drift;    // trailing-window relative spread
};

// Plateau of each series (mean of the trailing 20% of points, which must
// drift by less than max_drift relative) fitted through the origin against
// k_B T.  a is the billiard half-width setting the area scale.
SaturationFit saturation_model(const std::vector<io::OtocSeries>& series,
                               double a, const domain::UnitSystem& u,
                               double max_drift = 0.05);

struct BoundReport {
  double kbt = 0.0;
  double rate_paper = 0.0;     // sqrt(3) lambda_g vtilde
  double rate_fit = 0.0;       // measured rate (0 if none supplied)
  double bound = 0.0;          // 4 pi k_B T / hbar
  double threshold_kbt = 0.0;  // 3 hbar^2 lambda_g^2 / (16 pi^2 m)
  bool paper_ok = false;       // rate_paper <= bound
  bool fit_ok = false;         // rate_fit <= bound
};

// Fast-scrambling bound check: the square-root growth rate stays below the
// linear-in-T bound whenever k_B T exceeds the threshold temperature.
BoundReport mss_bound_check(double kbt, double lambda_g, double rate_fit,
                            const domain::UnitSystem& u);

struct SemiclassicalPrediction {
  MomentumIntegralParams params;
  double kbt = 0.0;
  std::vector<double> t_grid;
  std::vector<double> c_quadrature;
  std::vector<double> c_closed_form;
  double rate_paper = 0.0;
  double bound = 0.0;
  double threshold_kbt = 0.0;
};

// Evaluate both routes on a time grid and cross-certify them: every point
// must be positive with quadrature and closed form within 1e-10 relative,
// otherwise the evaluation throws.
SemiclassicalPrediction predict(double kbt, double lambda_g,
                                const domain::UnitSystem& u,
                                const std::vector<double>& t_grid);

}  // namespace otoc::semi
