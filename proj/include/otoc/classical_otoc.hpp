#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "otoc/dynamics.hpp"
#include "otoc/geometry.hpp"
#include "otoc/series.hpp"

namespace otoc::classical {

// Boltzmann-uniform product measure over the billiard phase space.
struct ThermalEnsemble {
  double beta = 1.0;
  double m = 0.5;
  double hbar = 1.0;

  double kbt() const { return 1.0 / beta; }
  double vtilde() const { return std::sqrt(kbt() / m); }
  // Partition function of a free particle confined to area A.
  double z(double area) const {
    return area * m / (2.0 * domain::StadiumGeometry::pi() * hbar * hbar * beta);
  }
};

// r uniform over the domain, p componentwise Gaussian with variance m k_B T.
dynamics::PhaseState sample_thermal(const ThermalEnsemble& ens,
                                    const domain::Domain& dom,
                                    std::mt19937_64& rng);

struct ClassicalOtocParams {
  long n_samples = 1'000'000;
  int n_blocks = 100;          // jackknife blocks; fixed-order reduction
  std::uint64_t seed = 1;
  // Restrict to samples with no bounce in the symmetric window (-t, t).
  // The two-sided condition keeps the conditioned measure even in p, which
  // the quadratic small-time law needs (<P^3 X> = 0); conditioning on the
  // forward direction alone makes the subset difference vanish identically.
  bool unbounced_only = false;
};

struct ClassicalOtocResult {
  io::OtocSeries series;  // O_cl(t) = <P_X(0)^2 X(t)^2>
  // With unbounced_only: <P_X^2 X(0)^2> over the same surviving subset at
  // each grid time, so value - baseline isolates the free-flight growth.
  io::OtocSeries baseline;
  // Fraction of samples surviving the no-bounce window at each grid time
  // (all samples when unbounced_only is off).
  std::vector<double> unbounced_fraction;
  long resampled = 0;                      // grazing-triggered redraws
  double mean_speed = 0.0;                 // <|p|>/m of the accepted samples
  // Raw per-block sums and counts (block-major), kept so callers can
  // jackknife derived quantities (differences, plateau means).
  std::vector<std::vector<double>> block_sum, block_cnt, block_sum0;

  // Jackknife standard error of value[i] - baseline[i] (unbounced mode).
  double jackknife_se_difference(std::size_t i) const;
  // Jackknife standard error of the average of value over the given indices.
  double jackknife_se_mean(const std::vector<std::size_t>& idx) const;
};

// Monte Carlo estimate of the classical OTOC on a shared time grid; each
// sampled trajectory is propagated once and X recorded at every grid time.
ClassicalOtocResult o_classical(const ThermalEnsemble& ens,
                                const domain::Domain& dom,
                                const std::vector<double>& t_grid,
                                const ClassicalOtocParams& params);

struct AnalyticAnchors {
  double t0_value = 0.0;               // m G_Y^2 k_B T
  double quadratic_coefficient = 0.0;  // 3 (k_B T)^2
};

AnalyticAnchors analytic_anchors(const ThermalEnsemble& ens, const domain::Domain& dom);

}  // namespace otoc::classical
