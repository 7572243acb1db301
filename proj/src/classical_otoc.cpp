#include "otoc/classical_otoc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "otoc/rng.hpp"

namespace otoc::classical {

using dynamics::PhaseState;
using domain::Vec2;

PhaseState sample_thermal(const ThermalEnsemble& ens, const domain::Domain& dom,
                          std::mt19937_64& rng) {
  const Vec2 r = domain::sample_uniform_point(dom, rng);
  std::normal_distribution<double> gauss(0.0, std::sqrt(ens.m * ens.kbt()));
  const double px = gauss(rng);
  const double py = gauss(rng);
  return PhaseState{r, Vec2{px, py}};
}

namespace {

// Jackknife standard error of a ratio-of-sums estimator.
double jackknife_se(const std::vector<double>& sums, const std::vector<double>& cnts,
                    double tot_sum, double tot_cnt) {
  const int nb = int(sums.size());
  std::vector<double> theta(nb);
  double jk_mean = 0.0;
  for (int b = 0; b < nb; ++b) {
    theta[b] = (tot_sum - sums[b]) / (tot_cnt - cnts[b]);
    jk_mean += theta[b];
  }
  jk_mean /= nb;
  double var = 0.0;
  for (int b = 0; b < nb; ++b) var += (theta[b] - jk_mean) * (theta[b] - jk_mean);
  return std::sqrt(var * double(nb - 1) / double(nb));
}

}  // namespace

ClassicalOtocResult o_classical(const ThermalEnsemble& ens,
                                const domain::Domain& dom,
                                const std::vector<double>& t_grid,
                                const ClassicalOtocParams& params) {
  if (t_grid.empty()) throw std::invalid_argument("o_classical: empty time grid");
  if (!std::is_sorted(t_grid.begin(), t_grid.end()))
    throw std::invalid_argument("o_classical: time grid must be increasing");
  if (params.n_samples < 100) throw std::invalid_argument("o_classical: too few samples");
  const int nb = params.n_blocks;
  if (nb < 2 || params.n_samples % nb != 0)
    throw std::invalid_argument("o_classical: n_samples must be a multiple of n_blocks >= 2");

  const std::size_t nt = t_grid.size();
  const double t_max = t_grid.back();
  const long per_block = params.n_samples / nb;

  ClassicalOtocResult out;
  // Per-block accumulators; reduced in fixed block order afterwards so the
  // result is independent of any parallel schedule.
  out.block_sum.assign(nb, std::vector<double>(nt, 0.0));
  out.block_cnt.assign(nb, std::vector<double>(nt, 0.0));
  out.block_sum0.assign(nb, std::vector<double>(nt, 0.0));
  std::vector<long> block_resampled(nb, 0);
  std::vector<double> block_speed(nb, 0.0);

#pragma omp parallel for schedule(dynamic)
  for (int b = 0; b < nb; ++b) {
    auto rng = make_stream(params.seed, std::uint64_t(b));
    auto& sum = out.block_sum[b];
    auto& cnt = out.block_cnt[b];
    auto& sum0 = out.block_sum0[b];
    std::vector<double> x_at(nt);
    std::vector<std::uint8_t> seen_bounce(nt);
    for (long k = 0; k < per_block; ++k) {
      for (;;) {
        const PhaseState s0 = sample_thermal(ens, dom, rng);
        const double px2 = s0.p.x * s0.p.x;
        try {
          // Time of the first bounce looking backwards.  The no-bounce
          // window has to be symmetric in time: conditioning only on the
          // future breaks the p -> -p symmetry of the measure and shifts
          // <P^3 X> enough to cancel the quadratic growth exactly.
          double t_back = std::numeric_limits<double>::infinity();
          if (params.unbounced_only) {
            const double speed = s0.p.norm() / ens.m;
            const auto back = dom.ray_to_boundary(s0.r, s0.p * (-1.0));
            t_back = back.distance / speed;
          }
          // One pass over [0, t_max]: record X (and whether a bounce
          // happened yet) at every grid time falling in each segment.
          std::size_t next = 0;
          bool bounced = false;
          dynamics::trace_segments(
              dom, ens.m, s0, t_max,
              [&](double t0, double t1, Vec2 r0, Vec2 v) {
                while (next < nt && t_grid[next] <= t1) {
                  x_at[next] = r0.x + (t_grid[next] - t0) * v.x;
                  seen_bounce[next] = bounced ? 1 : 0;
                  ++next;
                }
                bounced = true;  // a bounce follows every inner segment
              });
          // The final segment ends exactly at t_max = t_grid.back(), so
          // every grid time has been recorded.
          if (next != nt)
            throw std::runtime_error("o_classical: grid time not covered by trajectory");
          const double x0sq = s0.r.x * s0.r.x;
          for (std::size_t i = 0; i < nt; ++i) {
            if (params.unbounced_only && (seen_bounce[i] || t_grid[i] >= t_back)) continue;
            sum[i] += px2 * x_at[i] * x_at[i];
            sum0[i] += px2 * x0sq;
            cnt[i] += 1.0;
          }
          block_speed[b] += s0.p.norm() / ens.m;
          break;
        } catch (const dynamics::GrazingEvent&) {
          ++block_resampled[b];
        }
      }
    }
  }

  out.unbounced_fraction.assign(nt, 0.0);
  std::vector<double> tot_sum(nt, 0.0), tot_cnt(nt, 0.0), tot_sum0(nt, 0.0);
  for (int b = 0; b < nb; ++b) {
    out.resampled += block_resampled[b];
    out.mean_speed += block_speed[b];
    for (std::size_t i = 0; i < nt; ++i) {
      tot_sum[i] += out.block_sum[b][i];
      tot_cnt[i] += out.block_cnt[b][i];
      tot_sum0[i] += out.block_sum0[b][i];
    }
  }
  out.mean_speed /= double(params.n_samples);

  const double vt = ens.vtilde();
  for (io::OtocSeries* s : {&out.series, &out.baseline}) {
    s->meta.kbt = ens.kbt();
    s->meta.beta = ens.beta;
    s->meta.scales["kbt"] = ens.kbt();
    s->meta.scales["vtilde"] = vt;
  }
  out.series.meta.label = params.unbounced_only ? "classical_otoc_unbounced" : "classical_otoc";
  out.baseline.meta.label = "classical_otoc_t0_subset";

  for (std::size_t i = 0; i < nt; ++i) {
    if (tot_cnt[i] == 0.0)
      throw std::runtime_error("o_classical: no surviving samples at a grid time");
    std::vector<double> bs(nb), bc(nb), bs0(nb);
    for (int b = 0; b < nb; ++b) {
      bs[b] = out.block_sum[b][i];
      bc[b] = out.block_cnt[b][i];
      bs0[b] = out.block_sum0[b][i];
    }
    out.series.push(t_grid[i], vt * t_grid[i], tot_sum[i] / tot_cnt[i],
                    jackknife_se(bs, bc, tot_sum[i], tot_cnt[i]));
    out.baseline.push(t_grid[i], vt * t_grid[i], tot_sum0[i] / tot_cnt[i],
                      jackknife_se(bs0, bc, tot_sum0[i], tot_cnt[i]));
    out.unbounced_fraction[i] = tot_cnt[i] / double(params.n_samples);
  }
  return out;
}

double ClassicalOtocResult::jackknife_se_difference(std::size_t i) const {
  const int nb = int(block_sum.size());
  double ts = 0.0, tc = 0.0, ts0 = 0.0;
  for (int b = 0; b < nb; ++b) {
    ts += block_sum[b][i];
    tc += block_cnt[b][i];
    ts0 += block_sum0[b][i];
  }
  std::vector<double> theta(nb);
  double jk_mean = 0.0;
  for (int b = 0; b < nb; ++b) {
    const double cx = tc - block_cnt[b][i];
    theta[b] = (ts - block_sum[b][i]) / cx - (ts0 - block_sum0[b][i]) / cx;
    jk_mean += theta[b];
  }
  jk_mean /= nb;
  double var = 0.0;
  for (int b = 0; b < nb; ++b) var += (theta[b] - jk_mean) * (theta[b] - jk_mean);
  return std::sqrt(var * double(nb - 1) / double(nb));
}

double ClassicalOtocResult::jackknife_se_mean(const std::vector<std::size_t>& idx) const {
  const int nb = int(block_sum.size());
  std::vector<double> theta(nb, 0.0);
  for (std::size_t i : idx) {
    double ts = 0.0, tc = 0.0;
    for (int b = 0; b < nb; ++b) {
      ts += block_sum[b][i];
      tc += block_cnt[b][i];
    }
    for (int b = 0; b < nb; ++b)
      theta[b] += (ts - block_sum[b][i]) / (tc - block_cnt[b][i]);
  }
  double jk_mean = 0.0;
  for (int b = 0; b < nb; ++b) {
    theta[b] /= double(idx.size());
    jk_mean += theta[b];
  }
  jk_mean /= nb;
  double var = 0.0;
  for (int b = 0; b < nb; ++b) var += (theta[b] - jk_mean) * (theta[b] - jk_mean);
  return std::sqrt(var * double(nb - 1) / double(nb));
}

AnalyticAnchors analytic_anchors(const ThermalEnsemble& ens, const domain::Domain& dom) {
  const auto gy = domain::gyration_y(dom);
  return AnalyticAnchors{ens.m * gy.gy2 * ens.kbt(),
                         3.0 * ens.kbt() * ens.kbt()};
}

}  // namespace otoc::classical
