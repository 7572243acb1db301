#include "otoc/dynamics.hpp"

#include <cmath>
#include <numbers>

#include "otoc/rng.hpp"

namespace otoc::dynamics {

using domain::Vec2;
using domain::Wall;

PhaseState propagate(const domain::Domain& dom, double mass, PhaseState s,
                     double t, std::vector<Bounce>* bounce_log) {
  return trace_segments(dom, mass, s, t, [](double, double, Vec2, Vec2) {}, bounce_log);
}

namespace {

// Wall curvature seen by the trajectory: 1/a on the arc (focusing), 0 on
// the flat pieces.  The rectangle's "Arc" label is its right wall (flat).
double wall_curvature(const domain::Domain& dom, Wall w) {
  if (w != Wall::Arc) return 0.0;
  if (const auto* st = dynamic_cast<const domain::StadiumGeometry*>(&dom))
    return 1.0 / st->a();
  return 0.0;
}

}  // namespace

TransverseTangent propagate_tangent(const domain::Domain& dom, double mass,
                                    PhaseState s, TransverseTangent tan, double t) {
  const double p_mag = s.p.norm();
  double t_prev = 0.0;
  std::vector<Bounce> log;
  // Re-run the trajectory bounce by bounce, composing shear and kicks.
  // The shear between consecutive events only needs the elapsed time, so
  // one pass over the bounce log is enough.
  PhaseState cursor = s;
  while (true) {
    const Vec2 v = cursor.p * (1.0 / mass);
    const auto hit = dom.ray_to_boundary(cursor.r, v);
    const double speed = p_mag / mass;
    const double t_hit = t_prev + hit.distance / speed;
    const double tau = std::min(t_hit, t) - t_prev;
    tan.dq += tau / mass * tan.dp;
    if (t_hit >= t) break;
    const double cos_inc = cursor.p.dot(hit.normal) / p_mag;
    if (cos_inc < kGrazingCosThreshold) throw GrazingEvent(hit.point, cos_inc);
    const double kappa = wall_curvature(dom, hit.wall);
    const double kick = 2.0 * p_mag * kappa / cos_inc;
    const double dq_new = -tan.dq;
    const double dp_new = kick * tan.dq - tan.dp;
    tan = TransverseTangent{dq_new, dp_new};
    cursor.r = hit.point;
    cursor.p = cursor.p - 2.0 * cursor.p.dot(hit.normal) * hit.normal;
    t_prev = t_hit;
  }
  return tan;
}

LyapunovEstimate lyapunov_geometric(const domain::Domain& dom,
                                    const LyapunovParams& params,
                                    std::uint64_t seed) {
  if (params.n_traj < 2) throw std::invalid_argument("lyapunov: need n_traj >= 2");
  if (params.total_length <= params.renorm_length)
    throw std::invalid_argument("lyapunov: total_length must exceed renorm_length");

  const double a = params.tangent_scale;
  const double p_mag = params.momentum;
  std::vector<double> estimates;
  estimates.reserve(params.n_traj);
  long resampled = 0;

  for (int traj = 0; traj < params.n_traj; ++traj) {
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 64)
        throw std::runtime_error("lyapunov: persistent grazing, geometry suspect");
      auto rng = make_stream(seed, (std::uint64_t(traj) << 8) | std::uint64_t(attempt));
      std::uniform_real_distribution<double> uang(0.0, 2.0 * std::numbers::pi);
      try {
        Vec2 r = domain::sample_uniform_point(dom, rng);
        const double phi = uang(rng);
        Vec2 dir{std::cos(phi), std::sin(phi)};
        const double psi = uang(rng);
        // Physical tangent (dq, dp); the norm below is taken on the
        // dimensionless pair (dq/a, dp/|p|), so the estimate is a pure
        // inverse length whatever |p| is.
        double dq = a * std::cos(psi), dp = p_mag * std::sin(psi);
        double log_sum = 0.0;
        double length = 0.0, since_renorm = 0.0;
        const auto tangent_norm = [&] { return std::hypot(dq / a, dp / p_mag); };
        while (length < params.total_length) {
          const auto hit = dom.ray_to_boundary(r, dir);
          const double seg = std::min(hit.distance, params.total_length - length);
          dq += seg / p_mag * dp;  // (tau/m) dp with tau = seg*m/|p|
          length += seg;
          since_renorm += seg;
          if (length >= params.total_length) break;
          const double cos_inc = dir.dot(hit.normal);
          if (cos_inc < kGrazingCosThreshold) throw GrazingEvent(hit.point, cos_inc);
          const double kappa = wall_curvature(dom, hit.wall);
          const double kick = 2.0 * p_mag * kappa / cos_inc;
          const double dq_new = -dq;
          const double dp_new = kick * dq - dp;
          dq = dq_new;
          dp = dp_new;
          r = hit.point;
          dir = dir - 2.0 * dir.dot(hit.normal) * hit.normal;
          if (since_renorm >= params.renorm_length) {
            const double nrm = tangent_norm();
            log_sum += std::log(nrm);
            dq /= nrm;
            dp /= nrm;
            since_renorm = 0.0;
          }
        }
        log_sum += std::log(tangent_norm());
        estimates.push_back(log_sum / params.total_length);
        break;
      } catch (const GrazingEvent&) {
        ++resampled;
      }
    }
  }

  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= estimates.size();
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= (estimates.size() - 1);

  LyapunovEstimate out;
  out.lambda_g = mean;
  out.stderr_ = std::sqrt(var / estimates.size());
  out.total_length = params.total_length;
  out.n_traj = params.n_traj;
  out.resampled = resampled;
  out.per_traj = std::move(estimates);
  return out;
}

}  // namespace otoc::dynamics
