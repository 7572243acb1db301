#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "otoc/geometry.hpp"

namespace otoc::dynamics {

struct PhaseState {
  domain::Vec2 r;  // position
  domain::Vec2 p;  // momentum
};

struct Bounce {
  domain::Vec2 point;
  double time = 0.0;
  domain::Wall wall = domain::Wall::None;
};

// Transverse deviations perpendicular to the reference trajectory:
// dq in length units, dp in momentum units.
struct TransverseTangent {
  double dq = 0.0;
  double dp = 0.0;
};

// Measure-zero tangency: |cos(th)| below threshold at a bounce.  Callers
// doing Monte Carlo catch this and resample the trajectory.
class GrazingEvent : public std::runtime_error {
 public:
  GrazingEvent(domain::Vec2 where, double cos_theta)
      : std::runtime_error("grazing bounce"), point(where), cos_incidence(cos_theta) {}
  domain::Vec2 point;
  double cos_incidence;
};

inline constexpr double kGrazingCosThreshold = 1e-10;

// Event-driven engine: free flight + specular reflection.  The visitor is
// called once per free-flight segment as segment(t0, t1, r0, v) with r0
// the position at t0 and v the (constant) velocity on [t0, t1]; the last
// segment ends exactly at t_end.  Bounce data goes to *log when nonnull.
template <class SegmentVisitor>
PhaseState trace_segments(const domain::Domain& dom, double mass, PhaseState s,
                          double t_end, SegmentVisitor&& segment,
                          std::vector<Bounce>* log = nullptr,
                          long* bounce_count = nullptr) {
  if (t_end < 0.0) throw std::invalid_argument("trace_segments: negative time");
  if (mass <= 0.0) throw std::invalid_argument("trace_segments: mass must be positive");
  const double speed = s.p.norm() / mass;
  if (speed <= 0.0) throw std::invalid_argument("trace_segments: |p| must be positive");
  double t = 0.0;
  long bounces = 0;
  constexpr long kMaxBounces = 100'000'000;
  while (true) {
    const domain::Vec2 v = s.p * (1.0 / mass);
    const auto hit = dom.ray_to_boundary(s.r, v);
    const double t_hit = t + hit.distance / speed;
    if (t_hit >= t_end) {
      segment(t, t_end, s.r, v);
      s.r = s.r + v * (t_end - t);
      break;
    }
    segment(t, t_hit, s.r, v);
    const double cos_inc = (s.p.dot(hit.normal)) / s.p.norm();
    if (cos_inc < kGrazingCosThreshold) throw GrazingEvent(hit.point, cos_inc);
    s.r = hit.point;
    s.p = s.p - 2.0 * s.p.dot(hit.normal) * hit.normal;
    t = t_hit;
    if (log) log->push_back(Bounce{hit.point, t_hit, hit.wall});
    if (++bounces > kMaxBounces)
      throw std::runtime_error("trace_segments: bounce limit exceeded");
  }
  if (bounce_count) *bounce_count = bounces;
  return s;
}

PhaseState propagate(const domain::Domain& dom, double mass, PhaseState s,
                     double t, std::vector<Bounce>* bounce_log = nullptr);

// Exact billiard tangent map along the trajectory of `s`: free-flight
// shear dq += (tau/m) dp between bounces; at each bounce
// (dq, dp) -> (-dq, (2|p|/(rho cos th)) dq - dp) with rho = a on the arc
// and 1/rho = 0 on flat walls.  Components are measured along the frame
// obtained by rotating the flight direction by +90 deg; the kick sign is
// fixed by the focusing-mirror law (a parallel beam crosses the axis at
// focal distance rho cos th / 2 after an arc bounce).
TransverseTangent propagate_tangent(const domain::Domain& dom, double mass,
                                    PhaseState s, TransverseTangent tan, double t);

struct LyapunovParams {
  int n_traj = 16;
  double total_length = 4000.0;   // arc length per trajectory
  double renorm_length = 1.0;     // tangent renormalization interval
  double momentum = 1.0;          // |p|; estimate is independent of it
  double mass = 0.5;
  double tangent_scale = 1.0;     // length scale a used in the tangent norm
};

struct LyapunovEstimate {
  double lambda_g = 0.0;   // per unit arc length
  double stderr_ = 0.0;    // over trajectories
  double total_length = 0.0;
  int n_traj = 0;
  long resampled = 0;      // grazing-triggered restarts
  std::vector<double> per_traj;  // individual trajectory estimates
  // Per-time exponent at momentum |p|: lambda = (|p|/m) lambda_g.
  double lambda(double p_mag, double mass) const { return p_mag / mass * lambda_g; }
};

// Benettin estimator of the geometric Lyapunov exponent: evolve a unit
// transverse tangent along random trajectories, renormalize every
// renorm_length of path, and average ln(growth)/length over trajectories.
LyapunovEstimate lyapunov_geometric(const domain::Domain& dom,
                                    const LyapunovParams& params,
                                    std::uint64_t seed);

}  // namespace otoc::dynamics
