#include "otoc/periodic_orbits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "otoc/dynamics.hpp"
#include "otoc/quadrature.hpp"

namespace otoc::orbits {

namespace {

constexpr double kPi = std::numbers::pi;

struct BoundaryLayout {
  double a, ls;
  double s_bottom, s_arc, s_top, s_left;  // piece lengths
  double j0, j1, j2, j3;                  // junction arclengths
  double total;
};

BoundaryLayout layout(const domain::StadiumGeometry& g) {
  BoundaryLayout l;
  l.a = g.a();
  l.ls = g.ls();
  l.s_bottom = l.ls + l.a;
  l.s_arc = 0.5 * kPi * l.a;
  l.s_top = l.ls;
  l.s_left = l.a;
  l.j0 = 0.0;
  l.j1 = l.s_bottom;
  l.j2 = l.s_bottom + l.s_arc;
  l.j3 = l.s_bottom + l.s_arc + l.s_top;
  l.total = l.j3 + l.s_left;
  return l;
}

double wrap_s(double s, double total) {
  s = std::fmod(s, total);
  if (s < 0.0) s += total;
  return s;
}

// 0 = bottom, 1 = arc, 2 = top, 3 = left; u is the coordinate inside the
// piece (length units on flats, angle [0, pi/2] on the arc)
int piece_of(const BoundaryLayout& l, double s, double& u) {
  if (s < l.j1) {
    u = s;
    return 0;
  }
  if (s < l.j2) {
    u = (s - l.j1) / l.a;
    return 1;
  }
  if (s < l.j3) {
    u = s - l.j2;
    return 2;
  }
  u = s - l.j3;
  return 3;
}

}  // namespace

double boundary_length(const domain::StadiumGeometry& g) {
  return layout(g).total;
}

domain::Vec2 boundary_point(const domain::StadiumGeometry& g, double s) {
  const auto l = layout(g);
  double u;
  switch (piece_of(l, wrap_s(s, l.total), u)) {
    case 0:
      return {u, 0.0};
    case 1:
      return {l.ls + l.a * std::cos(u), l.a * std::sin(u)};
    case 2:
      return {l.ls - u, l.a};
    default:
      return {0.0, l.a - u};
  }
}

domain::Vec2 boundary_tangent(const domain::StadiumGeometry& g, double s) {
  const auto l = layout(g);
  double u;
  switch (piece_of(l, wrap_s(s, l.total), u)) {
    case 0:
      return {1.0, 0.0};
    case 1:
      return {-std::sin(u), std::cos(u)};
    case 2:
      return {-1.0, 0.0};
    default:
      return {0.0, -1.0};
  }
}

domain::Vec2 boundary_inward_normal(const domain::StadiumGeometry& g,
                                    double s) {
  const auto t = boundary_tangent(g, s);
  return {-t.y, t.x};  // interior lies to the left of the ccw tangent
}

double boundary_curvature(const domain::StadiumGeometry& g, double s) {
  const auto l = layout(g);
  double u;
  return piece_of(l, wrap_s(s, l.total), u) == 1 ? 1.0 / l.a : 0.0;
}

double junction_distance(const domain::StadiumGeometry& g, double s) {
  const auto l = layout(g);
  const double w = wrap_s(s, l.total);
  double best = l.total;
  for (double j : {l.j0, l.j1, l.j2, l.j3, l.total}) {
    best = std::min(best, std::abs(w - j));
  }
  return best;
}

double chebyshev_trace(double tr_m, int p) {
  if (p < 0) throw std::invalid_argument("repetition count must be >= 0");
  double prev = 2.0, cur = tr_m;  // Tr M^0, Tr M^1
  if (p == 0) return prev;
  for (int k = 1; k < p; ++k) {
    const double next = tr_m * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

Eigen::Matrix2d flight_shear(double len) {
  Eigen::Matrix2d f;
  f << 1.0, len, 0.0, 1.0;
  return f;
}

Eigen::Matrix2d bounce_kick(const BouncePoint& b) {
  Eigen::Matrix2d k;
  k << -1.0, 0.0, 2.0 * b.curvature / b.cos_theta, -1.0;
  return k;
}

// monodromy just after bounce 0, plus the caustic count that feeds the
// phase index: zeros of M12 crossed during the free flights
void assemble_monodromy(PeriodicOrbit& o) {
  const std::size_t n = o.bounces.size();
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
  int caustics = 0;
  for (std::size_t i = 0; i < n; ++i) {
    // along a flight M12(l) = M12 + l M22 is linear: count its zero if it
    // falls strictly inside the segment
    const double m12 = m(0, 1), m22 = m(1, 1);
    if (m22 != 0.0) {
      const double lstar = -m12 / m22;
      if (lstar > 0.0 && lstar < o.seg_length[i]) ++caustics;
    }
    m = flight_shear(o.seg_length[i]) * m;
    m = bounce_kick(o.bounces[(i + 1) % n]) * m;
  }
  o.monodromy = m;
  o.tr_m = m.trace();
  o.det_err = std::abs(m.determinant() - 1.0);
  o.marginal = std::abs(std::abs(o.tr_m) - 2.0) < 1e-9;
  o.nu = int(n) + caustics;
}

// independent certification: run the event-driven engine from the middle
// of the first chord for one full period and measure the return mismatch
void repropagate_closure(const domain::StadiumGeometry& g, PeriodicOrbit& o) {
  const std::size_t n = o.bounces.size();
  const domain::Vec2 r0 = o.bounces[0].r, r1 = o.bounces[1].r;
  const domain::Vec2 dir = (r1 - r0).normalized();
  const domain::Vec2 start = 0.5 * (r0 + r1);
  const double mass = 0.5, pmag = 1.0;
  const double speed = pmag / mass;
  std::vector<dynamics::Bounce> log;
  const auto end = dynamics::propagate(
      g, mass, dynamics::PhaseState{start, dir * pmag},
      o.length / speed * (1.0 - 1e-13), &log);
  if (log.size() != n)
    throw std::runtime_error("orbit re-propagation produced " +
                             std::to_string(log.size()) +
                             " bounces where the cycle has " +
                             std::to_string(n));
  double worst = (end.r - start).norm() +
                 o.length * (end.p * (1.0 / pmag) - dir).norm();
  for (std::size_t k = 0; k < n; ++k) {
    const domain::Vec2 expect = o.bounces[(k + 1) % n].r;
    worst = std::max(worst, (log[k].point - expect).norm());
  }
  o.closure_residual = worst;
}

void fill_bounce_data(const domain::StadiumGeometry& g, PeriodicOrbit& o) {
  const std::size_t n = o.bounces.size();
  o.seg_length.resize(n);
  o.length = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const domain::Vec2 d = o.bounces[(i + 1) % n].r - o.bounces[i].r;
    o.seg_length[i] = d.norm();
    if (o.seg_length[i] < 1e-9)
      throw std::runtime_error("degenerate cycle: repeated bounce point");
    o.length += o.seg_length[i];
    // chords of this convex table stay inside; spot-check the midpoint
    const domain::Vec2 mid = o.bounces[i].r + 0.5 * d;
    if (!g.contains(mid))
      throw std::runtime_error("refined cycle leaves the domain");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const domain::Vec2 out =
        (o.bounces[(i + 1) % n].r - o.bounces[i].r) * (1.0 / o.seg_length[i]);
    const domain::Vec2 nin = boundary_inward_normal(g, o.bounces[i].s);
    o.bounces[i].cos_theta = out.dot(nin);
    o.bounces[i].curvature = boundary_curvature(g, o.bounces[i].s);
    if (o.bounces[i].cos_theta < 1e-8)
      throw std::runtime_error("grazing bounce in refined cycle");
  }
}

}  // namespace

namespace {

// gradient of the cycle length in the boundary parameters (the tangential
// mismatch of the incoming and outgoing unit chords) together with its
// analytic Jacobian, the cyclic tridiagonal Hessian of the length
// functional:
//   dg_i/ds_i     = kappa_i N_i.(u_in - u_out)
//                   + T_i P(u_in) T_i / L_in + T_i P(u_out) T_i / L_out
//   dg_i/ds_{i-1} = -T_i P(u_in) T_{i-1} / L_in
//   dg_i/ds_{i+1} = -T_i P(u_out) T_{i+1} / L_out
// with P(u) = I - u u^T.  For 2-point cycles both chords join the same
// pair, so the off-diagonal contributions accumulate.
void cycle_system(const domain::StadiumGeometry& g, const Eigen::VectorXd& s,
                  double total, Eigen::VectorXd& gv, Eigen::MatrixXd& jac) {
  const std::size_t n = std::size_t(s.size());
  std::vector<domain::Vec2> r(n), tan(n), nor(n);
  std::vector<double> kap(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double si = wrap_s(s[long(i)], total);
    r[i] = boundary_point(g, si);
    tan[i] = boundary_tangent(g, si);
    nor[i] = boundary_inward_normal(g, si);
    kap[i] = boundary_curvature(g, si);
  }
  auto proj = [](domain::Vec2 a, domain::Vec2 u, domain::Vec2 b) {
    return a.dot(b) - a.dot(u) * u.dot(b);
  };
  gv.setZero(long(n));
  jac.setZero(long(n), long(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + n - 1) % n, in = (i + 1) % n;
    domain::Vec2 uin = r[i] - r[ip];
    domain::Vec2 uout = r[in] - r[i];
    const double lin = uin.norm(), lout = uout.norm();
    if (lin < 1e-12 || lout < 1e-12)
      throw std::runtime_error("degenerate cycle during refinement");
    uin = uin * (1.0 / lin);
    uout = uout * (1.0 / lout);
    gv[long(i)] = tan[i].dot(uin - uout);
    jac(long(i), long(i)) += kap[i] * nor[i].dot(uin - uout) +
                             proj(tan[i], uin, tan[i]) / lin +
                             proj(tan[i], uout, tan[i]) / lout;
    jac(long(i), long(ip)) -= proj(tan[i], uin, tan[ip]) / lin;
    jac(long(i), long(in)) -= proj(tan[i], uout, tan[in]) / lout;
  }
}

}  // namespace

PeriodicOrbit find_orbit(const domain::StadiumGeometry& g,
                         std::vector<double> s_guess, int max_iter) {
  const std::size_t n = s_guess.size();
  if (n < 2)
    throw std::invalid_argument("orbit guess needs at least two bounce points");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be positive");
  const double total = boundary_length(g);

  Eigen::VectorXd s(n);
  for (std::size_t i = 0; i < n; ++i) s[long(i)] = wrap_s(s_guess[i], total);

  // Levenberg-Marquardt on the specular system: damping copes with the
  // indefinite Hessian of saddle cycles and with the singular direction of
  // marginal bouncing-ball families
  Eigen::VectorXd gv(n);
  Eigen::MatrixXd jac(n, n);
  cycle_system(g, s, total, gv, jac);
  double mu = 1e-3;
  const double cap = 0.2 * total;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (gv.cwiseAbs().maxCoeff() < 1e-12) break;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtg = jac.transpose() * gv;
    bool moved = false;
    for (int damp = 0; damp < 60; ++damp) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal().array() += mu * (1.0 + jtj.diagonal().maxCoeff());
      Eigen::VectorXd step = lhs.ldlt().solve(-jtg);
      if (step.norm() > cap) step *= cap / step.norm();
      Eigen::VectorXd st = s + step;
      Eigen::VectorXd gt(n);
      Eigen::MatrixXd jt(n, n);
      cycle_system(g, st, total, gt, jt);
      if (gt.norm() < gv.norm() || gt.cwiseAbs().maxCoeff() < 1e-12) {
        s = st;
        gv = gt;
        jac = jt;
        mu = std::max(mu * 0.3, 1e-14);
        moved = true;
        break;
      }
      mu *= 8.0;
    }
    if (!moved)
      throw std::runtime_error(
          "orbit refinement stalled (specular residual " +
          std::to_string(gv.cwiseAbs().maxCoeff()) + ")");
  }
  if (gv.cwiseAbs().maxCoeff() >= 1e-12)
    throw std::runtime_error("orbit refinement did not converge in " +
                             std::to_string(max_iter) + " iterations");

  // polish with undamped Newton steps: the re-propagation certificate
  // amplifies bounce-point error by the orbit stability, so push the
  // specular residual to the machine floor while it keeps improving
  for (int extra = 0; extra < 6; ++extra) {
    if (gv.cwiseAbs().maxCoeff() < 1e-15) break;
    Eigen::VectorXd st =
        s + jac.completeOrthogonalDecomposition().solve(-gv).eval();
    Eigen::VectorXd gt(n);
    Eigen::MatrixXd jt(n, n);
    cycle_system(g, st, total, gt, jt);
    if (gt.cwiseAbs().maxCoeff() >= gv.cwiseAbs().maxCoeff()) break;
    s = st;
    gv = gt;
    jac = jt;
  }

  // reject retraced copies of a shorter cycle: a primitive orbit is not
  // invariant under any nontrivial cyclic shift of its bounce points
  for (std::size_t shift = 1; shift < n; ++shift) {
    if (n % shift != 0) continue;
    double mismatch = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const domain::Vec2 d = boundary_point(g, wrap_s(s[long(i)], total)) -
                             boundary_point(
                                 g, wrap_s(s[long((i + shift) % n)], total));
      mismatch = std::max(mismatch, d.norm());
    }
    if (mismatch < 1e-8)
      throw std::runtime_error(
          "cycle is a repetition of a shorter orbit (period " +
          std::to_string(shift) + " of " + std::to_string(n) + ")");
  }

  // canonical rotation: start the cycle at its smallest boundary parameter
  // so equivalent representations found from different launches agree,
  // including the start-point-dependent conjugate-point count
  std::size_t first = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (wrap_s(s[long(i)], total) < wrap_s(s[long(first)], total)) first = i;

  PeriodicOrbit o;
  o.bounces.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double si = wrap_s(s[long((first + i) % n)], total);
    if (junction_distance(g, si) < 1e-6 * total)
      throw std::runtime_error(
          "refined bounce point sits on a boundary junction");
    o.bounces[i].s = si;
    o.bounces[i].r = boundary_point(g, si);
  }
  o.specular_residual = gv.cwiseAbs().maxCoeff();
  fill_bounce_data(g, o);
  assemble_monodromy(o);
  repropagate_closure(g, o);
  return o;
}

PeriodicOrbit axial_orbit(const domain::StadiumGeometry& g) {
  const auto l = layout(g);
  PeriodicOrbit o;
  o.bounces.resize(2);
  // left-wall corner, normal incidence on the flat
  o.bounces[0].s = 0.0;
  o.bounces[0].r = {0.0, 0.0};
  o.bounces[0].cos_theta = 1.0;
  o.bounces[0].curvature = 0.0;
  // arc vertex, normal incidence on the curved wall
  o.bounces[1].s = l.j1;
  o.bounces[1].r = {l.ls + l.a, 0.0};
  o.bounces[1].cos_theta = 1.0;
  o.bounces[1].curvature = 1.0 / l.a;
  o.seg_length = {l.ls + l.a, l.ls + l.a};
  o.length = 2.0 * (l.ls + l.a);
  o.specular_residual = 0.0;
  o.closure_residual = 0.0;  // exact by reflection symmetry
  assemble_monodromy(o);
  return o;
}

namespace {

// piecewise-linear x(l) along the cycle plus the per-segment squared x
// component of the unit velocity
struct CycleCache {
  std::vector<double> cum;  // n + 1 cumulative chord lengths
  std::vector<double> x0, slope, vx2;
  double len = 0.0;

  int seg_of(double l) const {
    const auto it = std::upper_bound(cum.begin(), cum.end(), l);
    int i = int(it - cum.begin()) - 1;
    return std::clamp(i, 0, int(vx2.size()) - 1);
  }
  double x_at(double l) const {
    const int i = seg_of(l);
    return x0[std::size_t(i)] + slope[std::size_t(i)] * (l - cum[std::size_t(i)]);
  }
};

CycleCache make_cache(const PeriodicOrbit& o) {
  const std::size_t n = o.bounces.size();
  CycleCache c;
  c.cum.resize(n + 1);
  c.x0.resize(n);
  c.slope.resize(n);
  c.vx2.resize(n);
  c.cum[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = o.bounces[(i + 1) % n].r.x - o.bounces[i].r.x;
    c.x0[i] = o.bounces[i].r.x;
    c.slope[i] = dx / o.seg_length[i];
    c.vx2[i] = c.slope[i] * c.slope[i];
    c.cum[i + 1] = c.cum[i] + o.seg_length[i];
  }
  c.len = c.cum[n];
  return c;
}

double wrap_len(double l, double len) {
  l = std::fmod(l, len);
  if (l < 0.0) l += len;
  return l;
}

// (1/1) * sum over uniform nodes of vhat_x^2(l) x^2(l + delta) * (L/N):
// the trapezoidal rule on the periodic cycle
double shape_integral(const CycleCache& c, double delta, int n_nodes) {
  const double h = c.len / n_nodes;
  double acc = 0.0;
  for (int k = 0; k < n_nodes; ++k) {
    const double l = k * h;
    const double x = c.x_at(wrap_len(l + delta, c.len));
    acc += c.vx2[std::size_t(c.seg_of(l))] * x * x;
  }
  return acc * h;
}

void check_correlation_args(const PeriodicOrbit& o, double p_mag, double mass,
                            int n_nodes) {
  if (o.bounces.size() < 2 || o.length <= 0.0)
    throw std::invalid_argument("orbit correlation needs a built orbit");
  if (!(p_mag > 0.0) || !(mass > 0.0))
    throw std::invalid_argument(
        "orbit correlation needs positive momentum and mass");
  if (n_nodes < 1024)
    throw std::invalid_argument("orbit correlation needs >= 1024 nodes");
}

}  // namespace

OrbitCorrelation c_gamma(const PeriodicOrbit& orbit,
                         const std::vector<double>& t_grid, double p_mag,
                         double mass, int n_nodes) {
  check_correlation_args(orbit, p_mag, mass, n_nodes);
  if (t_grid.empty()) throw std::invalid_argument("empty time grid");
  const auto cache = make_cache(orbit);
  const double speed = p_mag / mass;
  OrbitCorrelation out;
  out.t = t_grid;
  out.period = orbit.length / speed;
  out.value.reserve(t_grid.size());
  for (double t : t_grid) {
    const double delta = wrap_len(speed * t, cache.len);
    out.value.push_back(p_mag * p_mag * shape_integral(cache, delta, n_nodes));
  }
  return out;
}

PoKernelParts po_kernel(const PeriodicOrbit& orbit, int rep, double k,
                        double t, double beta, const domain::UnitSystem& u,
                        int n_nodes) {
  if (rep < 1) throw std::invalid_argument("repetition index must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!(k >= 0.0)) throw std::invalid_argument("wavenumber must be >= 0");
  if (orbit.marginal)
    throw std::invalid_argument(
        "marginal orbit: the stability weight 1/sqrt(|Tr M^p - 2|) diverges");
  check_correlation_args(orbit, 1.0, u.m, n_nodes);

  const double trp = chebyshev_trace(orbit.tr_m, rep);
  const double gap = std::abs(trp - 2.0);
  if (gap < 1e-9)
    throw std::invalid_argument("orbit repetition is marginal (Tr M^p = 2)");

  PoKernelParts parts;
  parts.cosine =
      std::cos(rep * k * orbit.length - rep * kPi * double(orbit.nu) / 2.0);
  if (k == 0.0) return parts;  // Jacobian factor vanishes

  const double p_mag = u.hbar * k;
  const double eps = p_mag * p_mag / (2.0 * u.m);
  const auto cache = make_cache(orbit);
  const double delta = wrap_len((p_mag / u.m) * t, cache.len);
  const double c_val =
      p_mag * p_mag * shape_integral(cache, delta, n_nodes);
  parts.amplitude = (2.0 / (4.0 * kPi * kPi * u.hbar * u.hbar)) *
                    (u.hbar * u.hbar * k / u.m) * std::exp(-beta * eps) *
                    c_val / std::sqrt(gap);
  return parts;
}

io::OtocSeries po_correction(const std::vector<PeriodicOrbit>& orbits,
                             int p_max, double beta,
                             const std::vector<double>& t_grid,
                             const domain::UnitSystem& u) {
  if (p_max < 1) throw std::invalid_argument("p_max must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (t_grid.empty()) throw std::invalid_argument("empty time grid");
  for (std::size_t i = 0; i < orbits.size(); ++i)
    if (orbits[i].marginal)
      throw std::invalid_argument(
          "orbit " + std::to_string(i) +
          " is marginal (bouncing-ball family); it must be excluded from "
          "the trace-formula sum");

  const double kbt = 1.0 / beta;
  io::OtocSeries out;
  out.meta.label = "po-correction-o3";
  out.meta.beta = beta;
  out.meta.kbt = kbt;
  const double vt = u.vtilde(kbt);
  const double k_max = std::sqrt(2.0 * u.m * (45.0 / beta)) / u.hbar;
  out.meta.scales["p_max"] = double(p_max);
  out.meta.scales["k_max"] = k_max;

  // per-orbit lookup table of the correlation shape over one period;
  // linear interpolation keeps the k-quadrature cheap
  constexpr int kTable = 4096;
  std::vector<CycleCache> caches;
  std::vector<std::vector<double>> tables;
  caches.reserve(orbits.size());
  tables.reserve(orbits.size());
  for (const auto& o : orbits) {
    caches.push_back(make_cache(o));
    std::vector<double> tab(kTable);
    for (int j = 0; j < kTable; ++j)
      tab[std::size_t(j)] =
          shape_integral(caches.back(), caches.back().len * j / kTable, 2048);
    tables.push_back(std::move(tab));
  }
  auto shape_lookup = [&](std::size_t oi, double delta) {
    const double len = caches[oi].len;
    const double pos = wrap_len(delta, len) / len * kTable;
    const int j = int(pos);
    const double f = pos - j;
    const auto& tab = tables[oi];
    return (1.0 - f) * tab[std::size_t(j % kTable)] +
           f * tab[std::size_t((j + 1) % kTable)];
  };

  const double pref = 2.0 / (4.0 * kPi * kPi * u.hbar * u.hbar);
  for (double t : t_grid) {
    if (!std::isfinite(t)) throw std::invalid_argument("non-finite time");
    double val = 0.0;
    for (std::size_t oi = 0; oi < orbits.size(); ++oi) {
      const auto& o = orbits[oi];
      for (int rep = 1; rep <= p_max; ++rep) {
        const double gap = std::abs(chebyshev_trace(o.tr_m, rep) - 2.0);
        if (gap < 1e-9)
          throw std::invalid_argument("marginal repetition in orbit sum");
        const double stab = 1.0 / std::sqrt(gap);
        auto f = [&](double k) {
          const double p_mag = u.hbar * k;
          const double eps = p_mag * p_mag / (2.0 * u.m);
          const double cv =
              p_mag * p_mag * shape_lookup(oi, (p_mag / u.m) * t);
          const double phase =
              rep * k * o.length - rep * kPi * double(o.nu) / 2.0;
          return pref * (u.hbar * u.hbar * k / u.m) * std::exp(-beta * eps) *
                 cv * stab * std::cos(phase);
        };
        // fixed composite rule with oscillation-resolving panel count so
        // the orbit sum stays exactly linear in its inputs
        const double cycles =
            k_max * (rep * o.length +
                     8.0 * std::abs(t) * u.hbar / (u.m * o.length));
        const int panels = std::clamp(int(cycles / 4.0) + 64, 64, 200000);
        val += quad::composite(f, 0.0, k_max, panels);
      }
    }
    out.push(t, vt * t, val, 0.0);
  }
  return out;
}

}  // namespace otoc::orbits
