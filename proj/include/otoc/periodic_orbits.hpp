#pragma once

#include <Eigen/Dense>
#include <vector>

#include "otoc/geometry.hpp"
#include "otoc/series.hpp"
#include "otoc/units.hpp"

// Short primitive periodic orbits of the quarter-stadium billiard and the
// trace-formula correction they contribute to the positive correlator
// component.
//
// The boundary is parametrized by arclength s, counter-clockwise from the
// origin corner: bottom wall, arc, top wall, left wall.  A candidate cycle
// of n boundary points is refined by Newton iteration on the stationarity
// of the cycle length (the gradient of sum_i |r_{i+1} - r_i| in the s
// parameters vanishes exactly on specular orbits).  Each accepted orbit is
// re-propagated through the event-driven bounce engine from a point on its
// first chord and must return to its start; that independent closure
// residual is stored on the orbit.
//
// The transverse monodromy uses the unit-speed convention: free flights
// contribute the shear [[1, L], [0, 1]] and a bounce with incidence cosine
// cos(th) on a wall of curvature kappa contributes [[-1, 0],
// [2 kappa / cos(th), -1]] (so flats give -identity and det M = 1 exactly).
namespace otoc::orbits {

struct BouncePoint {
  double s = 0.0;          // boundary arclength parameter
  domain::Vec2 r;          // bounce position
  double cos_theta = 1.0;  // incidence cosine against the wall normal
  double curvature = 0.0;  // boundary curvature (1/a on the arc, 0 on flats)
};

struct PeriodicOrbit {
  std::vector<BouncePoint> bounces;   // ordered along the cycle
  std::vector<double> seg_length;     // chord i joins bounce i to i+1 (cyclic)
  double length = 0.0;                // primitive length L
  Eigen::Matrix2d monodromy;          // transverse return map
  double tr_m = 0.0;
  double det_err = 0.0;               // |det M - 1|
  bool marginal = false;              // |Tr M| == 2 within 1e-9 (bouncing-ball)
  int nu = 0;                         // phase index: bounces + caustic count
  double specular_residual = 0.0;     // max tangential direction mismatch
  double closure_residual = 0.0;      // bounce-map return distance
};

// --- boundary parametrization -------------------------------------------
double boundary_length(const domain::StadiumGeometry& g);
domain::Vec2 boundary_point(const domain::StadiumGeometry& g, double s);
domain::Vec2 boundary_tangent(const domain::StadiumGeometry& g, double s);
domain::Vec2 boundary_inward_normal(const domain::StadiumGeometry& g, double s);
double boundary_curvature(const domain::StadiumGeometry& g, double s);
// Arclength distance to the nearest boundary junction (corners and the
// arc/top join); Newton steps must stay clear of these.
double junction_distance(const domain::StadiumGeometry& g, double s);

// --- orbit construction ---------------------------------------------------
// Refine a cycle of boundary points (arclength parameters, >= 2 of them)
// into a periodic orbit.  Throws if Newton does not reach a specular
// residual of 1e-12 within max_iter steps, if a bounce lands on a
// junction, if a chord leaves the domain, or if the refined cycle is
// degenerate.
PeriodicOrbit find_orbit(const domain::StadiumGeometry& g,
                         std::vector<double> s_guess, int max_iter = 100);

// The symmetry-axis diameter orbit (normal incidence on the left wall and
// on the arc vertex).  Its bounce points sit on boundary corners, which the
// event-driven engine cannot traverse, so it is built in closed form:
// L = 2 (ls + a) and the monodromy is the two-flight product with a single
// curvature kick.  Its closure residual is exact (zero) by symmetry.
PeriodicOrbit axial_orbit(const domain::StadiumGeometry& g);

// Tr(M^p) from Tr(M) via the Chebyshev identity Tr(M^p) = 2 T_p(Tr M / 2),
// valid for any unimodular 2x2 matrix.
double chebyshev_trace(double tr_m, int p);

// --- orbit correlation ----------------------------------------------------
struct OrbitCorrelation {
  std::vector<double> t;
  std::vector<double> value;  // momentum^2 * length^3 units
  double period = 0.0;        // L / speed: c_gamma is periodic in t with it
};

// c_gamma(t) = integral over the cycle of P_X^2(l) X^2(l; t) dl, where the
// start point l carries momentum p_mag along the cycle direction and
// X(l; t) is the x coordinate reached after time t of motion along the
// closed orbit.  Uniform trapezoidal rule with n_nodes samples.
OrbitCorrelation c_gamma(const PeriodicOrbit& orbit,
                         const std::vector<double>& t_grid, double p_mag,
                         double mass, int n_nodes = 4096);

// --- trace-formula correction ----------------------------------------------
struct PoKernelParts {
  double amplitude = 0.0;  // smooth factor of the k-space integrand
  double cosine = 0.0;     // cos(p k L - p pi nu / 2)
};

// Integrand of the energy integral after substituting eps = (hbar k)^2/2m:
// amplitude carries the Jacobian, Boltzmann damping, orbit correlation at
// momentum hbar k, and the stability weight 1/sqrt(|Tr M^p - 2|).
PoKernelParts po_kernel(const PeriodicOrbit& orbit, int rep, double k,
                        double t, double beta, const domain::UnitSystem& u,
                        int n_nodes = 2048);

// Truncated periodic-orbit correction to the positive component: sum over
// orbits and repetitions rep = 1..p_max of the k-integral of po_kernel.
// Marginal orbits are rejected (their stability weight diverges).  The
// returned series is an additive correction, not a full correlator, and
// may take either sign.
io::OtocSeries po_correction(const std::vector<PeriodicOrbit>& orbits,
                             int p_max, double beta,
                             const std::vector<double>& t_grid,
                             const domain::UnitSystem& u);

}  // namespace otoc::orbits
