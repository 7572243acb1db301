#include "otoc/geometry.hpp"

#include <cmath>
#include <limits>

#include "otoc/quadrature.hpp"

namespace otoc::domain {

double Vec2::norm() const { return std::sqrt(norm2()); }

Vec2 Vec2::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
  return {x / n, y / n};
}

double UnitSystem::vtilde(double kbt) const {
  if (kbt <= 0.0) throw std::invalid_argument("vtilde: k_B T must be positive");
  return std::sqrt(kbt / m);
}

double StadiumGeometry::pi() { return 3.14159265358979323846; }

StadiumGeometry::StadiumGeometry(double a, double ls) : a_(a), ls_(ls) {
  if (a <= 0.0) throw std::invalid_argument("stadium: radius a must be positive");
  if (ls < 0.0) throw std::invalid_argument("stadium: straight length ls must be >= 0");
}

double StadiumGeometry::perimeter() const {
  // left + top + bottom + quarter arc
  return a_ + ls_ + (ls_ + a_) + 0.5 * pi() * a_;
}

bool StadiumGeometry::contains(Vec2 r) const {
  if (r.x <= 0.0 || r.y <= 0.0 || r.y >= a_) return false;
  if (r.x < ls_) return true;
  const double dx = r.x - ls_;
  return dx * dx + r.y * r.y < a_ * a_;
}

double StadiumGeometry::slab_height(double x) const {
  if (x < 0.0 || x > ls_ + a_) return 0.0;
  if (x <= ls_) return a_;
  const double dx = x - ls_;
  return std::sqrt(std::max(0.0, a_ * a_ - dx * dx));
}

namespace {

// A trajectory point sits exactly on a wall after every bounce; candidate
// intersections closer than this (relative to the billiard size) are the
// wall we are standing on and must be ignored.
constexpr double kRayEps = 1e-12;

struct Candidate {
  double t = std::numeric_limits<double>::infinity();
  Vec2 point, normal;
  Wall wall = Wall::None;
};

void consider(Candidate& best, double t, Vec2 point, Vec2 normal, Wall wall) {
  if (t < best.t) best = Candidate{t, point, normal, wall};
}

}  // namespace

BoundaryHit StadiumGeometry::ray_to_boundary(Vec2 origin, Vec2 dir) const {
  const Vec2 d = dir.normalized();
  const double eps = kRayEps * a_;
  Candidate best;

  // Left wall x = 0, y in [0, a].
  if (d.x < 0.0) {
    const double t = -origin.x / d.x;
    const double y = origin.y + t * d.y;
    if (t > eps && y >= -eps && y <= a_ + eps)
      consider(best, t, Vec2{0.0, std::clamp(y, 0.0, a_)}, Vec2{-1.0, 0.0}, Wall::Left);
  }
  // Bottom wall y = 0, x in [0, ls + a].
  if (d.y < 0.0) {
    const double t = -origin.y / d.y;
    const double x = origin.x + t * d.x;
    if (t > eps && x >= -eps && x <= ls_ + a_ + eps)
      consider(best, t, Vec2{std::clamp(x, 0.0, ls_ + a_), 0.0}, Vec2{0.0, -1.0}, Wall::Bottom);
  }
  // Top wall y = a, x in [0, ls].
  if (d.y > 0.0) {
    const double t = (a_ - origin.y) / d.y;
    const double x = origin.x + t * d.x;
    if (t > eps && x >= -eps && x <= ls_ + eps)
      consider(best, t, Vec2{std::clamp(x, 0.0, ls_), a_}, Vec2{0.0, 1.0}, Wall::Top);
  }
  // Quarter arc (x - ls)^2 + y^2 = a^2, x >= ls, y >= 0.
  {
    const Vec2 rel{origin.x - ls_, origin.y};
    const double b = rel.dot(d);
    const double c = rel.norm2() - a_ * a_;
    const double disc = b * b - c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      for (const double t : {-b - sq, -b + sq}) {
        if (t <= eps || t >= best.t) continue;
        const Vec2 p = origin + t * d;
        if (p.x >= ls_ - eps && p.y >= -eps) {
          // Snap radially onto the arc so bounce points stay exact.
          const Vec2 rp = (Vec2{p.x - ls_, p.y}).normalized();
          consider(best, t, Vec2{ls_ + a_ * rp.x, a_ * rp.y}, rp, Wall::Arc);
        }
      }
    }
  }

  if (best.wall == Wall::None)
    throw std::runtime_error("ray_to_boundary: no boundary intersection (ray cast from outside?)");
  return BoundaryHit{best.point, best.normal, best.t, best.wall};
}

RectangleDomain::RectangleDomain(double lx, double ly) : lx_(lx), ly_(ly) {
  if (lx <= 0.0 || ly <= 0.0)
    throw std::invalid_argument("rectangle: side lengths must be positive");
}

bool RectangleDomain::contains(Vec2 r) const {
  return r.x > 0.0 && r.x < lx_ && r.y > 0.0 && r.y < ly_;
}

BoundaryHit RectangleDomain::ray_to_boundary(Vec2 origin, Vec2 dir) const {
  const Vec2 d = dir.normalized();
  const double eps = kRayEps * std::max(lx_, ly_);
  Candidate best;
  if (d.x < 0.0) {
    const double t = -origin.x / d.x;
    if (t > eps)
      consider(best, t, Vec2{0.0, origin.y + t * d.y}, Vec2{-1.0, 0.0}, Wall::Left);
  }
  if (d.x > 0.0) {
    const double t = (lx_ - origin.x) / d.x;
    if (t > eps)
      consider(best, t, Vec2{lx_, origin.y + t * d.y}, Vec2{1.0, 0.0}, Wall::Arc);
  }
  if (d.y < 0.0) {
    const double t = -origin.y / d.y;
    if (t > eps)
      consider(best, t, Vec2{origin.x + t * d.x, 0.0}, Vec2{0.0, -1.0}, Wall::Bottom);
  }
  if (d.y > 0.0) {
    const double t = (ly_ - origin.y) / d.y;
    if (t > eps)
      consider(best, t, Vec2{origin.x + t * d.x, ly_}, Vec2{0.0, 1.0}, Wall::Top);
  }
  if (best.wall == Wall::None)
    throw std::runtime_error("ray_to_boundary: no boundary intersection in rectangle");
  return BoundaryHit{best.point, best.normal, best.t, best.wall};
}

GyrationData gyration_y(const Domain& dom, double rel_tol) {
  const auto [lo, hi] = dom.bounding_box();
  const auto moment =
      quad::integrate([&](double x) { return x * x * dom.slab_height(x); },
                      lo.x, hi.x, rel_tol);
  const double area = dom.area();
  return GyrationData{moment.value / area, moment.abs_error / area};
}

Vec2 sample_uniform_point(const Domain& dom, std::mt19937_64& rng) {
  const auto [lo, hi] = dom.bounding_box();
  std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y);
  for (int tries = 0; tries < 100000; ++tries) {
    const Vec2 r{ux(rng), uy(rng)};
    if (dom.contains(r)) return r;
  }
  throw std::runtime_error("sample_uniform_point: rejection sampling failed");
}

}  // namespace otoc::domain
