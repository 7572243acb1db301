#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "otoc/units.hpp"

namespace otoc::domain {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm2() const { return x * x + y * y; }
  double norm() const;
  Vec2 normalized() const;
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

enum class Wall : std::uint8_t { Left, Bottom, Top, Arc, None };

// First intersection of a ray with the billiard boundary.
struct BoundaryHit {
  Vec2 point;     // intersection point, snapped exactly onto the wall
  Vec2 normal;    // outward unit normal at the intersection
  double distance = 0.0;  // ray length from origin to the hit
  Wall wall = Wall::None;
};

// Interface shared by the reflecting domains (production stadium and the
// integrable rectangle used as a null/oracle system).  Both domains are
// y-simple: the vertical section at abscissa x is [0, slab_height(x)].
class Domain {
 public:
  virtual ~Domain() = default;

  virtual bool contains(Vec2 r) const = 0;  // strict interior
  virtual BoundaryHit ray_to_boundary(Vec2 origin, Vec2 dir) const = 0;
  virtual double area() const = 0;
  virtual double perimeter() const = 0;
  virtual std::array<Vec2, 2> bounding_box() const = 0;
  virtual double slab_height(double x) const = 0;
};

// Desymmetrized (quarter) Bunimovich stadium: the rectangle
// [0,ls] x [0,a] joined with the quarter disk of radius a centred at
// (ls, 0).  The bottom and left walls are the symmetry axes of the full
// stadium; all four boundary pieces reflect specularly / carry Dirichlet
// conditions.
class StadiumGeometry final : public Domain {
 public:
  StadiumGeometry(double a, double ls);

  double a() const { return a_; }
  double ls() const { return ls_; }

  bool contains(Vec2 r) const override;
  BoundaryHit ray_to_boundary(Vec2 origin, Vec2 dir) const override;
  double area() const override { return ls_ * a_ + 0.25 * pi() * a_ * a_; }
  double perimeter() const override;
  std::array<Vec2, 2> bounding_box() const override {
    return {Vec2{0.0, 0.0}, Vec2{ls_ + a_, a_}};
  }
  double slab_height(double x) const override;

  static double pi();

 private:
  double a_;
  double ls_;
};

// Axis-aligned rectangle (0,lx) x (0,ly); integrable reference domain.
class RectangleDomain final : public Domain {
 public:
  RectangleDomain(double lx, double ly);

  double lx() const { return lx_; }
  double ly() const { return ly_; }

  bool contains(Vec2 r) const override;
  BoundaryHit ray_to_boundary(Vec2 origin, Vec2 dir) const override;
  double area() const override { return lx_ * ly_; }
  double perimeter() const override { return 2.0 * (lx_ + ly_); }
  std::array<Vec2, 2> bounding_box() const override {
    return {Vec2{0.0, 0.0}, Vec2{lx_, ly_}};
  }
  double slab_height(double x) const override {
    return (x >= 0.0 && x <= lx_) ? ly_ : 0.0;
  }

 private:
  double lx_;
  double ly_;
};

struct GyrationData {
  double gy2 = 0.0;        // G_Y^2 = (1/A) * integral of x^2 over the domain
  double abs_error = 0.0;  // quadrature error estimate on gy2
};

// Squared gyration length of the X coordinate, computed by reducing the
// area integral to an adaptive 1D quadrature over x of x^2 * slab_height(x).
GyrationData gyration_y(const Domain& dom, double rel_tol = 1e-12);

// Uniform sample over the domain area by rejection from the bounding box.
Vec2 sample_uniform_point(const Domain& dom, std::mt19937_64& rng);

}  // namespace otoc::domain
