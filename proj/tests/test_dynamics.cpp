#include <doctest.h>

#include <cmath>
#include <numbers>

#include "otoc/dynamics.hpp"
#include "otoc/rng.hpp"

using namespace otoc;
using domain::StadiumGeometry;
using domain::Vec2;
using dynamics::PhaseState;
using dynamics::TransverseTangent;

namespace {
constexpr double kPi = std::numbers::pi;
const double kMass = 0.5;
}  // namespace

TEST_SUITE_BEGIN("dynamics");

TEST_CASE("free flight and identity") {
  StadiumGeometry g(1.0, 1.0);
  const double v = 2.0;
  PhaseState s{{0.5, 0.5}, {kMass * v, 0.0}};

  const auto same = dynamics::propagate(g, kMass, s, 0.0);
  CHECK(same.r.x == s.r.x);
  CHECK(same.r.y == s.r.y);

  std::vector<dynamics::Bounce> log;
  const auto moved = dynamics::propagate(g, kMass, s, 0.25 / v, &log);
  CHECK(moved.r.x == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(moved.r.y == doctest::Approx(0.5));
  CHECK(log.empty());
}

TEST_CASE("specular reflection at the bottom wall") {
  StadiumGeometry g(1.0, 1.0);
  PhaseState s{{0.3, 0.2}, {0.1, -0.4}};
  std::vector<dynamics::Bounce> log;
  // Time to reach y=0 plus a bit more.
  const double vy = 0.4 / kMass;
  const auto out = dynamics::propagate(g, kMass, s, 0.2 / vy * 1.5, &log);
  REQUIRE(log.size() == 1);
  CHECK(log[0].wall == domain::Wall::Bottom);
  CHECK(log[0].point.y == 0.0);
  CHECK(out.p.x == doctest::Approx(0.1));
  CHECK(out.p.y == doctest::Approx(0.4));  // sign flipped
  CHECK(out.r.y > 0.0);
}

TEST_CASE("momentum magnitude conserved over 1e4 bounces") {
  StadiumGeometry g(1.0, 1.0);
  auto rng = make_stream(3, 0);
  PhaseState s{domain::sample_uniform_point(g, rng), {0.31, 0.17}};
  const double p0 = s.p.norm();
  const double speed = p0 / kMass;
  // Mean free path ~ pi A / P ~ 1.007a: 1e4 bounces take ~1e4 a of path.
  std::vector<dynamics::Bounce> log;
  const auto out = dynamics::propagate(g, kMass, s, 1.0e4 / speed, &log);
  CHECK(log.size() > 8000);
  CHECK(std::abs(out.p.norm() - p0) <= 1e-10 * p0);
  CHECK(g.contains(out.r));
}

TEST_CASE("time reversibility over ~10 mean free paths") {
  StadiumGeometry g(1.0, 1.0);
  auto rng = make_stream(17, 1);
  std::uniform_real_distribution<double> uang(0.0, 2.0 * kPi);
  for (int k = 0; k < 20; ++k) {
    const Vec2 r0 = domain::sample_uniform_point(g, rng);
    const double phi = uang(rng);
    PhaseState s{r0, {std::cos(phi), std::sin(phi)}};
    const double t = 10.0 * kMass / s.p.norm();  // path length 10 a
    auto fwd = dynamics::propagate(g, kMass, s, t);
    fwd.p = fwd.p * -1.0;
    const auto back = dynamics::propagate(g, kMass, fwd, t);
    CHECK(std::hypot(back.r.x - r0.x, back.r.y - r0.y) < 1e-8);
  }
}

TEST_CASE("tangent shear on a bounce-free segment") {
  StadiumGeometry g(1.0, 1.0);
  PhaseState s{{0.2, 0.5}, {0.5, 0.0}};  // speed 1
  const double tau = 0.3;
  const auto tan = dynamics::propagate_tangent(g, kMass, s, {0.0, 1.0}, tau);
  CHECK(tan.dq == doctest::Approx(tau / kMass).epsilon(1e-14));
  CHECK(tan.dp == doctest::Approx(1.0));
}

TEST_CASE("tangent map is symplectic through mixed bounces") {
  StadiumGeometry g(1.0, 1.0);
  auto rng = make_stream(23, 2);
  std::uniform_real_distribution<double> uang(0.0, 2.0 * kPi);
  for (int k = 0; k < 25; ++k) {
    const Vec2 r0 = domain::sample_uniform_point(g, rng);
    const double phi = uang(rng);
    PhaseState s{r0, {std::cos(phi), std::sin(phi)}};
    const double t = 7.3 * kMass;  // several bounces, generically off-wall end
    const auto c1 = dynamics::propagate_tangent(g, kMass, s, {1.0, 0.0}, t);
    const auto c2 = dynamics::propagate_tangent(g, kMass, s, {0.0, 1.0}, t);
    const double det = c1.dq * c2.dp - c2.dq * c1.dp;
    CHECK(det == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("arc kick coefficient against two nearby exact trajectories") {
  // Normal-incidence bounce on the arc: launch along the radius through
  // the arc point at angle alpha, offset the partner transversally, and
  // compare separations after the bounce with the tangent-map prediction.
  StadiumGeometry g(1.0, 1.0);
  const double alpha = kPi / 6.0;
  const Vec2 n{std::cos(alpha), std::sin(alpha)};
  const Vec2 tvec{-std::sin(alpha), std::cos(alpha)};
  const Vec2 hit_pt{1.0 + n.x, n.y};
  const double s_before = 0.6, s_after = 0.4;
  const double v = 2.0, p_mag = kMass * v;
  const Vec2 r0{hit_pt.x - s_before * n.x, hit_pt.y - s_before * n.y};
  const double T = (s_before + s_after) / v;

  const double delta = 1e-7;
  PhaseState A{r0, p_mag * n};
  PhaseState B{{r0.x + delta * tvec.x, r0.y + delta * tvec.y}, p_mag * n};
  const auto endA = dynamics::propagate(g, kMass, A, T);
  const auto endB = dynamics::propagate(g, kMass, B, T);

  // Transverse frame after the bounce: rotate the outgoing direction by +90.
  const Vec2 vout = endA.p.normalized();
  const Vec2 eperp{-vout.y, vout.x};
  const double dq_fd = (endB.r - endA.r).dot(eperp);
  const double dp_fd = (endB.p - endA.p).dot(eperp);

  // Initial offset in the same +90 frame: incoming direction is n, so the
  // offset delta*tvec is exactly +delta along rotate(n, +90) = tvec.
  const auto tan = dynamics::propagate_tangent(g, kMass, A, {delta, 0.0}, T);

  CHECK(tan.dq == doctest::Approx(dq_fd).epsilon(2e-5));
  CHECK(tan.dp == doctest::Approx(dp_fd).epsilon(2e-5));
  // Focusing mirror at normal incidence: kick magnitude 2 m v / a, so the
  // transverse offset shrinks to (2 v s_after / a - 1) * (-delta).
  CHECK(tan.dq == doctest::Approx(-delta * (1.0 - 2.0 * v * (s_after / v) / 1.0)).epsilon(1e-9));
  CHECK(std::abs(dq_fd) == doctest::Approx(0.2 * delta).epsilon(1e-3));
  CHECK(std::abs(dp_fd) == doctest::Approx(2.0 * p_mag * delta).epsilon(1e-3));
}

TEST_CASE("geometric Lyapunov exponent of the quarter stadium") {
  StadiumGeometry g(1.0, 1.0);
  dynamics::LyapunovParams params;
  params.n_traj = 12;
  params.total_length = 3000.0;
  const auto est = dynamics::lyapunov_geometric(g, params, 2024);
  CHECK(est.lambda_g == doctest::Approx(0.425).epsilon(0.10));
  CHECK(est.stderr_ > 0.0);
  CHECK(est.stderr_ < 0.05);
  CHECK(est.lambda(2.0, kMass) == doctest::Approx(4.0 * est.lambda_g));
}

TEST_CASE("Lyapunov estimate is momentum independent") {
  StadiumGeometry g(1.0, 1.0);
  dynamics::LyapunovParams p1, p3;
  p1.n_traj = p3.n_traj = 8;
  p1.total_length = p3.total_length = 1500.0;
  p1.momentum = 1.0;
  p3.momentum = 3.0;
  const auto e1 = dynamics::lyapunov_geometric(g, p1, 5);
  const auto e3 = dynamics::lyapunov_geometric(g, p3, 5);
  const double sig = std::hypot(e1.stderr_, e3.stderr_);
  CHECK(std::abs(e1.lambda_g - e3.lambda_g) <= 2.0 * sig + 1e-12);
}

TEST_CASE("integrable rectangle: exponent vanishes with length") {
  domain::RectangleDomain rect(1.3, 0.9);
  dynamics::LyapunovParams shortp, longp;
  shortp.n_traj = longp.n_traj = 10;
  shortp.total_length = 1000.0;
  longp.total_length = 4000.0;
  const auto es = dynamics::lyapunov_geometric(rect, shortp, 7);
  const auto el = dynamics::lyapunov_geometric(rect, longp, 7);
  // Deterministic ~ln(L)/L bias dominates the stderr here, so test decay
  // to zero on an absolute scale: < 1% of the stadium's 0.425/a.
  CHECK(std::abs(el.lambda_g) < 0.00425);
  CHECK(std::abs(el.lambda_g) < 0.6 * std::abs(es.lambda_g));
}

TEST_CASE("Lyapunov stderr is the spread of per-trajectory estimates") {
  StadiumGeometry g(1.0, 1.0);
  dynamics::LyapunovParams params;
  params.n_traj = 16;
  params.total_length = 800.0;
  const auto est = dynamics::lyapunov_geometric(g, params, 99);
  REQUIRE(est.per_traj.size() == 16);

  double mean = 0.0;
  for (double e : est.per_traj) mean += e;
  mean /= est.per_traj.size();
  double var = 0.0;
  for (double e : est.per_traj) var += (e - mean) * (e - mean);
  var /= (est.per_traj.size() - 1);
  CHECK(est.lambda_g == doctest::Approx(mean).epsilon(1e-14));
  CHECK(est.stderr_ == doctest::Approx(std::sqrt(var / est.per_traj.size())).epsilon(1e-12));
}

TEST_CASE("input validation") {
  StadiumGeometry g(1.0, 1.0);
  PhaseState s{{0.5, 0.5}, {1.0, 0.0}};
  CHECK_THROWS_AS(dynamics::propagate(g, kMass, s, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(dynamics::propagate(g, 0.0, s, 1.0), std::invalid_argument);
  PhaseState rest{{0.5, 0.5}, {0.0, 0.0}};
  CHECK_THROWS_AS(dynamics::propagate(g, kMass, rest, 1.0), std::invalid_argument);
  dynamics::LyapunovParams bad;
  bad.n_traj = 1;
  CHECK_THROWS_AS(dynamics::lyapunov_geometric(g, bad, 1), std::invalid_argument);
}

TEST_SUITE_END();
