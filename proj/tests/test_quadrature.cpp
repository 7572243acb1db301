#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "otoc/quadrature.hpp"
#include "otoc/series.hpp"

using namespace otoc;
constexpr double kPi = std::numbers::pi;

TEST_SUITE_BEGIN("quadrature");

TEST_CASE("polynomial, exact for the embedded rules") {
  const auto r = quad::integrate([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("smooth transcendental integrands") {
  const auto s = quad::integrate([](double x) { return std::sin(x); }, 0.0, kPi, 1e-12);
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-12));
  const auto gsn = quad::integrate([](double x) { return std::exp(-x * x); },
                                   -7.0, 7.0, 1e-12);
  CHECK(gsn.value == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
}

TEST_CASE("oscillatory integrand needs adaptivity") {
  // sin^2 over many periods: no symmetric cancellation, so one panel
  // cannot fake convergence.
  const auto r = quad::integrate([](double x) { return std::sin(x) * std::sin(x); },
                                 0.0, 40.0 * kPi, 1e-10, 1e-12);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(20.0 * kPi).epsilon(1e-9));
  CHECK(r.evaluations > 15);  // forced to subdivide
}

TEST_CASE("error estimate covers the true error") {
  const auto r = quad::integrate([](double x) { return 1.0 / (1e-3 + x * x); },
                                 -1.0, 1.0, 1e-10);
  const double exact = 2.0 / std::sqrt(1e-3) * std::atan(1.0 / std::sqrt(1e-3));
  CHECK(r.converged);
  CHECK(std::abs(r.value - exact) <= std::max(r.abs_error, 1e-12 * exact));
}

TEST_CASE("degenerate and unconverged cases are reported") {
  const auto zero = quad::integrate([](double x) { return x; }, 2.0, 2.0);
  CHECK(zero.value == 0.0);
  CHECK(zero.converged);
  // Absurd tolerance with a tiny panel budget must report failure.
  const auto hard = quad::integrate([](double x) { return std::sin(1.0 / (x + 1e-8)); },
                                    0.0, 1.0, 1e-16, 0.0, 8);
  CHECK_FALSE(hard.converged);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("series-io");

TEST_CASE("csv round trip is byte-identical") {
  io::OtocSeries s;
  s.meta.label = "test";
  s.push(0.0, 0.0, 1.0 / 3.0, 0.01);
  s.push(0.125, 0.5, 2.718281828459045, 0.02);
  s.push(0.25, 1.0, -1.2345678901234567e-12, 0.0);
  const std::string p1 = "/tmp/otoc_test_series_a.csv";
  const std::string p2 = "/tmp/otoc_test_series_b.csv";
  io::write_series_csv(p1, s);
  const auto back = io::read_series_csv(p1);
  REQUIRE(back.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(back.t[i] == s.t[i]);
    CHECK(back.value[i] == s.value[i]);
    CHECK(back.err[i] == s.err[i]);
  }
  io::write_series_csv(p2, back);
  std::ifstream f1(p1), f2(p2);
  std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(b1 == b2);
  CHECK(b1.substr(0, 22) == "t,ell,value,stderr\n0,0");
}

TEST_CASE("csv schema violations are rejected") {
  const std::string p = "/tmp/otoc_test_bad.csv";
  {
    std::ofstream f(p);
    f << "time,value\n0,1\n";
  }
  CHECK_THROWS(io::read_series_csv(p));
  {
    std::ofstream f(p);
    f << "t,ell,value,stderr\n0,0,notanumber,0\n";
  }
  CHECK_THROWS(io::read_series_csv(p));
  CHECK_THROWS(io::read_series_csv("/tmp/otoc_does_not_exist.csv"));
}

TEST_SUITE_END();
