#pragma once

namespace otoc::domain {

// Mechanical unit system for the billiard lab.  Defaults follow the
// convention m = 1/2, hbar = 1, k_B = 1, so that E = k^2 for a free
// particle and [H, X] = -2i P_X holds with integer coefficients.
struct UnitSystem {
  double m = 0.5;
  double hbar = 1.0;

  // Reference energy and time scales of a billiard of size a.
  double e0(double a) const { return hbar * hbar / (m * a * a); }
  double t0(double a) const { return m * a * a / hbar; }

  // Thermal velocity v~ = sqrt(k_B T / m); path length ell = v~ * t.
  double vtilde(double kbt) const;
  double ell(double t, double kbt) const { return vtilde(kbt) * t; }
  double time_for_ell(double ell, double kbt) const { return ell / vtilde(kbt); }
};

}  // namespace otoc::domain
