#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "otoc/units.hpp"

namespace otoc::quantum {

// Canonical weights over the kept states, with the ground-state energy
// subtracted so large beta cannot underflow: w_n = e^{-beta (E_n - E_1)}.
struct ThermalWeights {
  double beta = 0.0;
  std::vector<double> w;     // size n_keep, w[0] = 1, nonincreasing
  double z_trunc = 0.0;      // sum of w
  double leakage = 0.0;      // weight of the last kept state, w.back()
  bool leakage_warning = false;  // set when leakage > kLeakageThreshold
};

// Above this relative tail weight the basis truncation touches the thermal
// ensemble; results are still produced but flagged.
inline constexpr double kLeakageThreshold = 1e-8;

ThermalWeights thermal_weights(const std::vector<double>& energies, double beta,
                               int n_keep);

// Heisenberg picture in the energy eigenbasis: pure elementwise phases,
// (A_t)_mn = e^{i (E_m - E_n) t / hbar} A_mn, split into real/imag parts.
struct HeisenbergOperator {
  Eigen::MatrixXd re, im;
  double t = 0.0;
};

HeisenbergOperator heisenberg(const Eigen::MatrixXd& a,
                              const std::vector<double>& energies, double t,
                              const domain::UnitSystem& units = {});

// Diagonal matrix elements, per initial state n, of the three correlator
// blocks built from A = X(t) and B = P_X:
//   o1 = <n| A B A B |n>   (complex),
//   o2 = <n| A B^2 A |n>,  o3 = <n| B A^2 B |n>   (both >= 0),
//   c  = <n| M^dag M |n>   with M = [A, B]  (equals -2 Re o1 + o2 + o3).
// Everything reduces to two real matrix products: with F = A B,
// Re F = -S K and Im F = C K where C/S are the cos/sin phase Hadamard
// products with X, and M = F - F^dag.
struct StateDiagonals {
  Eigen::VectorXd o1_re, o1_im, o2, o3, c;  // size n_keep
};

StateDiagonals otoc_state_diagonals(const Eigen::MatrixXd& x_mat,
                                    const Eigen::MatrixXd& k_mat,
                                    const std::vector<double>& energies,
                                    double t, int n_keep,
                                    const domain::UnitSystem& units = {});

struct OtocComponents {
  double t = 0.0;
  std::complex<double> o1;
  double o2 = 0.0;
  double o3 = 0.0;
  double c = 0.0;  // thermal average of the positive form <M^dag M>
};

OtocComponents otoc_components(const Eigen::MatrixXd& x_mat,
                               const Eigen::MatrixXd& k_mat,
                               const std::vector<double>& energies,
                               const ThermalWeights& weights, double t,
                               const domain::UnitSystem& units = {});

struct QuantumOtocResult {
  std::vector<double> t;
  std::vector<double> o1_re, o1_im, o2, o3, c;
  double beta = 0.0;
  double leakage = 0.0;
  bool leakage_warning = false;
};

// Full curve over an ascending time grid.
QuantumOtocResult otoc(const Eigen::MatrixXd& x_mat,
                       const Eigen::MatrixXd& k_mat,
                       const std::vector<double>& energies,
                       const ThermalWeights& weights,
                       const std::vector<double>& t_grid,
                       const domain::UnitSystem& units = {});

}  // namespace otoc::quantum
