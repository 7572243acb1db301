#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <string>
#include <vector>

#include "otoc/geometry.hpp"

namespace otoc::spectral {

// Five-point finite-difference discretization of H = -(hbar^2/2m) Lap with
// Dirichlet walls: only nodes strictly inside the domain carry unknowns,
// every neighbor outside is clamped to zero.
struct DiscreteDomain {
  double h = 0.0;
  int nx = 0, ny = 0;                    // index ranges i in [1,nx], j in [1,ny]
  std::vector<std::int32_t> node_index;  // (nx+2)*(ny+2) lattice -> node or -1
  std::vector<double> x, y;              // node coordinates (size n_nodes)
  Eigen::SparseMatrix<double> hamiltonian;
  double area = 0.0, perimeter = 0.0;    // of the generating domain (for Weyl)
  domain::UnitSystem units;

  long n_nodes() const { return long(x.size()); }
  std::int32_t at(int i, int j) const { return node_index[std::size_t(j) * (nx + 2) + i]; }

  static DiscreteDomain build(const domain::Domain& dom, double h,
                              const domain::UnitSystem& units = {});
};

// Number of discrete eigenvalues strictly below `energy`, certified by the
// inertia (negative-pivot count) of the LDLT factorization of H - E.  This
// is an exact count that never computes an eigenvector, so it serves as an
// independent completeness oracle for the iterative solver.
long eigen_count_below(const DiscreteDomain& grid, double energy);

// Smooth eigenvalue-counting estimate for the Dirichlet billiard:
// N(E) = (A/4pi) k^2 - (P/4pi) k with E = (hbar k)^2 / 2m.
double weyl_count(const domain::Domain& dom, double energy,
                  const domain::UnitSystem& units = {});
// Inverse of weyl_count: the energy where the smooth count reaches n.
double weyl_energy(const domain::Domain& dom, double n,
                   const domain::UnitSystem& units = {});

struct EigenBasis {
  std::vector<double> energies;  // ascending
  Eigen::MatrixXd psi;           // n_nodes x n_states, normalized h^2 Sum psi^2 = 1
  std::vector<double> residuals; // ||H psi - E psi|| / E per state
  double h = 0.0;
  long n_nodes = 0;
  double gram_error = 0.0;       // max |h^2 Psi^T Psi - I|

  int size() const { return int(energies.size()); }
};

struct SolveOptions {
  int n_states = 100;
  int lanczos_steps = 240;        // per shift
  int states_per_shift = 80;      // spacing of shifts in Weyl count
  double residual_tol = 1e-6;     // relative to the eigenvalue
  std::uint64_t seed = 12345;
  int max_retries = 2;            // per shift, growing the step budget
  bool verbose = false;
};

// Shift-invert Lanczos with full reorthogonalization over a ladder of
// shifts placed by the Weyl estimate.  Completeness is certified with
// LDLT inertia counts: the number of accepted eigenvalues between two
// consecutive shifts must equal the difference of negative-pivot counts,
// and one extra factorization above the last requested state closes the
// ladder.  Any mismatch retries with a larger step budget, then throws.
EigenBasis solve_dirichlet(const DiscreteDomain& grid, const SolveOptions& opt);

// Dense solver for small grids; same discretization, used as an oracle.
EigenBasis solve_dense(const DiscreteDomain& grid, int n_states);

// Position-operator matrix elements X_mn = h^2 Sum_i x_i psi_m(i) psi_n(i).
Eigen::MatrixXd x_matrix(const DiscreteDomain& grid, const EigenBasis& basis);

// P_X is purely imaginary in a real eigenbasis: P_mn = i K_mn with
// K_mn = (m/hbar) (E_m - E_n) X_mn, real and antisymmetric.
Eigen::MatrixXd p_matrix_imag(const EigenBasis& basis, const Eigen::MatrixXd& X,
                              const domain::UnitSystem& units = {});

// Energies + X matrix are all downstream consumers need; the grid
// eigenvectors themselves stay in memory only.
struct BasisCache {
  double a = 0.0, ls = 0.0, h = 0.0;
  std::vector<double> energies;
  Eigen::MatrixXd x_mat;
};

void save_basis_cache(const std::string& path, const BasisCache& cache);
bool load_basis_cache(const std::string& path, double a, double ls, double h,
                      int n_states, BasisCache& out);

}  // namespace otoc::spectral
