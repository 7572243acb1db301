#include "otoc/quantum_otoc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace otoc::quantum {

ThermalWeights thermal_weights(const std::vector<double>& energies, double beta,
                               int n_keep) {
  if (energies.empty()) throw std::invalid_argument("empty spectrum");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
  if (n_keep < 1 || std::size_t(n_keep) > energies.size())
    throw std::invalid_argument("n_keep outside the basis");
  if (!std::is_sorted(energies.begin(), energies.end()))
    throw std::invalid_argument("energies must be ascending");

  ThermalWeights tw;
  tw.beta = beta;
  tw.w.resize(std::size_t(n_keep));
  const double e1 = energies.front();
  for (int n = 0; n < n_keep; ++n) {
    tw.w[std::size_t(n)] = std::exp(-beta * (energies[std::size_t(n)] - e1));
    tw.z_trunc += tw.w[std::size_t(n)];
  }
  tw.leakage = tw.w.back();
  tw.leakage_warning = tw.leakage > kLeakageThreshold;
  return tw;
}

HeisenbergOperator heisenberg(const Eigen::MatrixXd& a,
                              const std::vector<double>& energies, double t,
                              const domain::UnitSystem& units) {
  const long n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("operator must be square");
  if (long(energies.size()) != n)
    throw std::invalid_argument("operator does not match the spectrum");
  if (!std::isfinite(t)) throw std::invalid_argument("time must be finite");

  HeisenbergOperator out;
  out.t = t;
  out.re.resize(n, n);
  out.im.resize(n, n);
  const double inv_hbar = 1.0 / units.hbar;
  for (long col = 0; col < n; ++col) {
    const double ec = energies[std::size_t(col)];
    for (long row = 0; row < n; ++row) {
      const double phase = (energies[std::size_t(row)] - ec) * t * inv_hbar;
      out.re(row, col) = std::cos(phase) * a(row, col);
      out.im(row, col) = std::sin(phase) * a(row, col);
    }
  }
  return out;
}

StateDiagonals otoc_state_diagonals(const Eigen::MatrixXd& x_mat,
                                    const Eigen::MatrixXd& k_mat,
                                    const std::vector<double>& energies,
                                    double t, int n_keep,
                                    const domain::UnitSystem& units) {
  const long nb = x_mat.rows();
  if (x_mat.cols() != nb || k_mat.rows() != nb || k_mat.cols() != nb)
    throw std::invalid_argument("X and K must be square and equally sized");
  if (long(energies.size()) != nb)
    throw std::invalid_argument("matrices do not match the spectrum");
  if (n_keep < 1 || long(n_keep) > nb)
    throw std::invalid_argument("n_keep outside the basis");

  const HeisenbergOperator xt = heisenberg(x_mat, energies, t, units);

  // F = X(t) P with P = i K: two real products carry everything.
  Eigen::MatrixXd f_re = -(xt.im * k_mat);
  Eigen::MatrixXd f_im = xt.re * k_mat;

  StateDiagonals d;
  d.o1_re.resize(n_keep);
  d.o1_im.resize(n_keep);
  d.o2.resize(n_keep);
  d.o3.resize(n_keep);
  d.c.resize(n_keep);
  for (int n = 0; n < n_keep; ++n) {
    d.o2(n) = f_re.row(n).squaredNorm() + f_im.row(n).squaredNorm();
    d.o3(n) = f_re.col(n).squaredNorm() + f_im.col(n).squaredNorm();
    d.o1_re(n) = (f_re.row(n) * f_re.col(n)).value() -
                 (f_im.row(n) * f_im.col(n)).value();
    d.o1_im(n) = (f_re.row(n) * f_im.col(n)).value() +
                 (f_im.row(n) * f_re.col(n)).value();
    // M = [X(t), P] = F - F^dag, so |M_mn|^2 sums column-wise:
    double cn = 0.0;
    for (long m = 0; m < nb; ++m) {
      const double mr = f_re(m, n) - f_re(n, m);
      const double mi = f_im(m, n) + f_im(n, m);
      cn += mr * mr + mi * mi;
    }
    d.c(n) = cn;
  }
  return d;
}

OtocComponents otoc_components(const Eigen::MatrixXd& x_mat,
                               const Eigen::MatrixXd& k_mat,
                               const std::vector<double>& energies,
                               const ThermalWeights& weights, double t,
                               const domain::UnitSystem& units) {
  const int n_keep = int(weights.w.size());
  if (n_keep < 1 || long(n_keep) > x_mat.rows())
    throw std::invalid_argument("weights do not fit the basis");
  const StateDiagonals d =
      otoc_state_diagonals(x_mat, k_mat, energies, t, n_keep, units);

  Eigen::Map<const Eigen::VectorXd> w(weights.w.data(), n_keep);
  const double inv_z = 1.0 / weights.z_trunc;
  OtocComponents out;
  out.t = t;
  out.o1 = {w.dot(d.o1_re) * inv_z, w.dot(d.o1_im) * inv_z};
  out.o2 = w.dot(d.o2) * inv_z;
  out.o3 = w.dot(d.o3) * inv_z;
  out.c = w.dot(d.c) * inv_z;
  return out;
}

QuantumOtocResult otoc(const Eigen::MatrixXd& x_mat,
                       const Eigen::MatrixXd& k_mat,
                       const std::vector<double>& energies,
                       const ThermalWeights& weights,
                       const std::vector<double>& t_grid,
                       const domain::UnitSystem& units) {
  if (t_grid.empty()) throw std::invalid_argument("empty time grid");
  if (!std::is_sorted(t_grid.begin(), t_grid.end()))
    throw std::invalid_argument("time grid must be ascending");

  QuantumOtocResult res;
  res.beta = weights.beta;
  res.leakage = weights.leakage;
  res.leakage_warning = weights.leakage_warning;
  if (res.leakage_warning)
    std::fprintf(stderr,
                 "warning: thermal tail weight %.2e exceeds %.0e; the kept "
                 "basis truncates the ensemble\n",
                 res.leakage, kLeakageThreshold);

  res.t.reserve(t_grid.size());
  for (double t : t_grid) {
    const OtocComponents p =
        otoc_components(x_mat, k_mat, energies, weights, t, units);
    res.t.push_back(t);
    res.o1_re.push_back(p.o1.real());
    res.o1_im.push_back(p.o1.imag());
    res.o2.push_back(p.o2);
    res.o3.push_back(p.o3);
    res.c.push_back(p.c);
  }
  return res;
}

}  // namespace otoc::quantum
