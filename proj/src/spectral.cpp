#include "otoc/spectral.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "otoc/rng.hpp"

namespace otoc::spectral {

namespace {

constexpr double kPi = 3.14159265358979323846;

double weyl_energy_ap(double area, double perim, double n,
                      const domain::UnitSystem& u) {
  // Solve (A k^2 - P k) / 4pi = n for k > 0.
  const double k = (perim + std::sqrt(perim * perim + 16.0 * kPi * area * n)) /
                   (2.0 * area);
  const double hk = u.hbar * k;
  return hk * hk / (2.0 * u.m);
}

struct Factorized {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  double sigma = 0.0;  // shift actually used (nudged off eigenvalues)
  long inertia = 0;    // number of eigenvalues strictly below sigma
};

// LDLT of H - sigma.  Without pivoting a shift that lands on (or numerically
// too close to) an eigenvalue produces a tiny or failed pivot; in that case
// the shift is nudged upward by ~1e-4 relative and refactored.
void factor_shifted(const DiscreteDomain& grid, double sigma, Factorized& out) {
  const long n = grid.n_nodes();
  Eigen::SparseMatrix<double> eye(n, n);
  eye.setIdentity();
  double s = sigma;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::SparseMatrix<double> shifted = grid.hamiltonian - s * eye;
    out.ldlt.compute(shifted);
    if (out.ldlt.info() == Eigen::Success) {
      const auto& d = out.ldlt.vectorD();
      double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
      long neg = 0;
      for (long i = 0; i < n; ++i) {
        const double ad = std::abs(d[i]);
        dmax = std::max(dmax, ad);
        dmin = std::min(dmin, ad);
        if (d[i] < 0.0) ++neg;
      }
      if (dmin > 1e-11 * dmax) {
        out.sigma = s;
        out.inertia = neg;
        return;
      }
    }
    s += (std::abs(s) + 1.0) * 1e-4 * double(attempt + 1);
  }
  std::ostringstream msg;
  msg << "LDLT factorization kept hitting tiny pivots near shift " << sigma;
  throw std::runtime_error(msg.str());
}

struct Candidate {
  double energy = 0.0;
  double resid = 0.0;      // ||H v - E v|| / E with ||v|| = 1
  Eigen::VectorXd vec;     // unit l2 norm
};

// Lanczos with full reorthogonalization on (H - sigma)^-1.  Ritz values
// theta map back to energies E = sigma + 1/theta; pairs that pass the
// tridiagonal convergence estimate are confirmed with a true sparse
// residual before being reported.
void run_shift(const DiscreteDomain& grid, const Factorized& f, int steps,
               std::mt19937_64 rng, double resid_tol, double e_accept_max,
               std::vector<Candidate>& out) {
  const long n = grid.n_nodes();
  const int m = int(std::min<long>(steps, n));
  Eigen::MatrixXd V(n, m + 1);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
  std::normal_distribution<double> gauss;

  for (long i = 0; i < n; ++i) V(i, 0) = gauss(rng);
  V.col(0).normalize();

  int built = 0;
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd w = f.ldlt.solve(V.col(j));
    if (j > 0) w -= beta(j - 1) * V.col(j - 1);
    alpha(j) = V.col(j).dot(w);
    w -= alpha(j) * V.col(j);
    auto Vj = V.leftCols(j + 1);
    w.noalias() -= Vj * (Vj.transpose() * w).eval();
    w.noalias() -= Vj * (Vj.transpose() * w).eval();
    beta(j) = w.norm();
    built = j + 1;
    if (beta(j) < 1e-13) {
      // Invariant subspace found.  Restart with a fresh direction; the
      // tridiagonal matrix becomes block diagonal and earlier Ritz pairs
      // stay valid because every later vector is reorthogonalized against
      // the whole basis.
      beta(j) = 0.0;
      for (long i = 0; i < n; ++i) w(i) = gauss(rng);
      w.noalias() -= Vj * (Vj.transpose() * w).eval();
      w.noalias() -= Vj * (Vj.transpose() * w).eval();
      const double wn = w.norm();
      if (wn < 1e-13) break;  // whole space exhausted (tiny grids)
      V.col(j + 1) = w / wn;
    } else {
      V.col(j + 1) = w / beta(j);
    }
  }
  if (built == 0) return;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(alpha.head(built), beta.head(std::max(built - 1, 0)),
                            Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("tridiagonal eigensolve failed");
  const Eigen::VectorXd& theta = es.eigenvalues();
  const Eigen::MatrixXd& S = es.eigenvectors();

  const double th_scale =
      std::max(std::abs(theta(0)), std::abs(theta(built - 1)));
  const double beta_last = beta(built - 1);

  std::vector<int> sel;
  for (int i = 0; i < built; ++i) {
    const double th = theta(i);
    if (std::abs(th) < 1e-300) continue;
    const double est = std::abs(beta_last * S(built - 1, i));
    if (est > 1e-7 * th_scale) continue;  // not converged in the Krylov space
    const double e = f.sigma + 1.0 / th;
    if (!(e > 0.0) || e >= e_accept_max) continue;
    sel.push_back(i);
  }
  if (sel.empty()) return;

  Eigen::MatrixXd Ssel(built, int(sel.size()));
  for (std::size_t c = 0; c < sel.size(); ++c) Ssel.col(long(c)) = S.col(sel[c]);
  Eigen::MatrixXd Y = V.leftCols(built) * Ssel;

  for (std::size_t c = 0; c < sel.size(); ++c) {
    Candidate cand;
    cand.energy = f.sigma + 1.0 / theta(sel[c]);
    cand.vec = Y.col(long(c));
    const double nrm = cand.vec.norm();
    if (nrm < 0.5) continue;  // degenerate combination, drop
    cand.vec /= nrm;
    const double r =
        (grid.hamiltonian * cand.vec - cand.energy * cand.vec).norm() /
        std::max(cand.energy, 1e-12);
    if (r > resid_tol) continue;
    cand.resid = r;
    out.push_back(std::move(cand));
  }
}

struct Accum {
  std::vector<double> energy;  // ascending
  std::vector<double> resid;
  std::vector<int> col;        // column slot in psi
  Eigen::MatrixXd psi;         // n_nodes x capacity, unit-l2 columns
  int used = 0;

  long count_below(double e) const {
    return std::lower_bound(energy.begin(), energy.end(), e) - energy.begin();
  }
};

// Insert a converged pair, merging with an existing entry when both energy
// and eigenvector agree (the same state found from two adjacent shifts).
// Distinct near-degenerate states survive because their vectors are
// orthogonal, so the overlap test keeps them apart.
void merge_candidate(Accum& acc, Candidate&& c) {
  const double tol = 1e-6 * std::max(1.0, std::abs(c.energy));
  std::size_t lo = std::size_t(
      std::lower_bound(acc.energy.begin(), acc.energy.end(), c.energy - tol) -
      acc.energy.begin());
  for (std::size_t k = lo;
       k < acc.energy.size() && acc.energy[k] <= c.energy + tol; ++k) {
    const double overlap = std::abs(acc.psi.col(acc.col[k]).dot(c.vec));
    if (overlap > 0.5) {
      if (c.resid < acc.resid[k]) {
        const int slot = acc.col[k];
        acc.psi.col(slot) = c.vec;
        acc.energy.erase(acc.energy.begin() + long(k));
        acc.resid.erase(acc.resid.begin() + long(k));
        acc.col.erase(acc.col.begin() + long(k));
        const std::size_t pos = std::size_t(
            std::lower_bound(acc.energy.begin(), acc.energy.end(), c.energy) -
            acc.energy.begin());
        acc.energy.insert(acc.energy.begin() + long(pos), c.energy);
        acc.resid.insert(acc.resid.begin() + long(pos), c.resid);
        acc.col.insert(acc.col.begin() + long(pos), slot);
      }
      return;
    }
  }
  if (acc.used >= acc.psi.cols())
    throw std::logic_error("eigenpair accumulator overflow");
  const int slot = acc.used++;
  acc.psi.col(slot) = c.vec;
  const std::size_t pos = std::size_t(
      std::lower_bound(acc.energy.begin(), acc.energy.end(), c.energy) -
      acc.energy.begin());
  acc.energy.insert(acc.energy.begin() + long(pos), c.energy);
  acc.resid.insert(acc.resid.begin() + long(pos), c.resid);
  acc.col.insert(acc.col.begin() + long(pos), slot);
}

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t hash) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    hash ^= p[i];
    hash *= 1099511628211ULL;
  }
  return hash;
}

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr char kCacheMagic[8] = {'O', 'T', 'O', 'C', 'B', 'A', 'S', '1'};

}  // namespace

DiscreteDomain DiscreteDomain::build(const domain::Domain& dom, double h,
                                     const domain::UnitSystem& units) {
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  DiscreteDomain g;
  g.h = h;
  g.units = units;
  g.area = dom.area();
  g.perimeter = dom.perimeter();
  const auto bb = dom.bounding_box();
  g.nx = int(std::floor(bb[1].x / h));
  g.ny = int(std::floor(bb[1].y / h));
  if (g.nx < 1 || g.ny < 1)
    throw std::invalid_argument("grid spacing too coarse for the domain");

  g.node_index.assign(std::size_t(g.nx + 2) * std::size_t(g.ny + 2), -1);
  for (int j = 1; j <= g.ny; ++j)
    for (int i = 1; i <= g.nx; ++i)
      if (dom.contains({i * h, j * h})) {
        g.node_index[std::size_t(j) * std::size_t(g.nx + 2) + std::size_t(i)] =
            std::int32_t(g.x.size());
        g.x.push_back(i * h);
        g.y.push_back(j * h);
      }
  if (g.x.empty()) throw std::invalid_argument("no interior grid nodes");

  const long n = g.n_nodes();
  const double c = units.hbar * units.hbar / (2.0 * units.m) / (h * h);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(std::size_t(5 * n));
  for (int j = 1; j <= g.ny; ++j)
    for (int i = 1; i <= g.nx; ++i) {
      const std::int32_t k = g.at(i, j);
      if (k < 0) continue;
      trip.emplace_back(k, k, 4.0 * c);
      const std::int32_t nb[4] = {g.at(i - 1, j), g.at(i + 1, j),
                                  g.at(i, j - 1), g.at(i, j + 1)};
      for (std::int32_t other : nb)
        if (other >= 0) trip.emplace_back(k, other, -c);
    }
  g.hamiltonian.resize(n, n);
  g.hamiltonian.setFromTriplets(trip.begin(), trip.end());
  g.hamiltonian.makeCompressed();
  return g;
}

long eigen_count_below(const DiscreteDomain& grid, double energy) {
  Factorized f;
  factor_shifted(grid, energy, f);
  return f.inertia;
}

double weyl_count(const domain::Domain& dom, double energy,
                  const domain::UnitSystem& units) {
  if (energy <= 0.0) return 0.0;
  const double k = std::sqrt(2.0 * units.m * energy) / units.hbar;
  return (dom.area() * k * k - dom.perimeter() * k) / (4.0 * kPi);
}

double weyl_energy(const domain::Domain& dom, double n,
                   const domain::UnitSystem& units) {
  if (!(n > 0.0)) throw std::invalid_argument("state count must be positive");
  return weyl_energy_ap(dom.area(), dom.perimeter(), n, units);
}

EigenBasis solve_dirichlet(const DiscreteDomain& grid, const SolveOptions& opt) {
  const long n = grid.n_nodes();
  if (opt.n_states < 1) throw std::invalid_argument("need at least one state");
  if (opt.n_states > n)
    throw std::invalid_argument("requested more states than grid nodes");
  if (opt.lanczos_steps < 20)
    throw std::invalid_argument("lanczos step budget too small");
  if (opt.states_per_shift < 8)
    throw std::invalid_argument("states_per_shift too small");
  if (!(opt.residual_tol > 0.0))
    throw std::invalid_argument("residual tolerance must be positive");

  const double per = double(opt.states_per_shift);
  auto count_energy = [&](double c) {
    return weyl_energy_ap(grid.area, grid.perimeter, c, grid.units);
  };

  // Ladder of shifts placed by the smooth counting function, covering
  // [0, n_states] with one shift per states_per_shift eigenvalues.
  std::vector<double> sigma_target;
  double next_count = 0.5 * per;
  for (; next_count < double(opt.n_states) + 0.55 * per; next_count += per)
    sigma_target.push_back(count_energy(next_count));
  double e_top = count_energy(double(opt.n_states) + 0.4 * per);
  double e_accept_max = count_energy(double(opt.n_states) + 1.6 * per);

  const long cap = opt.n_states + 3 * opt.states_per_shift + 64;
  Accum acc;
  acc.psi.resize(n, std::min<long>(cap, n));

  std::vector<int> steps(sigma_target.size(), opt.lanczos_steps);
  std::vector<double> sigma_act(sigma_target.size(), 0.0);
  std::vector<long> inertia(sigma_target.size(), -1);
  std::vector<char> pending(sigma_target.size(), 1);
  long inertia_top = -1;
  int retries = 0;

  for (std::uint64_t pass = 0;; ++pass) {
    for (std::size_t w = 0; w < sigma_target.size(); ++w) {
      if (!pending[w]) continue;
      Factorized f;
      factor_shifted(grid, sigma_target[w], f);
      sigma_act[w] = f.sigma;
      inertia[w] = f.inertia;
      std::vector<Candidate> cands;
      run_shift(grid, f, steps[w],
                make_stream(opt.seed, (std::uint64_t(w) << 8) | pass),
                opt.residual_tol, e_accept_max, cands);
      for (auto& c : cands) merge_candidate(acc, std::move(c));
      pending[w] = 0;
      if (opt.verbose)
        std::fprintf(stderr, "shift %zu at E=%.3f: %zu pairs, %ld below\n", w,
                     f.sigma, cands.size(), f.inertia);
    }
    if (inertia_top < 0) {
      Factorized f;
      factor_shifted(grid, e_top, f);
      inertia_top = f.inertia;
      e_top = f.sigma;
    }

    // The grid may hold fewer states below e_top than the smooth estimate
    // promised; extend the ladder until the certified count suffices.
    if (inertia_top < opt.n_states) {
      sigma_target.push_back(count_energy(next_count));
      steps.push_back(opt.lanczos_steps);
      sigma_act.push_back(0.0);
      inertia.push_back(-1);
      pending.push_back(1);
      e_top = count_energy(next_count + 0.4 * per);
      e_accept_max = std::max(e_accept_max, count_energy(next_count + 1.6 * per));
      next_count += per;
      inertia_top = -1;
      continue;
    }

    // Completeness audit: between consecutive shifts the number of accepted
    // eigenvalues must equal the difference of the LDLT inertia counts.
    std::vector<double> bounds(1, 0.0);
    bounds.insert(bounds.end(), sigma_act.begin(), sigma_act.end());
    bounds.push_back(e_top);
    std::vector<long> expected(1, 0);
    for (long v : inertia) expected.push_back(v);
    expected.push_back(inertia_top);
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b)
      if (!(bounds[b] < bounds[b + 1]))
        throw std::runtime_error("shift ladder is not ascending");

    std::vector<std::size_t> bad;
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
      const long got = acc.count_below(bounds[b + 1]) - acc.count_below(bounds[b]);
      const long want = expected[b + 1] - expected[b];
      if (got > want) {
        std::ostringstream msg;
        msg << "found " << got << " eigenpairs in [" << bounds[b] << ", "
            << bounds[b + 1] << ") but the inertia count says " << want;
        throw std::runtime_error(msg.str());
      }
      if (got < want) bad.push_back(b);
    }
    if (bad.empty()) break;
    if (retries++ >= opt.max_retries) {
      std::ostringstream msg;
      msg << "eigenbasis incomplete after " << retries << " retries:";
      for (std::size_t b : bad)
        msg << " [" << bounds[b] << "," << bounds[b + 1] << ")";
      throw std::runtime_error(msg.str());
    }
    // Rerun the shifts bounding every deficient interval with a larger
    // Krylov budget and a fresh start vector.
    for (std::size_t b : bad)
      for (std::size_t w : {b > 0 ? b - 1 : 0, std::min(b, sigma_target.size() - 1)}) {
        if (!pending[w]) steps[w] += opt.lanczos_steps / 3 + 16;
        pending[w] = 1;
      }
  }

  EigenBasis out;
  out.h = grid.h;
  out.n_nodes = n;
  out.energies.assign(acc.energy.begin(), acc.energy.begin() + opt.n_states);
  out.residuals.assign(acc.resid.begin(), acc.resid.begin() + opt.n_states);
  out.psi.resize(n, opt.n_states);
  for (int s = 0; s < opt.n_states; ++s)
    out.psi.col(s) = acc.psi.col(acc.col[std::size_t(s)]) / grid.h;

  // Orthonormality of the assembled basis (cross-shift states are only
  // orthogonal through convergence, so this is a real check, not a tautology).
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(opt.n_states, opt.n_states);
  const long chunk = std::max<long>(256, (64L << 20) / (8 * opt.n_states));
  for (long r0 = 0; r0 < n; r0 += chunk) {
    const long len = std::min(chunk, n - r0);
    auto block = out.psi.middleRows(r0, len);
    gram.noalias() += block.transpose() * block;
  }
  gram *= grid.h * grid.h;
  gram.diagonal().array() -= 1.0;
  out.gram_error = gram.cwiseAbs().maxCoeff();
  if (out.gram_error > 1e-6)
    throw std::runtime_error("eigenbasis lost orthonormality");
  return out;
}

EigenBasis solve_dense(const DiscreteDomain& grid, int n_states) {
  const long n = grid.n_nodes();
  if (n > 6000)
    throw std::invalid_argument("dense solver is meant for small grids");
  if (n_states < 1 || n_states > n)
    throw std::invalid_argument("bad state count for dense solve");
  Eigen::MatrixXd hd = Eigen::MatrixXd(grid.hamiltonian);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hd);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("dense eigensolve failed");

  EigenBasis out;
  out.h = grid.h;
  out.n_nodes = n;
  out.energies.assign(es.eigenvalues().data(), es.eigenvalues().data() + n_states);
  out.residuals.resize(std::size_t(n_states));
  out.psi = es.eigenvectors().leftCols(n_states);
  for (int s = 0; s < n_states; ++s) {
    const double e = out.energies[std::size_t(s)];
    out.residuals[std::size_t(s)] =
        (grid.hamiltonian * out.psi.col(s) - e * out.psi.col(s)).norm() /
        std::max(e, 1e-12);
  }
  out.psi /= grid.h;
  Eigen::MatrixXd gram =
      grid.h * grid.h * (out.psi.transpose() * out.psi);
  gram.diagonal().array() -= 1.0;
  out.gram_error = gram.cwiseAbs().maxCoeff();
  return out;
}

Eigen::MatrixXd x_matrix(const DiscreteDomain& grid, const EigenBasis& basis) {
  const long n = grid.n_nodes();
  if (basis.n_nodes != n)
    throw std::invalid_argument("basis does not match the grid");
  const int ns = basis.size();
  Eigen::Map<const Eigen::VectorXd> xs(grid.x.data(), n);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(ns, ns);
  const long chunk = std::max<long>(256, (64L << 20) / (8 * std::max(ns, 1)));
  Eigen::MatrixXd weighted;
  for (long r0 = 0; r0 < n; r0 += chunk) {
    const long len = std::min(chunk, n - r0);
    auto block = basis.psi.middleRows(r0, len);
    weighted = block.array().colwise() * xs.segment(r0, len).array();
    acc.noalias() += block.transpose() * weighted;
  }
  acc *= grid.h * grid.h;
  Eigen::MatrixXd sym = 0.5 * (acc + acc.transpose());
  return sym;
}

Eigen::MatrixXd p_matrix_imag(const EigenBasis& basis, const Eigen::MatrixXd& X,
                              const domain::UnitSystem& units) {
  const int ns = basis.size();
  if (X.rows() != ns || X.cols() != ns)
    throw std::invalid_argument("X matrix does not match the basis");
  Eigen::MatrixXd K(ns, ns);
  const double c = units.m / units.hbar;
  for (int col = 0; col < ns; ++col)
    for (int row = 0; row < ns; ++row)
      K(row, col) =
          c * (basis.energies[std::size_t(row)] - basis.energies[std::size_t(col)]) *
          X(row, col);
  return K;
}

void save_basis_cache(const std::string& path, const BasisCache& cache) {
  const long ns = long(cache.energies.size());
  if (cache.x_mat.rows() != ns || cache.x_mat.cols() != ns)
    throw std::invalid_argument("cache X matrix does not match the energies");
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);

  std::uint64_t hash = kFnvOffset;
  auto put = [&](const void* p, std::size_t bytes) {
    f.write(static_cast<const char*>(p), std::streamsize(bytes));
    hash = fnv1a(p, bytes, hash);
  };
  f.write(kCacheMagic, sizeof(kCacheMagic));
  const std::int64_t n64 = ns;
  put(&cache.a, sizeof(double));
  put(&cache.ls, sizeof(double));
  put(&cache.h, sizeof(double));
  put(&n64, sizeof(n64));
  put(cache.energies.data(), std::size_t(ns) * sizeof(double));
  put(cache.x_mat.data(), std::size_t(ns) * std::size_t(ns) * sizeof(double));
  f.write(reinterpret_cast<const char*>(&hash), sizeof(hash));
  if (!f) throw std::runtime_error("failed while writing " + path);
}

bool load_basis_cache(const std::string& path, double a, double ls, double h,
                      int n_states, BasisCache& out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  char magic[8];
  if (!f.read(magic, sizeof(magic)) || std::memcmp(magic, kCacheMagic, 8) != 0)
    return false;

  std::uint64_t hash = kFnvOffset;
  auto get = [&](void* p, std::size_t bytes) {
    if (!f.read(static_cast<char*>(p), std::streamsize(bytes))) return false;
    hash = fnv1a(p, bytes, hash);
    return true;
  };
  BasisCache c;
  std::int64_t n64 = 0;
  if (!get(&c.a, sizeof(double)) || !get(&c.ls, sizeof(double)) ||
      !get(&c.h, sizeof(double)) || !get(&n64, sizeof(n64)))
    return false;
  // The cache is keyed on bitwise-identical geometry parameters.
  if (c.a != a || c.ls != ls || c.h != h || n64 != n_states) return false;
  if (n64 < 1 || n64 > 100000) return false;
  c.energies.resize(std::size_t(n64));
  c.x_mat.resize(n64, n64);
  if (!get(c.energies.data(), std::size_t(n64) * sizeof(double))) return false;
  if (!get(c.x_mat.data(), std::size_t(n64) * std::size_t(n64) * sizeof(double)))
    return false;
  std::uint64_t stored = 0;
  if (!f.read(reinterpret_cast<char*>(&stored), sizeof(stored)) || stored != hash)
    return false;
  out = std::move(c);
  return true;
}

}  // namespace otoc::spectral
