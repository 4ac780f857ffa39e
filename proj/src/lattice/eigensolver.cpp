#include "gaugelab/lattice/eigensolver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace gaugelab::lattice {

LatticeHamiltonian build_lattice_hamiltonian(const LinkField& links, const PotentialGrid& potential, double mass,
                                             const UnitSystem& units) {
  const Lattice2D& l = potential.lattice();
  if (!(links.lattice() == l)) throw InvalidArgument("build_lattice_hamiltonian: lattice mismatch");
  if (!(mass > 0.0)) throw InvalidArgument("build_lattice_hamiltonian: mass must be > 0");
  potential.validate();
  const double t = units.hbar() * units.hbar() / (2.0 * mass * l.a * l.a);

  LatticeHamiltonian out;
  std::vector<long> row(l.size(), -1);
  for (std::size_t s = 0; s < l.size(); ++s) {
    if (!potential.walls()[s]) {
      row[s] = static_cast<long>(out.sites.size());
      out.sites.push_back(s);
    }
  }
  const auto n = static_cast<Eigen::Index>(out.sites.size());
  if (n == 0) throw InvalidArgument("build_lattice_hamiltonian: every site is masked");

  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  for (int j = 0; j < l.ny; ++j) {
    for (int i = 0; i < l.nx; ++i) {
      const std::size_t s = l.index(i, j);
      if (row[s] < 0) continue;
      trip.emplace_back(row[s], row[s], 4.0 * t + potential.v(i, j));
      auto hop = [&](std::size_t s2, cplx u) {
        if (row[s2] < 0) return;
        trip.emplace_back(row[s2], row[s], -t * u);
        trip.emplace_back(row[s], row[s2], -t * std::conj(u));
      };
      if (i + 1 < l.nx) hop(l.index(i + 1, j), links.x(i, j));
      if (j + 1 < l.ny) hop(l.index(i, j + 1), links.y(i, j));
    }
  }
  out.matrix.resize(n, n);
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  out.matrix.makeCompressed();
  return out;
}

namespace {

Eigen::MatrixXcd orthonormalize(const Eigen::MatrixXcd& x) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(x);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(x.rows(), x.cols());
}

double gershgorin_lower_bound(const SparseHamiltonian& h) {
  Eigen::VectorXd radius = Eigen::VectorXd::Zero(h.rows());
  Eigen::VectorXd centre = Eigen::VectorXd::Zero(h.rows());
  for (Eigen::Index c = 0; c < h.outerSize(); ++c) {
    for (SparseHamiltonian::InnerIterator it(h, c); it; ++it) {
      if (it.row() == it.col()) {
        centre[it.row()] = it.value().real();
      } else {
        radius[it.row()] += std::abs(it.value());
      }
    }
  }
  return (centre - radius).minCoeff();
}

class ShiftedSolver {
 public:
  explicit ShiftedSolver(const SparseHamiltonian& h) : h_(h) {}

  void factor(double sigma) {
    SparseHamiltonian shifted = h_;
    for (Eigen::Index i = 0; i < shifted.rows(); ++i) shifted.coeffRef(i, i) -= sigma;
    shifted.makeCompressed();
    lu_.compute(shifted);
    if (lu_.info() != Eigen::Success) {
      throw ConvergenceError("shift-invert: factorisation failed at shift " + std::to_string(sigma));
    }
  }
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& rhs) { return lu_.solve(rhs); }

 private:
  const SparseHamiltonian& h_;
  Eigen::SparseLU<SparseHamiltonian, Eigen::COLAMDOrdering<int>> lu_;
};

}  // namespace

EigenPairs lowest_eigenpairs(const SparseHamiltonian& h, int k, const EigenOptions& options) {
  const Eigen::Index n = h.rows();
  if (h.cols() != n) throw InvalidArgument("lowest_eigenpairs: matrix must be square");
  if (k < 1 || k > n) throw InvalidArgument("lowest_eigenpairs: k must be in [1, n]");
  const int block = static_cast<int>(std::min<Eigen::Index>(n, options.block > 0 ? options.block : std::max(2 * k, k + 4)));
  if (block < k) throw InvalidArgument("lowest_eigenpairs: block smaller than k");

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd x(n, block);
  for (Eigen::Index c = 0; c < block; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) x(r, c) = cplx(gauss(rng), gauss(rng));
  }
  x = orthonormalize(x);

  ShiftedSolver solver(h);
  double sigma = gershgorin_lower_bound(h) - 1e-3 * std::max(1.0, std::abs(gershgorin_lower_bound(h)));
  solver.factor(sigma);
  int reshifts = 0;

  EigenPairs out;
  Eigen::VectorXd previous = Eigen::VectorXd::Constant(block, std::numeric_limits<double>::infinity());
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Eigen::MatrixXcd q = orthonormalize(solver.solve(x));
    const Eigen::MatrixXcd hq = h * q;
    Eigen::MatrixXcd small = q.adjoint() * hq;
    small = 0.5 * (small + small.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ritz(small);
    const Eigen::VectorXd theta = ritz.eigenvalues();
    x = q * ritz.eigenvectors();
    const Eigen::MatrixXcd hx = hq * ritz.eigenvectors();

    out.values.assign(theta.data(), theta.data() + k);
    out.residuals.resize(k);
    bool converged = true;
    for (int c = 0; c < k; ++c) {
      out.residuals[c] = (hx.col(c) - theta[c] * x.col(c)).norm();
      if (out.residuals[c] > options.tolerance * std::max(1.0, std::abs(theta[c]))) converged = false;
    }
    if (converged) {
      out.vectors = x.leftCols(k);
      out.iterations = it;
      out.shift = sigma;
      return out;
    }

    // Once the wanted Ritz values settle, move the shift just below them.
    const double settle = (theta.head(k) - previous.head(k)).cwiseAbs().maxCoeff();
    previous = theta;
    const double spread = theta[std::min(k, block - 1)] - theta[0];
    if (reshifts < 4 && settle < 1e-4 * std::max(spread, 1e-12)) {
      const double target = theta[0] - std::max(spread, 1e-8 * std::max(1.0, std::abs(theta[0])));
      if (target > sigma) {
        sigma = target;
        solver.factor(sigma);
        ++reshifts;
      }
    }
  }
  std::ostringstream msg;
  msg << "lowest_eigenpairs: no convergence after " << options.max_iterations << " iterations; residuals:";
  for (double r : out.residuals) msg << ' ' << r;
  throw ConvergenceError(msg.str());
}

}  // namespace gaugelab::lattice
