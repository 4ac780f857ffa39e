#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <vector>

#include "gaugelab/lattice/lattice.hpp"

namespace gaugelab::lattice {

using SparseHamiltonian = Eigen::SparseMatrix<cplx>;

/// The lattice Hamiltonian restricted to unmasked sites.
struct LatticeHamiltonian {
  SparseHamiltonian matrix;
  std::vector<std::size_t> sites;  ///< lattice site index of each row
};

/// Same operator the propagator integrates: on-site 4t + V, hopping -t U.
LatticeHamiltonian build_lattice_hamiltonian(const LinkField& links, const PotentialGrid& potential, double mass,
                                             const UnitSystem& units);

struct EigenOptions {
  double tolerance = 1e-10;  ///< residual ||H x - E x|| relative to max(1, |E|)
  int max_iterations = 2000;
  int block = 0;             ///< subspace size; 0 picks max(2k, k + 4)
  std::uint64_t seed = 0;
};

struct EigenPairs {
  std::vector<double> values;
  std::vector<double> residuals;
  Eigen::MatrixXcd vectors;  ///< columns, unit norm
  int iterations = 0;
  double shift = 0.0;
};

/// Lowest k eigenpairs of a Hermitian sparse matrix by shift-and-invert block
/// subspace iteration with Rayleigh-Ritz extraction. The shift starts at a
/// Gershgorin lower bound and is moved up under the lowest Ritz value once the
/// subspace settles. Throws ConvergenceError, listing the residuals, if the
/// tolerance is not met in max_iterations.
EigenPairs lowest_eigenpairs(const SparseHamiltonian& h, int k, const EigenOptions& options = {});

}  // namespace gaugelab::lattice
