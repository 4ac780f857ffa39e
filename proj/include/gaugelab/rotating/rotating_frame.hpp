#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "gaugelab/core/units.hpp"

namespace gaugelab::rotating {

using cplx = std::complex<double>;
using StateVector = Eigen::VectorXcd;
using SparseOperator = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using RadialPotential = std::function<double(double r)>;

/// Cell-centred polar grid on the annulus r_inner <= r <= r_outer.
///
/// Radial nodes sit at r_inner + (i + 1/2) h so the origin is never a node;
/// with r_inner == 0 the innermost face carries zero flux, which is the
/// regularity condition at the axis. Any r_inner > 0 is a hard wall, as is
/// r_outer. The angle is periodic with M_theta uniform nodes.
///
/// States are stored in the orthonormal weighted basis
/// psi~ = sqrt(r h dtheta) psi, so plain Euclidean inner products are the
/// integral against r dr dtheta. Site index: i_r * M_theta + j_theta.
class PolarGrid {
 public:
  PolarGrid(double r_inner, double r_outer, int radial_points, int angular_points);

  double r_inner() const noexcept { return r_inner_; }
  double r_outer() const noexcept { return r_outer_; }
  int radial_points() const noexcept { return m_r_; }
  int angular_points() const noexcept { return m_theta_; }
  int size() const noexcept { return m_r_ * m_theta_; }
  double dr() const noexcept { return (r_outer_ - r_inner_) / m_r_; }
  double dtheta() const noexcept { return kTwoPi / m_theta_; }
  double r(int i) const noexcept { return r_inner_ + (i + 0.5) * dr(); }
  double theta(int j) const noexcept { return j * dtheta(); }
  int index(int i, int j) const noexcept { return i * m_theta_ + j; }
  /// Highest resolved angular momentum; the Nyquist mode M_theta/2 is assigned L_z = 0.
  int max_mode() const noexcept { return m_theta_ / 2 - 1; }

  friend bool operator==(const PolarGrid&, const PolarGrid&) = default;

 private:
  double r_inner_;
  double r_outer_;
  int m_r_;
  int m_theta_;
};

struct Particle {
  double mass = 1.0;
  UnitSystem units{};
};

/// Discretised operator tied to the grid it was built on.
struct OperatorMatrix {
  PolarGrid grid;
  SparseOperator matrix;

  StateVector apply(const StateVector& psi) const { return matrix * psi; }
  /// max |H - H^dagger| over all elements.
  double hermiticity_defect() const;
};

/// H = (p_x^2 + p_y^2)/2m + V(r) with the polar Laplacian
/// -(hbar^2/2m)[(1/r) d/dr (r d/dr) + (1/r^2) d^2/dtheta^2]:
/// second-order finite volumes in r, Fourier-spectral in theta.
OperatorMatrix build_hamiltonian(const PolarGrid& grid, const Particle& particle, const RadialPotential& potential);

/// L_z = -i hbar d/dtheta, spectral and exactly diagonal in the Fourier basis.
OperatorMatrix build_angular_momentum(const PolarGrid& grid, const UnitSystem& units);

/// max over states of ||(H L - L H) psi||.
double commutator_residual(const OperatorMatrix& a, const OperatorMatrix& b, const std::vector<StateVector>& states);

struct FrameTransformResult {
  OperatorMatrix hamiltonian;  ///< H' = H - omega L_z
  /// Check of U H U^dagger = H: max ||[H, L_z] psi|| over 20 random unit probe states.
  double commutator_residual;
};

/// H' = U H U^dagger + i hbar (dU/dt) U^dagger for U = exp(i L_z omega t / hbar).
FrameTransformResult transform_hamiltonian(const OperatorMatrix& h, const OperatorMatrix& lz, double omega,
                                           std::uint64_t probe_seed = 0);

/// How the expanded rotating-frame Hamiltonian is assembled.
enum class ExpansionRoute {
  /// Minimal coupling in polar components: pi_theta = (L_z - m omega r^2)/r.
  /// The discrete identity then holds to rounding error.
  polar,
  /// p^2 from H, cross terms from p_x, p_y built out of centred radial
  /// differences and spectral angular derivatives. The radial parts of
  /// y p_x - x p_y cancel site by site, so this also holds to rounding.
  cartesian,
};

/// Max over trial states of ||(H'_expanded - (H - omega L_z)) psi|| / ||(H - omega L_z) psi||, where
/// H'_expanded = (1/2m)[(p_x + m omega y)^2 + (p_y - m omega x)^2] - m omega^2 r^2 / 2 + V.
double expanded_form_residual(const OperatorMatrix& h, const OperatorMatrix& lz, double omega, const Particle& particle,
                              const RadialPotential& potential, const std::vector<StateVector>& trial_states,
                              ExpansionRoute route = ExpansionRoute::polar);

/// exp(i L_z omega t / hbar): advances the angle by omega t. Mode n picks up exp(i n omega t).
StateVector transform_state(const PolarGrid& grid, const StateVector& state, double omega, double t);

/// Smooth normalised probe states: a radial Gaussian band times random
/// low-order angular harmonics. Deterministic for a given seed.
std::vector<StateVector> trial_states(const PolarGrid& grid, int count, std::uint64_t seed, int max_harmonic = 4);

struct JointEigenstate {
  double energy;  ///< eigenvalue of H
  int n;          ///< L_z = n hbar
  StateVector state;
};

/// Lowest joint eigenstates of (H, L_z), found by diagonalising each angular
/// momentum block of H separately. Ordered by energy, ties by n.
std::vector<JointEigenstate> joint_eigenstates(const PolarGrid& grid, const Particle& particle,
                                               const RadialPotential& potential, int count);

struct RotatingLevel {
  double energy;
  int n;
};

/// Lowest eigenvalues of H - omega L_z from its angular momentum blocks.
std::vector<RotatingLevel> rotating_spectrum(const PolarGrid& grid, const Particle& particle,
                                             const RadialPotential& potential, double omega, int count);

/// Eigenvalues of the L_z matrix restricted to the innermost ring, sorted.
std::vector<double> angular_momentum_spectrum(const OperatorMatrix& lz);

}  // namespace gaugelab::rotating
