// Two-qubit XY-chain model: parameters, Hamiltonian, initial states and
// density-matrix validity checks.
//
// Every matrix in this library lives in the fixed product basis
// {|uu>, |ud>, |du>, |dd>}, in that order ("u" = spin up along z).

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace xysim {

using Complex = std::complex<double>;
using Matrix4c = Eigen::Matrix4cd;

// A two-qubit state. Validity (Hermitian, unit trace, positive semidefinite)
// is enforced at operation boundaries via validate_density_matrix().
using DensityMatrix = Matrix4c;
using HamiltonianMatrix = Matrix4c;

// Tolerances for density-matrix validity.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-9;
// Maximum magnitude allowed outside the diagonal/anti-diagonal pattern for a
// matrix to count as an X state.
inline constexpr double kXPatternTol = 1e-8;

// Physical parameters (hbar = 1). j_coupling and delta are the symmetric and
// antisymmetric combinations of the transverse couplings, omega the magnetic
// field along z, gamma the per-qubit relaxation rate.
struct ModelParams {
  double j_coupling = 1.0;
  double delta = 0.2;
  double omega = 0.2;
  double gamma = 0.5;

  void validate() const {
    if (!std::isfinite(j_coupling) || !std::isfinite(delta) ||
        !std::isfinite(omega) || !std::isfinite(gamma)) {
      throw std::invalid_argument("ModelParams: all parameters must be finite");
    }
    if (gamma < 0.0) {
      throw std::invalid_argument("ModelParams: gamma must be nonnegative");
    }
  }
};

inline double hermiticity_error(const Matrix4c& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double trace_error(const Matrix4c& m) {
  return std::abs(m.trace() - Complex{1.0, 0.0});
}

// Smallest eigenvalue of the Hermitian part of m.
inline double min_eigenvalue(const Matrix4c& m) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es;
  es.compute((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Largest magnitude outside the X pattern (diagonal + anti-diagonal).
inline double max_off_x_magnitude(const Matrix4c& m) {
  double worst = 0.0;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (r == c || r + c == 3) continue;
      worst = std::max(worst, std::abs(m(r, c)));
    }
  }
  return worst;
}

inline bool is_x_state(const Matrix4c& m, double tol = kXPatternTol) {
  return max_off_x_magnitude(m) <= tol;
}

// Throws std::invalid_argument when rho is not a density matrix within the
// library tolerances.
inline void validate_density_matrix(const DensityMatrix& rho) {
  if (!rho.allFinite()) {
    throw std::invalid_argument("density matrix has non-finite entries");
  }
  if (double e = hermiticity_error(rho); e > kHermitianTol) {
    throw std::invalid_argument("density matrix not Hermitian (error " +
                                std::to_string(e) + ")");
  }
  if (double e = trace_error(rho); e > kTraceTol) {
    throw std::invalid_argument("density matrix trace differs from 1 (error " +
                                std::to_string(e) + ")");
  }
  if (double lam = min_eigenvalue(rho); lam < -kPsdTol) {
    throw std::invalid_argument(
        "density matrix not positive semidefinite (min eigenvalue " +
        std::to_string(lam) + ")");
  }
}

// H = J (S1+ S2- + S1- S2+) + Delta (S1+ S2+ + S1- S2-) + omega (S1z + S2z),
// assembled on the product basis with spin-1/2 conventions (Sz eigenvalues
// +-1/2). Exactly Hermitian and real for any finite parameters.
inline HamiltonianMatrix build_hamiltonian(const ModelParams& params) {
  params.validate();
  HamiltonianMatrix h = HamiltonianMatrix::Zero();
  h(0, 0) = params.omega;
  h(3, 3) = -params.omega;
  h(1, 2) = params.j_coupling;
  h(2, 1) = params.j_coupling;
  h(0, 3) = params.delta;
  h(3, 0) = params.delta;
  return h;
}

// Projector of cos(theta)|dd> + sin(theta)|uu>: an X state for every theta,
// ranging from the ground product state (theta = 0) to the maximally
// entangled case (theta = pi/4).
inline DensityMatrix build_initial_state(double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("build_initial_state: theta must be finite");
  }
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  DensityMatrix rho = DensityMatrix::Zero();
  rho(0, 0) = s * s;
  rho(3, 3) = c * c;
  rho(0, 3) = s * c;
  rho(3, 0) = s * c;
  return rho;
}

}  // namespace xysim
