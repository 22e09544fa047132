// Wootters concurrence for two qubits: the general spin-flip eigenvalue
// construction and the closed-form shortcut for X-shaped states.

#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "xysim/model.hpp"

namespace xysim {

namespace detail {

// sigma_y (x) sigma_y: the anti-diagonal (-1, 1, 1, -1).
inline const Matrix4c& spin_flip_matrix() {
  static const Matrix4c f = [] {
    Matrix4c m = Matrix4c::Zero();
    m(0, 3) = -1.0;
    m(1, 2) = 1.0;
    m(2, 1) = 1.0;
    m(3, 0) = -1.0;
    return m;
  }();
  return f;
}

inline double clamp_unit(double c) { return std::clamp(c, 0.0, 1.0); }

}  // namespace detail

// C = max(0, l1 - l2 - l3 - l4) with l_i the decreasingly ordered square
// roots of the eigenvalues of rho * flip(rho*). The eigenvalues of that
// product coincide with those of the Hermitian spin-flip construction but
// need no matrix square roots; tiny negative eigenvalues from rounding are
// clamped to zero. Rejects non-Hermitian or trace-violating input.
inline double concurrence_general(const DensityMatrix& rho) {
  if (!rho.allFinite()) {
    throw std::invalid_argument("concurrence: non-finite entries");
  }
  if (hermiticity_error(rho) > kHermitianTol) {
    throw std::invalid_argument("concurrence: input not Hermitian");
  }
  if (trace_error(rho) > kTraceTol) {
    throw std::invalid_argument("concurrence: input trace differs from 1");
  }

  const Matrix4c& f = detail::spin_flip_matrix();
  const Matrix4c rho_tilde = f * rho.conjugate() * f;
  Eigen::ComplexEigenSolver<Matrix4c> es;
  es.compute(rho * rho_tilde, /*computeEigenvectors=*/false);

  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) {
    lam[i] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
  }
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return detail::clamp_unit(lam[0] - lam[1] - lam[2] - lam[3]);
}

// X-state shortcut: C = max(0, 2(|rho23| - sqrt(rho11 rho44)),
//                              2(|rho14| - sqrt(rho22 rho33))).
// Rejects input whose off-pattern entries exceed kXPatternTol.
inline double concurrence_xstate(const DensityMatrix& rho) {
  if (!rho.allFinite()) {
    throw std::invalid_argument("concurrence: non-finite entries");
  }
  if (hermiticity_error(rho) > kHermitianTol) {
    throw std::invalid_argument("concurrence: input not Hermitian");
  }
  if (trace_error(rho) > kTraceTol) {
    throw std::invalid_argument("concurrence: input trace differs from 1");
  }
  if (double e = max_off_x_magnitude(rho); e > kXPatternTol) {
    throw std::invalid_argument("concurrence_xstate: input is not an X state "
                                "(off-pattern magnitude " + std::to_string(e) +
                                ")");
  }

  const auto pop = [&rho](int i) { return std::max(0.0, rho(i, i).real()); };
  const double inner = 2.0 * (std::abs(rho(1, 2)) - std::sqrt(pop(0) * pop(3)));
  const double outer = 2.0 * (std::abs(rho(0, 3)) - std::sqrt(pop(1) * pop(2)));
  return detail::clamp_unit(std::max({0.0, inner, outer}));
}

}  // namespace xysim
