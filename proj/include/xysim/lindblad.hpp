// Markovian master equation for the two-qubit XY chain: right-hand side,
// fixed-step RK4 / adaptive RK4(5) time integration, the 16x16 superoperator
// form of the generator, and steady-state extraction from its null space.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include "xysim/entanglement.hpp"
#include "xysim/model.hpp"

namespace xysim {

using Matrix16c = Eigen::Matrix<Complex, 16, 16>;
using Vector16c = Eigen::Matrix<Complex, 16, 1>;

// Generator of the master equation acting on column-major vectorized states.
using Liouvillian = Matrix16c;

struct IntegratorOptions {
  enum class Mode { fixed, adaptive };
  Mode mode = Mode::fixed;
  // Fixed mode: nominal step (shrunk so output times land exactly on the
  // grid). Adaptive mode: initial trial step.
  double dt = 1e-3;
  // Adaptive mode: per-step absolute error bound on matrix entries.
  double abs_tol = 1e-9;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw std::invalid_argument("IntegratorOptions: dt must be positive");
    }
    if (!(abs_tol > 0.0) || !std::isfinite(abs_tol)) {
      throw std::invalid_argument("IntegratorOptions: abs_tol must be positive");
    }
  }
};

// Sampled solution of the master equation. states[k] is the density matrix
// at times[k]; concurrences[k] its concurrence.
struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<double> concurrences;
};

namespace detail {

// Per-qubit lowering operators in the product basis:
// S1- = |du><uu| + |dd><ud|,  S2- = |ud><uu| + |dd><du|.
inline const Matrix4c& lowering_qubit1() {
  static const Matrix4c s = [] {
    Matrix4c m = Matrix4c::Zero();
    m(2, 0) = 1.0;
    m(3, 1) = 1.0;
    return m;
  }();
  return s;
}

inline const Matrix4c& lowering_qubit2() {
  static const Matrix4c s = [] {
    Matrix4c m = Matrix4c::Zero();
    m(1, 0) = 1.0;
    m(3, 2) = 1.0;
    return m;
  }();
  return s;
}

// Precomputed evaluator for d(rho)/dt = -i[H,rho] + gamma * D(rho).
// The jump gains and the anticommutator are written out index-wise: the
// number operator sum S1+S1- + S2+S2- is diagonal with entries (2,1,1,0),
// so the anticommutator half reduces to an entrywise weight.
struct RhsEvaluator {
  Matrix4c h;
  double gamma = 0.0;
  Matrix4c damp_weight;  // (n_i + n_j)/2

  explicit RhsEvaluator(const ModelParams& params)
      : h(build_hamiltonian(params)), gamma(params.gamma) {
    const double n[4] = {2.0, 1.0, 1.0, 0.0};
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        damp_weight(r, c) = 0.5 * (n[r] + n[c]);
      }
    }
  }

  Matrix4c operator()(const Matrix4c& rho) const {
    const Complex minus_i{0.0, -1.0};
    Matrix4c out = minus_i * (h * rho - rho * h);
    if (gamma != 0.0) {
      Matrix4c gain = Matrix4c::Zero();
      // S1- rho S1+ : top-left 2x2 block moves to the bottom-right.
      gain.block<2, 2>(2, 2) = rho.block<2, 2>(0, 0);
      // S2- rho S2+ : rows/cols {0,2} move to {1,3}.
      gain(1, 1) += rho(0, 0);
      gain(1, 3) += rho(0, 2);
      gain(3, 1) += rho(2, 0);
      gain(3, 3) += rho(2, 2);
      out += gamma * (gain - damp_weight.cwiseProduct(rho));
    }
    return out;
  }
};

inline void resymmetrize(Matrix4c& rho) { rho = (rho + rho.adjoint()) / 2.0; }

// One classical RK4 step of size h for the autonomous linear system.
inline Matrix4c rk4_step(const RhsEvaluator& rhs, const Matrix4c& rho, double h) {
  const Matrix4c k1 = rhs(rho);
  const Matrix4c k2 = rhs(rho + (h / 2.0) * k1);
  const Matrix4c k3 = rhs(rho + (h / 2.0) * k2);
  const Matrix4c k4 = rhs(rho + h * k3);
  return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Dormand-Prince 5(4) embedded pair; integrates rho over [0, span] with
// step-size control on the entrywise absolute error.
inline void dopri_advance(const RhsEvaluator& rhs, Matrix4c& rho, double span,
                          double& h, double abs_tol) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - bhat, error coefficients of the embedded 4th-order solution.
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  double t = 0.0;
  while (t < span) {
    h = std::min(h, span - t);
    if (h < 1e-14) {
      throw std::runtime_error("evolve: step size underflow");
    }
    const Matrix4c k1 = rhs(rho);
    const Matrix4c k2 = rhs(rho + h * (a21 * k1));
    const Matrix4c k3 = rhs(rho + h * (a31 * k1 + a32 * k2));
    const Matrix4c k4 = rhs(rho + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Matrix4c k5 =
        rhs(rho + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Matrix4c k6 =
        rhs(rho + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Matrix4c next =
        rho + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Matrix4c k7 = rhs(next);
    const double err =
        (h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7))
            .cwiseAbs()
            .maxCoeff();

    if (err <= abs_tol) {
      t += h;
      rho = next;
      resymmetrize(rho);
    }
    const double scale =
        (err > 0.0) ? 0.9 * std::pow(abs_tol / err, 0.2) : 5.0;
    h *= std::clamp(scale, 0.2, 5.0);
  }
}

}  // namespace detail

// d(rho)/dt = -i[H, rho] + gamma * sum_j (Sj- rho Sj+ - {Sj+ Sj-, rho}/2).
// The result is traceless and Hermitian. Rejects invalid density matrices.
inline Matrix4c lindblad_rhs(const DensityMatrix& rho, const ModelParams& params) {
  params.validate();
  validate_density_matrix(rho);
  return detail::RhsEvaluator(params)(rho);
}

// Integrates the master equation from rho0, sampling at t = 0, dt_out,
// 2*dt_out, ..., t_end. Each sample is re-symmetrized and checked: a negative
// eigenvalue beyond 1e-6 signals integrator failure and raises.
inline Trajectory evolve(const DensityMatrix& rho0, const ModelParams& params,
                         double t_end, double dt_out,
                         const IntegratorOptions& opts = {}) {
  params.validate();
  validate_density_matrix(rho0);
  opts.validate();
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw std::invalid_argument("evolve: t_end must be positive");
  }
  if (!(dt_out > 0.0) || !std::isfinite(dt_out)) {
    throw std::invalid_argument("evolve: dt_out must be positive");
  }

  const detail::RhsEvaluator rhs(params);
  const auto n_out = static_cast<long>(std::floor(t_end / dt_out + 1e-9));

  Trajectory traj;
  traj.times.reserve(n_out + 1);
  traj.states.reserve(n_out + 1);
  traj.concurrences.reserve(n_out + 1);

  Matrix4c rho = rho0;
  detail::resymmetrize(rho);
  double h_adaptive = std::min(opts.dt, dt_out);
  const long substeps =
      std::max(1L, static_cast<long>(std::ceil(dt_out / opts.dt - 1e-12)));
  const double h_fixed = dt_out / static_cast<double>(substeps);

  for (long k = 0;; ++k) {
    traj.times.push_back(static_cast<double>(k) * dt_out);
    if (double lam = min_eigenvalue(rho); lam < -1e-6) {
      throw std::runtime_error(
          "evolve: positivity violated beyond 1e-6 (integrator failure), "
          "min eigenvalue " + std::to_string(lam));
    }
    traj.states.push_back(rho);
    traj.concurrences.push_back(concurrence_general(rho));
    if (k == n_out) break;

    if (opts.mode == IntegratorOptions::Mode::fixed) {
      for (long s = 0; s < substeps; ++s) {
        rho = detail::rk4_step(rhs, rho, h_fixed);
        detail::resymmetrize(rho);
      }
    } else {
      detail::dopri_advance(rhs, rho, dt_out, h_adaptive, opts.abs_tol);
    }
  }
  return traj;
}

// Column-major stacking, the vectorization convention used across the
// library: vec(A X B) = (B^T kron A) vec(X).
inline Vector16c vectorize(const Matrix4c& m) {
  return Eigen::Map<const Vector16c>(m.data());
}

inline Matrix4c unvectorize(const Vector16c& v) {
  return Eigen::Map<const Matrix4c>(v.data());
}

// Matrix form of the generator: L vec(rho) = vec(lindblad_rhs(rho)).
inline Liouvillian build_liouvillian(const ModelParams& params) {
  params.validate();
  const Matrix4c h = build_hamiltonian(params);
  const Matrix4c id = Matrix4c::Identity();
  const Complex i{0.0, 1.0};

  Liouvillian l =
      -i * (Eigen::kroneckerProduct(id, h) - Eigen::kroneckerProduct(h.transpose(), id));
  for (const Matrix4c* s : {&detail::lowering_qubit1(), &detail::lowering_qubit2()}) {
    const Matrix4c n = s->adjoint() * (*s);
    l += params.gamma *
         (Eigen::kroneckerProduct(s->conjugate(), *s) -
          0.5 * (Eigen::kroneckerProduct(id, n) +
                 Eigen::kroneckerProduct(n.transpose(), id)));
  }
  return l;
}

// Steady state as the trace-normalized null vector of the Liouvillian,
// extracted from the right singular vector of its smallest singular value.
// Requires gamma > 0 (the closed-system generator has a degenerate null
// space). Reports degeneracy when the two smallest singular values are both
// below 1e-8.
inline DensityMatrix steady_state(const ModelParams& params) {
  params.validate();
  if (!(params.gamma > 0.0)) {
    throw std::invalid_argument(
        "steady_state: gamma must be positive (the steady state is not "
        "unique for a closed system)");
  }

  const Liouvillian l = build_liouvillian(params);
  Eigen::JacobiSVD<Matrix16c> svd(l, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(14) < 1e-8) {
    throw std::runtime_error(
        "steady_state: degenerate null space (two smallest singular values " +
        std::to_string(sv(15)) + ", " + std::to_string(sv(14)) + ")");
  }

  Matrix4c rho = unvectorize(svd.matrixV().col(15));
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-12) {
    throw std::runtime_error("steady_state: null vector has zero trace");
  }
  rho /= tr;
  detail::resymmetrize(rho);

  if (double residual = (l * vectorize(rho)).norm(); residual > 1e-10) {
    throw std::runtime_error("steady_state: null-space residual " +
                             std::to_string(residual) + " exceeds 1e-10");
  }
  validate_density_matrix(rho);
  return rho;
}

}  // namespace xysim
