// Entanglement-event detection (sudden death / sudden birth), steady-state
// concurrence evaluation, and the critical-anisotropy scan.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "xysim/entanglement.hpp"
#include "xysim/lindblad.hpp"
#include "xysim/model.hpp"

namespace xysim {

// Death/birth events of a concurrence trace plus its terminal value.
// A "zero interval" is a maximal run of samples with C < eps lasting at
// least min_window; a death is the entry into such an interval (preceded by
// C >= eps), a birth its exit (followed by C >= eps). The window requirement
// keeps instantaneous touches of oscillatory traces from counting as events.
struct EntanglementEvents {
  std::vector<double> death_times;
  std::vector<double> birth_times;
  double steady_value = 0.0;
};

inline EntanglementEvents detect_events(std::span<const double> times,
                                        std::span<const double> concurrences,
                                        double eps = 1e-6,
                                        double min_window = 0.5) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("detect_events: eps must be positive");
  }
  if (!(min_window > 0.0)) {
    throw std::invalid_argument("detect_events: min_window must be positive");
  }
  if (times.size() != concurrences.size()) {
    throw std::invalid_argument("detect_events: times/concurrences mismatch");
  }
  const std::size_t n = times.size();
  if (n < 2 || times.back() - times.front() < min_window) {
    throw std::invalid_argument("detect_events: trajectory shorter than min_window");
  }

  EntanglementEvents events;
  events.steady_value = concurrences.back();
  std::size_t i = 0;
  while (i < n) {
    if (concurrences[i] >= eps) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && concurrences[j + 1] < eps) ++j;
    if (times[j] - times[i] >= min_window) {
      if (i > 0) events.death_times.push_back(times[i]);
      if (j < n - 1) events.birth_times.push_back(times[j]);
    }
    i = j + 1;
  }
  return events;
}

inline EntanglementEvents detect_events(const Trajectory& traj,
                                        double eps = 1e-6,
                                        double min_window = 0.5) {
  return detect_events(traj.times, traj.concurrences, eps, min_window);
}

// True when the trace acquires entanglement that persists to the end of the
// trajectory: a birth event exists and no death follows the last birth.
inline bool ends_entangled(const EntanglementEvents& events) {
  return !events.birth_times.empty() &&
         (events.death_times.empty() ||
          events.birth_times.back() > events.death_times.back());
}

// Closed-form steady-concurrence estimate
//   (2 Delta sqrt(4 omega^2 + Delta^2) - 2 Delta^2) / (4(omega^2 + Delta^2) + gamma^2)
// clamped below at zero. Note: this commonly quoted expression does not
// reproduce the steady state of the master equation implemented here; see
// steady_concurrence_exact. It is retained for comparison and reporting.
inline double steady_concurrence_formula(const ModelParams& params) {
  params.validate();
  const double d = params.delta;
  const double w = params.omega;
  const double g = params.gamma;
  const double value = (2.0 * d * std::sqrt(4.0 * w * w + d * d) - 2.0 * d * d) /
                       (4.0 * (w * w + d * d) + g * g);
  return std::max(0.0, value);
}

// Exact closed-form steady concurrence of the implemented master equation,
// derived from its stationarity conditions: the unique gamma > 0 steady
// state is an X state with equal populations a = rho11 = rho22 = rho33 =
// Delta^2 / D, rho44 = 1 - 3a and coherence rho14 = -Delta(2 omega + i gamma) / D,
// D = gamma^2 + 4 omega^2 + 4 Delta^2, giving
//   C = max(0, (2 Delta sqrt(4 omega^2 + gamma^2) - 2 Delta^2) / D).
// Differs from steady_concurrence_formula in the square-root argument
// (gamma^2 in place of Delta^2); matches the null-space solve and long-time
// integration to numerical precision. Independent of j_coupling.
inline double steady_concurrence_exact(const ModelParams& params) {
  params.validate();
  const double d = params.delta;
  const double w = params.omega;
  const double g = params.gamma;
  const double denom = g * g + 4.0 * w * w + 4.0 * d * d;
  if (denom == 0.0) return 0.0;
  const double value = 2.0 * d * (std::sqrt(4.0 * w * w + g * g) - d) / denom;
  return std::max(0.0, value);
}

// Concurrence of the Liouvillian null-space steady state. This is the
// authoritative steady value; requires gamma > 0.
inline double steady_concurrence_numerical(const ModelParams& params) {
  return concurrence_general(steady_state(params));
}

struct AnisotropyScanOptions {
  double resolution = 1e-3;  // width of the returned bisection bracket
  int coarse_points = 17;    // pre-scan grid used to verify monotonicity
  double eps = 1e-6;
  double min_window = 0.5;
  double dt_out = 0.01;
  IntegratorOptions integrator{};
};

// Locates the anisotropy threshold separating lasting sudden birth (present
// below) from terminal sudden death (above) by bisection on ends_entangled.
// The trace can be born transiently and still die for good above the
// threshold, so the bisection predicate is lasting entanglement rather than
// the bare presence of a birth event. Throws when the predicate has no sign
// change over [delta_lo, delta_hi] or changes sign more than once on the
// coarse grid.
inline double critical_anisotropy_scan(double theta, double omega, double gamma,
                                       double j_coupling, double delta_lo,
                                       double delta_hi, double t_end,
                                       const AnisotropyScanOptions& opts = {}) {
  if (!(delta_lo > 0.0) || !(delta_hi > delta_lo)) {
    throw std::invalid_argument(
        "critical_anisotropy_scan: need 0 < delta_lo < delta_hi");
  }
  if (!(opts.resolution > 0.0)) {
    throw std::invalid_argument("critical_anisotropy_scan: resolution must be positive");
  }
  if (opts.coarse_points < 2) {
    throw std::invalid_argument("critical_anisotropy_scan: need at least 2 coarse points");
  }

  const DensityMatrix rho0 = build_initial_state(theta);
  const auto lasting_esb = [&](double delta) {
    ModelParams params{j_coupling, delta, omega, gamma};
    const Trajectory traj = evolve(rho0, params, t_end, opts.dt_out, opts.integrator);
    return ends_entangled(detect_events(traj, opts.eps, opts.min_window));
  };

  std::vector<double> grid(opts.coarse_points);
  std::vector<char> esb(opts.coarse_points);
  for (int k = 0; k < opts.coarse_points; ++k) {
    grid[k] = delta_lo + (delta_hi - delta_lo) * k / (opts.coarse_points - 1);
    esb[k] = lasting_esb(grid[k]) ? 1 : 0;
  }

  std::vector<std::pair<double, double>> flips;
  for (int k = 0; k + 1 < opts.coarse_points; ++k) {
    if (esb[k] != esb[k + 1]) flips.emplace_back(grid[k], grid[k + 1]);
  }
  if (flips.empty()) {
    throw std::runtime_error(
        "critical_anisotropy_scan: no sign change of the birth predicate in "
        "the scanned range");
  }
  if (flips.size() > 1 || esb.front() != 1) {
    std::ostringstream msg;
    msg << "critical_anisotropy_scan: birth predicate is not monotone; sign "
           "changes in";
    for (const auto& [a, b] : flips) msg << " [" << a << ", " << b << "]";
    throw std::runtime_error(msg.str());
  }

  auto [lo, hi] = flips.front();  // ESB at lo, none at hi
  while (hi - lo > opts.resolution) {
    const double mid = (lo + hi) / 2.0;
    (lasting_esb(mid) ? lo : hi) = mid;
  }
  return (lo + hi) / 2.0;
}

}  // namespace xysim
