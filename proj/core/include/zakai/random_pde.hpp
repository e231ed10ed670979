#pragma once

#include "zakai/model.hpp"
#include "zakai/simulate.hpp"

namespace zakai {

// Space/time discretization for the one-dimensional companion PDE solver.
// `cells` spatial cells give cells + 1 nodes on [x_lo, x_hi]; `time_steps`
// Crank-Nicolson steps cover [0, horizon of the observation path].
struct PdeGrid1d {
  double x_lo = 0.0;
  double x_hi = 0.0;
  int cells = 0;
  int time_steps = 0;

  double dx() const { return (x_hi - x_lo) / cells; }
};

struct RandomPdeResult {
  PdeGrid1d grid;
  Vector nodes;     // cells + 1 node coordinates
  Vector u;         // companion PDE solution at the final time
  Vector x_values;  // u scaled by exp(h(x) * Z_final): the density approximation

  // Piecewise-linear interpolation of x_values; x must lie inside the domain.
  double interpolate(double x) const;
};

// Deterministic reference for the one-dimensional case (d = k = 1): solves
//
//   du/dt = 1/2 sigma^2 u_xx + b(t, x) u_x + B(t, x) u,   u(0, .) = phi,
//
// where b and B are the auxiliary drift and the potential with the observation
// value frozen at its piecewise-linear interpolant z(t) (forward time), by
// Crank-Nicolson with coefficients at half-steps, homogeneous Dirichlet
// boundaries, and a tridiagonal solve per step. The domain must be wide enough
// that the density is negligible at the boundary; a good default is the
// signal's location plus/minus several standard deviations times a safety
// factor. Throws SimulationError if the solution exceeds 1e12 in magnitude.
RandomPdeResult solve_random_pde(const FilteringModel& model, const SignalObservationPath& obs,
                                 const PdeGrid1d& grid);

}  // namespace zakai
