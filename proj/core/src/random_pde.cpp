#include "zakai/random_pde.hpp"

#include "zakai/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace zakai {

namespace {

// Piecewise-linear interpolation of the observation path at time t.
Vector interpolate_observation(const SignalObservationPath& obs, double t) {
  const int steps = obs.grid.steps;
  const double position = t / obs.grid.dt();
  int idx = static_cast<int>(std::floor(position));
  idx = std::max(0, std::min(idx, steps - 1));
  const double frac = position - idx;
  return (1.0 - frac) * obs.observation.row(idx) + frac * obs.observation.row(idx + 1);
}

// Solves the tridiagonal system (lower, diag, upper) * x = rhs in place.
void thomas_solve(std::vector<double>& lower, std::vector<double>& diag,
                  std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double factor = lower[i] / diag[i - 1];
    diag[i] -= factor * upper[i - 1];
    rhs[i] -= factor * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  }
}

}  // namespace

double RandomPdeResult::interpolate(double x) const {
  if (x < grid.x_lo || x > grid.x_hi) {
    throw std::invalid_argument("RandomPdeResult::interpolate: x = " + std::to_string(x) +
                                " outside [" + std::to_string(grid.x_lo) + ", " +
                                std::to_string(grid.x_hi) + "]");
  }
  const double dx = grid.dx();
  const double position = (x - grid.x_lo) / dx;
  int idx = static_cast<int>(std::floor(position));
  idx = std::max(0, std::min(idx, grid.cells - 1));
  const double frac = position - idx;
  return (1.0 - frac) * x_values(idx) + frac * x_values(idx + 1);
}

RandomPdeResult solve_random_pde(const FilteringModel& model, const SignalObservationPath& obs,
                                 const PdeGrid1d& grid) {
  if (model.d != 1 || model.k != 1) {
    throw std::invalid_argument("solve_random_pde: only d = k = 1 is supported");
  }
  if (grid.cells < 4) {
    throw std::invalid_argument("solve_random_pde: need at least 4 cells");
  }
  if (!(grid.x_hi > grid.x_lo)) {
    throw std::invalid_argument("solve_random_pde: x_hi must exceed x_lo");
  }
  if (grid.time_steps < 0) {
    throw std::invalid_argument("solve_random_pde: time_steps must be >= 0");
  }
  if (obs.grid.steps < 1 || obs.observation.rows() != obs.grid.steps + 1 ||
      obs.observation.cols() != 1) {
    throw std::invalid_argument("solve_random_pde: observation path shape mismatch");
  }

  const int n_nodes = grid.cells + 1;
  const double dx = grid.dx();
  const double a = model.sigma(0, 0) * model.sigma(0, 0);  // sigma sigma^T, scalar case

  RandomPdeResult result;
  result.grid = grid;
  result.nodes.resize(n_nodes);
  for (int j = 0; j < n_nodes; ++j) result.nodes(j) = grid.x_lo + j * dx;

  Vector u(n_nodes);
  for (int j = 0; j < n_nodes; ++j) {
    u(j) = std::exp(model.log_phi(result.nodes.segment(j, 1)));
  }

  if (grid.time_steps > 0) {
    const double dt = obs.grid.horizon / grid.time_steps;
    const int interior = n_nodes - 2;
    std::vector<double> lower(interior), diag(interior), upper(interior), rhs(interior);
    Vector b_coef(n_nodes), pot_coef(n_nodes);
    Vector x_vec(1);

    for (int m = 0; m < grid.time_steps; ++m) {
      // Crank-Nicolson with first-order coefficients frozen at the half-step.
      const double t_half = (m + 0.5) * dt;
      const Vector z = interpolate_observation(obs, t_half);
      for (int j = 0; j < n_nodes; ++j) {
        x_vec(0) = result.nodes(j);
        b_coef(j) = auxiliary_drift(model, z, x_vec)(0);
        pot_coef(j) = potential(model, z, x_vec);
      }

      // Spatial operator at node j (central differences):
      //   A u = a/2 (u_{j+1} - 2 u_j + u_{j-1})/dx^2
      //       + b_j (u_{j+1} - u_{j-1})/(2 dx) + B_j u_j.
      // Step: (I - dt/2 A) u^{m+1} = (I + dt/2 A) u^m, Dirichlet u = 0 at the
      // boundary nodes of u^{m+1}.
      const double diffusion = 0.5 * a / (dx * dx);
      for (int i = 0; i < interior; ++i) {
        const int j = i + 1;
        const double advection = b_coef(j) / (2.0 * dx);
        const double lo = diffusion - advection;
        const double hi = diffusion + advection;
        const double center = -2.0 * diffusion + pot_coef(j);
        lower[i] = -0.5 * dt * lo;
        diag[i] = 1.0 - 0.5 * dt * center;
        upper[i] = -0.5 * dt * hi;
        rhs[i] = u(j) + 0.5 * dt * (lo * u(j - 1) + center * u(j) + hi * u(j + 1));
      }
      thomas_solve(lower, diag, upper, rhs);
      for (int i = 0; i < interior; ++i) u(i + 1) = rhs[i];
      u(0) = 0.0;
      u(n_nodes - 1) = 0.0;

      if (u.cwiseAbs().maxCoeff() > 1e12) {
        throw SimulationError("solve_random_pde: solution exceeded stability threshold", m + 1);
      }
    }
  }

  result.u = u;
  result.x_values.resize(n_nodes);
  const double z_final = obs.observation(obs.grid.steps, 0);
  Vector x_vec(1);
  for (int j = 0; j < n_nodes; ++j) {
    x_vec(0) = result.nodes(j);
    result.x_values(j) = u(j) * std::exp(model.h(x_vec)(0) * z_final);
  }
  return result;
}

}  // namespace zakai
