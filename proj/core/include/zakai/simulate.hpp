#pragma once

#include "zakai/model.hpp"
#include "zakai/rng.hpp"

namespace zakai {

// Uniform time grid on [0, horizon] with `steps` Euler steps.
struct TimeGrid {
  double horizon = 0.0;  // terminal time
  int steps = 0;         // number of steps

  double dt() const { return horizon / steps; }
  // Exactly `horizon` at the final step so written paths round-trip.
  double time(int n) const { return n == steps ? horizon : horizon * n / steps; }
};

// One joint realization of the signal and the integrated observation on a
// uniform grid. Row n of each matrix is the state at time n * dt; the
// observation starts at zero by convention.
struct SignalObservationPath {
  TimeGrid grid;
  RowMatrix signal;       // (steps + 1) x d
  RowMatrix observation;  // (steps + 1) x k
};

// Draws n independent standard normals into a vector.
Vector gaussian_vector(GaussianStream& stream, int n);

// Draws from the centered Gaussian with precision alpha: alpha^{-1/2} * N(0, I_d).
Vector sample_initial(double alpha, int d, GaussianStream& stream);

// Euler-Maruyama signal / trapezoid observation scheme:
//   Y_n = Y_{n-1} + mu(Y_{n-1}) dt + sigma * sqrt(dt) * xi_n
//   Z_n = Z_{n-1} + (h(Y_{n-1}) + h(Y_n))/2 * dt + sqrt(dt) * eta_n
// with Y_0 ~ N(0, I_d / alpha_init), Z_0 = 0. Streams used: the initial
// condition, signal noise, and observation noise streams (ids 0, 1, 2).
// Throws SimulationError if any state turns non-finite.
SignalObservationPath simulate_signal_observation(const FilteringModel& model,
                                                  const TimeGrid& grid, double alpha_init,
                                                  const StreamFactory& streams);

}  // namespace zakai
