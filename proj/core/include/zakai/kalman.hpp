#pragma once

#include "zakai/model.hpp"
#include "zakai/simulate.hpp"

#include <vector>

namespace zakai {

// Gaussian filtering state: posterior mean and covariance of the signal given
// the observations seen so far.
struct KalmanState {
  Vector mean;
  Matrix cov;
};

// Discrete-time Kalman filter for the linear special case of the example
// family (beta = 0): signal increments are pure diffusion, the measurement at
// step n is the observation increment Z_n - Z_{n-1} = gamma * Y dt + noise.
// Returns the state after every step (front = prior, back = final posterior).
// Throws std::invalid_argument when beta != 0 (the model is then nonlinear and
// this oracle does not apply).
std::vector<KalmanState> kalman_filter_history(const ExampleModelParams& params,
                                               const SignalObservationPath& obs);

KalmanState kalman_filter(const ExampleModelParams& params, const SignalObservationPath& obs);

// Density of N(state.mean, state.cov) evaluated at x.
double gaussian_density(const KalmanState& state, const Vector& x);

// Final-time posterior density at each point (normalized; integrates to one).
std::vector<double> kalman_posterior_density(const ExampleModelParams& params,
                                             const SignalObservationPath& obs,
                                             const std::vector<Vector>& points);

}  // namespace zakai
