#include "zakai/kalman.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace zakai {

std::vector<KalmanState> kalman_filter_history(const ExampleModelParams& params,
                                               const SignalObservationPath& obs) {
  if (params.beta != 0.0) {
    throw std::invalid_argument(
        "kalman_filter_history: requires beta == 0 (linear signal dynamics), got beta = " +
        std::to_string(params.beta));
  }
  if (!(params.alpha > 0.0)) {
    throw std::invalid_argument("kalman_filter_history: alpha must be > 0");
  }
  const int d = params.d;
  if (obs.observation.cols() != d || obs.observation.rows() != obs.grid.steps + 1) {
    throw std::invalid_argument("kalman_filter_history: observation shape mismatch");
  }

  const int steps = obs.grid.steps;
  const double dt = obs.grid.dt();
  // Example-family diffusion: sigma = d^{-1/2} * ones, so sigma sigma^T is the
  // all-ones matrix regardless of d.
  const Matrix process_cov_rate = Matrix::Ones(d, d);
  const Matrix eye = Matrix::Identity(d, d);
  const Matrix obs_matrix = params.gamma * dt * eye;  // maps state to increment mean
  const Matrix obs_cov = dt * eye;                    // increment noise covariance

  std::vector<KalmanState> history;
  history.reserve(steps + 1);
  KalmanState state{Vector::Zero(d), eye / params.alpha};
  history.push_back(state);

  for (int n = 1; n <= steps; ++n) {
    // Predict: beta = 0 leaves the mean unchanged; covariance grows by
    // sigma sigma^T dt.
    state.cov += process_cov_rate * dt;

    // Update against the increment Z_n - Z_{n-1}.
    const Vector increment = obs.observation.row(n) - obs.observation.row(n - 1);
    const Matrix innovation_cov = obs_matrix * state.cov * obs_matrix.transpose() + obs_cov;
    const Matrix gain =
        state.cov * obs_matrix.transpose() * innovation_cov.llt().solve(eye);
    state.mean += gain * (increment - obs_matrix * state.mean);
    state.cov = (eye - gain * obs_matrix) * state.cov;
    state.cov = 0.5 * (state.cov + state.cov.transpose());  // keep symmetric
    history.push_back(state);
  }
  return history;
}

KalmanState kalman_filter(const ExampleModelParams& params, const SignalObservationPath& obs) {
  return kalman_filter_history(params, obs).back();
}

double gaussian_density(const KalmanState& state, const Vector& x) {
  const int d = static_cast<int>(state.mean.size());
  if (x.size() != d) {
    throw std::invalid_argument("gaussian_density: x has wrong dimension");
  }
  const Eigen::LLT<Matrix> llt(state.cov);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("gaussian_density: covariance is not positive definite");
  }
  const Matrix chol = llt.matrixL();
  double log_det = 0.0;
  for (int i = 0; i < d; ++i) log_det += std::log(chol(i, i));
  const Vector centered = x - state.mean;
  const double quad = llt.solve(centered).dot(centered);
  return std::exp(-0.5 * quad - log_det - 0.5 * d * std::log(2.0 * std::numbers::pi));
}

std::vector<double> kalman_posterior_density(const ExampleModelParams& params,
                                             const SignalObservationPath& obs,
                                             const std::vector<Vector>& points) {
  const KalmanState state = kalman_filter(params, obs);
  std::vector<double> densities;
  densities.reserve(points.size());
  for (const Vector& x : points) densities.push_back(gaussian_density(state, x));
  return densities;
}

}  // namespace zakai
