#include "zakai/simulate.hpp"

#include "zakai/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace zakai {

Vector gaussian_vector(GaussianStream& stream, int n) {
  if (n < 1) {
    throw std::invalid_argument("gaussian_vector: n must be >= 1, got " + std::to_string(n));
  }
  Vector v(n);
  stream.fill({v.data(), static_cast<std::size_t>(n)});
  return v;
}

Vector sample_initial(double alpha, int d, GaussianStream& stream) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("sample_initial: alpha must be > 0, got " +
                                std::to_string(alpha));
  }
  return gaussian_vector(stream, d) / std::sqrt(alpha);
}

SignalObservationPath simulate_signal_observation(const FilteringModel& model,
                                                  const TimeGrid& grid, double alpha_init,
                                                  const StreamFactory& streams) {
  if (grid.steps < 1) {
    throw std::invalid_argument("simulate_signal_observation: grid.steps must be >= 1");
  }
  if (!(grid.horizon > 0.0)) {
    throw std::invalid_argument("simulate_signal_observation: grid.horizon must be > 0");
  }
  if (model.d < 1 || model.k < 1) {
    throw std::invalid_argument("simulate_signal_observation: model dimensions must be >= 1");
  }
  if (!streams) {
    throw std::invalid_argument("simulate_signal_observation: stream factory is empty");
  }

  const int steps = grid.steps;
  const int d = model.d;
  const int k = model.k;
  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);

  SignalObservationPath path;
  path.grid = grid;
  path.signal.resize(steps + 1, d);
  path.observation.resize(steps + 1, k);

  auto initial = streams(kInitialConditionStream);
  auto signal_noise = streams(kSignalNoiseStream);
  auto observation_noise = streams(kObservationNoiseStream);

  Vector y = sample_initial(alpha_init, d, *initial);
  Vector hy = model.h(y);
  if (hy.size() != k) {
    throw std::invalid_argument("simulate_signal_observation: h(x) has dimension " +
                                std::to_string(hy.size()) + ", model expects k = " +
                                std::to_string(k));
  }
  path.signal.row(0) = y;
  path.observation.row(0).setZero();

  Vector xi(d);
  Vector eta(k);
  Vector z = Vector::Zero(k);
  for (int n = 1; n <= steps; ++n) {
    signal_noise->fill({xi.data(), static_cast<std::size_t>(d)});
    const Vector y_next = y + model.mu(y) * dt + model.sigma * (sqrt_dt * xi);
    if (!y_next.allFinite()) {
      throw SimulationError("simulate_signal_observation: signal turned non-finite", n);
    }
    const Vector hy_next = model.h(y_next);

    observation_noise->fill({eta.data(), static_cast<std::size_t>(k)});
    z += 0.5 * (hy + hy_next) * dt + sqrt_dt * eta;
    if (!z.allFinite()) {
      throw SimulationError("simulate_signal_observation: observation turned non-finite", n);
    }

    path.signal.row(n) = y_next;
    path.observation.row(n) = z;
    y = y_next;
    hy = hy_next;
  }
  return path;
}

}  // namespace zakai
