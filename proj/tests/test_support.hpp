#pragma once

#include "zakai/model.hpp"
#include "zakai/rng.hpp"
#include "zakai/simulate.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

namespace zakai::test {

// Gaussian stream that cycles through a fixed list of draws. An empty list
// behaves like the zero stream. Used to inject hand-picked increments.
class PresetStream final : public GaussianStream {
public:
  explicit PresetStream(std::vector<double> values) : values_(std::move(values)) {}

  void fill(std::span<double> out) override {
    for (double& v : out) {
      if (values_.empty()) {
        v = 0.0;
      } else {
        v = values_[index_ % values_.size()];
        ++index_;
      }
    }
  }

private:
  std::vector<double> values_;
  std::size_t index_ = 0;
};

// Factory mapping stream ids to preset draw lists; ids not in the map get the
// zero stream.
inline StreamFactory preset_stream_factory(std::map<std::uint64_t, std::vector<double>> presets) {
  return [presets = std::move(presets)](std::uint64_t stream_id) -> std::unique_ptr<GaussianStream> {
    auto it = presets.find(stream_id);
    if (it == presets.end()) return std::make_unique<PresetStream>(std::vector<double>{});
    return std::make_unique<PresetStream>(it->second);
  };
}

// Observation-only path for estimator tests: signal rows are zero (the
// estimator never reads them), observation column holds the given values.
inline SignalObservationPath make_observation_1d(const TimeGrid& grid,
                                                 const std::vector<double>& z_values) {
  SignalObservationPath path;
  path.grid = grid;
  path.signal = RowMatrix::Zero(grid.steps + 1, 1);
  path.observation.resize(grid.steps + 1, 1);
  for (int n = 0; n <= grid.steps; ++n) path.observation(n, 0) = z_values.at(n);
  return path;
}

// Minimal custom model: d = k = 1, sigma = 1, h(x) = x, mu = 0, standard
// Gaussian initial density. The baseline for hand-computed potential values.
inline FilteringModel make_unit_model() {
  FilteringModel m;
  m.d = 1;
  m.k = 1;
  m.sigma = Matrix::Identity(1, 1);
  m.mu = [](const Vector& x) { return Vector::Zero(x.size()); };
  m.div_mu = [](const Vector&) { return 0.0; };
  m.h = [](const Vector& x) { return x; };
  m.dh = [](const Vector& x) { return Matrix::Identity(x.size(), x.size()); };
  m.trace_hess_h = [](const Vector&, const Vector&) { return 0.0; };
  m.log_phi = [](const Vector& x) { return -0.5 * x.squaredNorm() - 0.5 * std::log(2.0 * M_PI); };
  return m;
}

}  // namespace zakai::test
