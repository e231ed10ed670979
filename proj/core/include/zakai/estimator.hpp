#pragma once

#include "zakai/model.hpp"
#include "zakai/simulate.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace zakai {

// How per-sample weights are accumulated into a mean and variance.
//   kLogSumExp (default): shift by the max log weight before exponentiating;
//     robust when weights span many orders of magnitude.
//   kPlain: exponentiate directly; matches the naive estimator on well-scaled
//     problems and is kept as a cross-check.
enum class AccumulationMode { kPlain, kLogSumExp };

// Two-sided 97.5% standard normal quantile used for 95% confidence intervals.
inline constexpr double kNormalQuantile975 = 1.959963985;

struct EstimatorConfig {
  std::int64_t samples = 0;         // Monte Carlo sample count (>= 2)
  std::uint64_t seed = 0;           // base seed; sample i uses stream kFirstSampleStream + i
  std::int64_t chunk_size = 8192;   // samples per work unit (clamped to `samples`)
  AccumulationMode accumulation_mode = AccumulationMode::kLogSumExp;
  int workers = 1;                  // worker threads

  // Overrides the default Philox streams when set (tests use zero streams).
  StreamFactory stream_factory;
};

struct Estimate {
  Vector x;                     // evaluation point
  double value = 0.0;           // Monte Carlo mean of the weights
  double std_error = 0.0;       // sample standard deviation / sqrt(samples)
  double ci_lo = 0.0;           // value -/+ kNormalQuantile975 * std_error
  double ci_hi = 0.0;
  std::int64_t samples = 0;
  double max_log_weight = 0.0;  // diagnostic: largest log weight observed
  bool degenerate_variance = false;  // all weights identical (or all zero)
};

// Simulates the auxiliary process started at x, driven by the time-reversed
// observation path: step n reads observation row (steps - n + 1) for its
// drift. Returns the full path, (steps + 1) x d. Consumes `steps * d` draws.
RowMatrix simulate_auxiliary_path(const FilteringModel& model, const SignalObservationPath& obs,
                                  const Vector& x, GaussianStream& stream);

// One sample's log weight at x: log phi of the auxiliary endpoint, plus the
// trapezoid approximation of the integrated potential along the (time-reversed)
// path, plus <h(x), Z_final>. Consumes exactly the draws of
// simulate_auxiliary_path and reproduces its path bitwise.
double sample_log_weight(const FilteringModel& model, const SignalObservationPath& obs,
                         const Vector& x, GaussianStream& stream);

// 95% normal confidence interval for a mean with sample variance s2 over m
// samples: mean -/+ kNormalQuantile975 * sqrt(s2 / m).
std::pair<double, double> confidence_interval(double mean, double s2, std::int64_t m);

// Monte Carlo estimate of the unnormalized conditional density at each point.
// All points share the same per-sample increment streams, so the results for a
// point do not depend on which other points are in the batch, on chunk_size,
// or on the worker count (bitwise).
std::vector<Estimate> estimate_grid(const FilteringModel& model, const SignalObservationPath& obs,
                                    const std::vector<Vector>& points,
                                    const EstimatorConfig& config);

// Single-point convenience wrapper; identical (bitwise) to the corresponding
// entry of estimate_grid.
Estimate estimate_point(const FilteringModel& model, const SignalObservationPath& obs,
                        const Vector& x, const EstimatorConfig& config);

}  // namespace zakai
