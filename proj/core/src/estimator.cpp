#include "zakai/estimator.hpp"

#include "zakai/errors.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>

namespace zakai {

namespace {

// Weight storage per point block is capped at ~64 MB; larger grids are
// processed in blocks of points, replaying the (pure) sample streams per block.
constexpr std::int64_t kMaxBlockDoubles = 8'000'000;

void check_obs(const FilteringModel& model, const SignalObservationPath& obs, const char* where) {
  if (obs.grid.steps < 1 || !(obs.grid.horizon > 0.0)) {
    throw std::invalid_argument(std::string(where) + ": observation grid is empty");
  }
  if (obs.observation.rows() != obs.grid.steps + 1 || obs.observation.cols() != model.k) {
    throw std::invalid_argument(std::string(where) +
                                ": observation path shape does not match model/grid");
  }
}

// Evaluates the auxiliary drift and the potential at one (x, z) pair, sharing
// Dh(x)^T z, sigma^T w, h(x), and mu(x) between the two. Expression order
// matches auxiliary_drift() and potential() exactly so results agree bitwise.
inline double eval_drift_potential(const FilteringModel& model, const Vector& x, const Vector& z,
                                   Vector& drift) {
  const Vector w = model.apply_dh_t(x, z);
  const Vector sw = model.sigma.transpose() * w;
  const Vector hx = model.h(x);
  const Vector mux = model.mu(x);
  drift.noalias() = model.sigma * sw;
  drift -= mux;
  return 0.5 * sw.squaredNorm() - 0.5 * hx.squaredNorm() + 0.5 * model.trace_hess_h(x, z) -
         mux.dot(w) - model.div_mu(x);
}

// Per-worker scratch for one block of points.
struct Workspace {
  std::vector<Vector> r;      // current auxiliary state per point
  std::vector<Vector> drift;  // drift for the *next* step per point
  std::vector<double> pot_prev;
  std::vector<double> acc;
  Vector xi;   // one step's Gaussian increments (shared by all points)
  Vector sxi;  // sigma * sqrt(dt) * xi

  Workspace(std::size_t n_points, int d)
      : r(n_points, Vector(d)),
        drift(n_points, Vector(d)),
        pot_prev(n_points, 0.0),
        acc(n_points, 0.0),
        xi(d),
        sxi(d) {}
};

// Runs one Monte Carlo sample across a block of points, all sharing the same
// increment draws, and writes each point's log weight.
//
// Step n of the auxiliary process is driven by observation row (steps - n + 1);
// the potential accumulates the trapezoid pairing of rows (steps - n) at the
// new state and (steps - n + 1) at the previous state. The single evaluation
// at (r, row steps - n) serves both the n-th trapezoid term and the drift of
// step n + 1.
void run_sample_block(const FilteringModel& model, const std::vector<Vector>& points,
                      const std::vector<Vector>& z_rows, const std::vector<double>& h_dot_z,
                      double dt, double sqrt_dt, GaussianStream& stream, Workspace& ws,
                      std::span<double> out) {
  const std::size_t n_points = points.size();
  const int steps = static_cast<int>(z_rows.size()) - 1;
  const int d = model.d;

  for (std::size_t p = 0; p < n_points; ++p) {
    ws.r[p] = points[p];
    ws.pot_prev[p] = eval_drift_potential(model, ws.r[p], z_rows[steps], ws.drift[p]);
    ws.acc[p] = 0.0;
  }
  for (int n = 1; n <= steps; ++n) {
    stream.fill({ws.xi.data(), static_cast<std::size_t>(d)});
    ws.sxi.noalias() = model.sigma * (sqrt_dt * ws.xi);
    const Vector& z = z_rows[steps - n];
    for (std::size_t p = 0; p < n_points; ++p) {
      ws.r[p] += dt * ws.drift[p] + ws.sxi;
      if (!ws.r[p].allFinite()) {
        throw SimulationError("estimator: auxiliary path turned non-finite", n);
      }
      const double pot = eval_drift_potential(model, ws.r[p], z, ws.drift[p]);
      ws.acc[p] += pot + ws.pot_prev[p];
      ws.pot_prev[p] = pot;
    }
  }
  const double half_dt = 0.5 * dt;
  for (std::size_t p = 0; p < n_points; ++p) {
    const double lw = model.log_phi(ws.r[p]) + half_dt * ws.acc[p] + h_dot_z[p];
    // -infinity is a legitimate zero weight (initial density vanishing there);
    // NaN or +infinity means the weight blew up.
    if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity()) {
      throw SimulationError("estimator: log weight turned non-finite", steps);
    }
    out[p] = lw;
  }
}

// Collapses one point's log weights (in canonical sample order) into an
// estimate. The reduction is a fixed sequential two-pass over sample order,
// which is what makes results independent of chunking and worker count.
Estimate reduce_point(const Vector& x, std::span<double> log_weights, AccumulationMode mode,
                      std::int64_t samples) {
  Estimate est;
  est.x = x;
  est.samples = samples;

  double max_lw = -std::numeric_limits<double>::infinity();
  for (const double lw : log_weights) max_lw = std::max(max_lw, lw);
  est.max_log_weight = max_lw;

  const double shift = (mode == AccumulationMode::kLogSumExp) ? max_lw : 0.0;
  if (shift == -std::numeric_limits<double>::infinity()) {
    // Every weight is zero; the estimate is exactly zero with zero variance.
    est.degenerate_variance = true;
    return est;
  }

  for (double& lw : log_weights) lw = std::exp(lw - shift);
  double sum = 0.0;
  for (const double v : log_weights) sum += v;
  const double mean = sum / static_cast<double>(samples);
  double sum_sq = 0.0;
  for (const double v : log_weights) {
    const double dev = v - mean;
    sum_sq += dev * dev;
  }

  const double scale = std::exp(shift);
  est.value = scale * mean;
  est.std_error =
      scale * std::sqrt(sum_sq / static_cast<double>(samples - 1) / static_cast<double>(samples));
  est.degenerate_variance = (sum_sq == 0.0);
  est.ci_lo = est.value - kNormalQuantile975 * est.std_error;
  est.ci_hi = est.value + kNormalQuantile975 * est.std_error;
  return est;
}

}  // namespace

RowMatrix simulate_auxiliary_path(const FilteringModel& model, const SignalObservationPath& obs,
                                  const Vector& x, GaussianStream& stream) {
  check_obs(model, obs, "simulate_auxiliary_path");
  if (x.size() != model.d) {
    throw std::invalid_argument("simulate_auxiliary_path: x has wrong dimension");
  }
  const int steps = obs.grid.steps;
  const int d = model.d;
  const double dt = obs.grid.dt();
  const double sqrt_dt = std::sqrt(dt);

  RowMatrix path(steps + 1, d);
  Vector r = x;
  Vector xi(d);
  path.row(0) = r;
  for (int n = 1; n <= steps; ++n) {
    const Vector z = obs.observation.row(steps - n + 1);
    const Vector drift = auxiliary_drift(model, z, r);
    stream.fill({xi.data(), static_cast<std::size_t>(d)});
    r += dt * drift + model.sigma * (sqrt_dt * xi);
    if (!r.allFinite()) {
      throw SimulationError("simulate_auxiliary_path: path turned non-finite", n);
    }
    path.row(n) = r;
  }
  return path;
}

double sample_log_weight(const FilteringModel& model, const SignalObservationPath& obs,
                         const Vector& x, GaussianStream& stream) {
  check_obs(model, obs, "sample_log_weight");
  if (x.size() != model.d) {
    throw std::invalid_argument("sample_log_weight: x has wrong dimension");
  }
  const int steps = obs.grid.steps;
  std::vector<Vector> z_rows(steps + 1);
  for (int n = 0; n <= steps; ++n) z_rows[n] = obs.observation.row(n);

  const std::vector<Vector> points{x};
  const std::vector<double> h_dot_z{model.h(x).dot(z_rows[steps])};
  Workspace ws(1, model.d);
  double out = 0.0;
  run_sample_block(model, points, z_rows, h_dot_z, obs.grid.dt(), std::sqrt(obs.grid.dt()),
                   stream, ws, {&out, 1});
  return out;
}

std::pair<double, double> confidence_interval(double mean, double s2, std::int64_t m) {
  if (m < 1) {
    throw std::invalid_argument("confidence_interval: m must be >= 1");
  }
  if (!(s2 >= 0.0)) {
    throw std::invalid_argument("confidence_interval: s2 must be >= 0");
  }
  const double half_width = kNormalQuantile975 * std::sqrt(s2 / static_cast<double>(m));
  return {mean - half_width, mean + half_width};
}

std::vector<Estimate> estimate_grid(const FilteringModel& model, const SignalObservationPath& obs,
                                    const std::vector<Vector>& points,
                                    const EstimatorConfig& config) {
  check_obs(model, obs, "estimate_grid");
  if (points.empty()) {
    throw std::invalid_argument("estimate_grid: no evaluation points");
  }
  for (const Vector& x : points) {
    if (x.size() != model.d) {
      throw std::invalid_argument("estimate_grid: evaluation point has wrong dimension");
    }
  }
  if (config.samples < 2) {
    throw std::invalid_argument("estimate_grid: samples must be >= 2, got " +
                                std::to_string(config.samples));
  }
  if (config.chunk_size < 1) {
    throw std::invalid_argument("estimate_grid: chunk_size must be >= 1");
  }
  if (config.workers < 1) {
    throw std::invalid_argument("estimate_grid: workers must be >= 1");
  }

  const std::int64_t samples = config.samples;
  const int steps = obs.grid.steps;
  const double dt = obs.grid.dt();
  const double sqrt_dt = std::sqrt(dt);

  std::vector<Vector> z_rows(steps + 1);
  for (int n = 0; n <= steps; ++n) z_rows[n] = obs.observation.row(n);

  const StreamFactory factory =
      config.stream_factory ? config.stream_factory : philox_stream_factory(config.seed);

  const std::int64_t chunk = std::min<std::int64_t>(config.chunk_size, samples);
  const std::int64_t n_chunks = (samples + chunk - 1) / chunk;
  const int workers =
      static_cast<int>(std::min<std::int64_t>(config.workers, n_chunks));

  const std::size_t block_points = static_cast<std::size_t>(
      std::max<std::int64_t>(1, kMaxBlockDoubles / samples));

  std::vector<Estimate> results;
  results.reserve(points.size());
  std::vector<double> weights;

  for (std::size_t block_begin = 0; block_begin < points.size(); block_begin += block_points) {
    const std::size_t block_end = std::min(points.size(), block_begin + block_points);
    const std::vector<Vector> block(points.begin() + block_begin, points.begin() + block_end);
    std::vector<double> h_dot_z(block.size());
    for (std::size_t p = 0; p < block.size(); ++p) {
      h_dot_z[p] = model.h(block[p]).dot(z_rows[steps]);
    }

    weights.assign(block.size() * static_cast<std::size_t>(samples), 0.0);

    std::atomic<std::int64_t> next_chunk{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker_fn = [&]() {
      Workspace ws(block.size(), model.d);
      std::vector<double> sample_out(block.size());
      while (true) {
        const std::int64_t c = next_chunk.fetch_add(1);
        if (c >= n_chunks || failed.load()) return;
        const std::int64_t begin = c * chunk;
        const std::int64_t end = std::min(samples, begin + chunk);
        try {
          for (std::int64_t i = begin; i < end && !failed.load(); ++i) {
            auto stream = factory(kFirstSampleStream + static_cast<std::uint64_t>(i));
            run_sample_block(model, block, z_rows, h_dot_z, dt, sqrt_dt, *stream, ws,
                             sample_out);
            for (std::size_t p = 0; p < block.size(); ++p) {
              weights[p * static_cast<std::size_t>(samples) + static_cast<std::size_t>(i)] =
                  sample_out[p];
            }
          }
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker_fn);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    for (std::size_t p = 0; p < block.size(); ++p) {
      std::span<double> slice(weights.data() + p * static_cast<std::size_t>(samples),
                              static_cast<std::size_t>(samples));
      results.push_back(reduce_point(block[p], slice, config.accumulation_mode, samples));
    }
  }
  return results;
}

Estimate estimate_point(const FilteringModel& model, const SignalObservationPath& obs,
                        const Vector& x, const EstimatorConfig& config) {
  return estimate_grid(model, obs, {x}, config).front();
}

}  // namespace zakai
