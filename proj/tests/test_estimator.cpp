#include "zakai/estimator.hpp"

#include "test_support.hpp"
#include "zakai/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace zakai;
using zakai::test::make_observation_1d;
using zakai::test::make_unit_model;
using zakai::test::preset_stream_factory;

namespace {

bool estimates_identical(const Estimate& a, const Estimate& b) {
  return a.value == b.value && a.std_error == b.std_error && a.ci_lo == b.ci_lo &&
         a.ci_hi == b.ci_hi && a.max_log_weight == b.max_log_weight &&
         a.degenerate_variance == b.degenerate_variance && a.samples == b.samples;
}

// The hand-computed single-step example shared by several cases:
// d=1, sigma=1, gamma=1, beta=0, alpha=2*pi, T=0.5, N=1, Z=(0, 0.2), x=1.
struct HandCase {
  FilteringModel model;
  SignalObservationPath obs;
  Vector x;

  HandCase() {
    ExampleModelParams params;
    params.beta = 0.0;
    model = build_example_model(params);
    obs = make_observation_1d(TimeGrid{0.5, 1}, {0.0, 0.2});
    x.resize(1);
    x << 1.0;
  }
};

constexpr double kHandLogWeight = -3.8725771108436495;

}  // namespace

TEST_SUITE_BEGIN("estimator");

TEST_CASE("auxiliary path stays put without drift or noise") {
  const FilteringModel model = make_unit_model();
  const auto obs = make_observation_1d(TimeGrid{1.0, 8}, std::vector<double>(9, 0.0));
  Vector x(1);
  x << 2.5;
  ZeroGaussianStream stream;
  const RowMatrix path = simulate_auxiliary_path(model, obs, x, stream);
  REQUIRE(path.rows() == 9);
  for (int n = 0; n <= 8; ++n) CHECK(path(n, 0) == 2.5);
}

TEST_CASE("hand-computed auxiliary step uses the time-reversed observation") {
  HandCase hand;
  ZeroGaussianStream stream;
  const RowMatrix path = simulate_auxiliary_path(hand.model, hand.obs, hand.x, stream);
  REQUIRE(path.rows() == 2);
  CHECK(path(0, 0) == 1.0);
  // Step 1 reads observation row N - n + 1 = 1: R_1 = 1 + (1 * 0.2) * 0.5 = 1.1.
  CHECK(path(1, 0) == doctest::Approx(1.1).epsilon(1e-15));
}

TEST_CASE("hand-computed sample log weight and weight") {
  HandCase hand;
  ZeroGaussianStream stream;
  const double lw = sample_log_weight(hand.model, hand.obs, hand.x, stream);
  // log phi(1.1) = -pi * 1.21, trapezoid = -0.27125, <h(x), Z_N> = 0.2.
  CHECK(lw == doctest::Approx(kHandLogWeight).epsilon(1e-12));
  CHECK(std::exp(lw) == doctest::Approx(std::exp(kHandLogWeight)).epsilon(1e-12));
}

TEST_CASE("all terms vanish for the trivial sample") {
  ExampleModelParams params;
  params.beta = 0.0;
  params.gamma = 0.0;
  const FilteringModel model = build_example_model(params);
  const auto obs = make_observation_1d(TimeGrid{0.5, 1}, {0.0, 0.2});
  Vector x = Vector::Zero(1);
  ZeroGaussianStream stream;
  CHECK(sample_log_weight(model, obs, x, stream) == 0.0);
}

TEST_CASE("sample_log_weight replays the estimator's own streams") {
  // The per-sample function and the batch estimator must see the same noise:
  // replaying streams 3+i reproduces the batch diagnostics exactly.
  ExampleModelParams params;  // paper parameters
  const FilteringModel model = build_example_model(params);
  const auto obs = simulate_signal_observation(model, TimeGrid{0.5, 10}, params.alpha,
                                               philox_stream_factory(31));
  Vector x(1);
  x << 0.4;

  const int m = 8;
  EstimatorConfig config;
  config.samples = m;
  config.seed = 5;
  const Estimate est = estimate_point(model, obs, x, config);

  double max_lw = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    PhiloxGaussianStream stream(5, kFirstSampleStream + static_cast<std::uint64_t>(i));
    const double lw = sample_log_weight(model, obs, x, stream);
    max_lw = std::max(max_lw, lw);
    sum += std::exp(lw);
  }
  CHECK(est.max_log_weight == max_lw);
  CHECK(est.value == doctest::Approx(sum / m).epsilon(1e-13));
}

TEST_CASE("auxiliary endpoint has Brownian variance") {
  ExampleModelParams params;
  params.beta = 0.0;
  params.gamma = 0.0;
  const FilteringModel model = build_example_model(params);
  const TimeGrid grid{0.5, 5};
  const auto obs = make_observation_1d(grid, std::vector<double>(6, 0.0));
  Vector x(1);
  x << 1.0;

  const int m = 20'000;
  double sum = 0.0, ss = 0.0;
  for (int i = 0; i < m; ++i) {
    PhiloxGaussianStream stream(77, kFirstSampleStream + static_cast<std::uint64_t>(i));
    const RowMatrix path = simulate_auxiliary_path(model, obs, x, stream);
    const double endpoint = path(grid.steps, 0) - x(0);
    sum += endpoint;
    ss += endpoint * endpoint;
  }
  const double mean = sum / m;
  const double var = (ss - m * mean * mean) / (m - 1);
  // Var(R_N - x) = T * (sigma sigma^T)_11 = 0.5.
  CHECK(var == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("zero-noise estimate collapses to phi(x)") {
  ExampleModelParams params;
  params.beta = 0.0;
  params.gamma = 0.0;
  const FilteringModel model = build_example_model(params);
  const auto obs = make_observation_1d(TimeGrid{0.5, 4}, std::vector<double>(5, 0.0));
  Vector x(1);
  x << 0.8;

  EstimatorConfig config;
  config.samples = 100;
  config.seed = 1;
  config.stream_factory = zero_stream_factory();
  const Estimate est = estimate_point(model, obs, x, config);

  const double phi = std::exp(model.log_phi(x));
  CHECK(est.value == doctest::Approx(phi).epsilon(1e-14));
  CHECK(est.std_error == 0.0);
  CHECK(est.ci_lo == est.value);
  CHECK(est.ci_hi == est.value);
  CHECK(est.degenerate_variance);
}

TEST_CASE("two-sample mean and variance formulas") {
  // beta = gamma = 0, N = 1: the weight is phi(x + sqrt(dt) * xi) with xi the
  // sample's single draw -> inject xi = a and xi = b.
  ExampleModelParams params;
  params.beta = 0.0;
  params.gamma = 0.0;
  const FilteringModel model = build_example_model(params);
  const TimeGrid grid{0.5, 1};
  const auto obs = make_observation_1d(grid, {0.0, 0.0});
  Vector x(1);
  x << 0.25;

  const double a = 0.6, b = -1.3;
  EstimatorConfig config;
  config.samples = 2;
  config.seed = 0;
  config.stream_factory = preset_stream_factory({
      {kFirstSampleStream, {a}},
      {kFirstSampleStream + 1, {b}},
  });

  const double sdt = std::sqrt(grid.dt());
  Vector ra(1), rb(1);
  ra << x(0) + sdt * a;
  rb << x(0) + sdt * b;
  const double w1 = std::exp(model.log_phi(ra));
  const double w2 = std::exp(model.log_phi(rb));

  for (auto mode : {AccumulationMode::kPlain, AccumulationMode::kLogSumExp}) {
    config.accumulation_mode = mode;
    const Estimate est = estimate_point(model, obs, x, config);
    CHECK(est.value == doctest::Approx((w1 + w2) / 2).epsilon(1e-14));
    const double s2 = (w1 - w2) * (w1 - w2) / 2.0;
    CHECK(est.std_error == doctest::Approx(std::sqrt(s2 / 2.0)).epsilon(1e-13));
  }
}

TEST_CASE("confidence interval formulas and validation") {
  {
    const auto [lo, hi] = confidence_interval(0.3, 0.0, 1000);
    CHECK(lo == 0.3);
    CHECK(hi == 0.3);
  }
  {
    const auto [lo, hi] = confidence_interval(0.5, 0.01, 10'000);
    CHECK(lo == doctest::Approx(0.498040).epsilon(1e-6));
    CHECK(hi == doctest::Approx(0.501960).epsilon(1e-6));
  }
  {
    const auto [lo, hi] = confidence_interval(0.0, 1.0, 4);
    CHECK(lo == doctest::Approx(-0.979982).epsilon(1e-6));
    CHECK(hi == doctest::Approx(0.979982).epsilon(1e-6));
  }
  CHECK_THROWS_AS((void)confidence_interval(0.0, -1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS((void)confidence_interval(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("single-point grid equals estimate_point bit-for-bit") {
  ExampleModelParams params;
  const FilteringModel model = build_example_model(params);
  const auto obs = simulate_signal_observation(model, TimeGrid{0.5, 20}, params.alpha,
                                               philox_stream_factory(8));
  Vector x(1);
  x << -0.3;

  EstimatorConfig config;
  config.samples = 500;
  config.seed = 17;
  const Estimate single = estimate_point(model, obs, x, config);
  const auto grid = estimate_grid(model, obs, {x}, config);
  REQUIRE(grid.size() == 1);
  CHECK(estimates_identical(single, grid[0]));
}

TEST_CASE("duplicated points give identical estimates") {
  ExampleModelParams params;
  const FilteringModel model = build_example_model(params);
  const auto obs = simulate_signal_observation(model, TimeGrid{0.5, 10}, params.alpha,
                                               philox_stream_factory(9));
  Vector x(1);
  x << 0.6;
  EstimatorConfig config;
  config.samples = 300;
  config.seed = 4;
  const auto estimates = estimate_grid(model, obs, {x, x}, config);
  REQUIRE(estimates.size() == 2);
  CHECK(estimates_identical(estimates[0], estimates[1]));
}

TEST_CASE("a point's estimate does not depend on its batch companions") {
  ExampleModelParams params;
  const FilteringModel model = build_example_model(params);
  const auto obs = simulate_signal_observation(model, TimeGrid{0.5, 10}, params.alpha,
                                               philox_stream_factory(10));
  Vector x(1), y(1);
  x << 0.1;
  y << -1.7;
  EstimatorConfig config;
  config.samples = 400;
  config.seed = 6;
  const auto pair = estimate_grid(model, obs, {x, y}, config);
  const auto alone = estimate_grid(model, obs, {x}, config);
  CHECK(estimates_identical(pair[0], alone[0]));
}

TEST_CASE("estimates are invariant under chunking and worker count") {
  ExampleModelParams params;
  params.d = 2;
  const FilteringModel model = build_example_model(params);
  const auto obs = simulate_signal_observation(model, TimeGrid{0.5, 10}, params.alpha,
                                               philox_stream_factory(12));
  Vector x(2);
  x << 0.2, -0.4;

  EstimatorConfig base;
  base.samples = 2'000;
  base.seed = 3;
  base.chunk_size = 8192;
  base.workers = 1;
  const Estimate reference = estimate_point(model, obs, x, base);

  for (std::int64_t chunk : {1, 7, 77, 500, 2000}) {
    EstimatorConfig config = base;
    config.chunk_size = chunk;
    CHECK(estimates_identical(reference, estimate_point(model, obs, x, config)));
  }
  for (int workers : {2, 3, 4, 16}) {
    EstimatorConfig config = base;
    config.workers = workers;
    config.chunk_size = 64;
    CHECK(estimates_identical(reference, estimate_point(model, obs, x, config)));
  }
}

TEST_CASE("accumulation modes agree on well-scaled problems") {
  ExampleModelParams params;
  params.d = 2;
  const FilteringModel model = build_example_model(params);
  const auto obs = simulate_signal_observation(model, TimeGrid{0.5, 20}, params.alpha,
                                               philox_stream_factory(13));
  Vector x(2);
  x << 0.3, 0.1;

  EstimatorConfig lse;
  lse.samples = 2'000;
  lse.seed = 21;
  lse.accumulation_mode = AccumulationMode::kLogSumExp;
  EstimatorConfig plain = lse;
  plain.accumulation_mode = AccumulationMode::kPlain;

  const Estimate a = estimate_point(model, obs, x, lse);
  const Estimate b = estimate_point(model, obs, x, plain);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-10));
  CHECK(a.std_error == doctest::Approx(b.std_error).epsilon(1e-10));
}

TEST_CASE("adding a constant to log_phi scales everything by its exponential") {
  ExampleModelParams params;
  const FilteringModel base_model = build_example_model(params);
  FilteringModel shifted = base_model;
  const auto base_log_phi = base_model.log_phi;
  shifted.log_phi = [base_log_phi](const Vector& v) { return base_log_phi(v) + 1.0; };

  const auto obs = simulate_signal_observation(base_model, TimeGrid{0.5, 10}, params.alpha,
                                               philox_stream_factory(14));
  Vector x(1);
  x << 0.9;
  EstimatorConfig config;
  config.samples = 1'000;
  config.seed = 2;

  const Estimate a = estimate_point(base_model, obs, x, config);
  const Estimate b = estimate_point(shifted, obs, x, config);
  const double e = std::exp(1.0);
  CHECK(b.value == doctest::Approx(a.value * e).epsilon(1e-12));
  CHECK(b.std_error == doctest::Approx(a.std_error * e).epsilon(1e-12));
  CHECK(b.ci_lo == doctest::Approx(a.ci_lo * e).epsilon(1e-12));
  CHECK(b.ci_hi == doctest::Approx(a.ci_hi * e).epsilon(1e-12));
}

TEST_CASE("small horizons reproduce the initial density") {
  ExampleModelParams params;  // paper parameters
  const FilteringModel model = build_example_model(params);
  const TimeGrid grid{1e-3, 4};
  const auto obs = simulate_signal_observation(model, grid, params.alpha,
                                               philox_stream_factory(15));
  EstimatorConfig config;
  config.samples = 10'000;
  config.seed = 44;

  for (double xv : {0.0, 1.0}) {
    Vector x(1);
    x << xv;
    const Estimate est = estimate_point(model, obs, x, config);
    const double phi = std::exp(model.log_phi(x));
    const double target = phi * std::exp(model.h(x).dot(obs.observation.row(grid.steps)));
    CHECK(std::abs(est.value - target) <= 5.0 * est.std_error + 0.01 * phi);
  }
}

TEST_CASE("vanishing initial density yields zero weights, not errors") {
  FilteringModel model = make_unit_model();
  model.log_phi = [](const Vector& x) {
    // Compact support: phi = 1 on [-1e-4, 1e-4], zero elsewhere.
    return std::abs(x(0)) <= 1e-4 ? 0.0 : -std::numeric_limits<double>::infinity();
  };
  const auto obs = make_observation_1d(TimeGrid{0.5, 2}, {0.0, 0.0, 0.0});
  Vector x(1);
  x << 50.0;  // far outside the support; every endpoint lands at log phi = -inf

  EstimatorConfig config;
  config.samples = 64;
  config.seed = 10;
  const Estimate est = estimate_point(model, obs, x, config);
  CHECK(est.value == 0.0);
  CHECK(est.std_error == 0.0);
  CHECK(est.degenerate_variance);
  CHECK(est.max_log_weight == -std::numeric_limits<double>::infinity());
}

TEST_CASE("estimates stay nonnegative with coherent intervals") {
  ExampleModelParams params;
  params.d = 2;
  const FilteringModel model = build_example_model(params);
  const auto obs = simulate_signal_observation(model, TimeGrid{0.5, 15}, params.alpha,
                                               philox_stream_factory(16));
  std::vector<Vector> points;
  for (double v : {-1.0, 0.0, 1.0}) {
    Vector x(2);
    x << v, -v;
    points.push_back(x);
  }
  EstimatorConfig config;
  config.samples = 500;
  config.seed = 30;
  for (const Estimate& est : estimate_grid(model, obs, points, config)) {
    CHECK(est.value >= 0.0);
    CHECK(est.std_error >= 0.0);
    CHECK(est.ci_lo <= est.value);
    CHECK(est.value <= est.ci_hi);
    CHECK(est.ci_hi - est.ci_lo ==
          doctest::Approx(2.0 * kNormalQuantile975 * est.std_error).epsilon(1e-12));
  }
}

TEST_CASE("numeric failures inside sampling propagate with step context") {
  FilteringModel model = make_unit_model();
  model.mu = [](const Vector& x) {
    return Vector(Vector::Constant(x.size(), std::numeric_limits<double>::infinity()));
  };
  const auto obs = make_observation_1d(TimeGrid{0.5, 3}, {0.0, 0.1, 0.2, 0.3});
  Vector x(1);
  x << 0.0;
  EstimatorConfig config;
  config.samples = 16;
  config.seed = 1;
  CHECK_THROWS_AS((void)estimate_point(model, obs, x, config), SimulationError);
}

TEST_CASE("estimator validation") {
  ExampleModelParams params;
  const FilteringModel model = build_example_model(params);
  const auto obs = simulate_signal_observation(model, TimeGrid{0.5, 5}, params.alpha,
                                               philox_stream_factory(18));
  Vector x(1);
  x << 0.0;

  EstimatorConfig config;
  config.samples = 1;  // needs >= 2 for the sample variance
  CHECK_THROWS_AS((void)estimate_point(model, obs, x, config), std::invalid_argument);

  config.samples = 10;
  config.chunk_size = 0;
  CHECK_THROWS_AS((void)estimate_point(model, obs, x, config), std::invalid_argument);

  config.chunk_size = 8192;
  config.workers = 0;
  CHECK_THROWS_AS((void)estimate_point(model, obs, x, config), std::invalid_argument);

  config.workers = 1;
  CHECK_THROWS_AS((void)estimate_grid(model, obs, {}, config), std::invalid_argument);

  Vector wrong(2);
  wrong << 0.0, 0.0;
  CHECK_THROWS_AS((void)estimate_grid(model, obs, {wrong}, config), std::invalid_argument);
}

TEST_CASE("scaled-down density curve workflow has a single mode near the signal") {
  ExampleModelParams params;  // paper parameters
  const FilteringModel model = build_example_model(params);
  const TimeGrid grid{0.5, 20};
  const auto obs = simulate_signal_observation(model, grid, params.alpha,
                                               philox_stream_factory(101));
  const double y_final = obs.signal(grid.steps, 0);

  const int n_points = 128;
  std::vector<Vector> points;
  for (int j = 0; j < n_points; ++j) {
    Vector x(1);
    x << y_final - 5.0 + 10.0 * j / (n_points - 1);
    points.push_back(x);
  }
  EstimatorConfig config;
  config.samples = 10'240;
  config.seed = 55;
  config.workers = 4;
  const auto estimates = estimate_grid(model, obs, points, config);

  int argmax = 0;
  for (int j = 0; j < n_points; ++j) {
    CHECK(estimates[j].value >= 0.0);
    if (estimates[j].value > estimates[argmax].value) argmax = j;
  }
  // Single dominant mode close to the signal location, decaying at the edges.
  CHECK(std::abs(points[argmax](0) - y_final) <= 2.0);
  CHECK(estimates.front().value <= 0.1 * estimates[argmax].value);
  CHECK(estimates.back().value <= 0.1 * estimates[argmax].value);
}

TEST_SUITE_END();
