#pragma once

#include <Eigen/Dense>

#include <functional>
#include <numbers>

namespace zakai {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Paths are stored row-per-time-step; row-major keeps each step contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Coefficients of one nonlinear filtering problem:
//
//   signal        dY_t = mu(Y_t) dt + sigma dW_t,            Y_0 ~ initial density phi
//   observation   dZ_t = h(Y_t) dt + dV_t,                   Z_0 = 0
//
// All callables must be pure and thread-safe: a model instance is shared
// across worker threads without synchronization. Smoothness/boundedness of
// mu, h and integrability of phi are the caller's contract;
// check_model_consistency verifies the supplied first-order derivatives only.
struct FilteringModel {
  int d = 0;  // signal dimension
  int k = 0;  // observation dimension

  Matrix sigma;  // d x d diffusion coefficient (constant in space)

  std::function<Vector(const Vector&)> mu;      // drift, R^d -> R^d
  std::function<double(const Vector&)> div_mu;  // divergence of mu
  std::function<Vector(const Vector&)> h;       // sensor function, R^d -> R^k
  std::function<Matrix(const Vector&)> dh;      // Jacobian of h, k x d

  // Trace(sigma sigma^T Hess_x <h(x), z>); identically zero when h is linear.
  std::function<double(const Vector&, const Vector&)> trace_hess_h;

  // Log of the initial density; return -infinity where phi vanishes.
  std::function<double(const Vector&)> log_phi;

  // Optional fast path for Dh(x)^T z. When unset, the Jacobian is formed and
  // multiplied; setting it avoids materializing a k x d matrix per call on
  // hot paths (for h = gamma * x it is just gamma * z).
  std::function<Vector(const Vector&, const Vector&)> dh_t_z;

  Matrix sigma_sigma_t() const { return sigma * sigma.transpose(); }

  Vector apply_dh_t(const Vector& x, const Vector& z) const {
    if (dh_t_z) return dh_t_z(x, z);
    return dh(x).transpose() * z;
  }
};

// Benchmark model family: k = d, sigma_ij = d^{-1/2} (so sigma sigma^T is the
// all-ones matrix), mu(x) = beta * x / (1 + |x|^2), h(x) = gamma * x, and a
// centered Gaussian initial density with precision alpha.
struct ExampleModelParams {
  int d = 1;
  double alpha = 2.0 * std::numbers::pi;  // initial-density precision, > 0
  double beta = 0.25;                     // drift strength
  double gamma = 1.0;                     // sensor gain
};

FilteringModel build_example_model(const ExampleModelParams& params);

// Drift of the auxiliary process driven by a frozen observation value z:
//   sigma sigma^T Dh(x)^T z - mu(x).
Vector auxiliary_drift(const FilteringModel& model, const Vector& z, const Vector& x);

// Zeroth-order coefficient ("potential") of the companion linear PDE at
// frozen observation value z:
//   1/2 |sigma^T Dh(x)^T z|^2 - 1/2 |h(x)|^2
//   + 1/2 Tr(sigma sigma^T Hess_x <h(x), z>)
//   - <mu(x), Dh(x)^T z> - div mu(x).
double potential(const FilteringModel& model, const Vector& z, const Vector& x);

// Closed-form potential for the example family, algebraically simplified:
//   gamma^2/2 <sigma^T z + x, sigma^T z - x>
//   - beta gamma <x, z> / (1 + |x|^2)
//   - d beta / (1 + |x|^2) + 2 beta |x|^2 / (1 + |x|^2)^2.
// Agreement with potential() over the example model is a correctness gate for
// both implementations.
double example_potential(const ExampleModelParams& params, const Matrix& sigma, const Vector& z,
                         const Vector& x);

struct ModelConsistencyReport {
  double max_jacobian_deviation = 0.0;    // max |dh entry - central difference|
  double max_divergence_deviation = 0.0;  // |div_mu - central-difference divergence|
  double tolerance = 0.0;

  bool ok() const {
    return max_jacobian_deviation <= tolerance && max_divergence_deviation <= tolerance;
  }
};

// Central-difference check that the supplied dh and div_mu match the supplied
// h and mu at the point x. `step` is the finite-difference step.
ModelConsistencyReport check_model_consistency(const FilteringModel& model, const Vector& x,
                                               double step, double tolerance);

}  // namespace zakai
