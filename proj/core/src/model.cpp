#include "zakai/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace zakai {

namespace {

void check_point_dims(const FilteringModel& model, const Vector& z, const Vector& x,
                      const char* where) {
  if (x.size() != model.d) {
    throw std::invalid_argument(std::string(where) + ": x has dimension " +
                                std::to_string(x.size()) + ", model expects d = " +
                                std::to_string(model.d));
  }
  if (z.size() != model.k) {
    throw std::invalid_argument(std::string(where) + ": z has dimension " +
                                std::to_string(z.size()) + ", model expects k = " +
                                std::to_string(model.k));
  }
}

}  // namespace

FilteringModel build_example_model(const ExampleModelParams& params) {
  if (params.d < 1) {
    throw std::invalid_argument("build_example_model: d must be >= 1, got " +
                                std::to_string(params.d));
  }
  if (!(params.alpha > 0.0)) {
    throw std::invalid_argument("build_example_model: alpha must be > 0, got " +
                                std::to_string(params.alpha));
  }

  const int d = params.d;
  const double alpha = params.alpha;
  const double beta = params.beta;
  const double gamma = params.gamma;

  FilteringModel model;
  model.d = d;
  model.k = d;
  model.sigma = Matrix::Constant(d, d, 1.0 / std::sqrt(static_cast<double>(d)));

  model.mu = [beta](const Vector& x) -> Vector {
    return (beta / (1.0 + x.squaredNorm())) * x;
  };
  // div(beta x / (1+|x|^2)) = beta (d / (1+s) - 2 s / (1+s)^2), s = |x|^2.
  model.div_mu = [beta, d](const Vector& x) -> double {
    const double s = x.squaredNorm();
    const double q = 1.0 + s;
    return beta * (static_cast<double>(d) / q - 2.0 * s / (q * q));
  };
  model.h = [gamma](const Vector& x) -> Vector { return gamma * x; };
  model.dh = [gamma, d](const Vector&) -> Matrix {
    return gamma * Matrix::Identity(d, d);
  };
  model.dh_t_z = [gamma](const Vector&, const Vector& z) -> Vector { return gamma * z; };
  model.trace_hess_h = [](const Vector&, const Vector&) -> double { return 0.0; };

  // phi(x) = (alpha / 2 pi)^{d/2} exp(-alpha |x|^2 / 2), kept in log form.
  const double log_norm = 0.5 * d * std::log(alpha / (2.0 * std::numbers::pi));
  model.log_phi = [log_norm, alpha](const Vector& x) -> double {
    return log_norm - 0.5 * alpha * x.squaredNorm();
  };

  return model;
}

Vector auxiliary_drift(const FilteringModel& model, const Vector& z, const Vector& x) {
  check_point_dims(model, z, x, "auxiliary_drift");
  // Bracketing sigma * (sigma^T * w) is deliberate: the estimator's inner loop
  // evaluates the same expression, and the two must agree bitwise.
  const Vector w = model.apply_dh_t(x, z);
  return model.sigma * (model.sigma.transpose() * w) - model.mu(x);
}

double potential(const FilteringModel& model, const Vector& z, const Vector& x) {
  check_point_dims(model, z, x, "potential");
  const Vector w = model.apply_dh_t(x, z);
  const Vector sw = model.sigma.transpose() * w;
  const Vector hx = model.h(x);
  const Vector mux = model.mu(x);
  return 0.5 * sw.squaredNorm() - 0.5 * hx.squaredNorm() + 0.5 * model.trace_hess_h(x, z) -
         mux.dot(w) - model.div_mu(x);
}

double example_potential(const ExampleModelParams& params, const Matrix& sigma, const Vector& z,
                         const Vector& x) {
  const int d = params.d;
  if (x.size() != d || z.size() != d) {
    throw std::invalid_argument("example_potential: x and z must have dimension d = " +
                                std::to_string(d));
  }
  if (sigma.rows() != d || sigma.cols() != d) {
    throw std::invalid_argument("example_potential: sigma must be d x d");
  }
  const double s = x.squaredNorm();
  const double q = 1.0 + s;
  const Vector stz = sigma.transpose() * z;
  return 0.5 * params.gamma * params.gamma * (stz + x).dot(stz - x) -
         params.beta * params.gamma * x.dot(z) / q - d * params.beta / q +
         2.0 * params.beta * s / (q * q);
}

ModelConsistencyReport check_model_consistency(const FilteringModel& model, const Vector& x,
                                               double step, double tolerance) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("check_model_consistency: step must be > 0");
  }
  if (x.size() != model.d) {
    throw std::invalid_argument("check_model_consistency: x has wrong dimension");
  }

  ModelConsistencyReport report;
  report.tolerance = tolerance;

  const Matrix jac = model.dh(x);
  if (jac.rows() != model.k || jac.cols() != model.d) {
    throw std::invalid_argument("check_model_consistency: dh(x) is not k x d");
  }

  double div_fd = 0.0;
  Vector xp = x;
  Vector xm = x;
  for (int j = 0; j < model.d; ++j) {
    xp(j) = x(j) + step;
    xm(j) = x(j) - step;
    const Vector dh_col = (model.h(xp) - model.h(xm)) / (2.0 * step);
    report.max_jacobian_deviation =
        std::max(report.max_jacobian_deviation, (dh_col - jac.col(j)).cwiseAbs().maxCoeff());
    div_fd += (model.mu(xp)(j) - model.mu(xm)(j)) / (2.0 * step);
    xp(j) = x(j);
    xm(j) = x(j);
  }
  report.max_divergence_deviation = std::abs(div_fd - model.div_mu(x));
  return report;
}

}  // namespace zakai
