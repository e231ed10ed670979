#include "zakai/conjugation.hpp"

#include <cmath>
#include <stdexcept>

namespace zakai {

namespace {

Vector fd_gradient(const ScalarField& f, const Vector& x, double step) {
  const int d = static_cast<int>(x.size());
  Vector grad(d);
  Vector xp = x;
  Vector xm = x;
  for (int i = 0; i < d; ++i) {
    xp(i) = x(i) + step;
    xm(i) = x(i) - step;
    grad(i) = (f(xp) - f(xm)) / (2.0 * step);
    xp(i) = x(i);
    xm(i) = x(i);
  }
  return grad;
}

Matrix fd_hessian(const ScalarField& f, const Vector& x, double step) {
  const int d = static_cast<int>(x.size());
  Matrix hess(d, d);
  const double f0 = f(x);
  Vector y = x;
  for (int i = 0; i < d; ++i) {
    y(i) = x(i) + step;
    const double fp = f(y);
    y(i) = x(i) - step;
    const double fm = f(y);
    y(i) = x(i);
    hess(i, i) = (fp - 2.0 * f0 + fm) / (step * step);
    for (int j = i + 1; j < d; ++j) {
      y(i) = x(i) + step;
      y(j) = x(j) + step;
      const double fpp = f(y);
      y(j) = x(j) - step;
      const double fpm = f(y);
      y(i) = x(i) - step;
      const double fmm = f(y);
      y(j) = x(j) + step;
      const double fmp = f(y);
      y(i) = x(i);
      y(j) = x(j);
      hess(i, j) = (fpp - fpm - fmp + fmm) / (4.0 * step * step);
      hess(j, i) = hess(i, j);
    }
  }
  return hess;
}

}  // namespace

double check_conjugation_identity(const FilteringModel& model, const ScalarField& f,
                                  const ScalarField& g, const Vector& x, double fd_step) {
  if (!(fd_step > 0.0)) {
    throw std::invalid_argument("check_conjugation_identity: fd_step must be > 0");
  }
  if (x.size() != model.d) {
    throw std::invalid_argument("check_conjugation_identity: x has wrong dimension");
  }

  const Matrix a = model.sigma_sigma_t();
  const Vector mu_x = model.mu(x);

  const auto generator = [&](const ScalarField& fn) {
    const Matrix hess = fd_hessian(fn, x, fd_step);
    const Vector grad = fd_gradient(fn, x, fd_step);
    return 0.5 * a.cwiseProduct(hess).sum() - mu_x.dot(grad);
  };

  const ScalarField conjugated = [&](const Vector& y) { return std::exp(f(y)) * g(y); };
  const double lhs = std::exp(-f(x)) * generator(conjugated);

  const Vector grad_f = fd_gradient(f, x, fd_step);
  const Vector grad_g = fd_gradient(g, x, fd_step);
  const Vector a_grad_f = a * grad_f;
  const double rhs = generator(g) + a_grad_f.dot(grad_g) +
                     (0.5 * a_grad_f.dot(grad_f) + generator(f)) * g(x);

  return std::abs(lhs - rhs);
}

}  // namespace zakai
