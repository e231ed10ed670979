#pragma once

#include "zakai/model.hpp"

#include <functional>

namespace zakai {

using ScalarField = std::function<double(const Vector&)>;

// Residual of the generator conjugation identity at a point. With
// L g = 1/2 Tr(sigma sigma^T Hess g) - <mu, grad g>, the identity
//
//   e^{-f} L(e^f g) = L g + <sigma sigma^T grad f, grad g>
//                     + (1/2 <sigma sigma^T grad f, grad f> + L f) g
//
// holds for smooth f, g. Both sides are evaluated with central finite
// differences of step `fd_step`; the returned absolute difference is a direct
// check that the potential/auxiliary-drift pair used by the estimator and the
// companion PDE really is the conjugated generator. Smooth, moderately scaled
// f and g should give residuals near the fd_step^2 truncation level.
double check_conjugation_identity(const FilteringModel& model, const ScalarField& f,
                                  const ScalarField& g, const Vector& x, double fd_step);

}  // namespace zakai
