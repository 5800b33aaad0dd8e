#pragma once

#include <functional>

#include "sing/matrix.hpp"

namespace sing {

// Central-difference gradient, componentwise (f(x+h e_i) - f(x-h e_i)) / (2h).
// Serves as the independent oracle for analytic gradients throughout the tests.
Vector finite_difference_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                                  double h);

}  // namespace sing
