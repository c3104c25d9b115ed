#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace corelay {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adaptive Gauss-Kronrod integration of f over [a, b] to the given relative
// tolerance. Throws QuadratureError if the error estimate fails to converge.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-8, int max_depth = 18);

}  // namespace corelay
