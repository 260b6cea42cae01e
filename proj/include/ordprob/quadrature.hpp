#pragma once

#include <functional>

namespace ordprob::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
};

// Globally adaptive Gauss-Kronrod (21-point) on [a, b]; either endpoint may be
// infinite. Throws NonConvergence when the error estimate stays above
// max(rel_tol * L1, abs_tol) by more than two orders of magnitude.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol, unsigned max_depth = 18);

// exp(log_scale) * int_0^1 t^(alpha-1) (1-t)^(beta-1) exp(log_g(t, 1-t)) dt.
//
// Split at 1/2. An endpoint with exponent below zero is removed by the
// substitution t = tau^(1/alpha) (resp. 1-t = tau^(1/beta)), which turns
// the algebraic singularity into a constant Jacobian. log_g receives both
// t and 1-t so callers can keep precision near t = 1.
double beta_kernel(double alpha, double beta,
                   const std::function<double(double, double)>& log_g,
                   double log_scale, double rel_tol, double abs_tol);

} // namespace ordprob::quad
