#pragma once

#include <cstddef>
#include <vector>

namespace ordprob::specfun {

struct EvalPolicy {
    double rel_tol = 1e-12;
    std::size_t max_terms = 1'000'000;
    double quad_abs_tol = 1e-12;

    void validate() const;
};

// Rising factorial lambda (lambda+1) ... (lambda+k-1).
double pochhammer(double lambda, std::size_t k);

// log|(lambda)_k| with the sign kept separately; sign == 0 marks an exact
// zero (lambda a nonpositive integer with k > -lambda).
struct SignedLog {
    double log_abs = 0.0;
    int sign = 1;
};
SignedLog log_pochhammer(double lambda, std::size_t k);

// True when p is 0, -1, -2, ...
bool is_nonpositive_integer(double p);

// Generalized hypergeometric pFq(a; b; x). Terminating numerator parameters
// are summed exactly; otherwise p <= q + 1 with |x| < 1 when p == q + 1.
double generalized_pfq(const std::vector<double>& a, const std::vector<double>& b, double x,
                       const EvalPolicy& policy = {});

enum class Strategy { Auto, FiniteSeries, EulerIntegral, Series };

// Gauss 2F1(a, b; c; x). Auto: finite sum, then the power series for
// |x| < 3/4, then the Euler integral, then Pfaff's transformation for x < 0.
double gauss_2f1(double a, double b, double c, double x, const EvalPolicy& policy = {},
                 Strategy strategy = Strategy::Auto);

double hyper_3f2(double a1, double a2, double a3, double b1, double b2, double x,
                 const EvalPolicy& policy = {});

struct F1Args {
    double a = 0.0;
    double b = 0.0;
    double b_prime = 0.0;
    double c = 0.0;
    double x = 0.0;
    double y = 0.0;
};

// Appell F1(a; b, b'; c; x, y). Auto tries, in order: the finite double sum
// (b or b' a nonpositive integer), the Euler integral (a > 0, c - a > 0,
// x, y < 1), the double series (|x|, |y| < 1), and finally the
// transformation identities that pull real x, y < 1 into the unit polydisc.
double appell_f1(const F1Args& args, const EvalPolicy& policy = {},
                 Strategy strategy = Strategy::Auto);

struct LauricellaArgs {
    double a = 0.0;
    std::vector<double> b;
    double c = 0.0;
    std::vector<double> x;
};

// Lauricella F_D^(n). Auto: finite multiple sum when every b_i is a
// nonpositive integer, otherwise the single Euler integral.
double lauricella_fd(const LauricellaArgs& args, const EvalPolicy& policy = {},
                     Strategy strategy = Strategy::Auto);

} // namespace ordprob::specfun
