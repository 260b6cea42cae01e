#pragma once

#include "ordprob/rng.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ordprob {

enum class FamilyKind { Kumaraswamy, Exponential, Weibull };

// F(s) = 1 - exp(-theta * T(s; sigma)). T is increasing, T -> 0 at the lower
// end of the support, and T(X) ~ Exponential(rate theta).
//   Kumaraswamy: T = -ln(1 - s^sigma), support (0, 1)
//   Exponential: T = s,                support (0, inf), sigma ignored
//   Weibull:     T = s^sigma,          support (0, inf), theta = scale^-sigma
struct TransformFamily {
    FamilyKind kind = FamilyKind::Kumaraswamy;
    double sigma = 1.0;

    double transform(double s) const;
    double inverse_transform(double t) const;
    bool in_support(double s) const;
    void validate() const;
};

TransformFamily parse_family(const std::string& name, double sigma);
std::string family_name(FamilyKind kind);

struct ParamTriple {
    double theta1 = 1.0;
    double theta2 = 1.0;
    double theta3 = 1.0;

    void validate() const;
};

struct SampleSet {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> z;
};

struct SufficientStats {
    double u = 0.0;
    double v = 0.0;
    double w = 0.0;
    int n1 = 0;
    int n2 = 0;
    int n3 = 0;
};

double cdf(const TransformFamily& family, double theta, double s);

// Inverse-CDF draws: s = T^-1(-ln(1 - U) / theta).
std::vector<double> sample(const TransformFamily& family, double theta, std::size_t n, Rng& rng);

SufficientStats suff_stats(const SampleSet& samples, const TransformFamily& family);

// P(X < Y < Z) = theta1 theta2 / ((theta2 + theta3)(theta1 + theta2 + theta3)).
double reliability_p(const ParamTriple& theta);

// P(X_1 < ... < X_n) = prod_{i<n} theta_i / (theta_i + ... + theta_n).
double reliability_pn(std::span<const double> theta);

} // namespace ordprob
