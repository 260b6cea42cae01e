#pragma once

#include "ordprob/model.hpp"

#include <Eigen/Core>

#include <array>

namespace ordprob {

struct MleResult {
    ParamTriple theta_hat;
    double p_hat = 0.0;
    double sigma_used = 1.0;
};

struct AsymptoticCI {
    double lower = 0.0;
    double upper = 1.0;
    double gamma = 0.05;
    double sigma_p_hat = 0.0;
    bool clamped = false; // an endpoint was moved onto 0 or 1
};

// theta_i = n_i / (sum of transforms of sample i).
ParamTriple mle_theta(const SufficientStats& stats);
MleResult mle_p(const SufficientStats& stats, double sigma_used = 1.0);

// Analytic first and second derivatives of P(theta), written through
// log P = ln t1 + ln t2 - ln(t2 + t3) - ln(t1 + t2 + t3).
std::array<double, 3> grad_p(const ParamTriple& theta);
Eigen::Matrix3d hess_p(const ParamTriple& theta);

// Expected information of the three independent exponential samples.
Eigen::Matrix3d fisher_information(const ParamTriple& theta, int n1, int n2, int n3);

// B^T I^-1 B through the diagonal shortcut sum_i P_i^2 theta_i^2 / n_i.
double delta_variance(const ParamTriple& theta, int n1, int n2, int n3);

// Upper gamma/2 standard-normal quantile.
double normal_upper_quantile(double gamma);

AsymptoticCI asymptotic_ci(const SufficientStats& stats, double gamma);

struct SigmaFitOptions {
    double score_tol = 1e-10;
    int max_iter = 200;
};

// Root of the profile score d l / d sigma for three Kumaraswamy samples
// with unknown common sigma (theta profiled out in closed form).
double mle_sigma(const SampleSet& samples, double init, const SigmaFitOptions& opt = {});

// The profiled score itself; exposed so callers can check the root.
double sigma_score(const SampleSet& samples, double sigma);

} // namespace ordprob
