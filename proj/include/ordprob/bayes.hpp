#pragma once

#include "ordprob/model.hpp"
#include "ordprob/rng.hpp"
#include "ordprob/specfun.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace ordprob {

// Independent gamma priors, shape b_i and rate a_i.
struct PriorSpec {
    double a1 = 0.0, a2 = 0.0, a3 = 0.0;
    double b1 = 0.0, b2 = 0.0, b3 = 0.0;

    static PriorSpec jeffreys() { return {}; }
    static PriorSpec simulation_default() { return {1.0, 2.0, 3.0, 1.5, 2.5, 2.0}; }
    bool is_jeffreys() const;
    void validate() const;
};

// Gamma(shape w_i, rate v_i) marginals of the posterior.
struct PosteriorSummary {
    double w1 = 1.0, w2 = 1.0, w3 = 1.0;
    double v1 = 1.0, v2 = 1.0, v3 = 1.0;

    void validate() const;
};

struct KappaPair {
    double kappa1 = 0.0; // 1 - v3 / v2
    double kappa2 = 0.0; // 1 - v1 / v2
};

struct ChainConfig {
    int iterations = 5000;
    int burn_in = 1000;
    int thin = 5;
    std::uint64_t seed = 20240611;

    void validate() const;
};

struct LindleyWorkspace {
    std::array<double, 3> rho{};  // d log prior / d theta_j
    std::array<double, 3> eps2{}; // second log-likelihood derivatives (diagonal)
    std::array<double, 3> eps3{}; // third log-likelihood derivatives (diagonal)
    Eigen::Matrix3d varpi;        // inverse of [-eps_ij]
    std::array<double, 3> p_grad{};
    Eigen::Matrix3d p_hess;
};

PosteriorSummary posterior_params(const SufficientStats& stats, const PriorSpec& prior);

KappaPair kappa_pair(const PosteriorSummary& post);

// Series regions: 1 both |kappa| <= 1; 2 |kappa1| <= 1, kappa2 < -1;
// 3 kappa1 < -1, |kappa2| <= 1; 4 both < -1.
int series_region(const KappaPair& k);

// Posterior mean of P as sum_{m >= 1} K_m F1(...), dispatching on the
// kappa region. Stops once a term is below rel_tol times the running sum
// with m >= 20; at most min(max_terms, 1e5) terms.
double bayes_p_closed(const PosteriorSummary& post, const specfun::EvalPolicy& policy = {});

// Same series with the region forced; shipped_form selects the shipped form
// (true) or the form usually printed for regions 2 and 3 (false), which
// disagrees with the quadrature oracle.
double bayes_p_series(const PosteriorSummary& post, int region, bool shipped_form = true,
                      const specfun::EvalPolicy& policy = {});

// P = phi1 - phi2 with phi1 = E[theta2 / (theta2 + theta3)] (one 2F1)
// and phi2 = E[theta2 / (theta1 + theta2 + theta3)] (one F1).
double bayes_p_decomposed(const PosteriorSummary& post, const specfun::EvalPolicy& policy = {});
double bayes_phi1(const PosteriorSummary& post, const specfun::EvalPolicy& policy = {});
double bayes_phi2(const PosteriorSummary& post, const specfun::EvalPolicy& policy = {});
// phi2 through one named region form (1..4), regardless of the mu region.
double bayes_phi2_region(const PosteriorSummary& post, int region, const specfun::EvalPolicy& policy = {});

// Posterior mean of P by quadrature: the radial variable is integrated
// analytically, leaving a 2-D integral over the simplex
// theta / (theta1 + theta2 + theta3).
double bayes_p_oracle(const PosteriorSummary& post, double quad_tol = 1e-12);

LindleyWorkspace lindley_workspace(const ParamTriple& theta_hat, int n1, int n2, int n3,
                                   const PriorSpec& prior);
double lindley_p(const ParamTriple& theta_hat, int n1, int n2, int n3, const PriorSpec& prior);

// Draws of P from the posterior. The full conditionals are independent
// gammas, so each sweep is an exact independent draw.
std::vector<double> gibbs_chain(const PosteriorSummary& post, const ChainConfig& cfg);
std::vector<double> gibbs_chain(const PosteriorSummary& post, const ChainConfig& cfg, Rng& rng);

// Shortest of the order-statistic intervals (p_(j), p_(j + ceil((1-gamma)T) - 1)),
// j = 1 .. floor(gamma T) + 1; the first shortest wins.
std::pair<double, double> hpd_interval(std::vector<double> draws, double gamma);

} // namespace ordprob
