#pragma once

#include "ordprob/bayes.hpp"
#include "ordprob/model.hpp"
#include "ordprob/specfun.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ordprob {

enum class Estimator { Umvue, Mle, Bayes, JeffreysBayes, Lindley, Mcmc };

inline constexpr std::array<Estimator, 6> kAllEstimators = {
    Estimator::Umvue, Estimator::Mle, Estimator::Bayes,
    Estimator::JeffreysBayes, Estimator::Lindley, Estimator::Mcmc};

// Short column tags: umvue, mle, bayes, jb, lindley, mc.
const char* estimator_tag(Estimator e);
Estimator parse_estimator(const std::string& tag);

struct SimCellConfig {
    ParamTriple theta{0.9, 0.09, 0.00005};
    std::array<int, 3> sizes{10, 10, 10};
    int replications = 1000;
    PriorSpec prior = PriorSpec::simulation_default(); // conjugate Bayes and the chain
    PriorSpec lindley_prior = PriorSpec::jeffreys();
    ChainConfig chain{};
    double gamma = 0.05;
    std::uint64_t seed = 1;
    // P depends on the data only through T(X), so the exponential family
    // loses nothing and avoids Kumaraswamy draws rounding to 1 when a rate
    // is tiny.
    TransformFamily family = parse_family("exponential", 1.0);
    std::vector<Estimator> estimators{kAllEstimators.begin(), kAllEstimators.end()};

    void validate() const;
};

struct EstimatorStats {
    Estimator tag = Estimator::Mle;
    int count = 0;     // replications that produced a value
    int failures = 0;  // replications where the estimator threw
    double mean = 0.0;
    double mse = 0.0;
    double bias = 0.0;
    double bias_se = 0.0; // Monte Carlo standard error of bias
    double mse_se = 0.0;  // Monte Carlo standard error of mse
};

struct IntervalStats {
    int count = 0;
    int failures = 0;
    double avg_length = 0.0;
    double coverage = 0.0;
};

struct SimCellResult {
    SimCellConfig config;
    double true_p = 0.0;
    std::vector<EstimatorStats> estimators;
    IntervalStats ac;
    IntervalStats cr;
    int out_of_range_count = 0;  // UMVUE values outside [0, 1]
    int mc_gap_exceed_count = 0; // |MC - Bayes| above 3 chain standard errors
    int sample_failures = 0;     // replications whose data could not be summarized

    const EstimatorStats& stats(Estimator e) const;
};

// Replication r draws from make_stream(cfg.seed, r); results are reduced in
// replication order, so the output does not depend on `workers`.
SimCellResult run_cell(const SimCellConfig& cfg, unsigned workers = 1);

std::vector<SimCellResult> run_grid(const std::vector<SimCellConfig>& configs, unsigned workers = 1);

// One row per cell; see csv_header() for the column list.
std::string csv_header();
void write_csv(std::ostream& os, const std::vector<SimCellResult>& results);
std::string to_json(const std::vector<SimCellResult>& results, const specfun::EvalPolicy& policy = {});

} // namespace ordprob
