#pragma once

#include "ordprob/bayes.hpp"
#include "ordprob/classical.hpp"
#include "ordprob/model.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ordprob::app {

struct WeibullFit {
    double shape = 0.0;
    double scale = 0.0;
    double log_likelihood = 0.0;
};

struct WeibullFitOptions {
    double score_tol = 1e-12; // relative to n
    int max_iter = 200;
};

// Profile-likelihood MLE. The scale is profiled out analytically,
// scale^shape = mean(x^shape); Newton runs on the shape score inside a
// shrinking bracket. With common_shape given only the scale is fitted.
WeibullFit weibull_fit(const std::vector<double>& data, std::optional<double> common_shape = std::nullopt,
                       const WeibullFitOptions& opt = {});

double weibull_log_likelihood(const std::vector<double>& data, double shape, double scale);

// Standard errors of (shape, scale) from the inverse observed information
// of a free two-parameter fit at (shape, scale).
std::array<double, 2> weibull_standard_errors(const std::vector<double>& data, double shape, double scale);
double weibull_cdf(double x, double shape, double scale);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// One-sample two-sided statistic; p from the limiting Kolmogorov law at
// sqrt(n) * t, series truncated at 100 terms.
KsResult ks_test(std::vector<double> data, const std::function<double(double)>& cdf);
double kolmogorov_survival(double lambda);

struct DatasetFit {
    std::string label;
    double shape = 0.0;
    double scale = 0.0;
    double log_likelihood = 0.0;
    double ks_statistic = 0.0;
    double ks_p_value = 1.0;
    // Filled for separate fits only; the common-shape fit has no per-dataset
    // shape error.
    std::optional<double> shape_se;
    std::optional<double> scale_se;
};

struct FitReport {
    std::vector<DatasetFit> datasets;
    double common_shape = 0.0;
    double pooled_log_likelihood = 0.0;
};

// One shape, three scales. K-S columns are against the fitted CDFs.
FitReport weibull_common_shape_fit(const std::array<std::vector<double>, 3>& datasets,
                                   const std::array<std::string, 3>& labels = {"x", "y", "z"},
                                   const WeibullFitOptions& opt = {});
// Separate fits per dataset, same report shape (common_shape left at 0).
FitReport weibull_separate_fits(const std::array<std::vector<double>, 3>& datasets,
                                const std::array<std::string, 3>& labels = {"x", "y", "z"},
                                const WeibullFitOptions& opt = {});

// Header row x,y,z (any order, extra columns rejected); blank cells allow
// ragged columns. Errors name the file, line and column.
SampleSet read_samples_csv(std::istream& in, const std::string& source = "<input>");
SampleSet read_samples_csv_file(const std::string& path);

// Fatigue cycles-to-failure (thousands): as-welded, burr-ground, TIG-dressed.
SampleSet fatigue_data();

struct EstimateConfig {
    TransformFamily family = parse_family("weibull", 1.0);
    // Weibull: fit the common shape first. Kumaraswamy: fit sigma by profile
    // likelihood, starting from family.sigma. Ignored for exponential.
    bool fit_shape = true;
    PriorSpec prior = PriorSpec::jeffreys();
    double gamma = 0.05;
    ChainConfig chain{};
};

struct EstimateReport {
    TransformFamily family;
    std::optional<FitReport> fit;
    SufficientStats stats;
    MleResult mle;
    double umvue = 0.0;
    double bayes = 0.0;          // closed form under the configured prior
    double jeffreys_bayes = 0.0; // closed form under the Jeffreys prior
    double lindley = 0.0;
    double mcmc = 0.0;
    AsymptoticCI ac;
    std::pair<double, double> hpd{0.0, 0.0};
    PriorSpec prior;
    double gamma = 0.05;
    ChainConfig chain;
};

EstimateReport estimate(const SampleSet& samples, const EstimateConfig& cfg);

struct RunManifest {
    std::string command;
    std::string config_digest; // SHA-256 of the canonical config JSON
    std::string config_json;
    std::uint64_t seed = 0;
    std::string library_version;
    std::string compiler;
    std::string boost_version;
    std::string started_utc;
    std::string finished_utc;
};

std::string sha256_hex(const std::string& bytes);
std::string utc_now();
RunManifest make_manifest(const std::string& command, const std::string& config_json, std::uint64_t seed);
std::string manifest_json(const RunManifest& m);

inline constexpr const char* kVersion = "1.0.0";

} // namespace ordprob::app
