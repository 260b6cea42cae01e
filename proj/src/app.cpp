#include "ordprob/app.hpp"

#include "ordprob/errors.hpp"
#include "ordprob/umvue.hpp"

#include "json.hpp"

#include <boost/version.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

namespace ordprob::app {

namespace {

// Per-dataset profile pieces at a given shape. Data are divided by their
// maximum first; the score does not depend on the unit of measurement.
struct Profile {
    double score = 0.0; // d loglik / d shape with the scale profiled out
    double slope = 0.0; // d score / d shape
};

struct Prepared {
    std::vector<double> log_y; // ln(x / max x)
    double log_max = 0.0;
    double sum_log_x = 0.0;
    double n = 0.0;
};

Prepared prepare(const std::vector<double>& data) {
    if (data.size() < 2) throw DomainError("Weibull fit needs at least two observations");
    Prepared p;
    double mx = 0.0;
    for (double x : data) {
        if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("Weibull data must be positive and finite");
        mx = std::max(mx, x);
    }
    p.log_max = std::log(mx);
    p.n = static_cast<double>(data.size());
    bool spread = false;
    for (double x : data) {
        p.log_y.push_back(std::log(x) - p.log_max);
        p.sum_log_x += std::log(x);
        spread = spread || x != data.front();
    }
    if (!spread) throw NonConvergence("Weibull likelihood is degenerate: all observations are equal");
    return p;
}

// Sums of y^b, y^b ln y, y^b ln^2 y.
std::array<double, 3> power_sums(const Prepared& p, double b) {
    std::array<double, 3> s{};
    for (double ly : p.log_y) {
        const double e = std::exp(b * ly);
        s[0] += e;
        s[1] += e * ly;
        s[2] += e * ly * ly;
    }
    return s;
}

Profile profile(const Prepared& p, double b) {
    const auto s = power_sums(p, b);
    const double m1 = s[1] / s[0];
    const double m2 = s[2] / s[0];
    Profile r;
    // Sum ln x - n * (S1/S0 + ln max) with S computed on the scaled data.
    r.score = p.n / b + p.sum_log_x - p.n * (m1 + p.log_max);
    r.slope = -p.n / (b * b) - p.n * (m2 - m1 * m1);
    return r;
}

double profile_scale(const Prepared& p, double b) {
    const auto s = power_sums(p, b);
    return std::exp(p.log_max + std::log(s[0] / p.n) / b);
}

// Root of the summed profile score, which falls from +inf to a negative
// limit; Newton steps are accepted only while they stay in the bracket.
double solve_shape(const std::vector<Prepared>& sets, const WeibullFitOptions& opt) {
    auto eval = [&](double b) {
        Profile t;
        for (const auto& p : sets) {
            const Profile q = profile(p, b);
            t.score += q.score;
            t.slope += q.slope;
        }
        return t;
    };
    double total_n = 0.0;
    for (const auto& p : sets) total_n += p.n;

    double lo = 1.0, hi = 1.0;
    while (eval(lo).score < 0.0) {
        lo *= 0.5;
        if (lo < 1e-8) throw NonConvergence("Weibull shape score has no root above 1e-8");
    }
    while (eval(hi).score > 0.0) {
        hi *= 2.0;
        if (hi > 1e8) throw NonConvergence("Weibull shape score has no root below 1e8");
    }
    double b = 0.5 * (lo + hi);
    for (int it = 0; it < opt.max_iter; ++it) {
        const Profile f = eval(b);
        if (std::abs(f.score) <= opt.score_tol * total_n) return b;
        if (f.score > 0.0) lo = b;
        else hi = b;
        double next = b - f.score / f.slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == b || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * b) return next;
        b = next;
    }
    throw NonConvergence("Weibull shape Newton iteration hit max_iter");
}

} // namespace

double weibull_log_likelihood(const std::vector<double>& data, double shape, double scale) {
    if (!(shape > 0.0 && scale > 0.0)) throw DomainError("Weibull shape and scale must be positive");
    double ll = 0.0;
    for (double x : data) {
        const double z = x / scale;
        ll += std::log(shape / scale) + (shape - 1.0) * std::log(z) - std::pow(z, shape);
    }
    return ll;
}

std::array<double, 2> weibull_standard_errors(const std::vector<double>& data, double shape, double scale) {
    if (!(shape > 0.0 && scale > 0.0)) throw DomainError("Weibull shape and scale must be positive");
    const double n = static_cast<double>(data.size());
    const double k = shape, lam = scale;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0; // sums of z^k, z^k ln z, z^k ln^2 z
    for (double x : data) {
        const double lz = std::log(x / lam);
        const double zk = std::exp(k * lz);
        s0 += zk;
        s1 += zk * lz;
        s2 += zk * lz * lz;
    }
    // Observed information, i.e. minus the log-likelihood Hessian.
    const double ikk = n / (k * k) + s2;
    const double ill = -n * k / (lam * lam) + k * (k + 1.0) / (lam * lam) * s0;
    const double ikl = n / lam - (s0 + k * s1) / lam;
    const double det = ikk * ill - ikl * ikl;
    if (!(det > 0.0)) throw NonConvergence("Weibull observed information is not positive definite");
    return {std::sqrt(ill / det), std::sqrt(ikk / det)};
}

double weibull_cdf(double x, double shape, double scale) {
    if (!(shape > 0.0 && scale > 0.0)) throw DomainError("Weibull shape and scale must be positive");
    if (x <= 0.0) return 0.0;
    return -std::expm1(-std::pow(x / scale, shape));
}

WeibullFit weibull_fit(const std::vector<double>& data, std::optional<double> common_shape,
                       const WeibullFitOptions& opt) {
    const Prepared p = prepare(data);
    WeibullFit f;
    if (common_shape) {
        if (!(*common_shape > 0.0)) throw DomainError("common shape must be positive");
        f.shape = *common_shape;
    } else {
        f.shape = solve_shape({p}, opt);
    }
    f.scale = profile_scale(p, f.shape);
    f.log_likelihood = weibull_log_likelihood(data, f.shape, f.scale);
    return f;
}

double kolmogorov_survival(double lambda) {
    // Below 0.1 the complement is under 1e-50 and the series is slow.
    if (lambda < 0.1) return 1.0;
    double s = 0.0;
    for (int k = 100; k >= 1; --k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1) ? term : -term;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> data, const std::function<double(double)>& cdf) {
    if (data.empty()) throw DomainError("ks_test needs at least one observation");
    std::sort(data.begin(), data.end());
    const double n = static_cast<double>(data.size());
    double d = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double f = cdf(data[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return {d, kolmogorov_survival(std::sqrt(n) * d)};
}

namespace {

DatasetFit describe(const std::vector<double>& data, const std::string& label, const WeibullFit& f) {
    DatasetFit d;
    d.label = label;
    d.shape = f.shape;
    d.scale = f.scale;
    d.log_likelihood = f.log_likelihood;
    const KsResult ks = ks_test(data, [&](double x) { return weibull_cdf(x, f.shape, f.scale); });
    d.ks_statistic = ks.statistic;
    d.ks_p_value = ks.p_value;
    return d;
}

} // namespace

FitReport weibull_common_shape_fit(const std::array<std::vector<double>, 3>& datasets,
                                   const std::array<std::string, 3>& labels, const WeibullFitOptions& opt) {
    std::vector<Prepared> sets;
    for (const auto& d : datasets) sets.push_back(prepare(d));
    FitReport r;
    r.common_shape = solve_shape(sets, opt);
    for (std::size_t i = 0; i < 3; ++i) {
        const WeibullFit f = weibull_fit(datasets[i], r.common_shape, opt);
        r.datasets.push_back(describe(datasets[i], labels[i], f));
        r.pooled_log_likelihood += f.log_likelihood;
    }
    return r;
}

FitReport weibull_separate_fits(const std::array<std::vector<double>, 3>& datasets,
                                const std::array<std::string, 3>& labels, const WeibullFitOptions& opt) {
    FitReport r;
    for (std::size_t i = 0; i < 3; ++i) {
        const WeibullFit f = weibull_fit(datasets[i], std::nullopt, opt);
        DatasetFit d = describe(datasets[i], labels[i], f);
        const auto se = weibull_standard_errors(datasets[i], f.shape, f.scale);
        d.shape_se = se[0];
        d.scale_se = se[1];
        r.datasets.push_back(d);
        r.pooled_log_likelihood += f.log_likelihood;
    }
    return r;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

} // namespace

SampleSet read_samples_csv(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw DomainError(source + ": empty input");
    const auto header = split_commas(line);
    std::array<int, 3> col{-1, -1, -1};
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string& h = header[i];
        const int k = h == "x" ? 0 : h == "y" ? 1 : h == "z" ? 2 : -1;
        if (k < 0 || col[k] >= 0)
            throw DomainError(source + ":" + std::to_string(lineno) + ": header must name x, y, z once each, got '" +
                              h + "'");
        col[k] = static_cast<int>(i);
    }
    if (col[0] < 0 || col[1] < 0 || col[2] < 0) throw DomainError(source + ": header must contain x, y and z");

    SampleSet s;
    std::vector<double>* dst[3] = {&s.x, &s.y, &s.z};
    std::array<bool, 3> ended{false, false, false};
    const char* names = "xyz";
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = split_commas(line);
        if (cells.size() > header.size())
            throw DomainError(source + ":" + std::to_string(lineno) + ": more cells than header columns");
        for (int k = 0; k < 3; ++k) {
            const std::string cell = static_cast<std::size_t>(col[k]) < cells.size() ? cells[col[k]] : "";
            const std::string where = source + ":" + std::to_string(lineno) + " column " + names[k];
            if (cell.empty()) {
                ended[k] = true;
                continue;
            }
            if (ended[k]) throw DomainError(where + ": value after a blank cell");
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != cell.size() || !std::isfinite(v))
                throw DomainError(where + ": '" + cell + "' is not a finite number");
            dst[k]->push_back(v);
        }
    }
    for (int k = 0; k < 3; ++k)
        if (dst[k]->empty()) throw DomainError(source + ": column " + names[k] + " has no values");
    return s;
}

SampleSet read_samples_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DomainError("cannot open '" + path + "'");
    return read_samples_csv(f, path);
}

SampleSet fatigue_data() {
    SampleSet s;
    s.x = {12.663, 15.205, 19.303, 20.159, 26.231, 28.558, 35.701, 43.719, 48.246, 58.992, 78.961, 96.224};
    s.y = {25.283, 25.292, 39.727, 44.373, 100.913, 72.084, 102.958, 74.943, 76.851, 144.801, 172.042};
    s.z = {84.527, 93.788, 156.266, 352.235, 666.989, 91.578, 112.553,
           179.863, 136.497, 36.907, 94.745, 48.665, 44.062};
    return s;
}

EstimateReport estimate(const SampleSet& samples, const EstimateConfig& cfg) {
    cfg.prior.validate();
    cfg.chain.validate();
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw DomainError("gamma must lie in (0, 1)");
    EstimateReport r;
    r.family = cfg.family;
    r.prior = cfg.prior;
    r.gamma = cfg.gamma;
    r.chain = cfg.chain;
    if (cfg.family.kind == FamilyKind::Weibull && cfg.fit_shape) {
        r.fit = weibull_common_shape_fit({samples.x, samples.y, samples.z});
        r.family.sigma = r.fit->common_shape;
    } else if (cfg.family.kind == FamilyKind::Kumaraswamy && cfg.fit_shape) {
        r.family.sigma = mle_sigma(samples, cfg.family.sigma);
    }
    r.stats = suff_stats(samples, r.family);
    const SufficientStats& st = r.stats;
    r.mle = mle_p(st, r.family.sigma);
    r.umvue = umvue_p({st.n1, st.n2, st.n3, st.u, st.v, st.w});
    const PosteriorSummary post = posterior_params(st, cfg.prior);
    r.bayes = bayes_p_closed(post);
    r.jeffreys_bayes = bayes_p_closed(posterior_params(st, PriorSpec::jeffreys()));
    r.lindley = lindley_p(r.mle.theta_hat, st.n1, st.n2, st.n3, cfg.prior);
    const auto draws = gibbs_chain(post, cfg.chain);
    double m = 0.0;
    for (double d : draws) m += d;
    r.mcmc = m / static_cast<double>(draws.size());
    r.ac = asymptotic_ci(st, cfg.gamma);
    r.hpd = hpd_interval(draws, cfg.gamma);
    return r;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    std::string hex;
    char buf[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunManifest make_manifest(const std::string& command, const std::string& config_json, std::uint64_t seed) {
    RunManifest m;
    m.command = command;
    m.config_json = config_json;
    m.config_digest = sha256_hex(config_json);
    m.seed = seed;
    m.library_version = kVersion;
#if defined(__clang__)
    m.compiler = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
    m.compiler = std::string("gcc ") + __VERSION__;
#else
    m.compiler = "unknown";
#endif
    m.boost_version = std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) +
                      "." + std::to_string(BOOST_VERSION % 100);
    m.started_utc = utc_now();
    return m;
}

std::string manifest_json(const RunManifest& m) {
    nlohmann::json j = {{"command", m.command},
                        {"config_digest", m.config_digest},
                        {"config", nlohmann::json::parse(m.config_json)},
                        {"seed", m.seed},
                        {"versions", {{"ordprob", m.library_version}, {"compiler", m.compiler}, {"boost", m.boost_version}}},
                        {"started_utc", m.started_utc},
                        {"finished_utc", m.finished_utc}};
    return j.dump(2);
}

} // namespace ordprob::app
