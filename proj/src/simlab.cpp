#include "ordprob/simlab.hpp"

#include "ordprob/classical.hpp"
#include "ordprob/errors.hpp"
#include "ordprob/umvue.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>

namespace ordprob {

const char* estimator_tag(Estimator e) {
    switch (e) {
    case Estimator::Umvue: return "umvue";
    case Estimator::Mle: return "mle";
    case Estimator::Bayes: return "bayes";
    case Estimator::JeffreysBayes: return "jb";
    case Estimator::Lindley: return "lindley";
    case Estimator::Mcmc: return "mc";
    }
    return "?";
}

Estimator parse_estimator(const std::string& tag) {
    for (Estimator e : kAllEstimators)
        if (tag == estimator_tag(e)) return e;
    throw DomainError("unknown estimator '" + tag + "'");
}

void SimCellConfig::validate() const {
    theta.validate();
    prior.validate();
    lindley_prior.validate();
    chain.validate();
    family.validate();
    if (replications < 1) throw DomainError("replications must be >= 1");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0, 1)");
    for (int n : sizes)
        if (n < 1) throw DomainError("sample sizes must be >= 1");
    if (estimators.empty()) throw DomainError("estimator set is empty");
}

const EstimatorStats& SimCellResult::stats(Estimator e) const {
    for (const auto& s : estimators)
        if (s.tag == e) return s;
    throw DomainError(std::string("estimator '") + estimator_tag(e) + "' was not run");
}

namespace {

constexpr std::size_t kNumEst = kAllEstimators.size();

struct RepOutcome {
    bool sample_ok = true;
    std::array<double, kNumEst> value{};
    std::array<bool, kNumEst> ok{};
    std::array<bool, kNumEst> attempted{};
    bool ac_ok = false, cr_ok = false;
    double ac_len = 0.0, cr_len = 0.0;
    bool ac_cover = false, cr_cover = false;
    bool mc_gap = false;
};

std::size_t slot(Estimator e) { return static_cast<std::size_t>(e); }

bool wants(const SimCellConfig& cfg, Estimator e) {
    return std::find(cfg.estimators.begin(), cfg.estimators.end(), e) != cfg.estimators.end();
}

template <class F>
void attempt(RepOutcome& out, Estimator e, F&& f) {
    out.attempted[slot(e)] = true;
    try {
        out.value[slot(e)] = f();
        out.ok[slot(e)] = std::isfinite(out.value[slot(e)]);
    } catch (const std::exception&) {
        out.ok[slot(e)] = false;
    }
}

RepOutcome run_replication(const SimCellConfig& cfg, double true_p, std::uint64_t rep) {
    RepOutcome out;
    Rng rng = make_stream(cfg.seed, rep);
    SufficientStats st;
    try {
        SampleSet s;
        s.x = sample(cfg.family, cfg.theta.theta1, cfg.sizes[0], rng);
        s.y = sample(cfg.family, cfg.theta.theta2, cfg.sizes[1], rng);
        s.z = sample(cfg.family, cfg.theta.theta3, cfg.sizes[2], rng);
        st = suff_stats(s, cfg.family);
    } catch (const std::exception&) {
        out.sample_ok = false;
        return out;
    }

    if (wants(cfg, Estimator::Umvue))
        attempt(out, Estimator::Umvue, [&] { return umvue_p({st.n1, st.n2, st.n3, st.u, st.v, st.w}); });
    if (wants(cfg, Estimator::Mle)) attempt(out, Estimator::Mle, [&] { return mle_p(st).p_hat; });
    // Posterior means use the phi1 - phi2 split: same value as the m-series to
    // ~1e-10, without one F1 quadrature per series term.
    if (wants(cfg, Estimator::Bayes))
        attempt(out, Estimator::Bayes, [&] { return bayes_p_decomposed(posterior_params(st, cfg.prior)); });
    if (wants(cfg, Estimator::JeffreysBayes))
        attempt(out, Estimator::JeffreysBayes,
                [&] { return bayes_p_decomposed(posterior_params(st, PriorSpec::jeffreys())); });
    if (wants(cfg, Estimator::Lindley))
        attempt(out, Estimator::Lindley,
                [&] { return lindley_p(mle_theta(st), st.n1, st.n2, st.n3, cfg.lindley_prior); });

    try {
        const AsymptoticCI ci = asymptotic_ci(st, cfg.gamma);
        out.ac_len = ci.upper - ci.lower;
        out.ac_cover = ci.lower <= true_p && true_p <= ci.upper;
        out.ac_ok = true;
    } catch (const std::exception&) {
    }

    // One chain serves both the MC point estimate and the HPD interval.
    try {
        const auto draws = gibbs_chain(posterior_params(st, cfg.prior), cfg.chain, rng);
        double m = 0.0;
        for (double d : draws) m += d;
        m /= static_cast<double>(draws.size());
        if (wants(cfg, Estimator::Mcmc)) {
            out.attempted[slot(Estimator::Mcmc)] = true;
            out.value[slot(Estimator::Mcmc)] = m;
            out.ok[slot(Estimator::Mcmc)] = std::isfinite(m);
        }
        if (out.ok[slot(Estimator::Mcmc)] && out.ok[slot(Estimator::Bayes)] && draws.size() > 1) {
            double ss = 0.0;
            for (double d : draws) ss += (d - m) * (d - m);
            const double se = std::sqrt(ss / static_cast<double>(draws.size() - 1) / static_cast<double>(draws.size()));
            out.mc_gap = std::abs(m - out.value[slot(Estimator::Bayes)]) > 3.0 * se;
        }
        const auto hpd = hpd_interval(draws, cfg.gamma);
        out.cr_len = hpd.second - hpd.first;
        out.cr_cover = hpd.first <= true_p && true_p <= hpd.second;
        out.cr_ok = true;
    } catch (const std::exception&) {
        if (wants(cfg, Estimator::Mcmc)) {
            out.attempted[slot(Estimator::Mcmc)] = true;
            out.ok[slot(Estimator::Mcmc)] = false;
        }
    }
    return out;
}

EstimatorStats reduce_estimator(Estimator e, const std::vector<RepOutcome>& reps, double true_p) {
    EstimatorStats s;
    s.tag = e;
    const std::size_t k = slot(e);
    double sum = 0.0, sum_err = 0.0, sum_err2 = 0.0, sum_err4 = 0.0;
    for (const auto& r : reps) {
        if (!r.sample_ok || !r.attempted[k]) continue;
        if (!r.ok[k]) {
            ++s.failures;
            continue;
        }
        const double err = r.value[k] - true_p;
        ++s.count;
        sum += r.value[k];
        sum_err += err;
        sum_err2 += err * err;
        sum_err4 += err * err * err * err;
    }
    if (s.count == 0) return s;
    const double n = s.count;
    s.mean = sum / n;
    s.bias = sum_err / n;
    s.mse = sum_err2 / n;
    if (s.count > 1) {
        s.bias_se = std::sqrt(std::max(0.0, (sum_err2 - n * s.bias * s.bias) / (n - 1.0)) / n);
        s.mse_se = std::sqrt(std::max(0.0, (sum_err4 - n * s.mse * s.mse) / (n - 1.0)) / n);
    }
    return s;
}

IntervalStats reduce_interval(const std::vector<RepOutcome>& reps, bool RepOutcome::*ok, double RepOutcome::*len,
                              bool RepOutcome::*cover) {
    IntervalStats s;
    double l = 0.0;
    int c = 0;
    for (const auto& r : reps) {
        if (!r.sample_ok) continue;
        if (!(r.*ok)) {
            ++s.failures;
            continue;
        }
        ++s.count;
        l += r.*len;
        c += (r.*cover) ? 1 : 0;
    }
    if (s.count > 0) {
        s.avg_length = l / s.count;
        s.coverage = static_cast<double>(c) / s.count;
    }
    return s;
}

} // namespace

SimCellResult run_cell(const SimCellConfig& cfg, unsigned workers) {
    cfg.validate();
    SimCellResult res;
    res.config = cfg;
    res.true_p = reliability_p(cfg.theta);

    const auto n = static_cast<std::size_t>(cfg.replications);
    std::vector<RepOutcome> reps(n);
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    if (workers == 1) {
        for (std::size_t r = 0; r < n; ++r) reps[r] = run_replication(cfg, res.true_p, r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (std::size_t r; (r = next.fetch_add(1)) < n;) reps[r] = run_replication(cfg, res.true_p, r);
            });
        for (auto& th : pool) th.join();
    }

    for (Estimator e : cfg.estimators) res.estimators.push_back(reduce_estimator(e, reps, res.true_p));
    res.ac = reduce_interval(reps, &RepOutcome::ac_ok, &RepOutcome::ac_len, &RepOutcome::ac_cover);
    res.cr = reduce_interval(reps, &RepOutcome::cr_ok, &RepOutcome::cr_len, &RepOutcome::cr_cover);
    for (const auto& r : reps) {
        if (!r.sample_ok) {
            ++res.sample_failures;
            continue;
        }
        const std::size_t u = slot(Estimator::Umvue);
        if (r.ok[u] && (r.value[u] < 0.0 || r.value[u] > 1.0)) ++res.out_of_range_count;
        if (r.mc_gap) ++res.mc_gap_exceed_count;
    }
    return res;
}

std::vector<SimCellResult> run_grid(const std::vector<SimCellConfig>& configs, unsigned workers) {
    if (configs.empty()) throw DomainError("run_grid needs at least one cell");
    std::vector<SimCellResult> out;
    out.reserve(configs.size());
    for (const auto& c : configs) out.push_back(run_cell(c, workers));
    return out;
}

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

} // namespace

std::string csv_header() {
    std::string h = "n1,n2,n3,theta1,theta2,theta3,p,replications,seed,family,sigma";
    for (Estimator e : kAllEstimators) {
        const std::string t = estimator_tag(e);
        h += "," + t + "_mean," + t + "_mse," + t + "_bias," + t + "_failures";
    }
    h += ",ac_length,ac_coverage,cr_length,cr_coverage,umvue_out_of_range,sample_failures";
    return h;
}

void write_csv(std::ostream& os, const std::vector<SimCellResult>& results) {
    os << csv_header() << '\n';
    for (const auto& r : results) {
        const auto& c = r.config;
        os << c.sizes[0] << ',' << c.sizes[1] << ',' << c.sizes[2] << ',' << fmt(c.theta.theta1) << ','
           << fmt(c.theta.theta2) << ',' << fmt(c.theta.theta3) << ',' << fmt(r.true_p) << ',' << c.replications
           << ',' << c.seed << ',' << family_name(c.family.kind) << ',' << fmt(c.family.sigma);
        for (Estimator e : kAllEstimators) {
            const EstimatorStats* s = nullptr;
            for (const auto& x : r.estimators)
                if (x.tag == e) s = &x;
            if (s)
                os << ',' << fmt(s->mean) << ',' << fmt(s->mse) << ',' << fmt(s->bias) << ',' << s->failures;
            else
                os << ",,,,";
        }
        os << ',' << fmt(r.ac.avg_length) << ',' << fmt(r.ac.coverage) << ',' << fmt(r.cr.avg_length) << ','
           << fmt(r.cr.coverage) << ',' << r.out_of_range_count << ',' << r.sample_failures << '\n';
    }
}

std::string to_json(const std::vector<SimCellResult>& results, const specfun::EvalPolicy& policy) {
    using nlohmann::json;
    json cells = json::array();
    for (const auto& r : results) {
        const auto& c = r.config;
        json est = json::object();
        for (const auto& s : r.estimators)
            est[estimator_tag(s.tag)] = {{"mean", s.mean},       {"mse", s.mse},         {"bias", s.bias},
                                         {"bias_se", s.bias_se}, {"mse_se", s.mse_se},   {"count", s.count},
                                         {"failures", s.failures}};
        auto interval = [](const IntervalStats& s) {
            return json{{"avg_length", s.avg_length}, {"coverage", s.coverage}, {"count", s.count},
                        {"failures", s.failures}};
        };
        cells.push_back({
            {"config",
             {{"theta", {c.theta.theta1, c.theta.theta2, c.theta.theta3}},
              {"sizes", c.sizes},
              {"replications", c.replications},
              {"seed", c.seed},
              {"gamma", c.gamma},
              {"family", family_name(c.family.kind)},
              {"sigma", c.family.sigma},
              {"prior", {{"a", {c.prior.a1, c.prior.a2, c.prior.a3}}, {"b", {c.prior.b1, c.prior.b2, c.prior.b3}}}},
              {"lindley_prior",
               {{"a", {c.lindley_prior.a1, c.lindley_prior.a2, c.lindley_prior.a3}},
                {"b", {c.lindley_prior.b1, c.lindley_prior.b2, c.lindley_prior.b3}}}},
              {"chain",
               {{"iterations", c.chain.iterations}, {"burn_in", c.chain.burn_in}, {"thin", c.chain.thin}}}}},
            {"true_p", r.true_p},
            {"estimators", est},
            {"ac", interval(r.ac)},
            {"cr", interval(r.cr)},
            {"umvue_out_of_range", r.out_of_range_count},
            {"mc_gap_exceed", r.mc_gap_exceed_count},
            {"sample_failures", r.sample_failures},
        });
    }
    json doc = {{"tolerances",
                 {{"rel_tol", policy.rel_tol}, {"max_terms", policy.max_terms}, {"quad_abs_tol", policy.quad_abs_tol}}},
                {"cells", cells}};
    return doc.dump(2);
}

} // namespace ordprob
