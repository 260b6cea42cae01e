// Acceptance run: one PASS/FAIL line per criterion, indented detail lines
// below it. Arguments restrict the run to the listed criterion numbers.
// Exit status is 1 when any executed criterion fails.

#include "ordprob/app.hpp"
#include "ordprob/bayes.hpp"
#include "ordprob/classical.hpp"
#include "ordprob/model.hpp"
#include "ordprob/simlab.hpp"
#include "ordprob/specfun.hpp"
#include "ordprob/umvue.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

using namespace ordprob;

namespace {

// Pinned tolerances.
constexpr double kSpecfunRel = 1e-8;
constexpr double kFdF1Rel = 1e-10;
constexpr double kUmvueOracleRel = 1e-6;
constexpr double kUnbiasedSe = 3.0;
constexpr double kBayesRel = 1e-6;
constexpr double kGibbsSe = 3.0;
constexpr double kTableMseRel = 0.25;
constexpr double kTableSe = 2.0;
constexpr double kMinCrCoverage = 0.87;
constexpr double kAcLengthRel = 0.15;
constexpr double kHessRel = 1e-5;
constexpr double kLindleyGap = 1e-3;
constexpr double kFitRel = 1e-2;
constexpr double kKsAbs = 2e-3;
constexpr double kPointAbs = 5e-3;
constexpr double kIntervalAbs = 1e-2;
constexpr double kPartitionAbs = 1e-12;

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

void detail(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void detail(const char* fmt, ...) {
    std::fputs("    ", stdout);
    va_list ap;
    va_start(ap, fmt);
    std::vprintf(fmt, ap);
    va_end(ap);
    std::fputc('\n', stdout);
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

double uni(std::mt19937_64& g, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }

// ---------------------------------------------------------------------------

bool c1() {
    struct Row { ParamTriple t; double p; };
    const Row rows[] = {{{0.9, 0.09, 0.00005}, 0.9085},
                        {{0.3, 0.09, 0.0005}, 0.7640},
                        {{0.2, 0.09, 0.00005}, 0.6892},
                        {{0.09, 0.09, 0.00005}, 0.4996}};
    bool ok = true;
    for (const Row& r : rows) {
        const double p = reliability_p(r.t);
        const bool hit = std::lround(p * 1e4) == std::lround(r.p * 1e4);
        ok = ok && hit;
        detail("(%g, %g, %g) -> %.6f, printed %.4f %s", r.t.theta1, r.t.theta2, r.t.theta3, p, r.p,
               hit ? "ok" : "MISMATCH");
    }
    return ok;
}

bool c2() {
    using namespace specfun;
    std::mt19937_64 g(2002);
    double worst = 0.0, worst_fd = 0.0;
    for (int i = 0; i < 1000; ++i) {
        // Admissible for all three strategies: terminating b, Euler
        // conditions on a and c, both arguments inside the unit disc.
        const double a = uni(g, 0.1, 3.0);
        const double c = a + uni(g, 0.1, 4.0);
        const double b = -std::uniform_int_distribution<int>(0, 6)(g);
        const double bp = uni(g, -2.0, 4.0);
        const double x = uni(g, -0.9, 0.9);
        const double y = uni(g, -0.9, 0.9);
        const F1Args args{a, b, bp, c, x, y};
        const double fin = appell_f1(args, {}, Strategy::FiniteSeries);
        const double ser = appell_f1(args, {}, Strategy::Series);
        const double eul = appell_f1(args, {}, Strategy::EulerIntegral);
        worst = std::max({worst, rel(ser, fin), rel(eul, fin), rel(ser, eul)});
        worst_fd = std::max(worst_fd, rel(lauricella_fd({a, {b, bp}, c, {x, y}}), fin));
        // Non-terminating sets: series against the integral.
        const double b2 = uni(g, -1.5, 2.5);
        const F1Args nt{a, b2, bp, c, x, y};
        const double s2 = appell_f1(nt, {}, Strategy::Series);
        worst = std::max(worst, rel(s2, appell_f1(nt, {}, Strategy::EulerIntegral)));
        worst_fd = std::max(worst_fd, rel(lauricella_fd({a, {b2, bp}, c, {x, y}}), s2));
    }
    detail("max relative disagreement series/Euler/finite: %.3e (limit %.0e)", worst, kSpecfunRel);
    detail("max relative F_D(2) vs F1: %.3e (limit %.0e)", worst_fd, kFdF1Rel);
    return worst < kSpecfunRel && worst_fd < kFdF1Rel;
}

bool c3() {
    std::mt19937_64 g(2003);
    const RegionTag regions[] = {RegionTag::UleVleW, RegionTag::UleWleV, RegionTag::VMin, RegionTag::WMin};
    double worst_closed = 0.0, worst_dec = 0.0;
    int cases = 0;
    for (int n1 = 2; n1 <= 4; ++n1)
        for (int n2 = 2; n2 <= 4; ++n2)
            for (int n3 = 2; n3 <= 4; ++n3)
                for (RegionTag r : regions) {
                    int done = 0;
                    while (done < 50) {
                        const double u = std::exp(uni(g, -2, 2));
                        const double v = std::exp(uni(g, -2, 2));
                        const double w = std::exp(uni(g, -2, 2));
                        if (umvue_region(u, v, w) != r) continue;
                        const UmvueInput in{n1, n2, n3, u, v, w};
                        const double want = umvue_oracle(in);
                        worst_closed = std::max(worst_closed, rel(umvue_p(in), want));
                        worst_dec = std::max(worst_dec, rel(umvue_p_decomposed(in), want));
                        ++done;
                        ++cases;
                    }
                }
    detail("%d cases; max relative error closed form %.3e, decomposition %.3e (limit %.0e)", cases, worst_closed,
           worst_dec, kUmvueOracleRel);
    return worst_closed < kUmvueOracleRel && worst_dec < kUmvueOracleRel;
}

bool c4() {
    const ParamTriple triples[] = {{0.9, 0.09, 0.00005}, {0.1, 0.02, 0.0005}, {0.3, 0.09, 0.0005}};
    bool ok = true;
    std::uint64_t seed = 4001;
    for (const auto& t : triples) {
        SimCellConfig cfg;
        cfg.theta = t;
        cfg.sizes = {10, 10, 10};
        cfg.replications = 20000;
        cfg.estimators = {Estimator::Umvue};
        // The chain only feeds the credible interval, which is not used here.
        cfg.chain.iterations = 1;
        cfg.chain.burn_in = 0;
        cfg.chain.thin = 1;
        cfg.seed = seed++;
        const auto r = run_cell(cfg, workers());
        const auto& s = r.stats(Estimator::Umvue);
        const double z = s.bias / s.bias_se;
        const bool hit = std::abs(z) < kUnbiasedSe && s.failures == 0;
        ok = ok && hit;
        detail("(%g, %g, %g): P %.5f, mean %.5f, bias %+.5f (SE %.5f, z %+.2f), failures %d %s", t.theta1,
               t.theta2, t.theta3, r.true_p, s.mean, s.bias, s.bias_se, z, s.failures, hit ? "ok" : "FAIL");
    }
    return ok;
}

bool c5() {
    std::mt19937_64 g(2005);
    double worst = 0.0;
    int gibbs_out = 0;
    double worst_z = 0.0;
    for (int i = 0; i < 100; ++i) {
        PosteriorSummary p;
        p.w1 = uni(g, 2.0, 40.0);
        p.w2 = uni(g, 2.0, 40.0);
        p.w3 = uni(g, 2.0, 40.0);
        p.v1 = std::exp(uni(g, -2, 2));
        p.v2 = std::exp(uni(g, -2, 2));
        p.v3 = std::exp(uni(g, -2, 2));
        const double closed = bayes_p_closed(p);
        const double dec = bayes_p_decomposed(p);
        const double quad = bayes_p_oracle(p);
        worst = std::max({worst, rel(closed, quad), rel(dec, quad), rel(closed, dec)});

        ChainConfig cfg;
        cfg.iterations = 20000;
        cfg.burn_in = 0;
        cfg.thin = 1;
        cfg.seed = 5000 + static_cast<std::uint64_t>(i);
        const auto d = gibbs_chain(p, cfg);
        const double m = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
        double ss = 0.0;
        for (double x : d) ss += (x - m) * (x - m);
        const double se = std::sqrt(ss / static_cast<double>(d.size() - 1) / static_cast<double>(d.size()));
        const double z = (m - closed) / se;
        worst_z = std::max(worst_z, std::abs(z));
        if (std::abs(z) >= kGibbsSe) ++gibbs_out;
    }
    detail("max pairwise relative gap closed/decomposition/quadrature: %.3e (limit %.0e)", worst, kBayesRel);
    detail("Gibbs means outside %.0f SE: %d of 100 (largest |z| %.2f)", kGibbsSe, gibbs_out, worst_z);
    return worst < kBayesRel && gibbs_out == 0;
}

bool c6() {
    struct Ref { double mse, bias; };
    struct Cell { int n; Ref ref[6]; };
    // Order: umvue, mle, bayes, jb, lindley, mc.
    const Cell cells[] = {
        {10, {{0.0016, -0.0012}, {0.0018, -0.0084}, {0.0029, -0.0310}, {0.0021, -0.0161}, {0.0020, -0.0180},
              {0.0030, -0.0311}}},
        {30, {{0.0005, -0.0015}, {0.0005, -0.0039}, {0.0007, -0.0117}, {0.0005, -0.0064}, {0.0005, -0.0071},
              {0.0007, -0.0117}}},
        {50, {{0.0003, 0.0003}, {0.0003, -0.0011}, {0.0003, -0.0059}, {0.0003, -0.0026}, {0.0003, -0.0030},
              {0.0003, -0.0059}}},
    };
    const Estimator order[] = {Estimator::Umvue,         Estimator::Mle,     Estimator::Bayes,
                               Estimator::JeffreysBayes, Estimator::Lindley, Estimator::Mcmc};
    bool ok = true;
    int misses = 0, checks = 0;
    for (const Cell& cell : cells) {
        SimCellConfig cfg;
        cfg.theta = {0.9, 0.09, 0.00005};
        cfg.sizes = {cell.n, cell.n, cell.n};
        cfg.replications = 1000;
        cfg.seed = 6000 + static_cast<std::uint64_t>(cell.n);
        const auto r = run_cell(cfg, workers());
        for (int k = 0; k < 6; ++k) {
            const auto& s = r.stats(order[k]);
            const Ref& ref = cell.ref[k];
            const double mse_tol = std::max(kTableMseRel * ref.mse, kTableSe * s.mse_se);
            const bool mse_ok = std::abs(s.mse - ref.mse) <= mse_tol;
            const bool bias_ok = std::abs(s.bias - ref.bias) <= kTableSe * s.bias_se;
            checks += 2;
            misses += (mse_ok ? 0 : 1) + (bias_ok ? 0 : 1);
            ok = ok && mse_ok && bias_ok && s.failures == 0;
            detail("n=%2d %-7s mse %.5f vs %.4f (tol %.5f) %s | bias %+.5f vs %+.4f (tol %.5f) %s | failures %d",
                   cell.n, estimator_tag(order[k]), s.mse, ref.mse, mse_tol, mse_ok ? "ok" : "MISS", s.bias,
                   ref.bias, kTableSe * s.bias_se, bias_ok ? "ok" : "MISS", s.failures);
        }
    }
    detail("%d of %d comparisons outside tolerance", misses, checks);
    return ok;
}

bool c7() {
    const ParamTriple triples[] = {{0.9, 0.09, 0.00005}, {0.1, 0.02, 0.0005},  {0.3, 0.09, 0.0005},
                                   {0.2, 0.09, 0.00005}, {0.09, 0.09, 0.00005}, {0.006, 0.02, 0.00005}};
    bool ok = true;
    double ac50 = 0.0;
    std::uint64_t seed = 7000;
    for (const auto& t : triples) {
        double prev_len = INFINITY;
        bool decreasing = true;
        double min_cov = 1.0;
        std::string lens;
        for (int n = 10; n <= 50; n += 10) {
            SimCellConfig cfg;
            cfg.theta = t;
            cfg.sizes = {n, n, n};
            cfg.replications = 1000;
            cfg.estimators = {Estimator::Mle};
            cfg.seed = seed++;
            const auto r = run_cell(cfg, workers());
            decreasing = decreasing && r.ac.avg_length < prev_len;
            prev_len = r.ac.avg_length;
            min_cov = std::min(min_cov, r.cr.coverage);
            char buf[64];
            std::snprintf(buf, sizeof buf, " %.4f", r.ac.avg_length);
            lens += buf;
            if (n == 50 && t.theta1 == 0.9) ac50 = r.ac.avg_length;
        }
        const bool cell_ok = decreasing && min_cov >= kMinCrCoverage;
        ok = ok && cell_ok;
        detail("(%g, %g, %g): AC lengths%s %s; min CR coverage %.3f %s", t.theta1, t.theta2, t.theta3,
               lens.c_str(), decreasing ? "decreasing" : "NOT decreasing", min_cov,
               min_cov >= kMinCrCoverage ? "ok" : "LOW");
    }
    const bool len_ok = rel(ac50, 0.0495) <= kAcLengthRel;
    detail("AC length at n=50, P=0.9085: %.4f vs 0.0495 (relative gap %.3f, limit %.2f) %s", ac50, rel(ac50, 0.0495),
           kAcLengthRel, len_ok ? "ok" : "FAIL");
    return ok && len_ok;
}

bool c8() {
    std::mt19937_64 g(2008);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const double th[3] = {std::exp(uni(g, -4, 2)), std::exp(uni(g, -4, 2)), std::exp(uni(g, -4, 2))};
        auto P = [&](double d0, double d1, double d2) {
            return reliability_p({th[0] + d0, th[1] + d1, th[2] + d2});
        };
        const auto H = hess_p({th[0], th[1], th[2]});
        // Central second differences, Richardson-extrapolated over steps h
        // and h/2 so the oracle error is O(h^4) with a moderate h.
        auto second = [&](int i, int j, double rel_step) {
            const double hi = rel_step * th[i], hj = rel_step * th[j];
            auto at = [&](double si, double sj) {
                double d[3] = {0, 0, 0};
                d[i] += si * hi;
                d[j] += sj * hj;
                return P(d[0], d[1], d[2]);
            };
            if (i == j) return (at(0.5, 0.5) - 2 * P(0, 0, 0) + at(-0.5, -0.5)) / (hi * hi);
            return (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * hi * hj);
        };
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double fd = (4 * second(i, j, 5e-3) - second(i, j, 1e-2)) / 3;
                // Entries are compared on the natural scale 1/(theta_i theta_j).
                const double scale = std::max(std::abs(fd), 1e-3 / (th[i] * th[j]));
                worst = std::max(worst, std::abs(H(i, j) - fd) / scale);
            }
    }
    detail("max relative Hessian vs finite-difference gap: %.3e (limit %.0e)", worst, kHessRel);

    PriorSpec flat;
    flat.b1 = flat.b2 = flat.b3 = 1.0;
    double gap = 0.0;
    for (const ParamTriple& t : {ParamTriple{0.9, 0.09, 0.00005}, ParamTriple{0.3, 0.09, 0.0005},
                                 ParamTriple{0.09, 0.09, 0.00005}, ParamTriple{2.0, 1.0, 0.5}}) {
        const int n = 10000;
        gap = std::max(gap, std::abs(lindley_p(t, n, n, n, flat) - reliability_p(t)));
    }
    detail("max |Lindley - MLE| at n=1e4, flat prior: %.3e (limit %.0e)", gap, kLindleyGap);
    return worst < kHessRel && gap < kLindleyGap;
}

bool c9() {
    using namespace ordprob::app;
    const SampleSet d = fatigue_data();
    bool ok = true;

    const auto fit = weibull_common_shape_fit({d.x, d.y, d.z}, {"AW", "BG", "TIG"});
    const double want_scale[3] = {44.9310, 87.6439, 203.9352};
    const double want_t[3] = {0.1199, 0.1532, 0.1426};
    const bool shape_ok = rel(fit.common_shape, 1.6277) <= kFitRel;
    ok = ok && shape_ok;
    detail("common shape %.5f vs 1.6277 %s", fit.common_shape, shape_ok ? "ok" : "MISS");
    for (int i = 0; i < 3; ++i) {
        const auto& ds = fit.datasets[i];
        const bool s_ok = rel(ds.scale, want_scale[i]) <= kFitRel;
        const bool t_ok = std::abs(ds.ks_statistic - want_t[i]) <= kKsAbs;
        ok = ok && s_ok && t_ok;
        detail("%-3s scale %.4f vs %.4f %s | K-S t %.4f vs %.4f %s", ds.label.c_str(), ds.scale, want_scale[i],
               s_ok ? "ok" : "MISS", ds.ks_statistic, want_t[i], t_ok ? "ok" : "MISS");
    }

    auto report = [&](const EstimateReport& r, bool counts) {
        const char* names[] = {"umvue", "mle", "bayes", "jb", "mc", "lindley"};
        const double got[] = {r.umvue, r.mle.p_hat, r.bayes, r.jeffreys_bayes, r.mcmc, r.lindley};
        const double want[] = {0.5769, 0.5612, 0.5462, 0.5462, 0.5463, 0.5329};
        bool all = true;
        for (int k = 0; k < 6; ++k) {
            const bool hit = std::abs(got[k] - want[k]) <= kPointAbs;
            all = all && hit;
            detail("  %-7s %.4f vs %.4f %s", names[k], got[k], want[k], hit ? "ok" : "MISS");
        }
        const bool ac_ok = std::abs(r.ac.lower - 0.4705) <= kIntervalAbs && std::abs(r.ac.upper - 0.6518) <= kIntervalAbs;
        const bool hpd_ok =
            std::abs(r.hpd.first - 0.4161) <= kIntervalAbs && std::abs(r.hpd.second - 0.6699) <= kIntervalAbs;
        detail("  AC  (%.4f, %.4f) vs (0.4705, 0.6518) %s", r.ac.lower, r.ac.upper, ac_ok ? "ok" : "MISS");
        detail("  HPD (%.4f, %.4f) vs (0.4161, 0.6699) %s", r.hpd.first, r.hpd.second, hpd_ok ? "ok" : "MISS");
        if (counts) ok = ok && all && ac_ok && hpd_ok;
    };

    EstimateConfig cfg; // fitted common shape, Jeffreys prior, default chain
    detail("estimates at the fitted shape %.5f:", fit.common_shape);
    report(estimate(d, cfg), true);

    // Informational only: the same pipeline with the shape held at 1.6277.
    cfg.fit_shape = false;
    cfg.family = parse_family("weibull", 1.6277);
    detail("for reference, estimates with the shape fixed at 1.6277 (not scored):");
    report(estimate(d, cfg), false);
    return ok;
}

bool c10() {
    std::mt19937_64 g(2010);
    double worst = 0.0;
    for (std::size_t n : {3u, 4u}) {
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<double> th(n);
            for (auto& t : th) t = std::exp(uni(g, -8, 3));
            std::vector<std::size_t> idx(n);
            std::iota(idx.begin(), idx.end(), 0);
            double total = 0.0;
            do {
                std::vector<double> perm(n);
                for (std::size_t i = 0; i < n; ++i) perm[i] = th[idx[i]];
                total += reliability_pn(perm);
            } while (std::next_permutation(idx.begin(), idx.end()));
            worst = std::max(worst, std::abs(total - 1.0));
        }
    }
    detail("max |sum - 1| over 400 parameter sets: %.3e (limit %.0e)", worst, kPartitionAbs);
    return worst < kPartitionAbs;
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<bool()>>> criteria = {
        {"ordering probability matches the reference values", c1},
        {"special-function strategies agree", c2},
        {"UMVUE closed form and decomposition match the quadrature oracle", c3},
        {"UMVUE is unbiased in simulation", c4},
        {"Bayes closed form, decomposition, quadrature and Gibbs agree", c5},
        {"desk-scale simulation reproduces the reference MSE and bias", c6},
        {"interval coverage and length behaviour", c7},
        {"Hessian and Lindley approximation", c8},
        {"fatigue data application", c9},
        {"permutation partition", c10},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        bool pass = false;
        std::string err;
        // Detail lines print first; the verdict line follows them.
        try {
            pass = criteria[k].second();
        } catch (const std::exception& e) {
            err = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!err.empty()) detail("exception: %s", err.c_str());
        std::printf("criterion %2d: %s  %s (%.1f s)\n", id, pass ? "PASS" : "FAIL", criteria[k].first, secs);
        std::fflush(stdout);
        failed += pass ? 0 : 1;
    }
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
