#include "ordprob/classical.hpp"

#include "ordprob/errors.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace ordprob {

ParamTriple mle_theta(const SufficientStats& s) {
    if (!(s.u > 0.0 && s.v > 0.0 && s.w > 0.0))
        throw DomainError("mle_theta: sufficient statistics must be positive");
    if (s.n1 < 1 || s.n2 < 1 || s.n3 < 1) throw DomainError("mle_theta: sample sizes must be >= 1");
    return {s.n1 / s.u, s.n2 / s.v, s.n3 / s.w};
}

MleResult mle_p(const SufficientStats& stats, double sigma_used) {
    MleResult r;
    r.theta_hat = mle_theta(stats);
    r.p_hat = reliability_p(r.theta_hat);
    r.sigma_used = sigma_used;
    return r;
}

namespace {

struct LogDerivs {
    double p;
    std::array<double, 3> l;  // d log P / d theta_i
    Eigen::Matrix3d ll;       // d2 log P / d theta_i d theta_j
};

LogDerivs log_derivs(const ParamTriple& t) {
    t.validate();
    const double a = t.theta2 + t.theta3;
    const double s = t.theta1 + a;
    const double ia = 1.0 / a;
    const double is = 1.0 / s;
    LogDerivs d;
    d.p = reliability_p(t);
    d.l = {1.0 / t.theta1 - is, 1.0 / t.theta2 - ia - is, -ia - is};
    const double is2 = is * is;
    const double ia2 = ia * ia;
    d.ll << -1.0 / (t.theta1 * t.theta1) + is2, is2, is2,
            is2, -1.0 / (t.theta2 * t.theta2) + ia2 + is2, ia2 + is2,
            is2, ia2 + is2, ia2 + is2;
    return d;
}

} // namespace

std::array<double, 3> grad_p(const ParamTriple& theta) {
    const double a = theta.theta2 + theta.theta3;
    const double s = theta.theta1 + a;
    const double d = a * s;
    // Direct rational forms; algebraically P * d log P.
    return {theta.theta2 / (s * s),
            theta.theta1 * (theta.theta3 * (theta.theta1 + theta.theta3) - theta.theta2 * theta.theta2) / (d * d),
            -theta.theta1 * theta.theta2 * (theta.theta1 + 2.0 * theta.theta2 + 2.0 * theta.theta3) / (d * d)};
}

Eigen::Matrix3d hess_p(const ParamTriple& theta) {
    const LogDerivs d = log_derivs(theta);
    Eigen::Matrix3d h;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) h(i, j) = d.p * (d.l[i] * d.l[j] + d.ll(i, j));
    return h;
}

Eigen::Matrix3d fisher_information(const ParamTriple& theta, int n1, int n2, int n3) {
    theta.validate();
    if (n1 < 1 || n2 < 1 || n3 < 1) throw DomainError("fisher_information: counts must be positive");
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    m(0, 0) = n1 / (theta.theta1 * theta.theta1);
    m(1, 1) = n2 / (theta.theta2 * theta.theta2);
    m(2, 2) = n3 / (theta.theta3 * theta.theta3);
    return m;
}

double delta_variance(const ParamTriple& theta, int n1, int n2, int n3) {
    const auto g = grad_p(theta);
    const double t[3] = {theta.theta1, theta.theta2, theta.theta3};
    const int n[3] = {n1, n2, n3};
    double v = 0.0;
    for (int i = 0; i < 3; ++i) v += g[i] * g[i] * t[i] * t[i] / n[i];
    return v;
}

double normal_upper_quantile(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0, 1)");
    static const boost::math::normal_distribution<double> std_normal(0.0, 1.0);
    return boost::math::quantile(boost::math::complement(std_normal, gamma / 2.0));
}

AsymptoticCI asymptotic_ci(const SufficientStats& stats, double gamma) {
    const double z = normal_upper_quantile(gamma);
    const MleResult m = mle_p(stats);
    AsymptoticCI ci;
    ci.gamma = gamma;
    ci.sigma_p_hat = std::sqrt(delta_variance(m.theta_hat, stats.n1, stats.n2, stats.n3));
    const double lo = m.p_hat - z * ci.sigma_p_hat;
    const double hi = m.p_hat + z * ci.sigma_p_hat;
    ci.lower = std::max(lo, 0.0);
    ci.upper = std::min(hi, 1.0);
    ci.clamped = lo < 0.0 || hi > 1.0;
    return ci;
}

double sigma_score(const SampleSet& samples, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("sigma_score: sigma must be positive");
    double score = 0.0;
    std::size_t total = 0;
    for (const auto* data : {&samples.x, &samples.y, &samples.z}) {
        if (data->empty()) throw DomainError("sigma_score: empty sample");
        double tsum = 0.0;   // sum -ln(1 - x^sigma)
        double dsum = 0.0;   // sum d/dsigma ln(1 - x^sigma)
        double lsum = 0.0;   // sum ln x
        for (double x : *data) {
            if (!(x > 0.0 && x < 1.0)) throw DomainError("sigma_score: data must lie in (0, 1)");
            const double lx = std::log(x);
            const double xs = std::exp(sigma * lx);
            tsum += -std::log1p(-xs);
            dsum += -xs * lx / (-std::expm1(sigma * lx));
            lsum += lx;
        }
        const double theta = static_cast<double>(data->size()) / tsum;
        score += lsum + (theta - 1.0) * dsum;
        total += data->size();
    }
    return score + static_cast<double>(total) / sigma;
}

double mle_sigma(const SampleSet& samples, double init, const SigmaFitOptions& opt) {
    if (!(init > 0.0)) throw DomainError("mle_sigma: init must be positive");
    auto f = [&](double ls) { return sigma_score(samples, std::exp(ls)); };

    // Bracket in log sigma by doubling steps away from the initial guess.
    double a = std::log(init);
    double fa = f(a);
    if (fa == 0.0) return init;
    double step = fa > 0.0 ? 0.5 : -0.5;
    double b = a + step;
    double fb = f(b);
    int expand = 0;
    while (fa * fb > 0.0) {
        if (++expand > opt.max_iter) throw NonConvergence("mle_sigma: could not bracket the score root");
        a = b;
        fa = fb;
        step *= 2.0;
        b = a + step;
        fb = f(b);
    }
    if (a > b) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    std::uintmax_t iters = static_cast<std::uintmax_t>(opt.max_iter);
    auto tol = [](double l, double r) { return std::abs(r - l) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(l)); };
    const auto root = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
    if (iters >= static_cast<std::uintmax_t>(opt.max_iter)) throw NonConvergence("mle_sigma: root finder hit max_iter");
    // Report whichever bracket end has the smaller score.
    const double l = std::exp(root.first);
    const double r = std::exp(root.second);
    const double sl = std::abs(sigma_score(samples, l));
    const double sr = std::abs(sigma_score(samples, r));
    const double best = sl <= sr ? l : r;
    if (std::min(sl, sr) > opt.score_tol * static_cast<double>(samples.x.size() + samples.y.size() + samples.z.size()))
        throw NonConvergence("mle_sigma: score did not reach tolerance");
    return best;
}

} // namespace ordprob
