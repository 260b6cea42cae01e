#include "ordprob/bayes.hpp"

#include "ordprob/classical.hpp"
#include "ordprob/errors.hpp"
#include "ordprob/quadrature.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/gamma_distribution.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace ordprob {

using specfun::appell_f1;
using specfun::EvalPolicy;
using specfun::F1Args;

bool PriorSpec::is_jeffreys() const {
    return a1 == 0.0 && a2 == 0.0 && a3 == 0.0 && b1 == 0.0 && b2 == 0.0 && b3 == 0.0;
}

void PriorSpec::validate() const {
    for (double h : {a1, a2, a3, b1, b2, b3})
        if (!(h >= 0.0) || !std::isfinite(h)) throw DomainError("prior hyperparameters must be finite and >= 0");
}

void PosteriorSummary::validate() const {
    for (double h : {w1, w2, w3, v1, v2, v3})
        if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("posterior shapes and rates must be positive");
}

void ChainConfig::validate() const {
    if (iterations < 1 || burn_in < 0 || burn_in >= iterations || thin < 1)
        throw DomainError("chain needs 0 <= burn_in < iterations and thin >= 1");
}

PosteriorSummary posterior_params(const SufficientStats& s, const PriorSpec& prior) {
    prior.validate();
    PosteriorSummary p{prior.b1 + s.n1, prior.b2 + s.n2, prior.b3 + s.n3,
                       prior.a1 + s.u, prior.a2 + s.v, prior.a3 + s.w};
    p.validate();
    return p;
}

KappaPair kappa_pair(const PosteriorSummary& post) {
    return {1.0 - post.v3 / post.v2, 1.0 - post.v1 / post.v2};
}

int series_region(const KappaPair& k) {
    const bool in1 = k.kappa1 >= -1.0;
    const bool in2 = k.kappa2 >= -1.0;
    if (in1 && in2) return 1;
    if (in1) return 2;
    if (in2) return 3;
    return 4;
}

namespace {

double lgam(double x) { return boost::math::lgamma(x); }

double series_term(const PosteriorSummary& p, int region, bool shipped, int m, const EvalPolicy& pol) {
    const double w1 = p.w1, w2 = p.w2, w3 = p.w3;
    const double W = w1 + w2 + w3;
    const double mm = m;
    const double log_base = std::log(w2) + lgam(W) + lgam(w1 + mm) - lgam(w1) - lgam(W + mm + 1.0);
    // 1 - kappa1 = v3/v2 and 1 - kappa2 = v1/v2, kept as ratios for accuracy.
    const double l1 = std::log(p.v3 / p.v2);
    const double l2 = std::log(p.v1 / p.v2);
    const double k1 = 1.0 - p.v3 / p.v2;
    const double k2 = 1.0 - p.v1 / p.v2;
    const double c = W + mm + 1.0;
    double log_pref = 0.0;
    F1Args g;
    switch (region) {
    case 1:
        log_pref = w3 * l1 + w1 * l2;
        g = {W, w3, w1 + mm, c, k1, k2};
        break;
    case 2:
        if (shipped) {
            log_pref = w3 * l1 + (w1 - W) * l2;
            g = {W, w3, w2 + 1.0, c, 1.0 - p.v3 / p.v1, 1.0 - p.v2 / p.v1};
        } else {
            log_pref = (mm + 1.0) * l1 - mm * l2;
            g = {mm + 1.0, w3, w1 + 1.0, c, k1, 1.0 - p.v3 / p.v1};
        }
        break;
    case 3:
        if (shipped) {
            log_pref = (w3 - W) * l1 + w1 * l2;
            g = {W, w2 + 1.0, w1 + mm, c, 1.0 - p.v2 / p.v3, 1.0 - p.v1 / p.v3};
        } else {
            log_pref = l2;
            g = {mm + 1.0, w3, w1 + 1.0, c, (k1 - k2) / (k1 - 1.0), k2};
        }
        break;
    case 4:
        log_pref = -mm * l2;
        g = {mm + 1.0, w3, w1 + mm, c, 1.0 - p.v2 / p.v3, 1.0 - p.v2 / p.v1};
        break;
    default:
        throw DomainError("series region must be 1..4");
    }
    return std::exp(log_base + log_pref) * appell_f1(g, pol);
}

} // namespace

double bayes_p_series(const PosteriorSummary& post, int region, bool shipped_form, const EvalPolicy& pol) {
    post.validate();
    pol.validate();
    const std::size_t cap = std::min<std::size_t>(pol.max_terms, 100000);
    double sum = 0.0;
    for (std::size_t m = 1; m <= cap; ++m) {
        const double t = series_term(post, region, shipped_form, static_cast<int>(m), pol);
        sum += t;
        if (!std::isfinite(sum)) throw NonConvergence("posterior-mean series diverged");
        if (m >= 20 && std::abs(t) < pol.rel_tol * std::abs(sum)) return sum;
    }
    throw NonConvergence("posterior-mean series hit the term cap");
}

double bayes_p_closed(const PosteriorSummary& post, const EvalPolicy& pol) {
    post.validate();
    return bayes_p_series(post, series_region(kappa_pair(post)), true, pol);
}

double bayes_phi1(const PosteriorSummary& p, const EvalPolicy& pol) {
    p.validate();
    const double s = p.w2 + p.w3;
    const double mu1 = 1.0 - p.v2 / p.v3;
    const double lr = std::log(p.v2 / p.v3); // log(1 - mu1)
    if (mu1 >= 0.0)
        return p.w2 / s * std::exp(p.w2 * lr) * specfun::gauss_2f1(s, p.w2 + 1.0, s + 1.0, mu1, pol);
    // Pfaff image, argument mu1 / (mu1 - 1) = 1 - v3/v2 in (0, 1).
    return p.w2 / s * std::exp(-p.w3 * lr) * specfun::gauss_2f1(s, p.w3, s + 1.0, 1.0 - p.v3 / p.v2, pol);
}

double bayes_phi2_region(const PosteriorSummary& p, int region, const EvalPolicy& pol) {
    p.validate();
    const double W = p.w1 + p.w2 + p.w3;
    const double mu2 = 1.0 - p.v1 / p.v2;
    const double mu3 = 1.0 - p.v3 / p.v2;
    switch (region) {
    case 1:
        return p.w2 / W * std::exp(p.w1 * std::log(p.v1 / p.v2) + p.w3 * std::log(p.v3 / p.v2)) *
               appell_f1(F1Args{W, p.w1, p.w3, W + 1.0, mu2, mu3}, pol);
    case 2:
        return p.w2 * (p.v1 / p.v2) / W *
               appell_f1(F1Args{1.0, p.w2 + 1.0, p.w3, W + 1.0, mu2, 1.0 - p.v1 / p.v3}, pol);
    case 3:
        return p.w2 * (p.v3 / p.v2) / W *
               appell_f1(F1Args{1.0, p.w1, p.w2 + 1.0, W + 1.0, 1.0 - p.v3 / p.v1, mu3}, pol);
    case 4:
        return p.w2 / W * appell_f1(F1Args{1.0, p.w1, p.w3, W + 1.0, 1.0 - p.v2 / p.v1, 1.0 - p.v2 / p.v3}, pol);
    default:
        throw DomainError("phi2 region must be 1..4");
    }
}

double bayes_phi2(const PosteriorSummary& p, const EvalPolicy& pol) {
    const double mu2 = 1.0 - p.v1 / p.v2;
    const double mu3 = 1.0 - p.v3 / p.v2;
    const bool in2 = mu2 >= -1.0;
    const bool in3 = mu3 >= -1.0;
    const int region = in2 && in3 ? 1 : in2 ? 2 : in3 ? 3 : 4;
    return bayes_phi2_region(p, region, pol);
}

double bayes_p_decomposed(const PosteriorSummary& post, const EvalPolicy& pol) {
    return bayes_phi1(post, pol) - bayes_phi2(post, pol);
}

double bayes_p_oracle(const PosteriorSummary& p, double quad_tol) {
    p.validate();
    const double W = p.w1 + p.w2 + p.w3;
    const double log_scale = lgam(W) - lgam(p.w1) - lgam(p.w2) - lgam(p.w3) + p.w1 * std::log(p.v1) +
                             p.w2 * std::log(p.v2) + p.w3 * std::log(p.v3);
    const double rel = 1e-12;
    // Simplex coordinates t = theta1/R, and theta3/R = (1-t) sigma. After the
    // R integral the integrand is
    //   t^w1 (1-t)^(w2+w3-1) sigma^(w3-1) (1-sigma)^w2 L^-W,
    //   L = v1 t + (1-t)(v2 (1-sigma) + v3 sigma).
    auto inner_log = [&](double t, double omt) {
        const double val = quad::beta_kernel(
            p.w3, p.w2 + 1.0,
            [&](double s, double oms) { return -W * std::log(p.v1 * t + omt * (p.v2 * oms + p.v3 * s)); },
            0.0, rel, 1e-300);
        return std::log(val);
    };
    return quad::beta_kernel(p.w1 + 1.0, p.w2 + p.w3, inner_log, log_scale, rel, quad_tol);
}

LindleyWorkspace lindley_workspace(const ParamTriple& th, int n1, int n2, int n3, const PriorSpec& prior) {
    th.validate();
    prior.validate();
    if (n1 < 1 || n2 < 1 || n3 < 1) throw DomainError("Lindley needs positive sample sizes");
    LindleyWorkspace ws;
    const double t[3] = {th.theta1, th.theta2, th.theta3};
    const double n[3] = {double(n1), double(n2), double(n3)};
    const double a[3] = {prior.a1, prior.a2, prior.a3};
    const double b[3] = {prior.b1, prior.b2, prior.b3};
    Eigen::Matrix3d neg_eps = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 3; ++i) {
        ws.rho[i] = (b[i] - 1.0) / t[i] - a[i];
        ws.eps2[i] = -n[i] / (t[i] * t[i]);
        ws.eps3[i] = 2.0 * n[i] / (t[i] * t[i] * t[i]);
        neg_eps(i, i) = -ws.eps2[i];
    }
    ws.varpi = neg_eps.inverse();
    ws.p_grad = grad_p(th);
    ws.p_hess = hess_p(th);
    return ws;
}

double lindley_p(const ParamTriple& th, int n1, int n2, int n3, const PriorSpec& prior) {
    const LindleyWorkspace ws = lindley_workspace(th, n1, n2, n3, prior);
    const auto& V = ws.varpi;
    const auto& P = ws.p_grad;
    const auto& H = ws.p_hess;
    // Third log-likelihood derivatives vanish off the diagonal here.
    auto eps3 = [&](int i, int j, int k) { return (i == j && j == k) ? ws.eps3[i] : 0.0; };

    double value = reliability_p(th);
    for (int i = 0; i < 3; ++i) {
        double q = 0.0;
        for (int j = 0; j < 3; ++j) q += ws.rho[j] * V(i, j);
        value += P[i] * q;
    }
    value += H(0, 1) * V(0, 1) + H(0, 2) * V(0, 2) + H(1, 2) * V(1, 2);
    value += 0.5 * (H(0, 0) * V(0, 0) + H(1, 1) * V(1, 1) + H(2, 2) * V(2, 2));
    for (int l = 0; l < 3; ++l) {
        double A = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) A += eps3(i, j, l) * V(i, j);
        double pv = 0.0;
        for (int j = 0; j < 3; ++j) pv += P[j] * V(l, j);
        value += 0.5 * A * pv;
    }
    return value;
}

std::vector<double> gibbs_chain(const PosteriorSummary& post, const ChainConfig& cfg, Rng& rng) {
    post.validate();
    cfg.validate();
    boost::random::gamma_distribution<double> g1(post.w1, 1.0 / post.v1);
    boost::random::gamma_distribution<double> g2(post.w2, 1.0 / post.v2);
    boost::random::gamma_distribution<double> g3(post.w3, 1.0 / post.v3);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>((cfg.iterations - cfg.burn_in) / cfg.thin + 1));
    for (int it = 0; it < cfg.iterations; ++it) {
        const double t1 = g1(rng);
        const double t2 = g2(rng);
        const double t3 = g3(rng);
        if (it >= cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) {
            // Gamma draws can underflow to 0 for tiny shapes; keep P defined.
            const double tiny = std::numeric_limits<double>::min();
            out.push_back(reliability_p({std::max(t1, tiny), std::max(t2, tiny), std::max(t3, tiny)}));
        }
    }
    return out;
}

std::vector<double> gibbs_chain(const PosteriorSummary& post, const ChainConfig& cfg) {
    Rng rng(mix64(cfg.seed));
    return gibbs_chain(post, cfg, rng);
}

std::pair<double, double> hpd_interval(std::vector<double> draws, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("HPD gamma must lie in (0, 1)");
    const double T = static_cast<double>(draws.size());
    // Guard the index arithmetic against representation error in gamma * T.
    const auto shifts = static_cast<std::size_t>(std::floor(gamma * T + 1e-9));
    const auto len = static_cast<std::size_t>(std::ceil((1.0 - gamma) * T - 1e-9));
    if (draws.empty() || shifts < 1 || len < 1) throw DomainError("too few draws for the HPD interval");
    std::sort(draws.begin(), draws.end());
    std::size_t best = 0;
    double best_len = draws[len - 1] - draws[0];
    for (std::size_t j = 1; j <= shifts; ++j) {
        const double l = draws[j + len - 1] - draws[j];
        if (l < best_len) {
            best_len = l;
            best = j;
        }
    }
    return {draws[best], draws[best + len - 1]};
}

} // namespace ordprob
