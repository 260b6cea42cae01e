#include "ordprob/quadrature.hpp"

#include "ordprob/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdio>
#include <queue>
#include <string>

namespace ordprob::quad {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 21>;

struct Panel {
    double a, b, value, error, l1;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel rule(const std::function<double(double)>& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double err = 0.0, l1 = 0.0;
    // Non-adaptive call on the reference interval; error and L1 come back in
    // reference units and are rescaled here.
    const double v = GK::integrate([&](double x) { return f(mid + half * x); }, -1.0, 1.0, 0, 0.0, &err, &l1);
    return {a, b, half * v, std::abs(half) * err, std::abs(half) * l1};
}

// Global adaptive bisection: always split the panel with the largest error.
Result adapt(const std::function<double(double)>& f, double a, double b, double rel_tol, double abs_tol,
             unsigned max_depth, double& l1_out) {
    std::priority_queue<Panel> heap;
    Panel first = rule(f, a, b);
    double value = first.value, error = first.error, l1 = first.l1;
    heap.push(first);
    const std::size_t max_panels = std::size_t{1} << std::min(max_depth, 14u);
    const double min_width = std::abs(b - a) * std::ldexp(1.0, -static_cast<int>(max_depth) - 20);
    while (error > std::max(rel_tol * l1, abs_tol) && heap.size() < max_panels) {
        Panel p = heap.top();
        if (std::abs(p.b - p.a) < min_width) break;
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        const Panel lo = rule(f, p.a, m);
        const Panel hi = rule(f, m, p.b);
        value += lo.value + hi.value - p.value;
        error += lo.error + hi.error - p.error;
        l1 += lo.l1 + hi.l1 - p.l1;
        heap.push(lo);
        heap.push(hi);
    }
    // Re-sum the panels to shed the drift from incremental updates.
    value = error = l1 = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        l1 += heap.top().l1;
        heap.pop();
    }
    l1_out = l1;
    return {value, error};
}

} // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol, unsigned max_depth) {
    Result r;
    if (a == b) return r;
    if (a > b) {
        r = integrate(f, b, a, rel_tol, abs_tol, max_depth);
        r.value = -r.value;
        return r;
    }
    double l1 = 0.0;
    if (std::isinf(a) && std::isinf(b)) {
        r = adapt([&](double t) {
            const double x = t / (1.0 - t * t);
            const double d = (1.0 + t * t) / ((1.0 - t * t) * (1.0 - t * t));
            return std::abs(t) >= 1.0 ? 0.0 : f(x) * d;
        }, -1.0, 1.0, rel_tol, abs_tol, max_depth, l1);
    } else if (std::isinf(b)) {
        r = adapt([&](double t) {
            return t >= 1.0 ? 0.0 : f(a + t / (1.0 - t)) / ((1.0 - t) * (1.0 - t));
        }, 0.0, 1.0, rel_tol, abs_tol, max_depth, l1);
    } else if (std::isinf(a)) {
        r = adapt([&](double t) {
            return t >= 1.0 ? 0.0 : f(b - t / (1.0 - t)) / ((1.0 - t) * (1.0 - t));
        }, 0.0, 1.0, rel_tol, abs_tol, max_depth, l1);
    } else {
        r = adapt(f, a, b, rel_tol, abs_tol, max_depth, l1);
    }
    if (!std::isfinite(r.value))
        throw NonConvergence("quadrature produced a non-finite value");
    const double target = std::max(rel_tol * l1, abs_tol);
    if (r.error > 100.0 * target) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "quadrature on [%.6g, %.6g]: error estimate %.3e exceeds tolerance %.3e",
                      a, b, r.error, target);
        throw NonConvergence(msg);
    }
    return r;
}

double beta_kernel(double alpha, double beta,
                   const std::function<double(double, double)>& log_g,
                   double log_scale, double rel_tol, double abs_tol) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw DomainError("beta_kernel needs positive exponents");

    // Left half, t in [0, 1/2].
    std::function<double(double)> left;
    double left_hi;
    if (alpha < 1.0) {
        left_hi = std::pow(0.5, alpha);
        left = [&](double tau) {
            const double t = std::pow(tau, 1.0 / alpha);
            return std::exp(log_scale + (beta - 1.0) * std::log1p(-t) + log_g(t, 1.0 - t)) / alpha;
        };
    } else {
        left_hi = 0.5;
        left = [&](double t) {
            if (t <= 0.0) return alpha == 1.0 ? std::exp(log_scale + log_g(0.0, 1.0)) : 0.0;
            return std::exp(log_scale + (alpha - 1.0) * std::log(t) +
                            (beta - 1.0) * std::log1p(-t) + log_g(t, 1.0 - t));
        };
    }

    // Right half in the reflected variable s = 1 - t, s in [0, 1/2].
    std::function<double(double)> right;
    double right_hi;
    if (beta < 1.0) {
        right_hi = std::pow(0.5, beta);
        right = [&](double tau) {
            const double s = std::pow(tau, 1.0 / beta);
            return std::exp(log_scale + (alpha - 1.0) * std::log1p(-s) + log_g(1.0 - s, s)) / beta;
        };
    } else {
        right_hi = 0.5;
        right = [&](double s) {
            if (s <= 0.0) return beta == 1.0 ? std::exp(log_scale + log_g(1.0, 0.0)) : 0.0;
            return std::exp(log_scale + (alpha - 1.0) * std::log1p(-s) +
                            (beta - 1.0) * std::log(s) + log_g(1.0 - s, s));
        };
    }

    const double half_abs = 0.5 * abs_tol;
    return integrate(left, 0.0, left_hi, rel_tol, half_abs).value +
           integrate(right, 0.0, right_hi, rel_tol, half_abs).value;
}

} // namespace ordprob::quad
