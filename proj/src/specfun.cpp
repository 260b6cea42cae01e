#include "ordprob/specfun.hpp"

#include "ordprob/detail/compensated_sum.hpp"
#include "ordprob/errors.hpp"
#include "ordprob/quadrature.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace ordprob::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// A terminating finite sum whose cancellation would eat more digits than the
// policy allows is handed to the Euler integral instead (positive integrand).
bool too_ill_conditioned(double condition, const EvalPolicy& p) {
    return condition * kEps > p.rel_tol;
}

std::optional<std::size_t> termination_order(const std::vector<double>& a) {
    std::optional<std::size_t> n;
    for (double ai : a) {
        if (is_nonpositive_integer(ai)) {
            const auto k = static_cast<std::size_t>(-ai);
            if (!n || k < *n) n = k;
        }
    }
    return n;
}

struct SeriesResult {
    double value;
    double condition;
};

SeriesResult pfq_sum(const std::vector<double>& a, const std::vector<double>& b, double x,
                     const EvalPolicy& policy) {
    if (x == 0.0) return {1.0, 1.0};
    const auto order = termination_order(a);

    if (order) {
        for (double bj : b) {
            if (is_nonpositive_integer(bj) && static_cast<std::size_t>(-bj) < *order)
                throw DomainError("pFq: denominator Pochhammer vanishes before the series terminates");
        }
        detail::CompensatedSum sum;
        double term = 1.0;
        for (std::size_t k = 0;; ++k) {
            sum.add(term);
            if (k == *order) break;
            const double kk = static_cast<double>(k);
            double ratio = x / (kk + 1.0);
            for (double ai : a) ratio *= ai + kk;
            for (double bj : b) ratio /= bj + kk;
            term *= ratio;
        }
        return {sum.value(), sum.condition()};
    }

    for (double bj : b) {
        if (is_nonpositive_integer(bj))
            throw DomainError("pFq: nonpositive integer denominator parameter");
    }
    const std::size_t p = a.size();
    const std::size_t q = b.size();
    if (p > q + 1) throw DomainError("pFq: p > q + 1 diverges for x != 0");
    if (p == q + 1 && std::abs(x) >= 1.0)
        throw DomainError("pFq: |x| >= 1 outside the convergent series domain");

    detail::CompensatedSum sum;
    double term = 1.0;
    const double limit_ratio = p == q + 1 ? std::abs(x) : 0.0;
    for (std::size_t k = 0; k < policy.max_terms; ++k) {
        sum.add(term);
        const double kk = static_cast<double>(k);
        double ratio = x / (kk + 1.0);
        for (double ai : a) ratio *= ai + kk;
        for (double bj : b) ratio /= bj + kk;
        const double next = term * ratio;
        const double r = std::max(std::abs(ratio), limit_ratio);
        // Geometric tail bound once the term ratio has dropped below one.
        if (r < 1.0 && k > 0) {
            const double tail = std::abs(next) / (1.0 - r);
            if (tail <= policy.rel_tol * std::abs(sum.value()) || next == 0.0)
                return {sum.value() + next, sum.condition()};
        }
        term = next;
        if (!std::isfinite(term)) throw NonConvergence("pFq: series terms overflowed");
    }
    throw NonConvergence("pFq: max_terms reached before tolerance");
}

double lgam(double x) { return boost::math::lgamma(x); }

// log(1 - x t) for the Euler kernels; x == 1 uses the exact 1 - t.
double log1m(double x, double t, double one_minus_t) {
    if (x == 1.0) return std::log(one_minus_t);
    return std::log1p(-x * t);
}

double gauss_2f1_euler(double a, double b, double c, double x, const EvalPolicy& policy) {
    // Symmetric in a, b: use whichever gives a proper beta kernel.
    if (!(b > 0.0 && c - b > 0.0)) std::swap(a, b);
    if (!(b > 0.0 && c - b > 0.0) || !(x < 1.0))
        throw DomainError("2F1 Euler integral needs b > 0, c - b > 0, x < 1");
    const double log_scale = lgam(c) - lgam(b) - lgam(c - b);
    return quad::beta_kernel(
        b, c - b,
        [&](double t, double omt) { return a == 0.0 ? 0.0 : -a * log1m(x, t, omt); },
        log_scale, policy.rel_tol, policy.quad_abs_tol);
}

bool euler_2f1_applicable(double a, double b, double c, double x) {
    return x < 1.0 && ((b > 0.0 && c - b > 0.0) || (a > 0.0 && c - a > 0.0));
}

// ---- Appell F1 -----------------------------------------------------------

struct F1Finite {
    double value;
    double condition;
};

// Both b and b' nonpositive integers: flat double sum over the full
// rectangle, every term accumulated into one compensated sum.
F1Finite f1_double_finite(const F1Args& g) {
    const auto nk = static_cast<std::size_t>(-g.b);
    const auto nl = static_cast<std::size_t>(-g.b_prime);
    if (is_nonpositive_integer(g.c) && static_cast<std::size_t>(-g.c) < nk + nl &&
        !is_nonpositive_integer(g.a))
        throw DomainError("F1: c is a nonpositive integer reached by the finite sum");
    detail::CompensatedSum sum;
    double row = 1.0; // term(k, 0)
    for (std::size_t k = 0; k <= nk; ++k) {
        double t = row;
        for (std::size_t l = 0; l <= nl; ++l) {
            sum.add(t);
            if (t == 0.0) break;
            const double s = static_cast<double>(k + l);
            const double ll = static_cast<double>(l);
            t *= (g.a + s) * (g.b_prime + ll) / ((g.c + s) * (ll + 1.0)) * g.y;
        }
        const double kk = static_cast<double>(k);
        row *= (g.a + kk) * (g.b + kk) / ((g.c + kk) * (kk + 1.0)) * g.x;
        if (row == 0.0 && (g.a + kk) == 0.0) break;
    }
    return {sum.value(), sum.condition()};
}

// One of b, b' terminating: finite outer sum of 2F1 values.
F1Finite f1_single_finite(F1Args g, const EvalPolicy& policy) {
    if (!is_nonpositive_integer(g.b)) {
        std::swap(g.b, g.b_prime);
        std::swap(g.x, g.y);
    }
    const auto nk = static_cast<std::size_t>(-g.b);
    detail::CompensatedSum sum;
    double coef = 1.0;
    for (std::size_t k = 0; k <= nk; ++k) {
        const double kk = static_cast<double>(k);
        if (coef != 0.0) sum.add(coef * gauss_2f1(g.a + kk, g.b_prime, g.c + kk, g.y, policy));
        coef *= (g.a + kk) * (g.b + kk) / ((g.c + kk) * (kk + 1.0)) * g.x;
    }
    return {sum.value(), sum.condition()};
}

bool f1_finite_applicable(const F1Args& g) {
    return is_nonpositive_integer(g.b) || is_nonpositive_integer(g.b_prime);
}

bool f1_euler_applicable(const F1Args& g) {
    if (!(g.a > 0.0 && g.c - g.a > 0.0)) return false;
    if (!(g.x <= 1.0 && g.y <= 1.0)) return false;
    double beta = g.c - g.a;
    if (g.x == 1.0) beta -= g.b;
    if (g.y == 1.0) beta -= g.b_prime;
    return beta > 0.0;
}

double f1_euler(const F1Args& g, const EvalPolicy& policy) {
    if (!f1_euler_applicable(g))
        throw DomainError("F1 Euler integral needs a > 0, c - a > 0, x, y < 1");
    double beta = g.c - g.a;
    // A unit argument folds its factor (1 - t)^(-b) into the beta kernel.
    const bool fold_x = g.x == 1.0;
    const bool fold_y = g.y == 1.0;
    if (fold_x) beta -= g.b;
    if (fold_y) beta -= g.b_prime;
    const double log_scale = lgam(g.c) - lgam(g.a) - lgam(g.c - g.a);
    return quad::beta_kernel(
        g.a, beta,
        [&](double t, double omt) {
            double s = 0.0;
            if (!fold_x && g.b != 0.0) s -= g.b * log1m(g.x, t, omt);
            if (!fold_y && g.b_prime != 0.0) s -= g.b_prime * log1m(g.y, t, omt);
            return s;
        },
        log_scale, policy.rel_tol, policy.quad_abs_tol);
}

// Double series as sum_k (a)_k (b)_k / ((c)_k k!) x^k 2F1(a+k, b'; c+k; y).
double f1_series(const F1Args& g, const EvalPolicy& policy) {
    if (!(std::abs(g.x) < 1.0 && std::abs(g.y) < 1.0))
        throw DomainError("F1 double series needs max(|x|, |y|) < 1");
    if (is_nonpositive_integer(g.c)) throw DomainError("F1: c is a nonpositive integer");
    detail::CompensatedSum sum;
    double coef = 1.0;
    int small_run = 0;
    for (std::size_t k = 0; k < policy.max_terms; ++k) {
        const double kk = static_cast<double>(k);
        const double inner =
            coef == 0.0 ? 0.0 : gauss_2f1(g.a + kk, g.b_prime, g.c + kk, g.y, policy, Strategy::Series);
        const double term = coef * inner;
        sum.add(term);
        if (coef == 0.0) return sum.value();
        const double ratio = (g.a + kk) * (g.b + kk) / ((g.c + kk) * (kk + 1.0)) * g.x;
        coef *= ratio;
        if (std::abs(term) <= policy.rel_tol * std::abs(sum.value()) && std::abs(ratio) < 1.0) {
            if (++small_run >= 3) return sum.value();
        } else {
            small_run = 0;
        }
    }
    throw NonConvergence("F1 double series: max_terms reached");
}

double f1_without_transform(const F1Args& g, const EvalPolicy& policy) {
    if (f1_finite_applicable(g)) {
        const bool both = is_nonpositive_integer(g.b) && is_nonpositive_integer(g.b_prime);
        const F1Finite f = both ? f1_double_finite(g) : f1_single_finite(g, policy);
        if (!(both && too_ill_conditioned(f.condition, policy) && f1_euler_applicable(g)))
            return f.value;
    }
    if (f1_euler_applicable(g)) return f1_euler(g, policy);
    return f1_series(g, policy);
}

} // namespace

void EvalPolicy::validate() const {
    if (!(rel_tol > 0.0) || !(quad_abs_tol > 0.0) || max_terms < 1)
        throw DomainError("EvalPolicy: rel_tol, quad_abs_tol must be > 0 and max_terms >= 1");
}

bool is_nonpositive_integer(double p) { return p <= 0.0 && std::floor(p) == p; }

double pochhammer(double lambda, std::size_t k) {
    double r = 1.0;
    for (std::size_t j = 0; j < k; ++j) r *= lambda + static_cast<double>(j);
    return r;
}

SignedLog log_pochhammer(double lambda, std::size_t k) {
    SignedLog out;
    if (k == 0) return out;
    if (is_nonpositive_integer(lambda) && static_cast<double>(k) > -lambda) {
        out.log_abs = -std::numeric_limits<double>::infinity();
        out.sign = 0;
        return out;
    }
    std::size_t j = 0;
    // Negative factors one at a time, the positive remainder through lgamma.
    while (j < k && lambda + static_cast<double>(j) < 0.0) {
        const double f = lambda + static_cast<double>(j);
        out.log_abs += std::log(-f);
        out.sign = -out.sign;
        ++j;
    }
    if (j < k) {
        const double start = lambda + static_cast<double>(j);
        const std::size_t rest = k - j;
        if (rest <= 32) {
            for (std::size_t i = 0; i < rest; ++i) out.log_abs += std::log(start + static_cast<double>(i));
        } else {
            out.log_abs += lgam(start + static_cast<double>(rest)) - lgam(start);
        }
    }
    return out;
}

double generalized_pfq(const std::vector<double>& a, const std::vector<double>& b, double x,
                       const EvalPolicy& policy) {
    policy.validate();
    return pfq_sum(a, b, x, policy).value;
}

double gauss_2f1(double a, double b, double c, double x, const EvalPolicy& policy,
                 Strategy strategy) {
    policy.validate();
    const bool terminating = is_nonpositive_integer(a) || is_nonpositive_integer(b);
    switch (strategy) {
    case Strategy::FiniteSeries:
        if (!terminating) throw DomainError("2F1 finite series needs a or b a nonpositive integer");
        return pfq_sum({a, b}, {c}, x, policy).value;
    case Strategy::EulerIntegral:
        return gauss_2f1_euler(a, b, c, x, policy);
    case Strategy::Series:
        return pfq_sum({a, b}, {c}, x, policy).value;
    case Strategy::Auto:
        break;
    }

    if (x == 0.0) return 1.0;
    if (terminating) {
        const SeriesResult r = pfq_sum({a, b}, {c}, x, policy);
        if (!too_ill_conditioned(r.condition, policy) || !euler_2f1_applicable(a, b, c, x))
            return r.value;
        return gauss_2f1_euler(a, b, c, x, policy);
    }
    if (std::abs(x) < 0.75) return pfq_sum({a, b}, {c}, x, policy).value;
    if (euler_2f1_applicable(a, b, c, x)) return gauss_2f1_euler(a, b, c, x, policy);
    if (x < 0.0) {
        // Pfaff: 2F1(a,b;c;x) = (1-x)^(-a) 2F1(a, c-b; c; x/(x-1)).
        const double z = x / (x - 1.0);
        return std::exp(-a * std::log1p(-x)) * gauss_2f1(a, c - b, c, z, policy);
    }
    if (std::abs(x) < 1.0) return pfq_sum({a, b}, {c}, x, policy).value;
    throw DomainError("2F1: x >= 1 without a terminating series");
}

double hyper_3f2(double a1, double a2, double a3, double b1, double b2, double x,
                 const EvalPolicy& policy) {
    return generalized_pfq({a1, a2, a3}, {b1, b2}, x, policy);
}

double appell_f1(const F1Args& g, const EvalPolicy& policy, Strategy strategy) {
    policy.validate();
    switch (strategy) {
    case Strategy::FiniteSeries: {
        if (!f1_finite_applicable(g))
            throw DomainError("F1 finite series needs b or b' a nonpositive integer");
        const bool both = is_nonpositive_integer(g.b) && is_nonpositive_integer(g.b_prime);
        return both ? f1_double_finite(g).value : f1_single_finite(g, policy).value;
    }
    case Strategy::EulerIntegral:
        return f1_euler(g, policy);
    case Strategy::Series:
        return f1_series(g, policy);
    case Strategy::Auto:
        break;
    }

    if (g.x == 0.0 && g.y == 0.0) return 1.0;
    if (f1_finite_applicable(g) || f1_euler_applicable(g) ||
        (std::abs(g.x) < 1.0 && std::abs(g.y) < 1.0))
        return f1_without_transform(g, policy);

    if (!(g.x < 1.0 && g.y < 1.0))
        throw DomainError("F1: no evaluation strategy for x >= 1 or y >= 1");

    // Real x, y < 1 outside the unit polydisc: one of three transformation
    // identities lands both arguments in (-1, 1).
    const double x = g.x;
    const double y = g.y;
    F1Args h = g;
    double log_pref = 0.0;
    if (x < 0.5 && y < 0.5) {
        h.a = g.c - g.a;
        h.x = x / (x - 1.0);
        h.y = y / (y - 1.0);
        log_pref = -g.b * std::log1p(-x) - g.b_prime * std::log1p(-y);
    } else if (y < 0.5) {
        h.b_prime = g.c - g.b - g.b_prime;
        h.x = (x - y) / (1.0 - y);
        h.y = y / (y - 1.0);
        log_pref = -g.a * std::log1p(-y);
    } else {
        h.b = g.c - g.b - g.b_prime;
        h.x = x / (x - 1.0);
        h.y = (y - x) / (1.0 - x);
        log_pref = -g.a * std::log1p(-x);
    }
    if (!(std::abs(h.x) < 1.0 && std::abs(h.y) < 1.0) && !f1_finite_applicable(h) &&
        !f1_euler_applicable(h))
        throw DomainError("F1: transformed arguments still outside the unit polydisc");
    return std::exp(log_pref) * f1_without_transform(h, policy);
}

// ---- Lauricella F_D ------------------------------------------------------

namespace {

struct FdFinite {
    double value;
    double condition;
};

FdFinite fd_finite(const LauricellaArgs& g) {
    const std::size_t n = g.b.size();
    std::vector<std::size_t> order(n);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = static_cast<std::size_t>(-g.b[i]);
        total += order[i];
    }
    // ratio[s] = (a)_s / (c)_s
    std::vector<double> ratio(total + 1, 1.0);
    for (std::size_t s = 1; s <= total; ++s) {
        const double d = g.c + static_cast<double>(s - 1);
        if (d == 0.0) throw DomainError("F_D: c is a nonpositive integer reached by the finite sum");
        ratio[s] = ratio[s - 1] * (g.a + static_cast<double>(s - 1)) / d;
    }
    detail::CompensatedSum sum;
    // Depth-first walk over the multi-index box.
    auto walk = [&](auto&& self, std::size_t dim, std::size_t s, double partial) -> void {
        if (dim == n) {
            sum.add(partial * ratio[s]);
            return;
        }
        double t = partial;
        for (std::size_t m = 0; m <= order[dim]; ++m) {
            self(self, dim + 1, s + m, t);
            const double mm = static_cast<double>(m);
            t *= (g.b[dim] + mm) / (mm + 1.0) * g.x[dim];
            if (t == 0.0) break;
        }
    };
    walk(walk, 0, 0, 1.0);
    return {sum.value(), sum.condition()};
}

bool fd_euler_applicable(const LauricellaArgs& g) {
    if (!(g.a > 0.0 && g.c - g.a > 0.0)) return false;
    double beta = g.c - g.a;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        if (!(g.x[i] <= 1.0)) return false;
        if (g.x[i] == 1.0) beta -= g.b[i];
    }
    return beta > 0.0;
}

double fd_euler(const LauricellaArgs& g, const EvalPolicy& policy) {
    if (!fd_euler_applicable(g))
        throw DomainError("F_D Euler integral needs a > 0, c - a > 0, x_i < 1");
    double beta = g.c - g.a;
    for (std::size_t i = 0; i < g.x.size(); ++i)
        if (g.x[i] == 1.0) beta -= g.b[i];
    const double log_scale = lgam(g.c) - lgam(g.a) - lgam(g.c - g.a);
    return quad::beta_kernel(
        g.a, beta,
        [&](double t, double omt) {
            double s = 0.0;
            for (std::size_t i = 0; i < g.x.size(); ++i)
                if (g.x[i] != 1.0 && g.b[i] != 0.0) s -= g.b[i] * log1m(g.x[i], t, omt);
            return s;
        },
        log_scale, policy.rel_tol, policy.quad_abs_tol);
}

} // namespace

double lauricella_fd(const LauricellaArgs& g, const EvalPolicy& policy, Strategy strategy) {
    policy.validate();
    if (g.b.size() != g.x.size() || g.b.empty())
        throw DomainError("F_D: b and x must be nonempty and of equal length");
    const bool finite = std::all_of(g.b.begin(), g.b.end(), is_nonpositive_integer);
    switch (strategy) {
    case Strategy::FiniteSeries:
        if (!finite) throw DomainError("F_D finite sum needs every b_i a nonpositive integer");
        return fd_finite(g).value;
    case Strategy::EulerIntegral:
        return fd_euler(g, policy);
    case Strategy::Series:
        throw DomainError("F_D: only the finite sum and the Euler integral are provided");
    case Strategy::Auto:
        break;
    }
    if (std::all_of(g.x.begin(), g.x.end(), [](double v) { return v == 0.0; })) return 1.0;
    if (finite) {
        const FdFinite f = fd_finite(g);
        if (!too_ill_conditioned(f.condition, policy) || !fd_euler_applicable(g)) return f.value;
    }
    return fd_euler(g, policy);
}

} // namespace ordprob::specfun
