#include "ordprob/umvue.hpp"

#include "ordprob/detail/compensated_sum.hpp"
#include "ordprob/errors.hpp"
#include "ordprob/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace ordprob {

using specfun::appell_f1;
using specfun::EvalPolicy;
using specfun::F1Args;
using specfun::gauss_2f1;

void UmvueInput::validate() const {
    if (n1 < 2 || n2 < 2 || n3 < 2) throw DomainError("UMVUE needs n1, n2, n3 > 1");
    if (!(u > 0.0 && v > 0.0 && w > 0.0) || !std::isfinite(u + v + w))
        throw DomainError("UMVUE needs positive finite statistics u, v, w");
}

RegionTag umvue_region(double u, double v, double w) {
    if (u <= v && v <= w) return RegionTag::UleVleW;
    if (u <= w && w <= v) return RegionTag::UleWleV;
    if (v <= std::min(u, w)) return RegionTag::VMin;
    return RegionTag::WMin;
}

const char* region_name(RegionTag tag) {
    switch (tag) {
    case RegionTag::UleVleW: return "u<=v<=w";
    case RegionTag::UleWleV: return "u<=w<=v";
    case RegionTag::VMin: return "v<=min(u,w)";
    case RegionTag::WMin: return "w<=min(u,v)";
    }
    return "?";
}

namespace {

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// d^p * 3F2(1, 2-n1, c; e, 2; z) where z * d is finite but z alone may be
// huge (near ties). The 3F2 terminates at k = n1 - 2 = p, so every term
// carries a nonnegative power of d after redistribution.
double scaled_3f2(int n1, double c, double e, double z, double d) {
    const int p = n1 - 2;
    const double zd = z * d;
    detail::CompensatedSum sum;
    double coef = 1.0;  // (1)_k (2-n1)_k (c)_k / ((e)_k (2)_k k!)
    for (int k = 0; k <= p; ++k) {
        sum.add(coef * std::pow(zd, k) * std::pow(d, p - k));
        const double kk = k;
        coef *= (1.0 + kk) * (2.0 - n1 + kk) * (c + kk) / ((e + kk) * (2.0 + kk) * (kk + 1.0));
    }
    return sum.value();
}

// Shared head of the U-minimum branches.
double u_min_head(const UmvueInput& in, const EvalPolicy& pol) {
    const double x = in.u / in.v;
    const double y = in.u / in.w;
    const double t1 = (in.n3 - 1.0) / in.n1 * y *
                      appell_f1(F1Args{1.0, 1.0 - in.n2, 2.0 - in.n3, in.n1 + 1.0, x, y}, pol);
    const double t2 = appell_f1(F1Args{1.0, 1.0 - in.n2, 1.0 - in.n3, static_cast<double>(in.n1), x, y}, pol);
    return t1 + t2;
}

double branch_u_v_w(const UmvueInput& in, const EvalPolicy& pol) {
    return u_min_head(in, pol) -
           (in.n3 - 1.0) / in.n2 * (in.v / in.w) * gauss_2f1(2.0 - in.n3, 1.0, in.n2 + 1.0, in.v / in.w, pol);
}

double branch_u_w_v(const UmvueInput& in, const EvalPolicy& pol) {
    return u_min_head(in, pol) - gauss_2f1(1.0 - in.n2, 1.0, in.n3, in.w / in.v, pol);
}

// V minimum: Pr(S < T) - Pr(S < min(R, T)), both terminating.
double branch_v_min(const UmvueInput& in, const EvalPolicy& pol) {
    return gauss_2f1(1.0 - in.n3, 1.0, in.n2, in.v / in.w, pol) -
           appell_f1(F1Args{1.0, 1.0 - in.n1, 1.0 - in.n3, static_cast<double>(in.n2), in.v / in.u, in.v / in.w}, pol);
}

double branch_w_min(const UmvueInput& in, const EvalPolicy& pol) {
    const double d = (in.u - in.w) / in.u;
    const double head = (in.n1 - 1.0) / in.n3 * (in.w / in.u) *
                        appell_f1(F1Args{1.0, 2.0 - in.n1, 1.0 - in.n2, in.n3 + 1.0, in.w / in.u, in.w / in.v}, pol);
    const double mid = (1.0 - std::pow(d, in.n1 - 1)) * gauss_2f1(1.0 - in.n2, 1.0, in.n3, in.w / in.v, pol);
    const double z = in.w / (in.w - in.u);
    detail::CompensatedSum tail;
    for (int a = 0; a <= in.n2 - 1; ++a) {
        const double coef = (in.n1 - 1.0) * (in.n3 - 1.0) / in.n3 * (in.w / in.u) *
                            std::pow(in.w / in.v, a) * binom(in.n2 - 1, a) / binom(in.n3 + a, a);
        const double sign = (a % 2 == 0) ? 1.0 : -1.0;
        tail.add(sign * coef * scaled_3f2(in.n1, in.n3, in.n3 + a + 1.0, z, d));
    }
    return head - mid + tail.value();
}

} // namespace

double umvue_branch(RegionTag tag, const UmvueInput& in, const EvalPolicy& pol) {
    in.validate();
    switch (tag) {
    case RegionTag::UleVleW: return branch_u_v_w(in, pol);
    case RegionTag::UleWleV: return branch_u_w_v(in, pol);
    case RegionTag::VMin: return branch_v_min(in, pol);
    case RegionTag::WMin:
        if (in.w == in.u) throw DomainError("W-minimum branch is singular at w = u");
        return branch_w_min(in, pol);
    }
    return 0.0;
}

double umvue_p(const UmvueInput& in, const EvalPolicy& pol) {
    in.validate();
    return umvue_branch(umvue_region(in.u, in.v, in.w), in, pol);
}

double umvue_vmin_branch_printed(const UmvueInput& in, const EvalPolicy& pol) {
    in.validate();
    if (in.v == in.u) throw DomainError("printed V-minimum branch is singular at v = u");
    const double d = (in.u - in.v) / in.u;
    const double r = in.v / in.w;
    const double head = (in.n1 - 1.0) / in.n2 * (in.v / in.u) *
                        appell_f1(F1Args{1.0, 2.0 - in.n1, 1.0 - in.n3, in.n2 + 1.0, in.v / in.u, r}, pol);
    const double mid = (1.0 - std::pow(d, in.n1 - 1)) * r * ((in.n3 - 1.0) / in.n2) *
                       gauss_2f1(2.0 - in.n3, 1.0, in.n3 + 1.0, r, pol);
    const double z = in.v / (in.v - in.u);
    detail::CompensatedSum tail;
    for (int a = 0; a <= in.n2 - 1; ++a) {
        const double coef = (in.n1 - 1.0) * (in.n3 - 1.0) / (in.n2 + 1.0) * r * std::pow(r, a + 1) *
                            binom(in.n3 - 2, a) / binom(in.n2 + a + 1, a);
        const double sign = (a % 2 == 0) ? 1.0 : -1.0;
        tail.add(sign * coef * scaled_3f2(in.n1, in.n2 + 1.0, in.n2 + a + 2.0, z, d));
    }
    return head - mid + tail.value();
}

double umvue_phi1(const UmvueInput& in, const EvalPolicy& pol) {
    in.validate();
    if (in.v <= in.w) return gauss_2f1(1.0 - in.n3, 1.0, in.n2, in.v / in.w, pol);
    return 1.0 - gauss_2f1(1.0 - in.n2, 1.0, in.n3, in.w / in.v, pol);
}

double umvue_phi2(const UmvueInput& in, const EvalPolicy& pol) {
    in.validate();
    const double m = std::min({in.u, in.v, in.w});
    if (in.u == m)
        return (in.n2 - 1.0) / in.n1 * (in.u / in.v) *
               appell_f1(F1Args{1.0, 1.0 - in.n3, 2.0 - in.n2, in.n1 + 1.0, in.u / in.w, in.u / in.v}, pol);
    if (in.v == m)
        return appell_f1(F1Args{1.0, 1.0 - in.n1, 1.0 - in.n3, static_cast<double>(in.n2), in.v / in.u, in.v / in.w}, pol);
    return (in.n2 - 1.0) / in.n3 * (in.w / in.v) *
           appell_f1(F1Args{1.0, 1.0 - in.n1, 2.0 - in.n2, in.n3 + 1.0, in.w / in.u, in.w / in.v}, pol);
}

double umvue_p_decomposed(const UmvueInput& in, const EvalPolicy& pol) {
    return umvue_phi1(in, pol) - umvue_phi2(in, pol);
}

double umvue_oracle(const UmvueInput& in, double quad_tol) {
    in.validate();
    const double rel = 1e-13;
    // Conditional density of one summand given its total c, sample size n.
    auto dens = [](int n, double c, double r) {
        return (n - 1.0) / c * std::pow(std::max(0.0, 1.0 - r / c), n - 2);
    };
    auto inner = [&](double s) {
        const double r_hi = std::min(s, in.u);
        const double pr = quad::integrate([&](double r) { return dens(in.n1, in.u, r); }, 0.0, r_hi, rel,
                                          0.1 * quad_tol).value;
        const double pt = quad::integrate([&](double t) { return dens(in.n3, in.w, t); }, s, in.w, rel,
                                          0.1 * quad_tol).value;
        return dens(in.n2, in.v, s) * pr * pt;
    };
    const double top = std::min(in.v, in.w);
    // The R-marginal has a kink at s = u.
    if (in.u < top)
        return quad::integrate(inner, 0.0, in.u, rel, 0.5 * quad_tol).value +
               quad::integrate(inner, in.u, top, rel, 0.5 * quad_tol).value;
    return quad::integrate(inner, 0.0, top, rel, quad_tol).value;
}

} // namespace ordprob
