#pragma once

#include "ordprob/specfun.hpp"

namespace ordprob {

struct UmvueInput {
    int n1 = 2;
    int n2 = 2;
    int n3 = 2;
    double u = 1.0;
    double v = 1.0;
    double w = 1.0;

    void validate() const;
};

// Case table of the four-region closed form; ties resolve to the first
// listed region that matches.
enum class RegionTag { UleVleW, UleWleV, VMin, WMin };

RegionTag umvue_region(double u, double v, double w);
const char* region_name(RegionTag tag);

// Four-region closed form built from F1, 2F1 and terminating 3F2 sums.
double umvue_p(const UmvueInput& in, const specfun::EvalPolicy& policy = {});

// One branch of the closed form evaluated regardless of where (u, v, w)
// sits; used for continuity checks across region boundaries.
double umvue_branch(RegionTag tag, const UmvueInput& in, const specfun::EvalPolicy& policy = {});

// The V-minimum branch exactly as it is usually printed (with its 3F2 sum).
// Kept because it does NOT match the conditional-expectation oracle; the
// shipped branch is the two-term form used by umvue_branch(VMin, ...).
double umvue_vmin_branch_printed(const UmvueInput& in, const specfun::EvalPolicy& policy = {});

// P = phi1 - phi2 with phi1 = Pr(S < T | V, W) and phi2 = Pr(S < min(R, T) | U, V, W),
// each a terminating hypergeometric sum. Production default.
double umvue_p_decomposed(const UmvueInput& in, const specfun::EvalPolicy& policy = {});
double umvue_phi1(const UmvueInput& in, const specfun::EvalPolicy& policy = {});
double umvue_phi2(const UmvueInput& in, const specfun::EvalPolicy& policy = {});

// Direct quadrature of E[1{R < S < T} | U, V, W] with the conditional
// densities (n-1)(c - r)^(n-2) / c^(n-1): outer integral over s, the r and t
// marginals integrated numerically inside.
double umvue_oracle(const UmvueInput& in, double quad_tol = 1e-12);

} // namespace ordprob
