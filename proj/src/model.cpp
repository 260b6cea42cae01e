#include "ordprob/model.hpp"

#include "ordprob/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace ordprob {

void TransformFamily::validate() const {
    if (kind != FamilyKind::Exponential && !(sigma > 0.0 && std::isfinite(sigma)))
        throw DomainError("transform parameter sigma must be positive and finite");
}

bool TransformFamily::in_support(double s) const {
    if (!std::isfinite(s) || s <= 0.0) return false;
    return kind != FamilyKind::Kumaraswamy || s < 1.0;
}

double TransformFamily::transform(double s) const {
    if (!in_support(s)) throw DomainError("observation " + std::to_string(s) + " outside the open support");
    switch (kind) {
    case FamilyKind::Kumaraswamy:
        return -std::log1p(-std::pow(s, sigma));
    case FamilyKind::Exponential:
        return s;
    case FamilyKind::Weibull:
        return std::pow(s, sigma);
    }
    return 0.0;
}

double TransformFamily::inverse_transform(double t) const {
    if (!(t >= 0.0)) throw DomainError("inverse transform of a negative value");
    switch (kind) {
    case FamilyKind::Kumaraswamy:
        return std::pow(-std::expm1(-t), 1.0 / sigma);
    case FamilyKind::Exponential:
        return t;
    case FamilyKind::Weibull:
        return std::pow(t, 1.0 / sigma);
    }
    return 0.0;
}

TransformFamily parse_family(const std::string& name, double sigma) {
    std::string n = name;
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
    TransformFamily f;
    if (n == "kumaraswamy") f.kind = FamilyKind::Kumaraswamy;
    else if (n == "exponential") f.kind = FamilyKind::Exponential;
    else if (n == "weibull") f.kind = FamilyKind::Weibull;
    else throw DomainError("unknown family '" + name + "'");
    f.sigma = f.kind == FamilyKind::Exponential ? 1.0 : sigma;
    f.validate();
    return f;
}

std::string family_name(FamilyKind kind) {
    switch (kind) {
    case FamilyKind::Kumaraswamy: return "kumaraswamy";
    case FamilyKind::Exponential: return "exponential";
    case FamilyKind::Weibull: return "weibull";
    }
    return "?";
}

void ParamTriple::validate() const {
    if (!(theta1 > 0.0 && theta2 > 0.0 && theta3 > 0.0) ||
        !std::isfinite(theta1 + theta2 + theta3))
        throw DomainError("parameters must be positive and finite");
}

double cdf(const TransformFamily& family, double theta, double s) {
    if (!(theta > 0.0)) throw DomainError("cdf: theta must be positive");
    if (s <= 0.0) throw DomainError("cdf: s below the support");
    if (family.kind == FamilyKind::Kumaraswamy && s >= 1.0)
        throw DomainError("cdf: s above the Kumaraswamy support");
    return -std::expm1(-theta * family.transform(s));
}

std::vector<double> sample(const TransformFamily& family, double theta, std::size_t n, Rng& rng) {
    if (!(theta > 0.0)) throw DomainError("sample: theta must be positive");
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = uniform_open(rng);
        out.push_back(family.inverse_transform(-std::log1p(-u) / theta));
    }
    return out;
}

namespace {

double sum_transform(const std::vector<double>& data, const TransformFamily& family, const char* label) {
    if (data.empty()) throw DomainError(std::string("sample '") + label + "' is empty");
    double s = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!family.in_support(data[i]))
            throw DomainError(std::string("sample '") + label + "' row " + std::to_string(i + 1) +
                              ": value " + std::to_string(data[i]) + " outside the open support");
        s += family.transform(data[i]);
    }
    if (!(s > 0.0) || !std::isfinite(s))
        throw DomainError(std::string("sample '") + label + "' has a degenerate transform sum");
    return s;
}

} // namespace

SufficientStats suff_stats(const SampleSet& samples, const TransformFamily& family) {
    family.validate();
    SufficientStats st;
    st.u = sum_transform(samples.x, family, "x");
    st.v = sum_transform(samples.y, family, "y");
    st.w = sum_transform(samples.z, family, "z");
    st.n1 = static_cast<int>(samples.x.size());
    st.n2 = static_cast<int>(samples.y.size());
    st.n3 = static_cast<int>(samples.z.size());
    return st;
}

double reliability_p(const ParamTriple& t) {
    t.validate();
    // Shares the product form with reliability_pn so n = 3 agrees bit for bit.
    const double th[3] = {t.theta1, t.theta2, t.theta3};
    return reliability_pn(th);
}

double reliability_pn(std::span<const double> theta) {
    if (theta.size() < 2) throw DomainError("reliability_pn needs at least two parameters");
    for (double t : theta)
        if (!(t > 0.0)) throw DomainError("reliability_pn: parameters must be positive");
    // tail[i] = theta_i + ... + theta_n, accumulated from the right.
    const std::size_t n = theta.size();
    std::vector<double> tail(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) tail[i] = tail[i + 1] + theta[i];
    double p = 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) p *= theta[i] / tail[i];
    return p;
}

} // namespace ordprob
