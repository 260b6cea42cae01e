#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ordprob/errors.hpp"
#include "ordprob/model.hpp"
#include "support.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

using namespace ordprob;

TEST_CASE("reliability_p at reference triples") {
    CHECK(std::abs(reliability_p({0.9, 0.09, 0.00005}) - 0.9085) < 5e-5);
    CHECK(std::abs(reliability_p({0.3, 0.09, 0.0005}) - 0.7640) < 5e-5);
    CHECK(std::abs(reliability_p({0.2, 0.09, 0.00005}) - 0.6892) < 5e-5);
    CHECK(std::abs(reliability_p({0.09, 0.09, 0.00005}) - 0.4996) < 5e-5);
    CHECK(std::abs(reliability_p({0.1, 0.02, 0.0005}) - 0.8096) < 5e-5);
}

TEST_CASE("reliability_pn") {
    SUBCASE("equal parameters give 1/n!") {
        for (std::size_t n = 2; n <= 7; ++n) {
            std::vector<double> th(n, 0.37);
            double fact = 1.0;
            for (std::size_t k = 2; k <= n; ++k) fact *= static_cast<double>(k);
            CHECK(reliability_pn(th) == doctest::Approx(1.0 / fact).epsilon(1e-14));
        }
    }
    SUBCASE("n = 3 agrees bit for bit with reliability_p") {
        auto g = testsupport::rng(21);
        for (int i = 0; i < 100; ++i) {
            const double t[3] = {testsupport::uniform(g, 0.01, 5), testsupport::uniform(g, 0.01, 5),
                                 testsupport::uniform(g, 0.01, 5)};
            CHECK(reliability_pn(t) == reliability_p({t[0], t[1], t[2]}));
        }
    }
    SUBCASE("n = 2 is theta1 / (theta1 + theta2)") {
        const double t[2] = {0.3, 1.1};
        CHECK(reliability_pn(t) == doctest::Approx(0.3 / 1.4));
    }
    SUBCASE("errors") {
        const double one[1] = {1.0};
        CHECK_THROWS_AS(reliability_pn(one), DomainError);
        const double bad[3] = {1.0, -1.0, 2.0};
        CHECK_THROWS_AS(reliability_pn(bad), DomainError);
        CHECK_THROWS_AS(reliability_p({0.0, 1.0, 1.0}), DomainError);
    }
}

TEST_CASE("permutations of the parameters partition the probability") {
    auto g = testsupport::rng(22);
    for (std::size_t n : {3u, 4u, 5u}) {
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> th(n);
            for (auto& t : th) t = std::exp(testsupport::uniform(g, -6.0, 3.0));
            std::vector<std::size_t> idx(n);
            std::iota(idx.begin(), idx.end(), 0);
            double total = 0.0;
            do {
                std::vector<double> perm(n);
                for (std::size_t i = 0; i < n; ++i) perm[i] = th[idx[i]];
                total += reliability_pn(perm);
            } while (std::next_permutation(idx.begin(), idx.end()));
            CAPTURE(n);
            CHECK(std::abs(total - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("reliability_p lies in (0, 1) and is monotone in theta1 and theta3") {
    auto g = testsupport::rng(23);
    for (int i = 0; i < 100; ++i) {
        const ParamTriple t{std::exp(testsupport::uniform(g, -5, 3)), std::exp(testsupport::uniform(g, -5, 3)),
                            std::exp(testsupport::uniform(g, -5, 3))};
        const double p = reliability_p(t);
        CHECK(p > 0.0);
        CHECK(p < 1.0);
        const double h = 1e-6;
        CHECK(reliability_p({t.theta1 * (1 + h), t.theta2, t.theta3}) > p);
        CHECK(reliability_p({t.theta1, t.theta2, t.theta3 * (1 + h)}) < p);
    }
}

TEST_CASE("transform families") {
    const auto k = parse_family("Kumaraswamy", 2.5);
    CHECK(k.kind == FamilyKind::Kumaraswamy);
    CHECK(k.transform(0.5) == doctest::Approx(-std::log1p(-std::pow(0.5, 2.5))));
    CHECK(k.inverse_transform(k.transform(0.37)) == doctest::Approx(0.37).epsilon(1e-14));
    CHECK_FALSE(k.in_support(1.0));
    CHECK_FALSE(k.in_support(0.0));
    CHECK_THROWS_AS(k.transform(1.0), DomainError);

    const auto e = parse_family("exponential", 7.0);
    CHECK(e.sigma == 1.0);
    CHECK(e.transform(3.5) == 3.5);
    CHECK(e.in_support(1e6));

    const auto w = parse_family("weibull", 1.6);
    CHECK(w.transform(2.0) == doctest::Approx(std::pow(2.0, 1.6)));
    CHECK(w.inverse_transform(w.transform(44.0)) == doctest::Approx(44.0));

    CHECK_THROWS_AS(parse_family("gamma", 1.0), DomainError);
    CHECK_THROWS_AS(parse_family("weibull", -1.0), DomainError);
    CHECK(family_name(FamilyKind::Weibull) == "weibull");
}

TEST_CASE("cdf is the exponential law of the transform") {
    const auto k = parse_family("kumaraswamy", 1.7);
    CHECK(cdf(k, 2.0, 0.4) == doctest::Approx(1.0 - std::pow(1.0 - std::pow(0.4, 1.7), 2.0)));
    const auto w = parse_family("weibull", 1.5);
    CHECK(cdf(w, 0.01, 10.0) == doctest::Approx(1.0 - std::exp(-0.01 * std::pow(10.0, 1.5))));
    CHECK_THROWS_AS(cdf(k, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(cdf(k, 0.0, 0.5), DomainError);
}

TEST_CASE("sampled transforms have mean 1/theta") {
    Rng rng = make_stream(5, 0);
    for (const char* fam : {"kumaraswamy", "exponential", "weibull"}) {
        const auto f = parse_family(fam, 1.8);
        const double theta = 2.5;
        const auto xs = sample(f, theta, 100000, rng);
        double m = 0.0;
        for (double x : xs) m += f.transform(x);
        m /= static_cast<double>(xs.size());
        CAPTURE(fam);
        CHECK(std::abs(m * theta - 1.0) < 0.01);
    }
}

TEST_CASE("simulated ordering frequency matches reliability_p") {
    const auto f = parse_family("kumaraswamy", 1.3);
    const ParamTriple t{2.0, 0.8, 0.3};
    Rng rng = make_stream(6, 0);
    const int n = 100000;
    const auto x = sample(f, t.theta1, n, rng);
    const auto y = sample(f, t.theta2, n, rng);
    const auto z = sample(f, t.theta3, n, rng);
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += (x[i] < y[i] && y[i] < z[i]) ? 1 : 0;
    const double p = reliability_p(t);
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(hits / double(n) - p) < 3 * se);
}

TEST_CASE("suff_stats sums transforms and reports bad rows") {
    const auto k = parse_family("kumaraswamy", 2.0);
    SampleSet s{{0.1, 0.5}, {0.3}, {0.9, 0.2, 0.4}};
    const auto st = suff_stats(s, k);
    CHECK(st.n1 == 2);
    CHECK(st.n2 == 1);
    CHECK(st.n3 == 3);
    CHECK(st.u == doctest::Approx(k.transform(0.1) + k.transform(0.5)));
    s.z[1] = 1.0;
    try {
        suff_stats(s, k);
        FAIL("expected a DomainError");
    } catch (const DomainError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("'z'") != std::string::npos);
        CHECK(msg.find("row 2") != std::string::npos);
    }
    s.z.clear();
    CHECK_THROWS_AS(suff_stats(s, k), DomainError);
}

TEST_CASE("streams are reproducible and distinct") {
    Rng a = make_stream(42, 3), b = make_stream(42, 3), c = make_stream(42, 4);
    const auto va = a(), vb = b(), vc = c();
    CHECK(va == vb);
    CHECK(va != vc);
    for (int i = 0; i < 1000; ++i) {
        const double u = uniform_open(a);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}
