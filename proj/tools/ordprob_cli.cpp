// Command-line front end: eval-fn, estimate, simulate, fit.
//
// Exit codes: 0 success, 2 input error, 3 numerical failure.

#include "ordprob/app.hpp"
#include "ordprob/errors.hpp"
#include "ordprob/simlab.hpp"
#include "ordprob/specfun.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace ordprob;
using nlohmann::json;

namespace {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string family = "weibull";
    std::optional<double> sigma;
    std::vector<double> prior_a, prior_b;
    bool jeffreys = false;
    double gamma = 0.05;
    int chain_iters = ChainConfig{}.iterations;
    int burn_in = ChainConfig{}.burn_in;
    int thin = ChainConfig{}.thin;
    std::uint64_t seed = ChainConfig{}.seed;
    std::string out;
    std::string format = "table";
    int digits = 6;
};

void add_common(CLI::App* sub, Common& c, bool with_prior = true) {
    sub->add_option("--family", c.family, "kumaraswamy, exponential or weibull")
        ->check(CLI::IsMember({"kumaraswamy", "exponential", "weibull"}));
    sub->add_option("--sigma", c.sigma, "transform parameter; fitted from the data when omitted");
    if (with_prior) {
        sub->add_option("--prior-a", c.prior_a, "gamma prior rates a1,a2,a3")->delimiter(',')->expected(3);
        sub->add_option("--prior-b", c.prior_b, "gamma prior shapes b1,b2,b3")->delimiter(',')->expected(3);
        sub->add_flag("--jeffreys", c.jeffreys, "use the Jeffreys prior");
    }
    sub->add_option("--gamma", c.gamma, "1 - interval content")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--chain-iters", c.chain_iters, "Gibbs iterations");
    sub->add_option("--burn-in", c.burn_in, "discarded leading draws");
    sub->add_option("--thin", c.thin, "keep every k-th draw");
    sub->add_option("--seed", c.seed, "RNG seed");
    sub->add_option("--out", c.out, "write output here instead of stdout");
    sub->add_option("--format", c.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
    sub->add_option("--digits", c.digits, "significant digits in table and csv output")->check(CLI::Range(1, 17));
}

std::string num(double x, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

PriorSpec prior_from(const Common& c, const PriorSpec& fallback) {
    const bool given = !c.prior_a.empty() || !c.prior_b.empty();
    if (c.jeffreys && given) throw InputError("--jeffreys conflicts with --prior-a/--prior-b");
    if (c.jeffreys) return PriorSpec::jeffreys();
    if (!given) return fallback;
    if (c.prior_a.size() != 3 || c.prior_b.size() != 3)
        throw InputError("--prior-a and --prior-b must both be given with three values");
    PriorSpec p{c.prior_a[0], c.prior_a[1], c.prior_a[2], c.prior_b[0], c.prior_b[1], c.prior_b[2]};
    p.validate();
    return p;
}

ChainConfig chain_from(const Common& c) {
    ChainConfig ch{c.chain_iters, c.burn_in, c.thin, c.seed};
    ch.validate();
    return ch;
}

json prior_json(const PriorSpec& p) {
    return {{"a", {p.a1, p.a2, p.a3}}, {"b", {p.b1, p.b2, p.b3}}};
}

void emit(const Common& c, const std::string& text, const std::string& command, const json& config) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    app::RunManifest m = app::make_manifest(command, config.dump(), c.seed);
    std::ofstream f(c.out);
    if (!f) throw InputError("cannot write '" + c.out + "'");
    f << text;
    m.finished_utc = app::utc_now();
    std::ofstream mf(c.out + ".manifest.json");
    if (!mf) throw InputError("cannot write '" + c.out + ".manifest.json'");
    mf << app::manifest_json(m) << '\n';
}

// ---- eval-fn -------------------------------------------------------------

struct EvalFnArgs {
    std::string name;
    std::vector<double> args, bvec, xvec;
    std::string strategy = "auto";
    double rel_tol = specfun::EvalPolicy{}.rel_tol;
    std::size_t max_terms = specfun::EvalPolicy{}.max_terms;
    int digits = 17;
};

int run_eval_fn(const EvalFnArgs& a) {
    using namespace specfun;
    EvalPolicy pol;
    pol.rel_tol = a.rel_tol;
    pol.max_terms = a.max_terms;
    pol.validate();
    const Strategy s = a.strategy == "finite"   ? Strategy::FiniteSeries
                       : a.strategy == "euler"  ? Strategy::EulerIntegral
                       : a.strategy == "series" ? Strategy::Series
                                                : Strategy::Auto;
    auto need = [&](std::size_t n) {
        if (a.args.size() != n)
            throw InputError(a.name + " takes " + std::to_string(n) + " values in --args, got " +
                             std::to_string(a.args.size()));
    };
    const auto& v = a.args;
    double r = 0.0;
    if (a.name == "2f1") {
        need(4);
        r = gauss_2f1(v[0], v[1], v[2], v[3], pol, s);
    } else if (a.name == "3f2") {
        need(6);
        r = hyper_3f2(v[0], v[1], v[2], v[3], v[4], v[5], pol);
    } else if (a.name == "f1") {
        need(6);
        r = appell_f1({v[0], v[1], v[2], v[3], v[4], v[5]}, pol, s);
    } else if (a.name == "fd") {
        need(2);
        if (a.bvec.size() != a.xvec.size() || a.bvec.empty())
            throw InputError("fd needs --b and --x lists of equal nonzero length");
        r = lauricella_fd({v[0], a.bvec, v[1], a.xvec}, pol, s);
    } else if (a.name == "pfq") {
        need(1);
        r = generalized_pfq(a.bvec, a.xvec, v[0], pol);
    } else if (a.name == "pochhammer") {
        need(2);
        if (v[1] < 0 || v[1] != static_cast<double>(static_cast<std::size_t>(v[1])))
            throw InputError("pochhammer order must be a nonnegative integer");
        r = pochhammer(v[0], static_cast<std::size_t>(v[1]));
    } else {
        throw InputError("unknown function '" + a.name + "'");
    }
    std::cout << num(r, a.digits) << '\n';
    return 0;
}

// ---- estimate ------------------------------------------------------------

SampleSet load(const std::string& input) {
    return input.empty() ? app::fatigue_data() : app::read_samples_csv_file(input);
}

int run_estimate(const Common& c, const std::string& input) {
    app::EstimateConfig cfg;
    cfg.family = parse_family(c.family, c.sigma.value_or(1.0));
    cfg.fit_shape = !c.sigma.has_value();
    cfg.prior = prior_from(c, PriorSpec::jeffreys());
    cfg.gamma = c.gamma;
    cfg.chain = chain_from(c);
    const SampleSet data = load(input);
    const app::EstimateReport r = app::estimate(data, cfg);

    const json config = {{"input", input.empty() ? "bundled:fatigue" : input},
                         {"family", c.family},
                         {"sigma", c.sigma ? json(*c.sigma) : json(nullptr)},
                         {"prior", prior_json(cfg.prior)},
                         {"gamma", cfg.gamma},
                         {"chain", {{"iterations", cfg.chain.iterations}, {"burn_in", cfg.chain.burn_in},
                                    {"thin", cfg.chain.thin}, {"seed", cfg.chain.seed}}}};

    std::vector<std::pair<std::string, double>> rows = {
        {"sigma", r.family.sigma},      {"u", r.stats.u},
        {"v", r.stats.v},               {"w", r.stats.w},
        {"theta1_hat", r.mle.theta_hat.theta1}, {"theta2_hat", r.mle.theta_hat.theta2},
        {"theta3_hat", r.mle.theta_hat.theta3}, {"p_umvue", r.umvue},
        {"p_mle", r.mle.p_hat},         {"p_bayes", r.bayes},
        {"p_jeffreys_bayes", r.jeffreys_bayes}, {"p_lindley", r.lindley},
        {"p_mcmc", r.mcmc},             {"ac_lower", r.ac.lower},
        {"ac_upper", r.ac.upper},       {"hpd_lower", r.hpd.first},
        {"hpd_upper", r.hpd.second}};
    if (r.fit)
        for (const auto& d : r.fit->datasets) {
            rows.push_back({"scale_" + d.label, d.scale});
            rows.push_back({"ks_" + d.label, d.ks_statistic});
        }

    std::ostringstream os;
    if (c.format == "json") {
        json j = config;
        json est = json::object();
        for (const auto& [k, v] : rows) est[k] = v;
        j["estimates"] = est;
        j["ac_clamped"] = r.ac.clamped;
        os << j.dump(2) << '\n';
    } else if (c.format == "csv") {
        os << "quantity,value\n";
        for (const auto& [k, v] : rows) os << k << ',' << num(v, c.digits) << '\n';
    } else {
        os << "family " << c.family << ", " << (cfg.prior.is_jeffreys() ? "Jeffreys prior" : "gamma prior")
           << ", gamma " << num(cfg.gamma, c.digits) << '\n';
        for (const auto& [k, v] : rows) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "  %-18s %s\n", k.c_str(), num(v, c.digits).c_str());
            os << buf;
        }
    }
    emit(c, os.str(), "estimate", config);
    return 0;
}

// ---- simulate ------------------------------------------------------------

struct SimArgs {
    std::vector<std::string> thetas{"0.9,0.09,0.00005"};
    std::vector<int> sizes{10};
    int replications = 1000;
    unsigned workers = 1;
    std::vector<std::string> estimators;
};

ParamTriple parse_triple(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            v.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw InputError("--theta '" + s + "' is not a list of numbers");
        }
    }
    if (v.size() != 3) throw InputError("--theta needs three values, got '" + s + "'");
    ParamTriple t{v[0], v[1], v[2]};
    t.validate();
    return t;
}

int run_simulate(const Common& c, const SimArgs& a) {
    std::vector<SimCellConfig> cells;
    std::size_t index = 0;
    for (const auto& th : a.thetas)
        for (int n : a.sizes) {
            SimCellConfig cfg;
            cfg.theta = parse_triple(th);
            cfg.sizes = {n, n, n};
            cfg.replications = a.replications;
            cfg.prior = prior_from(c, PriorSpec::simulation_default());
            cfg.chain = chain_from(c);
            cfg.gamma = c.gamma;
            cfg.seed = c.seed ^ mix64(index++);
            cfg.family = parse_family(c.family, c.sigma.value_or(1.0));
            if (!a.estimators.empty()) {
                cfg.estimators.clear();
                for (const auto& e : a.estimators) cfg.estimators.push_back(parse_estimator(e));
            }
            cfg.validate();
            cells.push_back(cfg);
        }
    const auto results = run_grid(cells, a.workers);

    json config = {{"thetas", a.thetas}, {"sizes", a.sizes}, {"replications", a.replications},
                   {"family", c.family}, {"sigma", c.sigma.value_or(1.0)}, {"gamma", c.gamma},
                   {"prior", prior_json(cells.front().prior)}, {"seed", c.seed},
                   {"chain", {{"iterations", c.chain_iters}, {"burn_in", c.burn_in}, {"thin", c.thin}}}};
    if (!a.estimators.empty()) config["estimators"] = a.estimators;

    std::ostringstream os;
    if (c.format == "json") {
        os << to_json(results) << '\n';
    } else if (c.format == "csv") {
        write_csv(os, results);
    } else {
        for (const auto& r : results) {
            const auto& k = r.config;
            os << "n=(" << k.sizes[0] << ',' << k.sizes[1] << ',' << k.sizes[2] << ") theta=(" << k.theta.theta1
               << ',' << k.theta.theta2 << ',' << k.theta.theta3 << ") P=" << num(r.true_p, c.digits) << '\n';
            for (const auto& s : r.estimators) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "  %-8s mean %-10s mse %-10s bias %-10s failures %d\n",
                              estimator_tag(s.tag), num(s.mean, c.digits).c_str(), num(s.mse, c.digits).c_str(),
                              num(s.bias, c.digits).c_str(), s.failures);
                os << buf;
            }
            os << "  AC length " << num(r.ac.avg_length, c.digits) << " coverage " << num(r.ac.coverage, c.digits)
               << "; CR length " << num(r.cr.avg_length, c.digits) << " coverage " << num(r.cr.coverage, c.digits)
               << '\n';
        }
    }
    emit(c, os.str(), "simulate", config);
    return 0;
}

// ---- fit -----------------------------------------------------------------

int run_fit(const Common& c, const std::string& input) {
    const SampleSet data = load(input);
    const std::array<std::vector<double>, 3> sets{data.x, data.y, data.z};
    const app::FitReport sep = app::weibull_separate_fits(sets);
    const app::FitReport com = app::weibull_common_shape_fit(sets);
    const json config = {{"input", input.empty() ? "bundled:fatigue" : input}, {"family", "weibull"}};

    auto report_json = [](const app::FitReport& r) {
        json ds = json::array();
        for (const auto& d : r.datasets) {
            json row = {{"label", d.label}, {"shape", d.shape}, {"scale", d.scale},
                        {"log_likelihood", d.log_likelihood}, {"ks_statistic", d.ks_statistic},
                        {"ks_p_value", d.ks_p_value}};
            if (d.shape_se) row["shape_se"] = *d.shape_se;
            if (d.scale_se) row["scale_se"] = *d.scale_se;
            ds.push_back(row);
        }
        return json{{"datasets", ds}, {"common_shape", r.common_shape},
                    {"pooled_log_likelihood", r.pooled_log_likelihood}};
    };
    std::ostringstream os;
    if (c.format == "json") {
        os << json{{"separate", report_json(sep)}, {"common", report_json(com)}}.dump(2) << '\n';
    } else {
        const bool csv = c.format == "csv";
        if (csv) os << "fit,label,shape,scale,log_likelihood,ks_statistic,ks_p_value,shape_se,scale_se\n";
        auto opt = [&](const std::optional<double>& v) { return v ? num(*v, c.digits) : std::string(); };
        for (const auto* r : {&sep, &com}) {
            const char* kind = r == &sep ? "separate" : "common";
            if (!csv) os << kind << " shape fit\n";
            for (const auto& d : r->datasets) {
                if (csv) {
                    os << kind << ',' << d.label << ',' << num(d.shape, c.digits) << ',' << num(d.scale, c.digits)
                       << ',' << num(d.log_likelihood, c.digits) << ',' << num(d.ks_statistic, c.digits) << ','
                       << num(d.ks_p_value, c.digits) << ',' << opt(d.shape_se) << ',' << opt(d.scale_se) << '\n';
                } else {
                    char buf[200];
                    std::snprintf(buf, sizeof buf, "  %s: shape %s scale %s loglik %s K-S %s (p %s)\n",
                                  d.label.c_str(), num(d.shape, c.digits).c_str(), num(d.scale, c.digits).c_str(),
                                  num(d.log_likelihood, c.digits).c_str(), num(d.ks_statistic, c.digits).c_str(),
                                  num(d.ks_p_value, c.digits).c_str());
                    os << buf;
                    if (d.shape_se)
                        os << "      standard errors: shape " << opt(d.shape_se) << " scale " << opt(d.scale_se)
                           << '\n';
                }
            }
        }
    }
    emit(c, os.str(), "fit", config);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Ordering probability Pr(X < Y < Z): special functions, estimators, simulation"};
    cli.require_subcommand(1);
    cli.set_version_flag("--version", app::kVersion);

    EvalFnArgs ef;
    auto* eval_fn = cli.add_subcommand("eval-fn", "evaluate a special function");
    eval_fn->add_option("name", ef.name, "2f1, 3f2, f1, fd, pfq or pochhammer")->required();
    eval_fn->add_option("--args", ef.args,
                        "2f1: a,b,c,x; 3f2: a1,a2,a3,b1,b2,x; f1: a,b,b',c,x,y; fd: a,c; pfq: x; "
                        "pochhammer: lambda,k")
        ->delimiter(',');
    eval_fn->add_option("--b", ef.bvec, "fd: b list; pfq: numerator list")->delimiter(',');
    eval_fn->add_option("--x", ef.xvec, "fd: x list; pfq: denominator list")->delimiter(',');
    eval_fn->add_option("--strategy", ef.strategy, "auto, finite, euler or series")
        ->check(CLI::IsMember({"auto", "finite", "euler", "series"}));
    eval_fn->add_option("--rel-tol", ef.rel_tol, "relative tolerance");
    eval_fn->add_option("--max-terms", ef.max_terms, "series term cap");
    eval_fn->add_option("--digits", ef.digits, "significant digits")->check(CLI::Range(1, 17));

    Common est_c;
    std::string est_input;
    auto* est = cli.add_subcommand("estimate", "all point estimates and both intervals from data");
    add_common(est, est_c);
    est->add_option("--input", est_input, "CSV with header x,y,z; bundled fatigue data when omitted");

    Common sim_c;
    sim_c.family = "exponential";
    sim_c.seed = 1;
    SimArgs sa;
    auto* sim = cli.add_subcommand("simulate", "Monte Carlo grid over parameter triples and sample sizes");
    add_common(sim, sim_c);
    sim->add_option("--theta", sa.thetas, "parameter triple t1,t2,t3 (repeatable)");
    sim->add_option("--n", sa.sizes, "common sample size per variable (comma list)")->delimiter(',');
    sim->add_option("--replications", sa.replications, "replications per cell");
    sim->add_option("--workers", sa.workers, "threads per cell");
    sim->add_option("--estimators", sa.estimators, "subset of umvue,mle,bayes,jb,lindley,mc")->delimiter(',');

    Common fit_c;
    std::string fit_input;
    auto* fit = cli.add_subcommand("fit", "Weibull fits (separate and common shape) with K-S diagnostics");
    fit->add_option("--input", fit_input, "CSV with header x,y,z; bundled fatigue data when omitted");
    fit->add_option("--out", fit_c.out, "write output here instead of stdout");
    fit->add_option("--format", fit_c.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
    fit->add_option("--digits", fit_c.digits, "significant digits")->check(CLI::Range(1, 17));

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*eval_fn) return run_eval_fn(ef);
        if (*est) return run_estimate(est_c, est_input);
        if (*sim) return run_simulate(sim_c, sa);
        if (*fit) return run_fit(fit_c, fit_input);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const NonConvergence& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
