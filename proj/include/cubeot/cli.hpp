#pragma once
// Command-line surface: transport, estimate, bounds and verify
// subcommands with reproducible CSV/JSON output. Every run embeds the
// version, seed and full configuration, and fixed seeds give byte-stable
// files.

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cubeot/bounds.hpp"
#include "cubeot/cube.hpp"
#include "cubeot/montecarlo.hpp"
#include "cubeot/transport.hpp"
#include "cubeot/verify.hpp"

namespace cubeot::cli {

inline constexpr const char* kVersion = "cubeot 0.1.0";

// Shortest round-trip decimal form; deterministic across runs.
inline std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string fmt(const Rational& r) {
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

// "uniform", "dirac:<bits>", or "empirical:<path>" with one decimal
// bitmask per line.
inline RationalMeasure parse_measure(const std::string& spec, int n) {
    if (spec == "uniform") return RationalMeasure::uniform(n);
    if (spec.rfind("dirac:", 0) == 0) {
        const long long bits = std::stoll(spec.substr(6));
        if (bits < 0 || bits >= (long long)1 << n)
            throw std::invalid_argument("measure: dirac bits out of range for n=" + std::to_string(n));
        return RationalMeasure::dirac(CubePoint((std::uint32_t)bits, n));
    }
    if (spec.rfind("empirical:", 0) == 0) {
        const std::string path = spec.substr(10);
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("measure: cannot open sample file " + path);
        std::vector<CubePoint> points;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const long long bits = std::stoll(line);
            if (bits < 0 || bits >= (long long)1 << n)
                throw std::invalid_argument("measure: sample out of range in " + path);
            points.push_back(CubePoint((std::uint32_t)bits, n));
        }
        if (points.empty()) throw std::invalid_argument("measure: empty sample file " + path);
        return RationalMeasure::from_empirical(empirical_measure(points));
    }
    throw std::invalid_argument("measure: expected uniform, dirac:<bits> or empirical:<path>");
}

namespace detail {

struct Output {
    std::string path;  // empty = stdout
    std::ostream* fallback = nullptr;

    void write(const std::string& text, std::ostream& out) const {
        if (path.empty()) {
            out << text;
            return;
        }
        std::ofstream file(path, std::ios::binary);
        if (!file) throw std::invalid_argument("cannot open output file " + path);
        file << text;
    }
};

inline std::string provenance_line(const std::string& config) {
    return std::string("# ") + kVersion + "\n# " + config + "\n";
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact Wasserstein distances, bounds and Monte Carlo experiments on the Boolean cube"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    // transport
    auto* transport = app.add_subcommand("transport", "solve one exact transport instance");
    int t_n = 4;
    std::string t_a, t_b, t_format = "csv", t_out;
    bool t_plan = false;
    long long t_denominator = 1'000'000'000LL;
    transport->add_option("--n", t_n, "cube dimension")->required()->check(CLI::Range(1, kMaxDim));
    transport->add_option("--a", t_a, "source measure (uniform|dirac:<bits>|empirical:<path>)")->required();
    transport->add_option("--b", t_b, "target measure")->required();
    transport->add_option("--format", t_format)->check(CLI::IsMember({"csv", "json"}));
    transport->add_option("--out", t_out, "output path (default stdout)");
    transport->add_flag("--plan", t_plan, "dump the full transport plan");
    transport->add_option("--max-denominator", t_denominator, "rationalization denominator cap");

    // estimate
    auto* estimate = app.add_subcommand("estimate", "Monte Carlo estimate of E[W(mu_N, mu)]");
    int e_n = 4, e_threads = 0, e_cap = 12;
    std::vector<long long> e_sizes;
    long long e_trials = 100;
    std::uint64_t e_seed = 0;
    bool e_per_trial = false;
    std::string e_format = "csv", e_out;
    estimate->add_option("--n", e_n, "cube dimension")->required()->check(CLI::Range(1, kMaxDim));
    estimate->add_option("--N", e_sizes, "sample count(s), comma separated")
        ->required()
        ->delimiter(',');
    estimate->add_option("--trials", e_trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    estimate->add_option("--seed", e_seed, "master seed");
    estimate->add_option("--threads", e_threads, "worker threads (0 = auto)");
    estimate->add_option("--exact-cap", e_cap, "largest dimension for exact dense transport");
    estimate->add_flag("--per-trial", e_per_trial, "emit per-trial values");
    estimate->add_option("--format", e_format)->check(CLI::IsMember({"csv", "json"}));
    estimate->add_option("--out", e_out, "output path (default stdout)");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "evaluate every applicable closed-form bound");
    int b_n = 8;
    double b_samples = 0;
    double b_eps_step = 0.01, b_delta = -1.0, b_lambda0 = 0.05;
    std::vector<double> b_t;
    bool b_oversampled = false;
    std::string b_format = "csv", b_out;
    bounds->add_option("--n", b_n, "cube dimension")->required()->check(CLI::Range(2, 1024));
    bounds->add_option("--N", b_samples, "sample count")->required()->check(CLI::PositiveNumber);
    bounds->add_option("--eps-step", b_eps_step, "grid step for the spectral bound");
    bounds->add_option("--t", b_t, "concentration offsets, comma separated")->delimiter(',');
    bounds->add_option("--delta", b_delta, "ball-diffusion delta (default 1/n)");
    bounds->add_option("--lambda0", b_lambda0, "regime threshold between polynomial and exponential");
    bounds->add_flag("--oversampled", b_oversampled, "treat c = N/2^n as divergent");
    bounds->add_option("--format", b_format)->check(CLI::IsMember({"csv", "json"}));
    bounds->add_option("--out", b_out, "output path (default stdout)");

    // verify
    auto* verify = app.add_subcommand("verify", "run an invariant suite");
    std::string v_suite;
    int v_nmax = 5;
    std::uint64_t v_seed = 0;
    verify->add_option("--suite", v_suite, "fourier|transport|bounds|montecarlo|all")->required();
    verify->add_option("--n-max", v_nmax, "largest dimension exercised")->check(CLI::Range(2, 12));
    verify->add_option("--seed", v_seed, "suite seed");

    try {
        std::vector<const char*> argv;
        argv.push_back("cubeot");
        for (const std::string& a : args) argv.push_back(a.c_str());
        app.parse((int)argv.size(), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (transport->parsed()) {
            TransportOptions topts;
            topts.dense_denominator = t_denominator;
            const RationalMeasure a = parse_measure(t_a, t_n);
            const RationalMeasure b = parse_measure(t_b, t_n);
            const TransportSolution sol = wasserstein_exact(a, b, topts);
            const PlanCheckReport rep = verify_plan(sol, a, b);
            std::ostringstream config;
            config << "command=transport n=" << t_n << " a=" << t_a << " b=" << t_b
                   << " plan=" << (t_plan ? 1 : 0) << " format=" << t_format;
            std::string text;
            if (t_format == "csv") {
                text = detail::provenance_line(config.str());
                text += "n,value,value_num,value_den,plan_size,duality_gap,certified\n";
                text += std::to_string(t_n) + "," + fmt(sol.value) + "," +
                        std::to_string(sol.exact_value.num) + "," +
                        std::to_string(sol.exact_value.den) + "," + std::to_string(sol.plan.size()) +
                        "," + fmt(rep.duality_gap) + "," + (rep.pass ? "1" : "0") + "\n";
                if (t_plan) {
                    text += "source,target,mass_num,mass_den,cost\n";
                    for (const PlanEntry& p : sol.plan)
                        text += std::to_string(p.source) + "," + std::to_string(p.target) + "," +
                                std::to_string(p.mass.num) + "," + std::to_string(p.mass.den) + "," +
                                std::to_string(std::popcount(p.source ^ p.target)) + "\n";
                }
            } else {
                nlohmann::ordered_json doc;
                doc["version"] = kVersion;
                doc["command"] = {{"name", "transport"}, {"n", t_n}, {"a", t_a}, {"b", t_b}};
                doc["value"] = sol.value;
                doc["exact"] = {{"num", sol.exact_value.num}, {"den", sol.exact_value.den}};
                doc["plan_size"] = sol.plan.size();
                doc["duality_gap"] = rep.duality_gap;
                doc["certified"] = rep.pass;
                if (t_plan) {
                    nlohmann::ordered_json plan = nlohmann::ordered_json::array();
                    for (const PlanEntry& p : sol.plan)
                        plan.push_back({{"source", p.source},
                                        {"target", p.target},
                                        {"mass_num", p.mass.num},
                                        {"mass_den", p.mass.den},
                                        {"cost", std::popcount(p.source ^ p.target)}});
                    doc["plan"] = std::move(plan);
                }
                text = doc.dump(2) + "\n";
            }
            detail::Output{t_out}.write(text, out);
            return 0;
        }

        if (estimate->parsed()) {
            if (e_trials < 30)
                err << "warning: fewer than 30 trials; the normal-approximation interval is rough\n";
            ExperimentOptions opts;
            opts.threads = e_threads;
            opts.exact_cap = e_cap;
            opts.keep_per_trial = true;
            std::ostringstream config;
            config << "command=estimate n=" << e_n << " N=";
            for (std::size_t i = 0; i < e_sizes.size(); ++i)
                config << (i ? "," : "") << e_sizes[i];
            config << " trials=" << e_trials << " seed=" << e_seed << " threads=" << e_threads
                   << " exact_cap=" << e_cap << " per_trial=" << (e_per_trial ? 1 : 0)
                   << " format=" << e_format;

            std::vector<Estimate> results;
            for (const long long size : e_sizes)
                results.push_back(estimate_expected_distance(e_n, size, e_trials, e_seed, opts));

            std::string text;
            if (e_format == "csv") {
                text = detail::provenance_line(config.str());
                text += "n,N,trials,seed,mean,stderr,ci_low,ci_high\n";
                for (std::size_t i = 0; i < results.size(); ++i) {
                    const Estimate& est = results[i];
                    text += std::to_string(e_n) + "," + std::to_string(e_sizes[i]) + "," +
                            std::to_string(est.trials) + "," + std::to_string(est.seed) + "," +
                            fmt(est.mean) + "," + fmt(est.std_error) + "," + fmt(est.ci_low) + "," +
                            fmt(est.ci_high) + "\n";
                }
                if (e_per_trial) {
                    text += "N,trial,value\n";
                    for (std::size_t i = 0; i < results.size(); ++i)
                        for (std::size_t t = 0; t < results[i].per_trial.size(); ++t)
                            text += std::to_string(e_sizes[i]) + "," + std::to_string(t) + "," +
                                    fmt(results[i].per_trial[t]) + "\n";
                }
            } else {
                nlohmann::ordered_json doc;
                doc["version"] = kVersion;
                doc["command"] = {{"name", "estimate"}, {"n", e_n},    {"N", e_sizes},
                                  {"trials", e_trials}, {"seed", e_seed}, {"threads", e_threads},
                                  {"exact_cap", e_cap}};
                nlohmann::ordered_json rows = nlohmann::ordered_json::array();
                for (std::size_t i = 0; i < results.size(); ++i) {
                    const Estimate& est = results[i];
                    nlohmann::ordered_json row = {
                        {"n", e_n},          {"N", e_sizes[i]},          {"trials", est.trials},
                        {"seed", est.seed},  {"mean", est.mean},         {"stderr", est.std_error},
                        {"ci_low", est.ci_low}, {"ci_high", est.ci_high}};
                    if (e_per_trial) row["per_trial"] = est.per_trial;
                    rows.push_back(std::move(row));
                }
                doc["estimates"] = std::move(rows);
                text = doc.dump(2) + "\n";
            }
            detail::Output{e_out}.write(text, out);
            return 0;
        }

        if (bounds->parsed()) {
            const ExperimentParams params = ExperimentParams::from_counts(b_n, b_samples);
            BoundsQuery query;
            query.eps_step = b_eps_step;
            query.t_grid = b_t;
            query.delta = b_delta;
            query.lambda0 = b_lambda0;
            query.oversampled = b_oversampled;
            const std::vector<BoundEntry> entries = collect_bounds(params, query);
            const BoundReport env = asymptotic_envelope(params, b_oversampled, b_lambda0);
            std::ostringstream config;
            config << "command=bounds n=" << b_n << " N=" << fmt(b_samples)
                   << " regime=" << regime_name(env.regime) << " alpha=" << fmt(env.alpha)
                   << " lambda=" << fmt(env.lambda) << " c=" << fmt(env.c)
                   << " lambda0=" << fmt(b_lambda0) << " format=" << b_format;
            std::string text;
            if (b_format == "csv") {
                text = detail::provenance_line(config.str());
                text += "formula,params,lower,upper,asymptotic\n";
                for (const BoundEntry& e : entries)
                    text += e.formula + "," + e.params + "," +
                            (std::isnan(e.lower) ? "" : fmt(e.lower)) + "," +
                            (std::isnan(e.upper) ? "" : fmt(e.upper)) + "," +
                            (e.asymptotic ? "1" : "0") + "\n";
            } else {
                nlohmann::ordered_json doc;
                doc["version"] = kVersion;
                doc["command"] = {{"name", "bounds"}, {"n", b_n}, {"N", b_samples}};
                doc["regime"] = regime_name(env.regime);
                doc["alpha"] = env.alpha;
                doc["lambda"] = env.lambda;
                doc["c"] = env.c;
                nlohmann::ordered_json rows = nlohmann::ordered_json::array();
                for (const BoundEntry& e : entries) {
                    nlohmann::ordered_json row = {{"formula", e.formula}, {"params", e.params},
                                                  {"asymptotic", e.asymptotic}};
                    if (!std::isnan(e.lower)) row["lower"] = e.lower;
                    if (!std::isnan(e.upper)) row["upper"] = e.upper;
                    rows.push_back(std::move(row));
                }
                doc["bounds"] = std::move(rows);
                text = doc.dump(2) + "\n";
            }
            detail::Output{b_out}.write(text, out);
            return 0;
        }

        if (verify->parsed()) {
            const std::vector<CheckResult> results = verify_suite(v_suite, v_nmax, v_seed);
            bool all_pass = true;
            for (const CheckResult& r : results) {
                out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
                if (!r.detail.empty()) out << " (" << r.detail << ")";
                out << "\n";
                if (!r.pass) all_pass = false;
            }
            std::size_t passed = 0;
            for (const CheckResult& r : results) passed += r.pass ? 1 : 0;
            out << "suite " << v_suite << ": " << passed << "/" << results.size() << " passed\n";
            return all_pass ? 0 : 3;
        }
    } catch (const ResourceError& e) {
        err << "resource error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no subcommand\n";
    return 1;
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(std::move(args), std::cout, std::cerr);
}

}  // namespace cubeot::cli
