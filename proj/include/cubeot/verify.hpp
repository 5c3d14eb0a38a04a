#pragma once
// Runtime invariant suites behind the CLI `verify` subcommand: each check
// re-derives a library guarantee from scratch at configurable size and
// reports pass/fail with the observed worst case.

#include <random>
#include <string>
#include <vector>

#include "cubeot/bounds.hpp"
#include "cubeot/cube.hpp"
#include "cubeot/fourier.hpp"
#include "cubeot/montecarlo.hpp"
#include "cubeot/transport.hpp"

namespace cubeot {

struct CheckResult {
    std::string name;
    bool pass = true;
    std::string detail;
};

namespace detail {

inline DenseMeasure random_dense_measure(int n, std::mt19937_64& rng) {
    std::vector<double> mass(std::size_t(1) << n);
    double total = 0.0;
    for (double& m : mass) {
        m = uniform01(rng) + 1e-4;
        total += m;
    }
    for (double& m : mass) m /= total;
    return DenseMeasure(n, std::move(mass));
}

inline RationalMeasure random_rational(int n, std::mt19937_64& rng) {
    const std::size_t size = std::size_t(1) << n;
    std::vector<long long> num(size, 0);
    for (int unit = 0; unit < 96; ++unit) num[rng() & (size - 1)] += 1;
    RationalMeasure m;
    m.n = n;
    m.den = 96;
    for (std::uint32_t x = 0; x < size; ++x)
        if (num[x] > 0) m.atoms.emplace_back(x, num[x]);
    return m;
}

inline std::string fmt_worst(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "worst %.3g", v);
    return buf;
}

}  // namespace detail

inline std::vector<CheckResult> verify_fourier(int n_max, std::uint64_t seed) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(mix64(seed));
    n_max = std::max(2, std::min(n_max, 12));

    double worst_rt = 0.0, worst_parseval = 0.0;
    for (int n = 2; n <= n_max; ++n) {
        std::vector<double> values(std::size_t(1) << n);
        for (double& v : values) v = 4.0 * uniform01(rng) - 2.0;
        const CubeFunction f(n, values);
        const SpectralVector s = wht(f);
        const CubeFunction back = inverse_wht(s);
        double energy_fn = 0.0, energy_coef = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            worst_rt = std::max(worst_rt, std::abs(back.values[i] - values[i]));
            energy_fn += values[i] * values[i];
        }
        for (const double c : s.coef) energy_coef += c * c;
        worst_parseval =
            std::max(worst_parseval, std::abs(energy_coef - energy_fn / double(values.size())));
    }
    out.push_back({"wht round trip", worst_rt <= 1e-12, detail::fmt_worst(worst_rt)});
    out.push_back({"parseval identity", worst_parseval <= 1e-10, detail::fmt_worst(worst_parseval)});

    double worst_diff = 0.0;
    for (int n = 2; n <= std::min(n_max, 8); ++n) {
        const DenseMeasure m = detail::random_dense_measure(n, rng);
        for (const double eps : {0.0, 0.13, 0.37, 0.5}) {
            const DenseMeasure spectral = diffuse_epsilon(m, eps);
            const DenseMeasure direct = diffuse_epsilon_direct(m, eps);
            for (std::size_t x = 0; x < spectral.mass.size(); ++x)
                worst_diff = std::max(worst_diff, std::abs(spectral.mass[x] - direct.mass[x]));
        }
    }
    out.push_back(
        {"spectral diffusion equals direct kernel", worst_diff <= 1e-10, detail::fmt_worst(worst_diff)});

    double worst_adj = 0.0;
    for (int n = 2; n <= std::min(n_max, 10); ++n) {
        const DenseMeasure m = detail::random_dense_measure(n, rng);
        std::vector<double> values(std::size_t(1) << n);
        for (double& v : values) v = 4.0 * uniform01(rng) - 2.0;
        const CubeFunction f(n, values);
        for (const double eps : {0.08, 0.31}) {
            const double lhs = expectation(f, diffuse_epsilon(m, eps));
            const double rhs = expectation(diffuse_function(f, eps), m);
            worst_adj = std::max(worst_adj, std::abs(lhs - rhs));
        }
    }
    out.push_back({"diffusion self-adjointness", worst_adj <= 1e-10, detail::fmt_worst(worst_adj)});

    double worst_coupling = -1.0;
    bool coupling_ok = true;
    for (int n = 2; n <= std::min(n_max, 6); ++n) {
        const DenseMeasure m = detail::random_dense_measure(n, rng);
        const RationalMeasure base = RationalMeasure::from_dense(m);
        for (const double eps : {0.1, 0.3}) {
            const double w =
                wasserstein_exact(RationalMeasure::from_dense(diffuse_epsilon(m, eps)), base).value;
            worst_coupling = std::max(worst_coupling, w - eps * n);
            if (w > eps * n + 1e-6) coupling_ok = false;
        }
    }
    out.push_back({"flip-diffusion coupling bound", coupling_ok, detail::fmt_worst(worst_coupling)});

    double worst_ball = -1.0;
    bool ball_ok = true;
    for (int n = 2; n <= std::min(n_max, 6); ++n) {
        const DenseMeasure m = detail::random_dense_measure(n, rng);
        const RationalMeasure base = RationalMeasure::from_dense(m);
        for (int r = 0; 2 * r <= n; ++r) {
            const double w =
                wasserstein_exact(RationalMeasure::from_dense(diffuse_ball(m, r)), base).value;
            worst_ball = std::max(worst_ball, w - r);
            if (w > r + 1e-6) ball_ok = false;
        }
    }
    out.push_back({"ball-diffusion coupling bound", ball_ok, detail::fmt_worst(worst_ball)});
    return out;
}

inline std::vector<CheckResult> verify_transport(int n_max, std::uint64_t seed) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(mix64(seed ^ 0x51));
    n_max = std::max(2, std::min(n_max, 8));

    bool agree = true, certified = true, sandwich = true, symmetric = true, duality = true;
    double worst_gap = 0.0;
    for (int it = 0; it < 60; ++it) {
        const int n = 2 + (int)(rng() % (std::uint64_t)(n_max - 1));
        const RationalMeasure a = detail::random_rational(n, rng);
        const RationalMeasure b = (it % 3 == 0) ? RationalMeasure::uniform(n)
                                                : detail::random_rational(n, rng);
        const TransportSolution sol = wasserstein_exact(a, b);
        if (!(sol.exact_value == wasserstein_ssp(a, b))) agree = false;
        const PlanCheckReport rep = verify_plan(sol, a, b);
        if (!rep.pass) certified = false;
        worst_gap = std::max(worst_gap, rep.duality_gap);
        const Rational tv = total_variation_exact(a, b);
        if (!(tv <= sol.exact_value) || !(sol.exact_value <= tv * (long long)n)) sandwich = false;
        if (!(wasserstein_exact(b, a).exact_value == sol.exact_value)) symmetric = false;
        if (rep.duality_gap > 1e-9) duality = false;
    }
    out.push_back({"network simplex equals successive shortest paths", agree, "exact rational equality"});
    out.push_back({"plan certificates verify", certified, detail::fmt_worst(worst_gap)});
    out.push_back({"duality gap below 1e-9", duality, detail::fmt_worst(worst_gap)});
    out.push_back({"total variation sandwich", sandwich, "TV <= W <= n TV"});
    out.push_back({"metric symmetry", symmetric, "exact rational equality"});

    bool triangle = true;
    for (int it = 0; it < 15; ++it) {
        const int n = 2 + (int)(rng() % (std::uint64_t)std::min(n_max - 1, 4));
        const RationalMeasure a = detail::random_rational(n, rng);
        const RationalMeasure b = detail::random_rational(n, rng);
        const RationalMeasure c = detail::random_rational(n, rng);
        const Rational ab = wasserstein_exact(a, b).exact_value;
        const Rational bc = wasserstein_exact(b, c).exact_value;
        const Rational ac = wasserstein_exact(a, c).exact_value;
        if (!(ac <= ab + bc)) triangle = false;
    }
    out.push_back({"triangle inequality", triangle, "exact rational comparison"});
    return out;
}

inline std::vector<CheckResult> verify_bounds() {
    std::vector<CheckResult> out;

    bool finite = true;
    for (const int n : {32, 128, 512, 1024}) {
        for (const double lambda : {0.05, 0.3, 0.6}) {
            const double logN = lambda * n;
            if (!std::isfinite(spectral_bound_from_log(n, logN, 0.1))) finite = false;
            if (!std::isfinite(ball_diffusion_bound_from_log(n, logN, n / 4, 1.0 / n))) finite = false;
        }
        if (!std::isfinite(scaled_harmonic_binomial_sum(n))) finite = false;
    }
    out.push_back({"evaluators finite up to n = 1024", finite, "log-space arithmetic"});

    bool chernoff_ok = true;
    double worst_chernoff = 0.0;
    for (const double p : {1e-8, 1e-3, 0.2, 0.7})
        for (const double delta : {0.01, 1.0, 8.0})
            for (const double N : {1.0, 50.0, 1e5}) {
                const double v = chernoff_bound(p, delta, N);
                worst_chernoff = std::max(worst_chernoff, v - 1.0);
                if (v > 1.0 + 1e-12) chernoff_ok = false;
            }
    out.push_back({"chernoff factor never exceeds one", chernoff_ok, detail::fmt_worst(worst_chernoff)});

    bool spectral_vs_optimized = true;
    double worst_so = 0.0;
    for (const int n : {6, 12, 24, 48, 96})
        for (const double mult : {1.0, 3.0, 27.0}) {
            const double N = (double)n * n * mult;
            const double diff =
                spectral_bound(n, N, optimal_diffusion_rate(n, N)) - optimized_spectral_bound(n, N);
            worst_so = std::max(worst_so, diff);
            if (diff > 1e-6) spectral_vs_optimized = false;
        }
    out.push_back({"grid bound at optimal eps dominated by closed form", spectral_vs_optimized,
                   detail::fmt_worst(worst_so)});

    bool radius_monotone = true;
    for (const int n : {10, 16, 24}) {
        int prev = n;
        for (double N = 2.0; N < 2e7; N *= 8.0) {
            const int r = lower_bound_radius(n, N);
            if (r > prev) radius_monotone = false;
            prev = r;
        }
    }
    out.push_back({"lower-bound radius nonincreasing in N", radius_monotone, ""});

    bool entropy_cap = true;
    double worst_cap = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        const double gap = entropy(x).value - (kLog2 - 2.0 * (x - 0.5) * (x - 0.5));
        worst_cap = std::max(worst_cap, gap);
        if (gap > 1e-12) entropy_cap = false;
    }
    out.push_back({"entropy under its quadratic cap", entropy_cap, detail::fmt_worst(worst_cap)});

    bool ball_sandwich = true;
    for (int n = 1; n <= 30 && ball_sandwich; ++n)
        for (int r = 0; 2 * r <= n; ++r) {
            const double h = entropy(double(r) / n).value;
            const double log_ball = std::log((double)ball_size(n, r));
            if (log_ball > n * h + 1e-9) ball_sandwich = false;
            if (log_ball < n * h - 0.5 * std::log(2.0 * n) - 1e-9) ball_sandwich = false;
        }
    out.push_back({"ball size inside its entropy sandwich", ball_sandwich, "n <= 30, r <= n/2"});
    return out;
}

inline std::vector<CheckResult> verify_montecarlo(std::uint64_t seed) {
    std::vector<CheckResult> out;

    ExperimentOptions serial;
    serial.threads = 1;
    ExperimentOptions threaded;
    threaded.threads = 4;
    const Estimate a = estimate_expected_distance(4, 16, 30, seed, serial);
    const Estimate b = estimate_expected_distance(4, 16, 30, seed, threaded);
    bool deterministic = a.per_trial == b.per_trial;
    out.push_back({"per-trial values independent of thread count", deterministic, "bit-identical"});

    const Estimate exact = estimate_expected_distance(1, 1, 10, seed);
    out.push_back({"single-sample 1-cube distance is exactly 1/2",
                   exact.mean == 0.5 && exact.std_error == 0.0, ""});

    bool inside = true;
    for (const auto& [n, N] : std::vector<std::pair<int, long long>>{{3, 8}, {4, 32}}) {
        const Estimate est = estimate_expected_distance(n, N, 40, seed);
        double tv_mean = 0.0;
        const RationalMeasure uniform = RationalMeasure::uniform(n);
        for (long long t = 0; t < est.trials; ++t) {
            std::mt19937_64 rng(trial_seed(seed, (std::uint64_t)t));
            tv_mean +=
                total_variation(RationalMeasure::from_empirical(sample_empirical(n, N, rng)), uniform);
        }
        tv_mean /= double(est.trials);
        double upper = 0.5 * n;
        for (double eps = 0.0; eps <= 0.5 + 1e-9; eps += 0.01)
            upper = std::min(upper, spectral_bound(n, (double)N, std::min(eps, 0.5)));
        if (tv_mean > est.mean + 1e-12) inside = false;
        if (est.mean - 3.0 * est.std_error > upper) inside = false;
        if (est.mean + 3.0 * est.std_error < lower_bound_radius(n, (double)N)) inside = false;
    }
    out.push_back({"estimates inside exact lower/upper bounds", inside, "TV mean and spectral grid"});
    return out;
}

inline std::vector<CheckResult> verify_suite(const std::string& suite, int n_max, std::uint64_t seed) {
    if (suite == "fourier") return verify_fourier(n_max, seed);
    if (suite == "transport") return verify_transport(n_max, seed);
    if (suite == "bounds") return verify_bounds();
    if (suite == "montecarlo") return verify_montecarlo(seed);
    if (suite == "all") {
        std::vector<CheckResult> out = verify_fourier(n_max, seed);
        for (auto& sets : {verify_transport(n_max, seed), verify_bounds(), verify_montecarlo(seed)})
            out.insert(out.end(), sets.begin(), sets.end());
        return out;
    }
    throw std::invalid_argument("verify: unknown suite '" + suite + "'");
}

}  // namespace cubeot
