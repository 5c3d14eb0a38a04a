#pragma once
// Seeded Monte Carlo experiments around E[W(mu_N, mu)]: the point
// estimator plus statistical tests of monotonicity in the sample count,
// best-guess optimality of the uniform target, and the variance and
// concentration bounds. Trials are embarrassingly
// parallel; every per-trial generator is seeded by a fixed 64-bit mix of
// (master seed, trial index), so results are bit-identical regardless of
// thread count or scheduling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "cubeot/bounds.hpp"
#include "cubeot/cube.hpp"
#include "cubeot/fourier.hpp"
#include "cubeot/transport.hpp"

namespace cubeot {

// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master + 0x9e3779b97f4a7c15ULL * (index + 1));
}

inline double uniform01(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

struct ExperimentOptions {
    int threads = 0;  // 0 = hardware concurrency
    int exact_cap = 12;
    bool keep_per_trial = true;
    TransportOptions transport;
};

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    long long trials = 0;
    std::uint64_t seed = 0;
    std::vector<double> per_trial;
};

namespace detail {

template <typename Fn>
inline std::vector<double> map_trials(long long trials, int threads, Fn&& fn) {
    std::vector<double> values((std::size_t)trials);
    int workers = threads > 0 ? threads : (int)std::thread::hardware_concurrency();
    workers = (int)std::max<long long>(1, std::min<long long>(workers, trials));
    if (workers == 1) {
        for (long long t = 0; t < trials; ++t) values[(std::size_t)t] = fn(t);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (long long t = w; t < trials; t += workers) values[(std::size_t)t] = fn(t);
            });
        }
        for (std::thread& th : pool) th.join();
    }
    return values;
}

// Deterministic fold in trial-index order.
inline Estimate summarize(std::vector<double> values, std::uint64_t seed, bool keep) {
    Estimate est;
    est.trials = (long long)values.size();
    est.seed = seed;
    double sum = 0.0;
    for (const double v : values) sum += v;
    est.mean = sum / double(values.size());
    double ss = 0.0;
    for (const double v : values) ss += (v - est.mean) * (v - est.mean);
    est.std_error = values.size() > 1 ? std::sqrt(ss / double(values.size() - 1)) /
                                            std::sqrt(double(values.size()))
                                      : 0.0;
    est.ci_low = est.mean - 1.96 * est.std_error;
    est.ci_high = est.mean + 1.96 * est.std_error;
    if (keep) est.per_trial = std::move(values);
    return est;
}

}  // namespace detail

// One experiment trial: sample N uniform points, return the exact
// Wasserstein distance of the empirical measure to the uniform measure.
inline double empirical_distance_trial(int n, long long num_samples, std::uint64_t derived_seed,
                                       const TransportOptions& topts = {}) {
    std::mt19937_64 rng(derived_seed);
    const EmpiricalMeasure emp = sample_empirical(n, num_samples, rng);
    return wasserstein_exact(RationalMeasure::from_empirical(emp), RationalMeasure::uniform(n), topts)
        .value;
}

inline Estimate estimate_expected_distance(int n, long long num_samples, long long trials,
                                           std::uint64_t seed, const ExperimentOptions& opts = {}) {
    detail::require(trials >= 2, "estimate_expected_distance: need at least 2 trials");
    detail::require(num_samples >= 1, "estimate_expected_distance: need at least 1 sample");
    if (n > opts.exact_cap)
        throw ResourceError("estimate_expected_distance: dimension exceeds the exact-transport cap");
    std::vector<double> values = detail::map_trials(trials, opts.threads, [&](long long t) {
        return empirical_distance_trial(n, num_samples, trial_seed(seed, (std::uint64_t)t),
                                        opts.transport);
    });
    return detail::summarize(std::move(values), seed, opts.keep_per_trial);
}

struct MonotonicityReport {
    std::vector<long long> sample_sizes;
    std::vector<Estimate> estimates;
    std::vector<double> differences;   // mean[k+1] - mean[k]
    std::vector<double> combined_se;   // sqrt(se_k^2 + se_{k+1}^2)
    double sigma = 3.0;
    bool pass = true;
};

// Expected distance is nonincreasing in N; checks consecutive estimates
// up to sigma combined standard errors, with common seeds across sizes.
inline MonotonicityReport monotonicity_test(int n, const std::vector<long long>& sample_sizes,
                                            long long trials, std::uint64_t seed,
                                            const ExperimentOptions& opts = {}) {
    detail::require(!sample_sizes.empty(), "monotonicity_test: empty size list");
    for (std::size_t i = 0; i + 1 < sample_sizes.size(); ++i)
        detail::require(sample_sizes[i] <= sample_sizes[i + 1],
                        "monotonicity_test: sizes must be nondecreasing");
    MonotonicityReport rep;
    rep.sample_sizes = sample_sizes;
    for (const long long size : sample_sizes)
        rep.estimates.push_back(estimate_expected_distance(n, size, trials, seed, opts));
    for (std::size_t i = 0; i + 1 < rep.estimates.size(); ++i) {
        const double diff = rep.estimates[i + 1].mean - rep.estimates[i].mean;
        const double se = std::hypot(rep.estimates[i].std_error, rep.estimates[i + 1].std_error);
        rep.differences.push_back(diff);
        rep.combined_se.push_back(se);
        if (diff > rep.sigma * se) rep.pass = false;
    }
    return rep;
}

struct BestGuessReport {
    double uniform_mean = 0.0;
    std::vector<double> alternative_means;
    std::vector<double> paired_margins;  // mean(W_alt - W_uniform), per target
    std::vector<double> paired_se;
    double sigma = 3.0;
    bool pass = true;
};

// The uniform measure should minimize the expected distance to its own
// empirical measures. Compares against jittered alternatives (masses
// proportional to 1 + jitter * uniform noise, renormalized), paired on
// identical sample draws; passes when the uniform target is within sigma
// paired standard errors of being smallest for every alternative.
inline BestGuessReport best_guess_test(int n, long long num_samples, int perturbations,
                                       long long trials, std::uint64_t seed,
                                       const ExperimentOptions& opts = {}, double jitter = 0.5) {
    detail::require(n <= 6, "best_guess_test: needs many exact solves, n <= 6");
    detail::require(perturbations >= 1, "best_guess_test: need at least one alternative");
    detail::require(trials >= 2, "best_guess_test: need at least 2 trials");
    detail::require(jitter > 0.0, "best_guess_test: jitter must be positive");

    const std::size_t table = std::size_t(1) << n;
    std::vector<RationalMeasure> targets;
    for (int p = 0; p < perturbations; ++p) {
        std::mt19937_64 rng(trial_seed(seed ^ 0x6a09e667f3bcc909ULL, (std::uint64_t)p));
        std::vector<double> mass(table);
        double total = 0.0;
        for (double& m : mass) {
            m = 1.0 + jitter * uniform01(rng);
            total += m;
        }
        for (double& m : mass) m /= total;
        targets.push_back(RationalMeasure::from_dense(DenseMeasure(n, std::move(mass)),
                                                      opts.transport.dense_denominator));
    }
    const RationalMeasure uniform = RationalMeasure::uniform(n);

    const std::size_t k = targets.size();
    std::vector<double> uni((std::size_t)trials);
    std::vector<std::vector<double>> alt(k, std::vector<double>((std::size_t)trials));
    detail::map_trials(trials, opts.threads, [&](long long t) {
        std::mt19937_64 rng(trial_seed(seed, (std::uint64_t)t));
        const RationalMeasure emp =
            RationalMeasure::from_empirical(sample_empirical(n, num_samples, rng));
        uni[(std::size_t)t] = wasserstein_exact(emp, uniform, opts.transport).value;
        for (std::size_t p = 0; p < k; ++p)
            alt[p][(std::size_t)t] = wasserstein_exact(emp, targets[p], opts.transport).value;
        return 0.0;
    });

    BestGuessReport rep;
    rep.uniform_mean = detail::summarize(uni, seed, false).mean;
    for (std::size_t p = 0; p < k; ++p) {
        std::vector<double> diff((std::size_t)trials);
        for (std::size_t t = 0; t < diff.size(); ++t) diff[t] = alt[p][t] - uni[t];
        const Estimate d = detail::summarize(std::move(diff), seed, false);
        rep.alternative_means.push_back(detail::summarize(alt[p], seed, false).mean);
        rep.paired_margins.push_back(d.mean);
        rep.paired_se.push_back(d.std_error);
        if (d.mean < -rep.sigma * d.std_error) rep.pass = false;
    }
    return rep;
}

struct VarianceReport {
    Estimate estimate;
    double sample_variance = 0.0;
    double bound = 0.0;
    double slack_factor = 0.0;
    double sigma = 5.0;
    bool pass = true;
};

// Sample variance of the per-trial distances against the Efron-Stein
// bound, with 1 + sigma/sqrt(trials) slack.
inline VarianceReport variance_test(int n, long long num_samples, long long trials,
                                    std::uint64_t seed, const ExperimentOptions& opts = {}) {
    detail::require(trials >= 100, "variance_test: need at least 100 trials");
    ExperimentOptions local = opts;
    local.keep_per_trial = true;
    VarianceReport rep;
    rep.estimate = estimate_expected_distance(n, num_samples, trials, seed, local);
    double ss = 0.0;
    for (const double v : rep.estimate.per_trial)
        ss += (v - rep.estimate.mean) * (v - rep.estimate.mean);
    rep.sample_variance = ss / double(trials - 1);
    rep.bound = variance_bound(n, (double)num_samples);
    rep.slack_factor = 1.0 + rep.sigma / std::sqrt((double)trials);
    rep.pass = rep.sample_variance <= rep.bound * rep.slack_factor;
    return rep;
}

struct TailCheck {
    double t = 0.0;
    double upper_frequency = 0.0;
    double lower_frequency = 0.0;
    double bound = 0.0;
    double slack = 0.0;
    bool pass = true;
};

struct ConcentrationReport {
    double median = 0.0;
    std::vector<TailCheck> tails;
    double sigma = 5.0;
    bool pass = true;
};

// Empirical tails around the median against the diameter-based
// concentration bound, with sigma-sigma binomial slack on the frequency.
inline ConcentrationReport concentration_test(int n, long long num_samples, long long trials,
                                              const std::vector<double>& t_grid, std::uint64_t seed,
                                              const ExperimentOptions& opts = {}) {
    detail::require(trials >= 500, "concentration_test: need at least 500 trials");
    ExperimentOptions local = opts;
    local.keep_per_trial = true;
    const Estimate est = estimate_expected_distance(n, num_samples, trials, seed, local);
    std::vector<double> sorted = est.per_trial;
    std::sort(sorted.begin(), sorted.end());
    ConcentrationReport rep;
    rep.median = (trials % 2 == 1) ? sorted[(std::size_t)(trials / 2)]
                                   : 0.5 * (sorted[(std::size_t)(trials / 2 - 1)] +
                                            sorted[(std::size_t)(trials / 2)]);
    for (const double t : t_grid) {
        TailCheck check;
        check.t = t;
        long long up = 0, down = 0;
        for (const double v : est.per_trial) {
            if (v - rep.median >= t) ++up;
            if (v - rep.median <= -t) ++down;
        }
        check.upper_frequency = double(up) / double(trials);
        check.lower_frequency = double(down) / double(trials);
        check.bound = concentration_bound(n, (double)num_samples, t);
        const double q = std::min(check.bound, 0.5);
        check.slack = rep.sigma * std::sqrt(q * (1.0 - q) / double(trials));
        check.pass = check.upper_frequency <= check.bound + check.slack &&
                     check.lower_frequency <= check.bound + check.slack;
        if (!check.pass) rep.pass = false;
        rep.tails.push_back(check);
    }
    return rep;
}

struct CoefficientVarianceReport {
    long long trials = 0;
    double expected = 0.0;  // 1/N
    std::vector<double> mean_squared;  // indexed by subset mask
    std::vector<double> std_error;
    double worst_z = 0.0;
    std::uint32_t worst_subset = 0;
    double sigma = 5.0;
    bool pass = true;
};

// Mean of the squared empirical Fourier coefficients should be 1/N for
// every nonempty subset; checked to sigma standard errors per subset.
inline CoefficientVarianceReport coefficient_variance_test(int n, long long num_samples,
                                                           long long trials, std::uint64_t seed) {
    detail::require(n >= 1 && n <= 4, "coefficient_variance_test: n <= 4");
    detail::require(trials >= 2, "coefficient_variance_test: need at least 2 trials");
    const std::size_t table = std::size_t(1) << n;
    std::vector<double> sum(table, 0.0), sum_sq(table, 0.0);
    for (long long t = 0; t < trials; ++t) {
        std::mt19937_64 rng(trial_seed(seed, (std::uint64_t)t));
        const SpectralVector coef = measure_coefficients(sample_empirical(n, num_samples, rng));
        for (std::size_t s = 0; s < table; ++s) {
            const double sq = coef.coef[s] * coef.coef[s];
            sum[s] += sq;
            sum_sq[s] += sq * sq;
        }
    }
    CoefficientVarianceReport rep;
    rep.trials = trials;
    rep.expected = 1.0 / double(num_samples);
    rep.mean_squared.resize(table);
    rep.std_error.resize(table);
    for (std::size_t s = 0; s < table; ++s) {
        rep.mean_squared[s] = sum[s] / double(trials);
        const double var =
            std::max(0.0, (sum_sq[s] - sum[s] * sum[s] / double(trials)) / double(trials - 1));
        rep.std_error[s] = std::sqrt(var / double(trials));
        if (s == 0) continue;
        const double diff = std::abs(rep.mean_squared[s] - rep.expected);
        if (rep.std_error[s] == 0.0) {
            if (diff > 0.0) {
                rep.pass = false;
                rep.worst_z = std::numeric_limits<double>::infinity();
                rep.worst_subset = (std::uint32_t)s;
            }
            continue;
        }
        const double z = diff / rep.std_error[s];
        if (z > rep.worst_z) {
            rep.worst_z = z;
            rep.worst_subset = (std::uint32_t)s;
        }
        if (z > rep.sigma) rep.pass = false;
    }
    return rep;
}

}  // namespace cubeot
