#pragma once
// Closed-form bounds on the expected empirical-vs-uniform Wasserstein
// distance, evaluated in log space so every formula stays finite and
// overflow-free up to n = 1024. Asymptotic envelopes are flagged as such;
// at finite n they guide rather than bind.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cubeot/cube.hpp"

namespace cubeot {

namespace detail {

inline double logsumexp(const std::vector<double>& terms) {
    double peak = -std::numeric_limits<double>::infinity();
    for (const double t : terms) peak = std::max(peak, t);
    if (!std::isfinite(peak)) return peak;
    double s = 0.0;
    for (const double t : terms) s += std::exp(t - peak);
    return peak + std::log(s);
}

// log of sum_{i=1..n} (1/i) C(n,i) q^{2i} with q = 1 - 2 eps.
inline double spectral_sum_log(int n, double eps) {
    if (eps >= 0.5) return -std::numeric_limits<double>::infinity();
    const double log_q = std::log(1.0 - 2.0 * eps);
    std::vector<double> terms;
    terms.reserve(n);
    for (int i = 1; i <= n; ++i)
        terms.push_back(log_binomial(n, i) - std::log((double)i) + 2.0 * i * log_q);
    return logsumexp(terms);
}

inline double saturating_exp(double log_value) {
    return std::exp(std::min(log_value, 700.0));
}

}  // namespace detail

// Sampling regimes of the main envelope, by how the sample count N scales
// against the cube size 2^n.
enum class Regime {
    polynomial,    // N = n^alpha
    exponential,   // N = e^{lambda n}, lambda < log 2
    proportional,  // N = c 2^n, constant c >= 1
    oversampled,   // N = c(n) 2^n, c(n) -> infinity
};

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::polynomial: return "polynomial";
        case Regime::exponential: return "exponential";
        case Regime::proportional: return "proportional";
        case Regime::oversampled: return "oversampled";
    }
    return "unknown";
}

// The pair (n, N) with the three standard parametrizations. N is carried
// in log form so N near 2^1024 stays representable.
struct ExperimentParams {
    int n = 1;
    double log_samples = 0.0;

    static ExperimentParams from_counts(int n, double samples) {
        detail::require(n >= 1, "ExperimentParams: dimension must be positive");
        detail::require(samples >= 1.0 && std::isfinite(samples),
                        "ExperimentParams: sample count must be a finite count >= 1");
        return ExperimentParams{n, std::log(samples)};
    }

    static ExperimentParams from_log(int n, double log_samples) {
        detail::require(n >= 1, "ExperimentParams: dimension must be positive");
        detail::require(log_samples >= 0.0, "ExperimentParams: log sample count negative");
        return ExperimentParams{n, log_samples};
    }

    double samples() const { return std::exp(log_samples); }
    double alpha() const { return n >= 2 ? log_samples / std::log((double)n) : std::numeric_limits<double>::infinity(); }
    double lambda() const { return log_samples / n; }
    double log_c() const { return log_samples - n * kLog2; }
    double c() const { return std::exp(log_c()); }
};

// Fourier-diffusion upper bound on E[W(mu_N, mu)]:
// (sqrt(n) / 2 sqrt(N)) * sqrt(sum_i (1/i) C(n,i) (1-2eps)^{2i}) + eps n.
inline double spectral_bound_from_log(int n, double log_samples, double eps) {
    detail::require(n >= 1, "spectral_bound: dimension must be positive");
    detail::require(eps >= 0.0 && eps <= 0.5, "spectral_bound: eps outside [0, 1/2]");
    detail::require(log_samples >= 0.0, "spectral_bound: sample count below 1");
    const double sum_log = detail::spectral_sum_log(n, eps);
    const double first = std::isfinite(sum_log)
                             ? detail::saturating_exp(0.5 * sum_log + 0.5 * std::log((double)n) -
                                                      kLog2 - 0.5 * log_samples)
                             : 0.0;
    return first + eps * n;
}

inline double spectral_bound(int n, double samples, double eps) {
    detail::require(samples >= 1.0, "spectral_bound: sample count below 1");
    return spectral_bound_from_log(n, std::log(samples), eps);
}

// Closed form at the optimal diffusion rate, valid for N >= n^2:
// eps* = (1 - sqrt(e^{(log N - 2 log n)/n} - 1))/2, bound = eps* n + 1.
// When the square root reaches 1 the optimal eps hits 0 and the bound
// floors at 1.
inline double optimized_spectral_bound(int n, double samples) {
    detail::require(n >= 1, "optimized_spectral_bound: dimension must be positive");
    detail::require(samples >= (double)n * n, "optimized_spectral_bound: requires N >= n^2");
    const double inner = std::expm1((std::log(samples) - 2.0 * std::log((double)n)) / n);
    const double eps = std::max(0.0, 0.5 * (1.0 - std::sqrt(std::max(inner, 0.0))));
    return eps * n + 1.0;
}

inline double optimal_diffusion_rate(int n, double samples) {
    detail::require(samples >= (double)n * n, "optimal_diffusion_rate: requires N >= n^2");
    const double inner = std::expm1((std::log(samples) - 2.0 * std::log((double)n)) / n);
    return std::max(0.0, 0.5 * (1.0 - std::sqrt(std::max(inner, 0.0))));
}

enum class PolyMode { c_quadratic, alpha };

// Polynomial-regime refinements: n/2 - (sqrt(log c)/2) sqrt(n) + 1 for
// N = c n^2 with c > 1, and n/2 - (sqrt((alpha-2) log n)/2) sqrt(n) + 1
// for N = n^alpha with alpha >= 2.
inline double poly_regime_bound(int n, PolyMode mode, double x) {
    detail::require(n >= 1, "poly_regime_bound: dimension must be positive");
    if (mode == PolyMode::c_quadratic) {
        detail::require(x > 1.0, "poly_regime_bound: requires c > 1");
        return 0.5 * n - 0.5 * std::sqrt(std::log(x)) * std::sqrt((double)n) + 1.0;
    }
    detail::require(x >= 2.0, "poly_regime_bound: requires alpha >= 2");
    return 0.5 * n - 0.5 * std::sqrt((x - 2.0) * std::log((double)n)) * std::sqrt((double)n) + 1.0;
}

// Largest r <= n/2 whose total ball budget N e^{H(r/n) n} still misses a
// 1/n fraction of the cube: log N + n H(r/n) - n log 2 <= -log n. Then
// E[W] >= r. Returns 0 when no radius qualifies.
inline int lower_bound_radius_from_log(int n, double log_samples) {
    detail::require(n >= 2, "lower_bound_radius: requires n >= 2");
    detail::require(log_samples >= 0.0, "lower_bound_radius: sample count below 1");
    for (int r = n / 2; r >= 1; --r) {
        const double lhs = log_samples + n * entropy((double)r / n).value - n * kLog2;
        if (lhs <= -std::log((double)n)) return r;
    }
    return 0;
}

inline int lower_bound_radius(int n, double samples) {
    detail::require(samples >= 1.0, "lower_bound_radius: sample count below 1");
    return lower_bound_radius_from_log(n, std::log(samples));
}

namespace detail {

// log of the multiplicative Chernoff tail e^{N(log(1+p d) - log(1+d)(p+pd))},
// taking log p so the ball fraction may underflow double range.
inline double chernoff_exponent_from_logp(double log_p, double delta, double log_samples) {
    if (log_p > -36.0) {
        const double p = std::exp(log_p);
        return std::exp(log_samples) * (std::log1p(p * delta) - std::log1p(delta) * (p + p * delta));
    }
    // p below 1e-16: log(1+pd) ~ pd, so the exponent is -N p kappa with
    // kappa = (1+d) log(1+d) - d > 0.
    const double kappa = (1.0 + delta) * std::log1p(delta) - delta;
    const double log_mag = log_samples + log_p + std::log(kappa);
    return -saturating_exp(log_mag);
}

}  // namespace detail

// Multiplicative Chernoff bound on an upward excursion of a binomial
// fraction: e^{N(log(1+p delta) - log(1+delta)(p + p delta))}, always <= 1.
inline double chernoff_bound(double p, double delta, double samples) {
    detail::require(p > 0.0 && p < 1.0, "chernoff_bound: p outside (0,1)");
    detail::require(delta > 0.0, "chernoff_bound: delta must be positive");
    detail::require(samples >= 1.0, "chernoff_bound: sample count below 1");
    return std::exp(detail::chernoff_exponent_from_logp(std::log(p), delta, std::log(samples)));
}

namespace detail {

inline double log_ball_fraction(int n, int r) {
    if (n <= kMaxDim) return std::log((double)ball_size(n, r)) - n * kLog2;
    std::vector<double> terms;
    terms.reserve(r + 1);
    for (int i = 0; i <= r; ++i) terms.push_back(log_binomial(n, i));
    return logsumexp(terms) - n * kLog2;
}

}  // namespace detail

// Ball-diffusion upper bound: n 2^n Chernoff(p, delta, N) + delta n + r
// with p the radius-r ball fraction. The leading term saturates instead
// of overflowing when the Chernoff factor fails to decay.
inline double ball_diffusion_bound_from_log(int n, double log_samples, int r, double delta) {
    detail::require(n >= 1, "ball_diffusion_bound: dimension must be positive");
    detail::require(r >= 0 && 2 * r <= n, "ball_diffusion_bound: requires r <= n/2");
    detail::require(delta > 0.0, "ball_diffusion_bound: delta must be positive");
    detail::require(log_samples >= 0.0, "ball_diffusion_bound: sample count below 1");
    const double log_p = detail::log_ball_fraction(n, r);
    const double exponent = detail::chernoff_exponent_from_logp(log_p, delta, log_samples);
    const double first = detail::saturating_exp(std::log((double)n) + n * kLog2 + exponent);
    return first + delta * n + r;
}

inline double ball_diffusion_bound(int n, double samples, int r, double delta) {
    detail::require(samples >= 1.0, "ball_diffusion_bound: sample count below 1");
    return ball_diffusion_bound_from_log(n, std::log(samples), r, delta);
}

// The radius criterion R(r) at delta = 1/n; the ball-diffusion bound is
// useful once R(r) <= 1.
inline double ball_diffusion_criterion(int n, double samples, int r) {
    detail::require(n >= 1, "ball_diffusion_criterion: dimension must be positive");
    detail::require(r >= 0 && 2 * r <= n, "ball_diffusion_criterion: requires r <= n/2");
    detail::require(samples >= 1.0, "ball_diffusion_criterion: sample count below 1");
    const double log_p = detail::log_ball_fraction(n, r);
    const double exponent =
        detail::chernoff_exponent_from_logp(log_p, 1.0 / n, std::log(samples));
    return detail::saturating_exp(std::log((double)n) + n * kLog2 + exponent);
}

// r* = H^{-1}(log 2 - lambda), the intermediate-regime radius fraction;
// strictly decreasing in lambda on (0, log 2).
inline double critical_radius_fraction(double lambda) {
    detail::require(lambda > 0.0 && lambda < kLog2,
                    "critical_radius_fraction: lambda outside (0, log 2)");
    return entropy_inverse(EntropyValue(kLog2 - lambda));
}

// The eps = 0 spectral bound at N = c 2^n; sqrt(c) times it tends to
// sqrt(2)/2 as n grows.
inline double dense_regime_bound(int n, double c) {
    detail::require(c > 0.0, "dense_regime_bound: c must be positive");
    return spectral_bound_from_log(n, std::log(c) + n * kLog2, 0.0);
}

// (n / 2^n) sum_{i=1..n} (1/i) C(n, i); tends to 2 from above.
inline double scaled_harmonic_binomial_sum(int n) {
    detail::require(n >= 1, "scaled_harmonic_binomial_sum: dimension must be positive");
    const double sum_log = detail::spectral_sum_log(n, 0.0);
    return std::exp(std::log((double)n) - n * kLog2 + sum_log);
}

// Efron-Stein: Var(W) <= E[d(X1,X2)^2] / 2N = (n^2 + n) / 8N on the
// uniform cube (second moment of Binomial(n, 1/2)).
inline double variance_bound(int n, double samples) {
    detail::require(n >= 1 && samples >= 1.0, "variance_bound: invalid parameters");
    return ((double)n * n + n) / (8.0 * samples);
}

// Two-sided concentration around the median: 2 e^{-t^2 N / (4 n^2)} with
// the cube diameter n.
inline double concentration_bound(int n, double samples, double t) {
    detail::require(n >= 1 && samples >= 1.0, "concentration_bound: invalid parameters");
    detail::require(t >= 0.0, "concentration_bound: t must be nonnegative");
    return 2.0 * std::exp(-t * t * samples / (4.0 * (double)n * n));
}

struct BoundReport {
    Regime regime = Regime::polynomial;
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    // All three parametrizations, so callers can overrule the classifier.
    double alpha = 0.0;
    double lambda = 0.0;
    double c = 0.0;
    double r_star = std::numeric_limits<double>::quiet_NaN();
    std::string formula;
    bool asymptotic = true;
};

// Finite-n evaluation of the limiting envelope, with the regime picked
// by the classifier: c >= 1 selects the proportional regime (oversampled
// when the caller flags a divergent c(n)); otherwise lambda >= lambda0
// selects the exponential regime; otherwise polynomial. The regimes
// overlap at finite n, which is why the report carries alpha, lambda and
// c side by side.
inline BoundReport asymptotic_envelope(const ExperimentParams& params, bool oversampled = false,
                                       double lambda0 = 0.05) {
    detail::require(params.n >= 2, "asymptotic_envelope: requires n >= 2");
    BoundReport rep;
    rep.alpha = params.alpha();
    rep.lambda = params.lambda();
    rep.c = params.c();
    const int n = params.n;
    if (params.log_c() >= 0.0) {
        if (oversampled) {
            rep.regime = Regime::oversampled;
            rep.formula = "envelope_oversampled";
            rep.lower = 1.0 / std::sqrt(2.0 * M_PI * rep.c);
            rep.upper = std::sqrt(2.0) / (2.0 * std::sqrt(rep.c));
        } else {
            rep.regime = Regime::proportional;
            rep.formula = "envelope_proportional";
            rep.lower = std::exp(-rep.c);
            rep.upper = 1.0 / std::sqrt(2.0 * rep.c);
        }
    } else if (rep.lambda >= lambda0) {
        rep.regime = Regime::exponential;
        rep.formula = "envelope_exponential";
        rep.r_star = critical_radius_fraction(rep.lambda);
        const double slope = std::log((1.0 - rep.r_star) / rep.r_star);
        rep.lower = rep.r_star * n - std::log((double)n) / slope;
        rep.upper = rep.r_star * n + 3.5 * std::log((double)n) / slope;
    } else {
        rep.regime = Regime::polynomial;
        rep.formula = "envelope_polynomial";
        rep.lower = 0.5 * n - std::sqrt((rep.alpha + 1.0) / 2.0 * n * std::log((double)n));
        rep.upper = 0.5 * n - std::sqrt(std::max(rep.alpha - 2.0, 0.0) / 4.0 * n * std::log((double)n));
    }
    return rep;
}

struct BoundEntry {
    std::string formula;
    std::string params;
    double lower = std::numeric_limits<double>::quiet_NaN();
    double upper = std::numeric_limits<double>::quiet_NaN();
    bool asymptotic = false;
};

struct BoundsQuery {
    double eps_step = 0.01;
    std::vector<double> t_grid;
    double delta = -1.0;  // defaults to 1/n
    double lambda0 = 0.05;
    bool oversampled = false;
};

// Every applicable bound for one (n, N), for reporting.
inline std::vector<BoundEntry> collect_bounds(const ExperimentParams& params,
                                              const BoundsQuery& query = {}) {
    std::vector<BoundEntry> out;
    const int n = params.n;
    const double N = params.samples();
    char buf[160];

    const BoundReport env = asymptotic_envelope(params, query.oversampled, query.lambda0);
    std::snprintf(buf, sizeof buf, "regime=%s alpha=%.6g lambda=%.6g c=%.6g", regime_name(env.regime),
                  env.alpha, env.lambda, env.c);
    out.push_back({env.formula, buf, env.lower, env.upper, true});

    double best_eps = 0.0, best_spectral = std::numeric_limits<double>::infinity();
    for (double eps = 0.0; eps <= 0.5 + 1e-12; eps += query.eps_step) {
        const double e = std::min(eps, 0.5);
        const double v = spectral_bound_from_log(n, params.log_samples, e);
        if (v < best_spectral) {
            best_spectral = v;
            best_eps = e;
        }
    }
    std::snprintf(buf, sizeof buf, "eps=%.6g", best_eps);
    out.push_back({"spectral", buf, std::numeric_limits<double>::quiet_NaN(), best_spectral, false});

    if (std::isfinite(N) && N >= (double)n * n) {
        std::snprintf(buf, sizeof buf, "eps=%.6g", optimal_diffusion_rate(n, N));
        out.push_back({"spectral_optimized", buf, std::numeric_limits<double>::quiet_NaN(),
                       optimized_spectral_bound(n, N), false});
        const double cq = N / ((double)n * n);
        if (cq > 1.0) {
            std::snprintf(buf, sizeof buf, "c=%.6g", cq);
            out.push_back({"poly_c", buf, std::numeric_limits<double>::quiet_NaN(),
                           poly_regime_bound(n, PolyMode::c_quadratic, cq), false});
        }
        if (n >= 2 && params.alpha() >= 2.0) {
            std::snprintf(buf, sizeof buf, "alpha=%.6g", params.alpha());
            out.push_back({"poly_alpha", buf, std::numeric_limits<double>::quiet_NaN(),
                           poly_regime_bound(n, PolyMode::alpha, params.alpha()), false});
        }
    }

    if (n >= 2) {
        const int r = lower_bound_radius_from_log(n, params.log_samples);
        std::snprintf(buf, sizeof buf, "r=%d", r);
        out.push_back({"radius_lower", buf, (double)r, std::numeric_limits<double>::quiet_NaN(), false});
    }

    const double delta = query.delta > 0.0 ? query.delta : 1.0 / n;
    double best_ball = std::numeric_limits<double>::infinity();
    int best_r = 0;
    for (int r = 0; 2 * r <= n; ++r) {
        const double v = ball_diffusion_bound_from_log(n, params.log_samples, r, delta);
        if (v < best_ball) {
            best_ball = v;
            best_r = r;
        }
    }
    std::snprintf(buf, sizeof buf, "r=%d delta=%.6g criterion=%.6g", best_r, delta,
                  ball_diffusion_criterion(n, std::min(N, 1e300), best_r));
    out.push_back({"ball_diffusion", buf, std::numeric_limits<double>::quiet_NaN(), best_ball, false});

    std::snprintf(buf, sizeof buf, "quantity=variance");
    out.push_back({"variance", buf, std::numeric_limits<double>::quiet_NaN(),
                   variance_bound(n, std::min(N, 1e300)), false});

    for (const double t : query.t_grid) {
        std::snprintf(buf, sizeof buf, "t=%.6g quantity=tail", t);
        out.push_back({"concentration", buf, std::numeric_limits<double>::quiet_NaN(),
                       concentration_bound(n, std::min(N, 1e300), t), false});
    }
    return out;
}

}  // namespace cubeot
