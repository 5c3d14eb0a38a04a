// Acceptance suite: one criterion per function, one PASS/FAIL line each,
// nonzero exit when anything fails. Tolerances are pinned in code next to
// each check. Run with a list of criterion numbers to execute a subset.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cubeot/cli.hpp"
#include "cubeot/montecarlo.hpp"
#include "cubeot/verify.hpp"

using namespace cubeot;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

RationalMeasure random_instance_measure(int n, std::mt19937_64& rng, long long max_samples) {
    switch (rng() % 3) {
        case 0:
            return RationalMeasure::from_empirical(
                sample_empirical(n, 1 + (long long)(rng() % (std::uint64_t)max_samples), rng));
        case 1:
            return RationalMeasure::uniform(n);
        default:
            return detail::random_rational(n, rng);
    }
}

// 1. Network simplex and successive shortest paths agree exactly on 200
//    random instances, n <= 5, N <= 64.
Outcome solver_cross_validation() {
    std::mt19937_64 rng(101);
    for (int it = 0; it < 200; ++it) {
        const int n = 2 + (int)(rng() % 4);
        const RationalMeasure a = random_instance_measure(n, rng, 64);
        const RationalMeasure b = random_instance_measure(n, rng, 64);
        const TransportSolution sol = wasserstein_exact(a, b);
        const Rational ssp = wasserstein_ssp(a, b);
        if (!(sol.exact_value == ssp)) {
            std::ostringstream ss;
            ss << "instance " << it << ": simplex " << sol.exact_value.num << "/"
               << sol.exact_value.den << " vs ssp " << ssp.num << "/" << ssp.den;
            return {false, ss.str()};
        }
    }
    return {true, "200 instances, exact rational equality"};
}

// 2. Dual potentials are 1-Lipschitz (exhaustive pairs on the support
//    union) and the duality gap is < 1e-9 on every solved instance.
Outcome duality_certificates() {
    std::mt19937_64 rng(202);
    double worst_gap = 0.0;
    for (int it = 0; it < 120; ++it) {
        const int n = 2 + (int)(rng() % 7);  // n in 2..8
        const RationalMeasure a = random_instance_measure(n, rng, 64);
        const RationalMeasure b =
            (it % 2 == 0) ? RationalMeasure::uniform(n) : random_instance_measure(n, rng, 64);
        const TransportSolution sol = wasserstein_exact(a, b);
        const PlanCheckReport rep = verify_plan(sol, a, b);
        worst_gap = std::max(worst_gap, rep.duality_gap);
        if (!rep.lipschitz_ok) return {false, "Lipschitz violation at instance " + std::to_string(it)};
        if (rep.duality_gap >= 1e-9)
            return {false, "duality gap " + std::to_string(rep.duality_gap)};
        if (!rep.pass) return {false, rep.first_violation};
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "120 instances, worst gap %.2e", worst_gap);
    return {true, buf};
}

// 3. W(dirac_x, uniform) = n/2 exactly for every x, n = 1..8.
Outcome forced_coupling() {
    for (int n = 1; n <= 8; ++n) {
        const RationalMeasure uniform = RationalMeasure::uniform(n);
        for (std::uint32_t x = 0; x < (std::uint32_t(1) << n); ++x) {
            const TransportSolution sol =
                wasserstein_exact(RationalMeasure::dirac(CubePoint(x, n)), uniform);
            if (!(sol.exact_value == Rational(n, 2)))
                return {false, "n=" + std::to_string(n) + " x=" + std::to_string(x)};
        }
    }
    return {true, "all point masses, n = 1..8, exact n/2"};
}

// 4. TV <= W <= n TV on 200 random pairs, n <= 6, in exact arithmetic.
Outcome tv_sandwich() {
    std::mt19937_64 rng(404);
    for (int it = 0; it < 200; ++it) {
        const int n = 2 + (int)(rng() % 5);
        const RationalMeasure a = random_instance_measure(n, rng, 64);
        const RationalMeasure b = random_instance_measure(n, rng, 64);
        const Rational tv = total_variation_exact(a, b);
        const Rational w = wasserstein_exact(a, b).exact_value;
        if (!(tv <= w) || !(w <= tv * (long long)n))
            return {false, "violated at instance " + std::to_string(it)};
    }
    return {true, "200 pairs, zero violations"};
}

// 5. Fourier suite: round trip 1e-12, Parseval 1e-10, spectral = direct
//    diffusion 1e-10 (n <= 8), self-adjointness 1e-10, coupling bound
//    W(diffused, base) <= eps n via exact transport (n <= 6).
Outcome fourier_suite() {
    std::mt19937_64 rng(505);
    double worst_rt = 0.0, worst_pv = 0.0, worst_dd = 0.0, worst_adj = 0.0;
    for (int n = 1; n <= 12; ++n) {
        std::vector<double> v(std::size_t(1) << n);
        for (double& x : v) x = 4.0 * uniform01(rng) - 2.0;
        const CubeFunction f(n, v);
        const SpectralVector s = wht(f);
        const CubeFunction back = inverse_wht(s);
        double energy_f = 0.0, energy_c = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            worst_rt = std::max(worst_rt, std::abs(back.values[i] - v[i]));
            energy_f += v[i] * v[i];
        }
        for (const double c : s.coef) energy_c += c * c;
        worst_pv = std::max(worst_pv, std::abs(energy_c - energy_f / double(v.size())));
    }
    if (worst_rt > 1e-12) return {false, "round trip " + std::to_string(worst_rt)};
    if (worst_pv > 1e-10) return {false, "parseval " + std::to_string(worst_pv)};

    for (int n = 1; n <= 8; ++n) {
        const DenseMeasure m = detail::random_dense_measure(n, rng);
        std::vector<double> v(std::size_t(1) << n);
        for (double& x : v) x = 4.0 * uniform01(rng) - 2.0;
        const CubeFunction f(n, v);
        for (const double eps : {0.0, 0.17, 0.42, 0.5}) {
            const DenseMeasure spectral = diffuse_epsilon(m, eps);
            const DenseMeasure direct = diffuse_epsilon_direct(m, eps);
            for (std::size_t x = 0; x < spectral.mass.size(); ++x)
                worst_dd = std::max(worst_dd, std::abs(spectral.mass[x] - direct.mass[x]));
            worst_adj = std::max(worst_adj, std::abs(expectation(f, diffuse_epsilon(m, eps)) -
                                                     expectation(diffuse_function(f, eps), m)));
        }
    }
    if (worst_dd > 1e-10) return {false, "spectral vs direct " + std::to_string(worst_dd)};
    if (worst_adj > 1e-10) return {false, "self-adjointness " + std::to_string(worst_adj)};

    // coupling bound through the exact solver; 1e-6 slack covers the
    // denominator-1e9 rationalization of the diffused table
    for (int n = 2; n <= 6; ++n) {
        const DenseMeasure m = detail::random_dense_measure(n, rng);
        const RationalMeasure base = RationalMeasure::from_dense(m);
        for (const double eps : {0.05, 0.2, 0.35, 0.5}) {
            const double w =
                wasserstein_exact(RationalMeasure::from_dense(diffuse_epsilon(m, eps)), base).value;
            if (w > eps * n + 1e-6)
                return {false, "coupling bound: W=" + std::to_string(w) + " vs eps n=" +
                                   std::to_string(eps * n)};
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "round trip %.1e, parseval %.1e, diffusion %.1e", worst_rt,
                  worst_pv, worst_dd);
    return {true, buf};
}

// 6. Mean of squared empirical coefficients within 5 SE of 1/N for every
//    nonempty subset; n=3, N=10, 1e4 trials.
Outcome coefficient_variance() {
    const CoefficientVarianceReport rep = coefficient_variance_test(3, 10, 10000, 606);
    char buf[96];
    std::snprintf(buf, sizeof buf, "worst |mean-0.1| = %.2g se at subset %u", rep.worst_z,
                  rep.worst_subset);
    return {rep.pass, buf};
}

// 7. Estimates consistent with the closed-form bounds at five (n, N)
//    pairs, 200 trials each: mean - 3 se below the spectral grid minimum,
//    mean + 3 se above the lower-bound radius.
Outcome bound_consistency() {
    const std::vector<std::pair<int, long long>> grid = {
        {8, 64}, {8, 256}, {10, 100}, {10, 1024}, {12, 4096}};
    std::string detail;
    for (const auto& [n, N] : grid) {
        const Estimate est = estimate_expected_distance(n, N, 200, 707);
        double upper = 0.5 * n;
        for (double eps = 0.0; eps <= 0.5 + 1e-9; eps += 0.01)
            upper = std::min(upper, spectral_bound(n, (double)N, std::min(eps, 0.5)));
        const int radius = lower_bound_radius(n, (double)N);
        if (est.mean - 3.0 * est.std_error > upper) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "n=%d N=%lld: mean %.4f - 3se exceeds bound %.4f", n,
                          (long long)N, est.mean, upper);
            return {false, buf};
        }
        if (est.mean + 3.0 * est.std_error < radius) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "n=%d N=%lld: mean %.4f + 3se below radius %d", n,
                          (long long)N, est.mean, radius);
            return {false, buf};
        }
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s(%d,%lld): %.3f<=%.3f", detail.empty() ? "" : " ", n,
                      (long long)N, est.mean, upper);
        detail += buf;
    }
    return {true, detail};
}

// 8. Desk-scale proportional-regime envelope: n=12, N=2^12, 100 trials,
//    mean inside [0.30, 0.85] (asymptotic [1/e, 1/sqrt 2] widened 20%).
Outcome desk_scale_envelope() {
    const Estimate est = estimate_expected_distance(12, 4096, 100, 808);
    char buf[96];
    std::snprintf(buf, sizeof buf, "mean %.4f (se %.4f), window [0.30, 0.85]", est.mean,
                  est.std_error);
    return {est.mean >= 0.30 && est.mean <= 0.85, buf};
}

// 9. (n/2^n) sum (1/i) C(n,i) lands in [1.9, 2.1] at n = 30.
Outcome harmonic_binomial_limit() {
    const double v = scaled_harmonic_binomial_sum(30);
    char buf[64];
    std::snprintf(buf, sizeof buf, "value %.6f", v);
    return {v >= 1.9 && v <= 2.1, buf};
}

// 10. Estimated means nonincreasing in N within 3 combined SE:
//     n=4, N in {4, 16, 64, 256}, 200 trials.
Outcome monotonicity() {
    const MonotonicityReport rep = monotonicity_test(4, {4, 16, 64, 256}, 200, 1010);
    std::string detail = "means";
    for (const Estimate& e : rep.estimates) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " %.4f", e.mean);
        detail += buf;
    }
    return {rep.pass, detail};
}

// 11. Sample variance under the resampling bound 0.15625 (1 + 5/sqrt 500):
//     n=4, N=16, 500 trials.
Outcome variance_under_bound() {
    const VarianceReport rep = variance_test(4, 16, 500, 1111);
    char buf[96];
    std::snprintf(buf, sizeof buf, "sample var %.5f vs %.5f * %.4f", rep.sample_variance, rep.bound,
                  rep.slack_factor);
    return {rep.pass && std::abs(rep.bound - 0.15625) < 1e-12, buf};
}

// 12. Both empirical tails under 2 e^{-t^2 N / 4 n^2} plus 5-sigma
//     binomial slack: n=4, N=64, 1000 trials, t in {0.25, 0.5, 1}.
Outcome concentration_tails() {
    const ConcentrationReport rep = concentration_test(4, 64, 1000, {0.25, 0.5, 1.0}, 1212);
    std::string detail;
    for (const TailCheck& t : rep.tails) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%st=%.2f: %.3f/%.3f<=%.3f", detail.empty() ? "" : " ", t.t,
                      t.upper_frequency, t.lower_frequency, t.bound + t.slack);
        detail += buf;
    }
    return {rep.pass, detail};
}

// 13. Best guess: uniform target minimal against 20 jittered alternatives
//     within 3 paired SE; n=4, N=8, 300 paired trials.
Outcome best_guess() {
    const BestGuessReport rep = best_guess_test(4, 8, 20, 300, 1313);
    double worst = 1e300;
    for (std::size_t p = 0; p < rep.paired_margins.size(); ++p)
        worst = std::min(worst, rep.paired_margins[p] + 3.0 * rep.paired_se[p]);
    char buf[96];
    std::snprintf(buf, sizeof buf, "uniform mean %.4f, worst margin+3se %.4f", rep.uniform_mean,
                  worst);
    return {rep.pass, buf};
}

// 14. Entropy and ball suites: size sandwich for all n <= 30, r <= n/2;
//     quadratic dominance on a 1001-point grid; inverse round trip 1e-10.
Outcome entropy_ball_suites() {
    for (int n = 1; n <= 30; ++n)
        for (int r = 0; 2 * r <= n; ++r) {
            const double h = entropy(double(r) / n).value;
            const double log_ball = std::log((double)ball_size(n, r));
            if (log_ball > n * h + 1e-9) return {false, "upper sandwich fails"};
            if (log_ball < n * h - 0.5 * std::log(2.0 * n) - 1e-9)
                return {false, "lower sandwich fails"};
        }
    for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        if (entropy(x).value > kLog2 - 2.0 * (x - 0.5) * (x - 0.5) + 1e-12)
            return {false, "quadratic cap fails at x=" + std::to_string(x)};
    }
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double x = 0.5 * i / 1000.0;
        worst = std::max(worst, std::abs(entropy_inverse(entropy(x)) - x));
    }
    if (worst > 1e-10) return {false, "inverse round trip " + std::to_string(worst)};
    char buf[64];
    std::snprintf(buf, sizeof buf, "round trip worst %.1e", worst);
    return {true, buf};
}

// 15. Two CLI estimate runs with identical config and seed produce
//     byte-identical output files.
Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path p1 = fs::temp_directory_path() / "cubeot_accept_1.csv";
    const fs::path p2 = fs::temp_directory_path() / "cubeot_accept_2.csv";
    std::ostringstream sink;
    for (const fs::path& p : {p1, p2}) {
        const int code = cli::run({"estimate", "--n", "4", "--N", "16,64", "--trials", "50",
                                   "--seed", "99", "--per-trial", "--out", p.string()},
                                  sink, sink);
        if (code != 0) return {false, "cli exit " + std::to_string(code)};
    }
    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    fs::remove(p1);
    fs::remove(p2);
    if (s1.str().empty()) return {false, "empty output"};
    if (s1.str() != s2.str()) return {false, "outputs differ"};
    return {true, std::to_string(s1.str().size()) + " bytes, identical"};
}

struct Criterion {
    const char* name;
    Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {"solver cross-validation (simplex vs ssp, exact)", solver_cross_validation},
        {"duality certificates (Lipschitz potentials, gap < 1e-9)", duality_certificates},
        {"forced coupling W(dirac, uniform) = n/2", forced_coupling},
        {"total variation sandwich TV <= W <= n TV", tv_sandwich},
        {"fourier suite (round trip, Parseval, diffusion, coupling)", fourier_suite},
        {"empirical coefficient variance = 1/N within 5 se", coefficient_variance},
        {"estimates consistent with closed-form bounds", bound_consistency},
        {"desk-scale envelope at N = 2^n, n = 12", desk_scale_envelope},
        {"scaled harmonic binomial sum near 2 at n = 30", harmonic_binomial_limit},
        {"monotonicity of E[W] in N", monotonicity},
        {"variance under the resampling bound", variance_under_bound},
        {"concentration of tails around the median", concentration_tails},
        {"uniform is the best guess", best_guess},
        {"entropy and ball suites", entropy_ball_suites},
        {"byte-identical estimate runs", determinism},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), (int)i + 1) == selected.end())
            continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criteria[i].run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%2zu/15] %s  %s — %s (%.1f s)\n", i + 1, outcome.pass ? "PASS" : "FAIL",
                    criteria[i].name, outcome.detail.c_str(), secs);
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    if (failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
