#pragma once
// Geometry and combinatorics of the Boolean cube {-1,+1}^n under the
// Hamming metric: point encoding, balls, exact binomials, the binary
// entropy function and its inverse, and seeded uniform sampling.

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cubeot {

// Dimensions are capped so 2^n fits in native integers and dense tables
// stay addressable. Dense experiments target much smaller n.
inline constexpr int kMaxDim = 30;

inline constexpr double kLog2 = 0.6931471805599453;

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace detail

// A vertex of {-1,+1}^n. Bit i == 0 encodes coordinate +1, bit i == 1
// encodes -1; with this convention the parity function chi_S(x) is
// (-1)^popcount(S & bits).
struct CubePoint {
    std::uint32_t bits = 0;
    int n = 1;

    CubePoint() = default;
    CubePoint(std::uint32_t bits_, int n_) : bits(bits_), n(n_) {
        detail::require(n >= 1 && n <= kMaxDim, "CubePoint: dimension out of range");
        detail::require((std::uint64_t)bits < (std::uint64_t(1) << n), "CubePoint: bits out of range");
    }

    int coordinate(int i) const { return ((bits >> i) & 1u) ? -1 : +1; }

    friend auto operator<=>(const CubePoint&, const CubePoint&) = default;
};

inline int hamming(CubePoint x, CubePoint y) {
    detail::require(x.n == y.n, "hamming: dimension mismatch");
    return std::popcount(x.bits ^ y.bits);
}

// Exact C(n, i) for n <= kMaxDim: the running product stays well inside
// 64 bits (max C(30,15)*30 < 2^33).
inline std::uint64_t binomial(int n, int i) {
    detail::require(n >= 0 && n <= kMaxDim, "binomial: n out of range");
    detail::require(i >= 0 && i <= n, "binomial: index out of range");
    if (i > n - i) i = n - i;
    std::uint64_t c = 1;
    for (int k = 1; k <= i; ++k) {
        c = c * (std::uint64_t)(n - k + 1) / (std::uint64_t)k;
    }
    return c;
}

// |B(x, r)| = sum_{i<=r} C(n, i), exact.
inline std::uint64_t ball_size(int n, int r) {
    detail::require(n >= 1 && n <= kMaxDim, "ball_size: dimension out of range");
    detail::require(r >= 0 && r <= n, "ball_size: radius out of range");
    std::uint64_t total = 0, c = 1;
    for (int i = 0; i <= r; ++i) {
        if (i) c = c * (std::uint64_t)(n - i + 1) / (std::uint64_t)i;
        total += c;
    }
    return total;
}

// Enumerates B(x, r) ordered by the flipped-subset bitmask, ascending.
// Cost is O(2^n) regardless of r; fine at the dimensions we enumerate.
inline std::vector<CubePoint> ball_points(CubePoint x, int r) {
    detail::require(r >= 0 && r <= x.n, "ball_points: radius out of range");
    std::vector<CubePoint> pts;
    pts.reserve(ball_size(x.n, r));
    const std::uint32_t end = std::uint32_t(1) << x.n;
    for (std::uint32_t m = 0; m < end; ++m) {
        if (std::popcount(m) <= r) pts.push_back(CubePoint(x.bits ^ m, x.n));
    }
    return pts;
}

// Natural-log binary entropy, H(x) = -x log x - (1-x) log(1-x), with the
// continuity convention 0 log 0 = 0 at the endpoints.
struct EntropyValue {
    double value = 0.0;

    EntropyValue() = default;
    explicit EntropyValue(double v) : value(v) {
        detail::require(v >= -1e-15 && v <= kLog2 + 1e-12, "EntropyValue: outside [0, log 2]");
        value = std::clamp(v, 0.0, kLog2);
    }
};

inline EntropyValue entropy(double x) {
    detail::require(x >= 0.0 && x <= 1.0, "entropy: argument outside [0,1]");
    if (x == 0.0 || x == 1.0) return EntropyValue(0.0);
    return EntropyValue(-x * std::log(x) - (1.0 - x) * std::log(1.0 - x));
}

// The unique x in [0, 1/2] with H(x) = y. H is strictly increasing there,
// so plain bisection converges unconditionally, including near the flat
// region at 1/2 where Newton steps degenerate.
inline double entropy_inverse(EntropyValue y) {
    const double target = y.value;
    if (target <= 0.0) return 0.0;
    if (target >= kLog2) return 0.5;
    double lo = 0.0, hi = 0.5;
    while (hi - lo > 1e-13) {
        double mid = 0.5 * (lo + hi);
        if (entropy(mid).value < target) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// ln C(n, i) via log-gamma; valid far beyond kMaxDim, used by the bound
// evaluators in log space.
inline double log_binomial(long long n, long long i) {
    detail::require(n >= 0, "log_binomial: negative n");
    detail::require(i >= 0 && i <= n, "log_binomial: index out of range");
    if (i == 0 || i == n) return 0.0;
    return std::lgamma((double)n + 1.0) - std::lgamma((double)i + 1.0) -
           std::lgamma((double)(n - i) + 1.0);
}

template <typename Rng>
inline CubePoint sample_uniform(int n, Rng& rng) {
    detail::require(n >= 1 && n <= kMaxDim, "sample_uniform: dimension out of range");
    return CubePoint((std::uint32_t)rng() & ((std::uint32_t(1) << n) - 1u), n);
}

// A full table of 2^n nonnegative masses summing to 1.
struct DenseMeasure {
    int n = 1;
    std::vector<double> mass;

    DenseMeasure(int n_, std::vector<double> mass_) : n(n_), mass(std::move(mass_)) {
        detail::require(n >= 1 && n <= kMaxDim, "DenseMeasure: dimension out of range");
        detail::require(mass.size() == (std::size_t(1) << n), "DenseMeasure: table size mismatch");
        double total = 0.0;
        for (double& m : mass) {
            detail::require(m >= -1e-12, "DenseMeasure: negative mass");
            if (m < 0.0) m = 0.0;
            total += m;
        }
        detail::require(std::abs(total - 1.0) <= 1e-12, "DenseMeasure: masses do not sum to 1");
    }

    static DenseMeasure uniform(int n_) {
        detail::require(n_ >= 1 && n_ <= kMaxDim, "DenseMeasure: dimension out of range");
        return DenseMeasure(n_, std::vector<double>(std::size_t(1) << n_, 1.0 / double(std::uint64_t(1) << n_)));
    }

    static DenseMeasure dirac(CubePoint x) {
        std::vector<double> m(std::size_t(1) << x.n, 0.0);
        m[x.bits] = 1.0;
        return DenseMeasure(x.n, std::move(m));
    }

    std::size_t size() const { return mass.size(); }
};

// The multiset of N sampled points: counts sorted by bit pattern, every
// count positive, counts summing to N. Mass at x is count(x)/N.
struct EmpiricalMeasure {
    int n = 1;
    long long total = 0;
    std::vector<std::pair<std::uint32_t, long long>> counts;

    long long count(std::uint32_t bits) const {
        auto it = std::lower_bound(counts.begin(), counts.end(), bits,
                                   [](const auto& e, std::uint32_t b) { return e.first < b; });
        return (it != counts.end() && it->first == bits) ? it->second : 0;
    }

    double mass(std::uint32_t bits) const { return double(count(bits)) / double(total); }

    DenseMeasure to_dense() const {
        std::vector<double> m(std::size_t(1) << n, 0.0);
        for (const auto& [bits, c] : counts) m[bits] = double(c) / double(total);
        return DenseMeasure(n, std::move(m));
    }
};

inline EmpiricalMeasure empirical_measure(const std::vector<CubePoint>& points) {
    detail::require(!points.empty(), "empirical_measure: empty sample");
    const int n = points.front().n;
    std::vector<std::uint32_t> bits;
    bits.reserve(points.size());
    for (const CubePoint& p : points) {
        detail::require(p.n == n, "empirical_measure: mixed dimensions");
        bits.push_back(p.bits);
    }
    std::sort(bits.begin(), bits.end());
    EmpiricalMeasure em;
    em.n = n;
    em.total = (long long)bits.size();
    for (std::size_t i = 0; i < bits.size();) {
        std::size_t j = i;
        while (j < bits.size() && bits[j] == bits[i]) ++j;
        em.counts.emplace_back(bits[i], (long long)(j - i));
        i = j;
    }
    return em;
}

template <typename Rng>
inline EmpiricalMeasure sample_empirical(int n, long long num_samples, Rng& rng) {
    detail::require(num_samples >= 1, "sample_empirical: need at least one sample");
    std::vector<CubePoint> pts;
    pts.reserve((std::size_t)num_samples);
    for (long long i = 0; i < num_samples; ++i) pts.push_back(sample_uniform(n, rng));
    return empirical_measure(pts);
}

}  // namespace cubeot
