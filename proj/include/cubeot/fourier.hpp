#pragma once
// Walsh-Hadamard Fourier analysis on the Boolean cube: the fast transform
// and its inverse, spectra of probability measures, the coordinate-flip
// and Hamming-ball diffusion operators, influences, and the Lipschitz
// modulus used by the Kantorovich dual.
//
// Measures enter Fourier space through their density with respect to the
// uniform measure, density(x) = 2^n * mass(x). Under that convention the
// S-th coefficient of a measure is exactly E_v[chi_S], the empty set
// carries coefficient 1, and the uniform measure has a flat spectrum.

#include <cstdint>
#include <cstdlib>
#include <vector>

#include "cubeot/cube.hpp"

namespace cubeot {

// Dense tables beyond this dimension are refused rather than silently
// allocating gigabytes.
inline constexpr int kMaxDenseDim = 24;

struct CubeFunction {
    int n = 1;
    std::vector<double> values;

    CubeFunction(int n_, std::vector<double> values_) : n(n_), values(std::move(values_)) {
        detail::require(n >= 1 && n <= kMaxDenseDim, "CubeFunction: dimension out of range");
        detail::require(values.size() == (std::size_t(1) << n), "CubeFunction: table size mismatch");
    }

    static CubeFunction constant(int n_, double c) {
        return CubeFunction(n_, std::vector<double>(std::size_t(1) << n_, c));
    }

    // f(x) = d(x, center), the canonical 1-Lipschitz witness.
    static CubeFunction distance_to(CubePoint center) {
        std::vector<double> v(std::size_t(1) << center.n);
        for (std::uint32_t x = 0; x < v.size(); ++x)
            v[x] = std::popcount(x ^ center.bits);
        return CubeFunction(center.n, std::move(v));
    }

    // The parity chi_S as a function table.
    static CubeFunction parity(int n_, std::uint32_t subset) {
        std::vector<double> v(std::size_t(1) << n_);
        for (std::uint32_t x = 0; x < v.size(); ++x)
            v[x] = (std::popcount(x & subset) & 1) ? -1.0 : 1.0;
        return CubeFunction(n_, std::move(v));
    }
};

// 2^n Fourier coefficients indexed by subset bitmask.
struct SpectralVector {
    int n = 1;
    std::vector<double> coef;
};

namespace detail {

// In-place butterfly; computes g(S) = sum_x v(x) * (-1)^popcount(S & x).
inline void wht_butterfly(std::vector<double>& v) {
    const std::size_t size = v.size();
    for (std::size_t len = 1; len < size; len <<= 1) {
        for (std::size_t i = 0; i < size; i += len << 1) {
            for (std::size_t j = i; j < i + len; ++j) {
                const double a = v[j], b = v[j + len];
                v[j] = a + b;
                v[j + len] = a - b;
            }
        }
    }
}

}  // namespace detail

// hat f(S) = 2^-n sum_x f(x) chi_S(x), via the fast transform in O(n 2^n).
inline SpectralVector wht(const CubeFunction& f) {
    std::vector<double> v = f.values;
    detail::wht_butterfly(v);
    const double scale = 1.0 / double(std::uint64_t(1) << f.n);
    for (double& c : v) c *= scale;
    return SpectralVector{f.n, std::move(v)};
}

inline CubeFunction inverse_wht(const SpectralVector& s) {
    std::vector<double> v = s.coef;
    detail::wht_butterfly(v);
    return CubeFunction(s.n, std::move(v));
}

// Spectrum of a measure: coef(S) = E_v[chi_S].
inline SpectralVector measure_coefficients(const DenseMeasure& m) {
    detail::require(m.n <= kMaxDenseDim, "measure_coefficients: dimension too large");
    std::vector<double> density = m.mass;
    const double scale = double(std::uint64_t(1) << m.n);
    for (double& d : density) d *= scale;
    return wht(CubeFunction(m.n, std::move(density)));
}

inline SpectralVector measure_coefficients(const EmpiricalMeasure& m) {
    return measure_coefficients(m.to_dense());
}

inline double expectation(const CubeFunction& f, const DenseMeasure& m) {
    detail::require(f.n == m.n, "expectation: dimension mismatch");
    double s = 0.0;
    for (std::size_t x = 0; x < f.values.size(); ++x) s += f.values[x] * m.mass[x];
    return s;
}

inline double expectation(const CubeFunction& f, const EmpiricalMeasure& m) {
    detail::require(f.n == m.n, "expectation: dimension mismatch");
    double s = 0.0;
    for (const auto& [bits, c] : m.counts) s += f.values[bits] * double(c);
    return s / double(m.total);
}

namespace detail {

inline DenseMeasure clean_mass_table(int n, std::vector<double> mass) {
    double total = 0.0;
    for (double& m : mass) {
        // Spectral round trips may leave -1e-12-scale noise; anything
        // larger signals a logic error, not rounding.
        if (m < -1e-12) throw std::runtime_error("diffusion produced negative mass");
        if (m < 0.0) m = 0.0;
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::runtime_error("diffusion broke normalization");
    for (double& m : mass) m /= total;
    return DenseMeasure(n, std::move(mass));
}

}  // namespace detail

// Coordinate-flip diffusion of a function: multiplies the S-th coefficient
// by (1-2eps)^|S|.
inline CubeFunction diffuse_function(const CubeFunction& f, double eps) {
    detail::require(eps >= 0.0 && eps <= 0.5, "diffuse: eps outside [0, 1/2]");
    SpectralVector s = wht(f);
    std::vector<double> pow_by_size(f.n + 1);
    pow_by_size[0] = 1.0;
    for (int k = 1; k <= f.n; ++k) pow_by_size[k] = pow_by_size[k - 1] * (1.0 - 2.0 * eps);
    for (std::uint32_t mask = 0; mask < s.coef.size(); ++mask)
        s.coef[mask] *= pow_by_size[std::popcount(mask)];
    return inverse_wht(s);
}

// eps-diffusion of a measure by the spectral route.
inline DenseMeasure diffuse_epsilon(const DenseMeasure& m, double eps) {
    CubeFunction density(m.n, [&] {
        std::vector<double> d = m.mass;
        const double scale = double(std::uint64_t(1) << m.n);
        for (double& v : d) v *= scale;
        return d;
    }());
    CubeFunction diffused = diffuse_function(density, eps);
    const double scale = 1.0 / double(std::uint64_t(1) << m.n);
    for (double& v : diffused.values) v *= scale;
    return detail::clean_mass_table(m.n, std::move(diffused.values));
}

inline DenseMeasure diffuse_epsilon(const EmpiricalMeasure& m, double eps) {
    return diffuse_epsilon(m.to_dense(), eps);
}

// eps-diffusion by direct convolution with the flip kernel,
// (1-eps)^(n-d) eps^d. O(4^n); the oracle for the spectral route.
inline DenseMeasure diffuse_epsilon_direct(const DenseMeasure& m, double eps) {
    detail::require(eps >= 0.0 && eps <= 0.5, "diffuse: eps outside [0, 1/2]");
    detail::require(m.n <= 14, "diffuse_epsilon_direct: direct convolution too large");
    const std::size_t size = m.mass.size();
    std::vector<double> kernel(m.n + 1);
    kernel[0] = std::pow(1.0 - eps, m.n);
    for (int d = 1; d <= m.n; ++d)
        kernel[d] = (eps == 0.0) ? 0.0 : kernel[d - 1] / (1.0 - eps) * eps;
    std::vector<double> out(size, 0.0);
    for (std::uint32_t x = 0; x < size; ++x) {
        double s = 0.0;
        for (std::uint32_t y = 0; y < size; ++y)
            s += kernel[std::popcount(x ^ y)] * m.mass[y];
        out[x] = s;
    }
    return detail::clean_mass_table(m.n, std::move(out));
}

inline DenseMeasure diffuse_epsilon_direct(const EmpiricalMeasure& m, double eps) {
    return diffuse_epsilon_direct(m.to_dense(), eps);
}

// Ball diffusion: averages mass over the radius-r Hamming ball. |B| does
// not depend on the center, so the operator conserves total mass exactly.
// Callers normally keep r <= n/2; any r <= n is accepted (r == n gives
// the uniform measure).
inline DenseMeasure diffuse_ball(const DenseMeasure& m, int r) {
    detail::require(r >= 0 && r <= m.n, "diffuse_ball: radius out of range");
    const std::size_t size = m.mass.size();
    std::vector<std::uint32_t> offsets;
    offsets.reserve(ball_size(m.n, r));
    for (std::uint32_t mask = 0; mask < size; ++mask)
        if (std::popcount(mask) <= r) offsets.push_back(mask);
    std::vector<double> out(size, 0.0);
    const double inv = 1.0 / double(offsets.size());
    for (std::uint32_t x = 0; x < size; ++x) {
        double s = 0.0;
        for (std::uint32_t off : offsets) s += m.mass[x ^ off];
        out[x] = s * inv;
    }
    return detail::clean_mass_table(m.n, std::move(out));
}

inline DenseMeasure diffuse_ball(const EmpiricalMeasure& m, int r) {
    return diffuse_ball(m.to_dense(), r);
}

struct InfluenceReport {
    std::vector<double> per_coordinate;
    double total = 0.0;
};

// Influences from the squared-difference definition,
// Inf_i(f) = E[(f(x with x_i=+1) - f(x with x_i=-1))^2] / 4.
// The total matches the spectral formula sum_S |S| hat f(S)^2.
inline InfluenceReport influence(const CubeFunction& f) {
    InfluenceReport rep;
    rep.per_coordinate.assign(f.n, 0.0);
    const std::size_t size = f.values.size();
    for (int i = 0; i < f.n; ++i) {
        const std::uint32_t bit = std::uint32_t(1) << i;
        double acc = 0.0;
        for (std::uint32_t x = 0; x < size; ++x) {
            const double diff = f.values[x & ~bit] - f.values[x | bit];
            acc += diff * diff;
        }
        rep.per_coordinate[i] = acc / (4.0 * double(size));
        rep.total += rep.per_coordinate[i];
    }
    return rep;
}

// Largest violation of the 1-Lipschitz condition over Hamming-adjacent
// pairs: max |f(x) - f(y)| - 1. Adjacency suffices because Hamming
// distance is the path metric of the cube graph. Nonpositive iff f is
// 1-Lipschitz.
inline double lipschitz_violation(const CubeFunction& f) {
    double worst = -1.0;
    const std::size_t size = f.values.size();
    for (int i = 0; i < f.n; ++i) {
        const std::uint32_t bit = std::uint32_t(1) << i;
        for (std::uint32_t x = 0; x < size; ++x) {
            if (x & bit) continue;
            const double gap = std::abs(f.values[x] - f.values[x | bit]);
            if (gap - 1.0 > worst) worst = gap - 1.0;
        }
    }
    return worst;
}

}  // namespace cubeot
