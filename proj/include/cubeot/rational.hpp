#pragma once
// Minimal exact rational on 64-bit numerator/denominator with 128-bit
// intermediates. Covers the transport solver's needs: masses are k/N or
// k/2^n style fractions and costs are small integers, so reduced values
// always fit.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cubeot {

namespace detail {

inline __int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline long long narrow128(__int128 v, const char* what) {
    if (v > (__int128)INT64_MAX || v < (__int128)INT64_MIN)
        throw std::overflow_error(std::string(what) + ": rational overflow");
    return (long long)v;
}

}  // namespace detail

struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d) { *this = make((__int128)n, (__int128)d); }

    static Rational make(__int128 n, __int128 d) {
        if (d == 0) throw std::invalid_argument("Rational: zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 g = detail::gcd128(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        Rational r;
        r.num = detail::narrow128(n, "Rational");
        r.den = detail::narrow128(d, "Rational");
        return r;
    }

    double to_double() const { return double(num) / double(den); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return make((__int128)a.num * b.den + (__int128)b.num * a.den, (__int128)a.den * b.den);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return make((__int128)a.num * b.den - (__int128)b.num * a.den, (__int128)a.den * b.den);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return make((__int128)a.num * b.num, (__int128)a.den * b.den);
    }
    friend Rational operator*(const Rational& a, long long k) {
        return make((__int128)a.num * k, (__int128)a.den);
    }
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator<(const Rational& a, const Rational& b) {
        return (__int128)a.num * b.den < (__int128)b.num * a.den;
    }
    friend bool operator<=(const Rational& a, const Rational& b) {
        return (__int128)a.num * b.den <= (__int128)b.num * a.den;
    }
};

}  // namespace cubeot
