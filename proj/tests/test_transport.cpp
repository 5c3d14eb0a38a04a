#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cubeot/transport.hpp"

using namespace cubeot;

namespace {

RationalMeasure random_rational_measure(int n, std::mt19937_64& rng) {
    // random composition of 64 mass units over the cube, some cells empty
    const std::size_t size = std::size_t(1) << n;
    std::vector<long long> num(size, 0);
    for (long long unit = 0; unit < 64; ++unit) num[rng() & (size - 1)] += 1;
    RationalMeasure m;
    m.n = n;
    m.den = 64;
    for (std::uint32_t x = 0; x < size; ++x)
        if (num[x] > 0) m.atoms.emplace_back(x, num[x]);
    return m;
}

RationalMeasure random_empirical(int n, long long samples, std::mt19937_64& rng) {
    return RationalMeasure::from_empirical(sample_empirical(n, samples, rng));
}

}  // namespace

TEST_CASE("identical measures transport for free") {
    std::mt19937_64 rng(1);
    const RationalMeasure m = random_rational_measure(3, rng);
    const TransportSolution sol = wasserstein_exact(m, m);
    CHECK(sol.value == 0.0);
    CHECK(sol.exact_value == Rational(0, 1));
    for (const PlanEntry& e : sol.plan) CHECK(e.source == e.target);
    CHECK(verify_plan(sol, m, m).pass);
}

TEST_CASE("point mass to uniform costs n/2 exactly") {
    std::mt19937_64 rng(2);
    for (int n = 1; n <= 8; ++n) {
        const std::uint32_t bits = std::uint32_t(rng()) & ((1u << n) - 1);
        const TransportSolution sol = wasserstein_exact(
            RationalMeasure::dirac(CubePoint(bits, n)), RationalMeasure::uniform(n));
        CHECK(sol.exact_value == Rational(n, 2));
    }
}

TEST_CASE("network simplex agrees with successive shortest paths") {
    std::mt19937_64 rng(3);
    for (int it = 0; it < 120; ++it) {
        const int n = 2 + (int)(rng() % 3);  // n in 2..4
        const RationalMeasure a =
            (it % 3 == 0) ? random_rational_measure(n, rng) : random_empirical(n, 1 + rng() % 40, rng);
        const RationalMeasure b = (it % 2 == 0) ? random_rational_measure(n, rng)
                                                : RationalMeasure::uniform(n);
        const TransportSolution sol = wasserstein_exact(a, b);
        const Rational ssp = wasserstein_ssp(a, b);
        CHECK(sol.exact_value == ssp);
        const PlanCheckReport rep = verify_plan(sol, a, b);
        CHECK(rep.pass);
        CHECK(rep.duality_gap <= 1e-9);
    }
}

TEST_CASE("ssp on simple instances") {
    CHECK(wasserstein_ssp(RationalMeasure::dirac(CubePoint(0, 4)),
                          RationalMeasure::dirac(CubePoint(0, 4))) == Rational(0, 1));
    CHECK(wasserstein_ssp(RationalMeasure::dirac(CubePoint(0b1010, 4)),
                          RationalMeasure::dirac(CubePoint(0b0110, 4))) == Rational(2, 1));
}

TEST_CASE("total variation") {
    std::mt19937_64 rng(4);
    const RationalMeasure m = random_rational_measure(3, rng);
    CHECK(total_variation_exact(m, m) == Rational(0, 1));
    CHECK(total_variation_exact(RationalMeasure::dirac(CubePoint(1, 3)),
                                RationalMeasure::dirac(CubePoint(6, 3))) == Rational(1, 1));
    // positive part of dirac minus uniform on the 2-cube
    CHECK(total_variation_exact(RationalMeasure::dirac(CubePoint(0, 2)),
                                RationalMeasure::uniform(2)) == Rational(3, 4));
    // symmetric in its arguments
    const RationalMeasure other = random_rational_measure(3, rng);
    CHECK(total_variation_exact(m, other) == total_variation_exact(other, m));
    // dense overload
    CHECK(total_variation(DenseMeasure::dirac(CubePoint(0, 2)), DenseMeasure::uniform(2)) ==
          doctest::Approx(0.75));
    CHECK_THROWS_AS(total_variation(DenseMeasure::uniform(2), DenseMeasure::uniform(3)),
                    std::invalid_argument);
}

TEST_CASE("total variation sandwiches the distance") {
    std::mt19937_64 rng(5);
    for (int it = 0; it < 60; ++it) {
        const int n = 2 + (int)(rng() % 5);  // n in 2..6
        const RationalMeasure a = random_rational_measure(n, rng);
        const RationalMeasure b =
            (it % 2 == 0) ? random_rational_measure(n, rng) : RationalMeasure::uniform(n);
        const Rational tv = total_variation_exact(a, b);
        const Rational w = wasserstein_exact(a, b).exact_value;
        CHECK(tv <= w);
        CHECK(w <= tv * (long long)n);
    }
}

TEST_CASE("metric properties of the exact distance") {
    std::mt19937_64 rng(6);
    for (int it = 0; it < 25; ++it) {
        const int n = 2 + (int)(rng() % 4);  // n in 2..5
        const RationalMeasure a = random_rational_measure(n, rng);
        const RationalMeasure b = random_rational_measure(n, rng);
        const RationalMeasure c = random_rational_measure(n, rng);
        const Rational wab = wasserstein_exact(a, b).exact_value;
        const Rational wba = wasserstein_exact(b, a).exact_value;
        CHECK(wab == wba);
        const Rational wac = wasserstein_exact(a, c).exact_value;
        const Rational wbc = wasserstein_exact(b, c).exact_value;
        CHECK(wac <= wab + wbc);
    }
}

TEST_CASE("dual lower bound") {
    const RationalMeasure uniform = RationalMeasure::uniform(3);
    const RationalMeasure point = RationalMeasure::dirac(CubePoint(0, 3));

    CHECK(dual_lower_bound(CubeFunction::constant(3, 4.2), point, uniform) ==
          doctest::Approx(0.0));

    // antipodal distance function realizes the diameter
    const CubePoint x0(0, 3), antipode(7, 3);
    const CubeFunction dist = CubeFunction::distance_to(x0);
    CHECK(dual_lower_bound(dist, RationalMeasure::dirac(antipode), RationalMeasure::dirac(x0)) ==
          doctest::Approx(3.0));

    // the solver's own potentials reproduce the optimum
    std::mt19937_64 rng(7);
    const RationalMeasure a = random_rational_measure(4, rng);
    const RationalMeasure b = random_rational_measure(4, rng);
    const TransportSolution sol = wasserstein_exact(a, b);
    std::vector<double> table(16, 0.0);
    for (const auto& [bits, value] : sol.potentials) table[bits] = value;
    // fill the rest of the cube with the tight Lipschitz extension
    for (std::uint32_t x = 0; x < 16; ++x) {
        bool in_support = false;
        for (const auto& [bits, value] : sol.potentials)
            if (bits == x) in_support = true;
        if (in_support) continue;
        double best = 1e300;
        for (const auto& [bits, value] : sol.potentials)
            best = std::min(best, value + std::popcount(x ^ bits));
        table[x] = best;
    }
    const CubeFunction potentials(4, std::move(table));
    CHECK(dual_lower_bound(potentials, a, b) == doctest::Approx(sol.value).epsilon(1e-9));

    // a non-Lipschitz candidate is rejected
    std::vector<double> bad(8, 0.0);
    bad[0] = 5.0;
    CHECK_THROWS_AS(dual_lower_bound(CubeFunction(3, std::move(bad)), point, uniform),
                    std::invalid_argument);
}

TEST_CASE("plan verification flags injected faults") {
    std::mt19937_64 rng(8);
    const RationalMeasure a = random_rational_measure(3, rng);
    const RationalMeasure b = random_rational_measure(3, rng);
    TransportSolution sol = wasserstein_exact(a, b);
    REQUIRE(verify_plan(sol, a, b).pass);

    TransportSolution bad_mass = sol;
    REQUIRE(!bad_mass.plan.empty());
    bad_mass.plan[0].mass = bad_mass.plan[0].mass + Rational(1, 1000);
    const PlanCheckReport mass_rep = verify_plan(bad_mass, a, b);
    CHECK(!mass_rep.pass);
    CHECK(!mass_rep.marginals_ok);

    TransportSolution bad_pot = sol;
    REQUIRE(bad_pot.potentials.size() >= 2);
    bad_pot.potentials[0].second += 50.0;
    const PlanCheckReport pot_rep = verify_plan(bad_pot, a, b);
    CHECK(!pot_rep.pass);
    CHECK(!pot_rep.lipschitz_ok);
}

TEST_CASE("potentials are 1-Lipschitz across the support union") {
    std::mt19937_64 rng(9);
    for (int n = 2; n <= 8; n += 2) {
        const RationalMeasure a = random_empirical(n, 20, rng);
        const RationalMeasure b = RationalMeasure::uniform(n);
        const TransportSolution sol = wasserstein_exact(a, b);
        const auto& pot = sol.potentials;
        for (std::size_t i = 0; i < pot.size(); ++i)
            for (std::size_t j = 0; j < pot.size(); ++j)
                CHECK(pot[i].second - pot[j].second <=
                      std::popcount(pot[i].first ^ pot[j].first) + 1e-9);
    }
}

TEST_CASE("malformed inputs are rejected") {
    CHECK_THROWS_AS(wasserstein_exact(RationalMeasure::uniform(3), RationalMeasure::uniform(4)),
                    std::invalid_argument);
    RationalMeasure broken = RationalMeasure::uniform(2);
    broken.atoms[0].second = 2;  // masses no longer sum to 1
    CHECK_THROWS_AS(wasserstein_exact(broken, RationalMeasure::uniform(2)), std::invalid_argument);
    CHECK_THROWS_AS(wasserstein_ssp(broken, RationalMeasure::uniform(2)), std::invalid_argument);
}

TEST_CASE("resource budgets are enforced") {
    TransportOptions tight;
    tight.max_nodes = 8;
    CHECK_THROWS_AS(wasserstein_exact(RationalMeasure::dirac(CubePoint(0, 4)),
                                      RationalMeasure::uniform(4), tight),
                    ResourceError);
    TransportOptions tiny_edges;
    tiny_edges.max_ssp_edges = 4;
    std::mt19937_64 rng(10);
    CHECK_THROWS_AS(wasserstein_ssp(random_empirical(4, 12, rng), RationalMeasure::uniform(4),
                                    tiny_edges),
                    ResourceError);
}

TEST_CASE("dense rationalization is exact and normalized") {
    std::vector<double> mass = {0.1, 0.2, 0.3, 0.4};
    const RationalMeasure m = RationalMeasure::from_dense(DenseMeasure(2, mass), 100);
    long long total = 0;
    for (const auto& [bits, num] : m.atoms) total += num;
    CHECK(total == m.den);
    CHECK(m.mass(0) == doctest::Approx(0.1));
    CHECK(m.mass(3) == doctest::Approx(0.4));
}
