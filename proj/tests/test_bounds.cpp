#include "eqt/bounds.hpp"
#include "eqt/averaging.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <boost/math/special_functions/erf.hpp>

#include <numbers>
#include <random>

using namespace eqt;

TEST_CASE("constants") {
    const double pi = std::numbers::pi;
    const double c_pop = 1.25 * pi * std::sqrt(2.0 / (1.0 - std::exp(-2.0)));
    CHECK(constants::kernel_domination() == doctest::Approx(1.25 * pi).epsilon(1e-15));
    CHECK(constants::population_term() == doctest::Approx(c_pop).epsilon(1e-15));
    CHECK(constants::fast_equilibration() == doctest::Approx(c_pop + 1.0).epsilon(1e-15));
    CHECK(std::abs(constants::fast_equilibration() - 6.97) <= 0.005);
    CHECK(constants::purity_eta_factor(2.0) == doctest::Approx(2.0 / (1.0 - std::exp(-2.0))));
    CHECK(constants::purity_eta_factor(0.5) == doctest::Approx(2.0 / (1.0 - std::exp(-0.5))));
}

TEST_CASE("bound reports carry inputs and comparisons") {
    const SpectrumPtr s = share(EnergySpectrum::nondegenerate({0.0, 1.0, 2.0, 3.0}));
    const auto dist = LevelDistribution{{0.25, 0.25, 0.25, 0.25}};
    BoundReport r = fast_equilibration_bound(*s, dist, 2, 0.5);
    // eps = 1/T = 2 covers three levels
    CHECK(r.input("eta") == doctest::Approx(0.75));
    CHECK(r.value == doctest::Approx(constants::fast_equilibration() * std::sqrt(0.75 * 2)));
    CHECK(r.vacuous());
    r.compare(0.1);
    REQUIRE(r.holds.has_value());
    CHECK(*r.holds);
    CHECK_THROWS(r.input("missing"));
    CHECK_THROWS(fast_equilibration_bound(*s, dist, 0, 1.0));
    CHECK_THROWS(fast_equilibration_bound(*s, dist, 1, 0.0));
}

TEST_CASE("n-outcome bound uses min(k, d - k)") {
    const SpectrumPtr s = share(EnergySpectrum::nondegenerate({0.0, 1.0, 2.0, 3.0, 4.0}));
    const auto dist = LevelDistribution{{0.2, 0.2, 0.2, 0.2, 0.2}};
    const std::vector<std::size_t> ranks = {1, 4};
    const BoundReport r = n_outcome_fast_bound(*s, dist, ranks, 10.0);
    const double eta = 0.2;
    CHECK(r.value == doctest::Approx(constants::fast_equilibration() / 2 * std::sqrt(eta) * 2.0));
    const std::vector<std::size_t> bad = {1, 3};
    CHECK_THROWS(n_outcome_fast_bound(*s, dist, bad, 10.0));
}

TEST_CASE("general bounds evaluate the closed forms") {
    std::mt19937_64 rng(3);
    const SpectrumPtr s = share(EnergySpectrum::nondegenerate({0.0, 0.7, 1.1, 2.6, 3.0}));
    const QuantumState psi = QuantumState::pure(s, oracle::random_unit_vector(5, rng));
    const double d_eff = effective_dimension(level_distribution(psi));
    const GapSet gaps(*s);
    const double eps = 0.5;
    const double T = 3.0;
    const double n_eps = static_cast<double>(oracle::brute_gap_density(s->levels(), eps));
    const double expect = 2.5 * std::numbers::pi * (4.0 / d_eff) * n_eps * (1.5 + 1.0 / (eps * T));
    CHECK(general_expectation_bound(psi, gaps, 2.0, eps, T).value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(general_expectation_bound(psi, 2.0, eps, T).value == doctest::Approx(expect).epsilon(1e-12));
    const double dist_expect = 3.0 / 4.0 * std::sqrt(2.5 * std::numbers::pi * n_eps / d_eff * (1.5 + 1.0 / (eps * T)));
    CHECK(general_distinguishability_bound(psi, gaps, 3, eps, T).value == doctest::Approx(dist_expect).epsilon(1e-12));
    CHECK_THROWS(general_distinguishability_bound(psi, gaps, 1, eps, T));
    const QuantumState mixed = dephase(psi);
    CHECK_THROWS(general_expectation_bound(mixed, gaps, 1.0, eps, T));

    const BoundReport best = best_epsilon_distinguishability_bound(psi, gaps, 2, T, 0.01, 10.0, 21);
    for (int i = 0; i < 21; ++i) {
        const double e = 0.01 * std::pow(1000.0, i / 20.0);
        CHECK(best.value <= general_distinguishability_bound(psi, gaps, 2, e, T).value + 1e-12);
    }
}

TEST_CASE("purity bound holds against the exact Lorentzian purity") {
    std::mt19937_64 rng(9);
    const SpectrumPtr s = share(EnergySpectrum({0.0, 0.2, 0.45, 1.0, 1.7, 1.75}, {1, 1, 2, 1, 1, 3}));
    for (int k = 0; k < 20; ++k) {
        const QuantumState psi = QuantumState::pure(s, oracle::random_unit_vector(s->dim(), rng));
        const auto dist = level_distribution(psi);
        for (double T : {0.1, 1.0, 10.0, 100.0}) {
            const double exact = lorentzian_state(psi, T).matrix().squaredNorm();
            for (double delta : {0.5, 1.0, 2.0, 4.0}) {
                CHECK(exact <= purity_eta_bound(*s, dist, T, delta).value + 1e-12);
            }
        }
    }
}

TEST_CASE("Gaussian analytics") {
    CHECK(gaussian_eta_estimate(1.0, 2.0) == doctest::Approx(0.2));
    CHECK(gaussian_eta_estimate(1.0, 0.1) == 1.0);
    for (double x : {0.0, 0.5, 3.0, 10.0, 24.9, 25.1, 40.0, 1000.0}) {
        // reference: boost erfc scaled, or its asymptotic series where erfc underflows
        double ref;
        if (x < 26.0) {
            ref = std::exp(x * x) * boost::math::erfc(x);
        } else {
            const double y = 1.0 / (2.0 * x * x);
            ref = (1.0 - y + 3.0 * y * y - 15.0 * y * y * y + 105.0 * y * y * y * y) / (x * std::sqrt(std::numbers::pi));
        }
        CHECK(erfcx(x) == doctest::Approx(ref).epsilon(1e-12));
    }
    const GaussianPurity g = gaussian_purity_estimate(1.0, 10.0);
    CHECK(g.asymptotic == doctest::Approx(1.0 / (20.0 * std::sqrt(std::numbers::pi))));
    CHECK(std::abs(g.exact / g.asymptotic - 1.0) < 0.1);
}
