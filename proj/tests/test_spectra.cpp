#include "eqt/spectra.hpp"
#include "eqt/errors.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace eqt;

namespace {

std::vector<double> random_levels(std::size_t n, std::mt19937_64& rng, bool integer_grid) {
    std::vector<double> lv;
    double e = 0.0;
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::uniform_int_distribution<int> k(1, 3);
    for (std::size_t i = 0; i < n; ++i) {
        e += integer_grid ? k(rng) * 0.5 : u(rng);
        lv.push_back(e);
    }
    return lv;
}

std::vector<double> random_probs(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(n);
    double s = 0.0;
    for (auto& x : p) s += (x = u(rng));
    for (auto& x : p) x /= s;
    return p;
}

}  // namespace

TEST_CASE("levels group eigenbasis indices") {
    const EnergySpectrum s({-1.0, 0.5, 2.0}, {2, 1, 3});
    CHECK(s.dim() == 6);
    CHECK(s.num_levels() == 3);
    CHECK_FALSE(s.is_nondegenerate());
    CHECK(s.level_of(0) == 0);
    CHECK(s.level_of(1) == 0);
    CHECK(s.level_of(2) == 1);
    CHECK(s.level_of(5) == 2);
    CHECK(s.first_index(2) == 3);
    CHECK(s.energy_of_index(4) == 2.0);
    CHECK(s.max_gap() == doctest::Approx(3.0));
    CHECK(s.min_spacing() == doctest::Approx(1.5));
    CHECK(s.negated().levels() == std::vector<double>{-2.0, -0.5, 1.0});
    CHECK(s.negated().degeneracies() == std::vector<int>{3, 1, 2});
}

TEST_CASE("spectrum validation") {
    CHECK_THROWS(EnergySpectrum({1.0, 0.0}, {1, 1}));
    CHECK_THROWS(EnergySpectrum({0.0, 1.0}, {1, 0}));
    CHECK_THROWS(EnergySpectrum({0.0, 1.0}, {1}));
    CHECK_THROWS(EnergySpectrum({0.0, 1e-14}, {1, 1}));
}

TEST_CASE("Hermitian diagonalization matches bisection on the inertia count") {
    std::mt19937_64 rng(11);
    for (std::size_t d : {2u, 5u, 9u}) {
        const Eigen::MatrixXcd h = oracle::random_hermitian(d, rng);
        const HermitianDecomposition dec = spectrum_from_hermitian(h);
        const std::vector<double> ref = oracle::bisection_eigenvalues(h);
        REQUIRE(dec.spectrum.dim() == d);
        for (std::size_t i = 0; i < d; ++i) CHECK(dec.spectrum.energy_of_index(i) == doctest::Approx(ref[i]).epsilon(1e-10));
        const Eigen::MatrixXcd e = Eigen::VectorXd::Map(dec.spectrum.index_energies().data(), static_cast<Eigen::Index>(d))
                                       .cast<std::complex<double>>()
                                       .asDiagonal();
        CHECK((h * dec.basis - dec.basis * e).norm() < 1e-10);
        CHECK((dec.basis.adjoint() * dec.basis - Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))).norm() < 1e-10);
    }
}

TEST_CASE("degenerate Hermitian input collapses to levels") {
    std::mt19937_64 rng(5);
    const Eigen::MatrixXcd u = oracle::random_subspace(4, 4, rng);
    Eigen::VectorXd diag(4);
    diag << 1.0, 1.0, 2.0, 3.0;
    const Eigen::MatrixXcd h = u * diag.cast<std::complex<double>>().asDiagonal() * u.adjoint();
    const HermitianDecomposition dec = spectrum_from_hermitian(h);
    CHECK(dec.spectrum.num_levels() == 3);
    CHECK(dec.spectrum.degeneracies() == std::vector<int>{2, 1, 1});
    CHECK(dec.spectrum.levels()[0] == doctest::Approx(1.0));
}

TEST_CASE("eta uses a closed window") {
    const EnergySpectrum s = EnergySpectrum::nondegenerate({0.0, 1.0, 2.0});
    const std::vector<double> p = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    CHECK(eta(s, p, 1.0).value == doctest::Approx(2.0 / 3));
    CHECK(eta(s, p, 0.999).value == doctest::Approx(1.0 / 3));
    CHECK(eta(s, p, 2.0).value == doctest::Approx(1.0));
    const EtaResult r = eta(s, p, 1.0);
    CHECK(r.window_upper - r.window_lower == doctest::Approx(1.0));
}

TEST_CASE("eta input checks") {
    const EnergySpectrum s = EnergySpectrum::nondegenerate({0.0, 1.0});
    const std::vector<double> p = {0.5, 0.5};
    CHECK_THROWS(eta(s, p, 0.0));
    CHECK_THROWS(eta(s, p, -1.0));
    CHECK_THROWS(eta(s, std::vector<double>{0.5}, 1.0));
    CHECK_THROWS_AS(eta(s, std::vector<double>{0.5, 0.4}, 1.0), ValidationError);
}

TEST_CASE("sliding-window eta and N(eps) agree with brute force for up to 12 levels") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 12);
        const bool grid = trial % 2 == 0;  // exact ties at window edges
        const std::vector<double> lv = random_levels(n, rng, grid);
        const std::vector<double> p = random_probs(n, rng);
        const EnergySpectrum s = EnergySpectrum::nondegenerate(lv);
        const GapSet gaps(s);
        for (double eps : {0.1, 0.5, 1.0, 1.5, 3.0, 100.0}) {
            CHECK(eta(s, p, eps).value == doctest::Approx(oracle::brute_eta(lv, p, eps)).epsilon(1e-12));
            CHECK(gap_density(gaps, eps) == oracle::brute_gap_density(lv, eps));
        }
    }
}

TEST_CASE("gap set holds every ordered pair of distinct levels") {
    const EnergySpectrum s({0.0, 1.0, 3.0}, {2, 1, 1});
    const GapSet g(s);
    CHECK(g.size() == 6);
    CHECK(g.gaps() == std::vector<double>{-3.0, -2.0, -1.0, 1.0, 2.0, 3.0});
    CHECK(gap_density(g, 0.5) == 1);
    CHECK(gap_density(g, 2.0) == 3);
    CHECK(gap_density(g, 6.0) == 6);
}
