#include "eqt/averaging.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numbers>
#include <random>
#include <sstream>

using namespace eqt;

TEST_CASE("uniform grid respects the sampling constraints") {
    const TimeGrid g = TimeGrid::uniform(10.0, 3.0, 16);
    CHECK(g.spacing() <= std::numbers::pi / 12.0 + 1e-15);
    CHECK((g.size() - 1) % 2 == 0);
    CHECK(g.times().front() == 0.0);
    CHECK(g.times().back() == doctest::Approx(10.0));
    double w = 0.0;
    for (double x : g.weights()) w += x;
    CHECK(w == doctest::Approx(10.0));  // trapezoid weights integrate over [0, T]
    CHECK(TimeGrid::uniform(1.0, 0.0, 65).size() >= 65);
}

TEST_CASE("uniform average of cosines matches the analytic value") {
    for (double nu : {0.5, 1.7, 4.0}) {
        for (double T : {0.3, 2.0, 25.0}) {
            const TimeGrid g = TimeGrid::uniform(T, nu, 512);
            const AverageResult r = time_average([nu](double t) { return std::cos(nu * t); }, g);
            CHECK(r.value == doctest::Approx(std::sin(nu * T) / (nu * T)).epsilon(1e-4));
            CHECK(r.refinement_error < 1e-3);
        }
    }
}

TEST_CASE("sample and callable averages agree, independent of workers") {
    const TimeGrid g = TimeGrid::uniform(7.0, 2.0, 200);
    auto f = [](double t) { return std::sin(t) * std::sin(t) + 0.1 * t; };
    std::vector<double> s;
    for (double t : g.times()) s.push_back(f(t));
    const double a = time_average(s, g).value;
    CHECK(a == time_average(f, g, 1e-6, 1).value);
    CHECK(a == time_average(f, g, 1e-6, 3).value);
    CHECK(a == doctest::Approx(oracle::trapezoid_average(f, 7.0, g.size() - 1)).epsilon(1e-13));
}

TEST_CASE("running average") {
    const std::vector<double> t = {0.0, 1.0, 2.0};
    const std::vector<double> v = {1.0, 3.0, 5.0};
    const auto r = running_average(t, v);
    CHECK(r[0] == 1.0);
    CHECK(r[1] == doctest::Approx(2.0));
    CHECK(r[2] == doctest::Approx(3.0));
}

TEST_CASE("csv layout") {
    TimeSeries ts;
    ts.value_name = "D";
    ts.times = {0.0, 0.5};
    ts.values = {1.0, 0.25};
    ts.bound = std::vector<double>{2.0, 2.0};
    std::ostringstream out;
    write_csv(out, ts, "tag");
    CHECK(out.str() == "# tag\nt,D,bound\n0,1,2\n0.5,0.25,2\n");
}

TEST_CASE("Lorentzian phase average matches Cauchy-kernel quadrature") {
    for (double nu : {-3.0, -0.4, 0.0, 0.25, 1.0, 2.5}) {
        for (double T : {0.5, 1.0, 3.0}) {
            const auto ref = oracle::cauchy_phase_average(nu, T);
            const auto got = lorentzian_phase_average(nu, T);
            CHECK(std::abs(got - ref) < 1e-8);
        }
    }
}

TEST_CASE("Lorentzian state, purity closed form and the library quadrature") {
    std::mt19937_64 rng(6);
    const SpectrumPtr s = share(EnergySpectrum({0.0, 0.35, 0.8, 1.6}, {1, 2, 1, 1}));
    const QuantumState psi = QuantumState::pure(s, oracle::random_unit_vector(5, rng));
    for (double T : {0.2, 1.0, 4.0}) {
        const QuantumState wl = lorentzian_state(psi, T);
        const Eigen::MatrixXcd rho = psi.density();
        for (Eigen::Index j = 0; j < 5; ++j) {
            for (Eigen::Index k = 0; k < 5; ++k) {
                const double nu = s->energy_of_index(static_cast<std::size_t>(j)) - s->energy_of_index(static_cast<std::size_t>(k));
                const auto ref = rho(j, k) * oracle::cauchy_phase_average(-nu, T);
                CHECK(std::abs(wl.matrix()(j, k) - ref) < 1e-8);
            }
        }
        const LorentzianPurity p = purity_closed_form(psi, T);
        CHECK(p.exact == doctest::Approx(wl.matrix().squaredNorm()).epsilon(1e-12));
        CHECK(p.population_bound == doctest::Approx(p.exact).epsilon(1e-12));
        // <tr(P rho_t)>_L for P = |0><0| via the library quadrature versus the Lorentzian state
        auto g = [&](double t) { return std::norm(evolve(psi, t).amplitudes()(0)); };
        const double tail = lorentzian_tail_mass(T);
        CHECK(lorentzian_average(g, T, s->max_gap()) == doctest::Approx(wl.matrix()(0, 0).real()).epsilon(tail + 1e-8));
    }
}

TEST_CASE("Lorentzian tail mass is the analytic Cauchy tail") {
    for (double T : {0.1, 1.0, 10.0}) {
        const double a = 200.0;
        // symmetric window about 0 for a kernel centred at T/2
        const double expect = 1.0 - (std::atan(a - 0.5) + std::atan(a + 0.5)) / std::numbers::pi;
        CHECK(lorentzian_tail_mass(T, a) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("uniform average is dominated by 5 pi / 4 times the Lorentzian average") {
    std::mt19937_64 rng(7);
    const SpectrumPtr s = share(EnergySpectrum::nondegenerate({0.0, 0.5, 1.3, 2.0, 2.2}));
    CHECK(kKernelDomination == doctest::Approx(1.25 * std::numbers::pi));
    for (int k = 0; k < 6; ++k) {
        const QuantumState psi = QuantumState::pure(s, oracle::random_unit_vector(5, rng));
        const Eigen::VectorXcd v = oracle::random_unit_vector(5, rng);
        auto f = [&](double t) { return std::norm(v.dot(evolve(psi, t).amplitudes())); };
        for (double T : {0.5, 3.0, 20.0}) {
            const DominationReport r = lorentzian_domination_check(f, T, s->max_gap());
            CHECK(r.holds);
            CHECK(r.uniform_average <= kKernelDomination * r.lorentzian_average + 1e-6);
        }
    }
}
