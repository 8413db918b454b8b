#include "eqt/states.hpp"
#include "eqt/errors.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace eqt;
using cd = std::complex<double>;

namespace {

SpectrumPtr degenerate_spectrum() { return share(EnergySpectrum({-0.7, 0.2, 1.3, 2.9}, {1, 2, 1, 3})); }

QuantumState random_pure(const SpectrumPtr& s, std::mt19937_64& rng) {
    return QuantumState::pure(s, oracle::random_unit_vector(s->dim(), rng));
}

QuantumState random_mixed(const SpectrumPtr& s, std::mt19937_64& rng) {
    const auto d = static_cast<Eigen::Index>(s->dim());
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double total = 0.0;
    for (int k = 0; k < 3; ++k) {
        const Eigen::VectorXcd v = oracle::random_unit_vector(s->dim(), rng);
        const double w = u(rng);
        total += w;
        rho += w * v * v.adjoint();
    }
    return QuantumState::dense(s, rho / total);
}

// Direct evolution with the dense unitary exp(-iHt) in the eigenbasis.
Eigen::MatrixXcd reference_evolve(const Eigen::MatrixXcd& rho, const EnergySpectrum& s, double t) {
    Eigen::VectorXcd phases(static_cast<Eigen::Index>(s.dim()));
    for (std::size_t j = 0; j < s.dim(); ++j) phases(static_cast<Eigen::Index>(j)) = std::polar(1.0, -s.energy_of_index(j) * t);
    return phases.asDiagonal() * rho * phases.conjugate().asDiagonal();
}

// Block dephasing by explicit level-projector sums.
Eigen::MatrixXcd reference_dephase(const Eigen::MatrixXcd& rho, const EnergySpectrum& s) {
    const auto d = static_cast<Eigen::Index>(s.dim());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t n = 0; n < s.num_levels(); ++n) {
        Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(d, d);
        for (int k = 0; k < s.degeneracies()[n]; ++k) {
            const auto i = static_cast<Eigen::Index>(s.first_index(n) + static_cast<std::size_t>(k));
            q(i, i) = 1.0;
        }
        out += q * rho * q;
    }
    return out;
}

}  // namespace

TEST_CASE("constructors validate normalization") {
    const SpectrumPtr s = degenerate_spectrum();
    CHECK_THROWS(QuantumState::pure(s, Eigen::VectorXcd::Ones(7)));
    CHECK_THROWS(QuantumState::pure(s, Eigen::VectorXcd::Ones(3)));
    Eigen::VectorXd p = Eigen::VectorXd::Constant(7, 1.0 / 7);
    CHECK_NOTHROW(QuantumState::diagonal(s, p));
    p(0) = -0.1;
    CHECK_THROWS(QuantumState::diagonal(s, p));
    CHECK_THROWS(QuantumState::dense(s, Eigen::MatrixXcd::Identity(7, 7)));
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(7, 7) / 7.0;
    m(0, 1) = cd(0.0, 0.1);
    CHECK_THROWS(QuantumState::dense(s, m));
}

TEST_CASE("validate_psd flags negative eigenvalues") {
    const SpectrumPtr s = share(EnergySpectrum::nondegenerate({0.0, 1.0}));
    Eigen::MatrixXcd m(2, 2);
    m << 1.2, 0.0, 0.0, -0.2;
    const QuantumState bad = QuantumState::dense(s, m);
    CHECK(min_eigenvalue(bad) == doctest::Approx(-0.2));
    CHECK_THROWS_AS(validate_psd(bad), ValidationError);
}

TEST_CASE("evolution and dephasing agree with dense references") {
    std::mt19937_64 rng(3);
    const SpectrumPtr s = degenerate_spectrum();
    for (int k = 0; k < 5; ++k) {
        const QuantumState psi = k % 2 ? random_pure(s, rng) : random_mixed(s, rng);
        const double t = 0.37 * (k + 1);
        CHECK((evolve(psi, t).density() - reference_evolve(psi.density(), *s, t)).norm() < 1e-12);
        CHECK((dephase(psi).density() - reference_dephase(psi.density(), *s)).norm() < 1e-12);
    }
}

TEST_CASE("group law, dephasing idempotence and commutation") {
    std::mt19937_64 rng(4);
    const SpectrumPtr s = degenerate_spectrum();
    for (int k = 0; k < 20; ++k) {
        const QuantumState psi = k % 2 ? random_pure(s, rng) : random_mixed(s, rng);
        const double t1 = 0.3 * k - 2.0;
        const double t2 = 1.7 - 0.11 * k;
        CHECK((evolve(evolve(psi, t1), t2).density() - evolve(psi, t1 + t2).density()).norm() < 1e-10);
        CHECK((evolve(psi, 0.0).density() - psi.density()).norm() < 1e-14);
        const QuantumState w = dephase(psi);
        CHECK((dephase(w).density() - w.density()).norm() < 1e-14);
        CHECK((dephase(evolve(psi, t1)).density() - evolve(w, t1).density()).norm() < 1e-12);
        CHECK((evolve(w, t2).density() - w.density()).norm() < 1e-12);
        // tr(rho_t omega) = tr(omega^2)
        CHECK(trace_product(evolve(psi, t1), w) == doctest::Approx(purity(w)).epsilon(1e-12));
    }
}

TEST_CASE("storage forms give the same physics") {
    std::mt19937_64 rng(8);
    const SpectrumPtr s = degenerate_spectrum();
    const QuantumState psi = random_pure(s, rng);
    const QuantumState dense = QuantumState::dense(s, psi.density());
    CHECK(purity(psi) == doctest::Approx(1.0));
    CHECK(purity(dense) == doctest::Approx(1.0));
    CHECK(trace_product(psi, dense) == doctest::Approx(1.0));
    const auto a = level_distribution(psi).p;
    const auto b = level_distribution(dense).p;
    for (std::size_t n = 0; n < a.size(); ++n) CHECK(a[n] == doctest::Approx(b[n]).epsilon(1e-14));
    CHECK((dephase(psi).density() - dephase(dense).density()).norm() < 1e-13);
    // dephasing a nondegenerate pure state gives a diagonal state
    const SpectrumPtr nd = share(EnergySpectrum::nondegenerate({0.0, 0.4, 1.1}));
    const QuantumState q = random_pure(nd, rng);
    CHECK(dephase(q).kind() == StateKind::diagonal);
}

TEST_CASE("effective dimension and moments") {
    const SpectrumPtr s = share(EnergySpectrum({0.0, 1.0, 2.0}, {1, 1, 2}));
    Eigen::VectorXd p(4);
    p << 0.25, 0.25, 0.25, 0.25;
    const QuantumState st = QuantumState::diagonal(s, p);
    const auto dist = level_distribution(st);
    CHECK(dist.p == std::vector<double>{0.25, 0.25, 0.5});
    CHECK(effective_dimension(dist) == doctest::Approx(1.0 / (0.0625 + 0.0625 + 0.25)));
    const auto m = energy_moments(dist, *s);
    CHECK(m.mean == doctest::Approx(1.25));
    CHECK(m.stddev == doctest::Approx(std::sqrt(0.25 * 1.5625 + 0.25 * 0.0625 + 0.5 * 0.5625)));
    // tr(omega^2) = 1 / d_eff for a pure state in a nondegenerate spectrum
    std::mt19937_64 rng(1);
    const SpectrumPtr nd = share(EnergySpectrum::nondegenerate({0.0, 0.4, 1.1, 1.5}));
    const QuantumState q = random_pure(nd, rng);
    CHECK(purity(dephase(q)) == doctest::Approx(1.0 / effective_dimension(level_distribution(q))).epsilon(1e-12));
}

TEST_CASE("overlap lemma: survival probability stays above 1 - sigma^2 t^2") {
    std::mt19937_64 rng(21);
    const SpectrumPtr s = degenerate_spectrum();
    for (int k = 0; k < 10; ++k) {
        const QuantumState psi = random_pure(s, rng);
        const double sigma = energy_moments(level_distribution(psi), *s).stddev;
        for (double t : {0.0, 0.01, 0.1, 0.3, 1.0, 3.0}) {
            CHECK(overlap(psi, evolve(psi, t)) >= 1.0 - sigma * sigma * t * t - 1e-12);
        }
    }
}

TEST_CASE("overlap requires pure states") {
    std::mt19937_64 rng(2);
    const SpectrumPtr s = degenerate_spectrum();
    CHECK_THROWS(overlap(random_mixed(s, rng), random_pure(s, rng)));
}
