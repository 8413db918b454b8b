#include "eqt/measure.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace eqt;

namespace {

SpectrumPtr spec6() { return share(EnergySpectrum::nondegenerate({0.0, 0.3, 0.9, 1.4, 2.2, 3.1})); }

}  // namespace

TEST_CASE("projector factories validate") {
    CHECK_THROWS(Projector::rank_one(Eigen::VectorXcd::Ones(3)));
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(3, 3);
    m(0, 0) = 0.5;
    CHECK_THROWS(Projector::from_matrix(m));
    CHECK(Projector::zero(4).rank() == 0);
    CHECK(Projector::identity(4).rank() == 4);
    std::mt19937_64 rng(1);
    const Eigen::MatrixXcd v = oracle::random_subspace(6, 2, rng);
    const Projector p = Projector::from_orthonormal_columns(v);
    CHECK(p.rank() == 2);
    CHECK(p.complement().rank() == 4);
    CHECK(p.idempotency_residual() < 1e-12);
    CHECK(Projector::from_matrix(p.matrix()).rank() == 2);
    CHECK_THROWS(Projector::from_orthonormal_columns(2.0 * v));
}

TEST_CASE("measurement validation") {
    std::mt19937_64 rng(2);
    const Eigen::MatrixXcd v = oracle::random_subspace(6, 6, rng);
    const Measurement m({Projector::from_orthonormal_columns(v.leftCols(2)),
                         Projector::from_orthonormal_columns(v.rightCols(4))});
    CHECK(m.ranks() == std::vector<std::size_t>{2, 4});
    CHECK(m.residuals().completeness < 1e-12);
    CHECK_THROWS(Measurement({Projector::from_orthonormal_columns(v.leftCols(2)),
                              Projector::from_orthonormal_columns(v.rightCols(3))}));
    CHECK_THROWS(Measurement({Projector::from_orthonormal_columns(v.leftCols(3)),
                              Projector::from_orthonormal_columns(v.rightCols(4))}));
}

TEST_CASE("distinguishability properties") {
    std::mt19937_64 rng(3);
    const SpectrumPtr s = spec6();
    for (int k = 0; k < 20; ++k) {
        const QuantumState a = QuantumState::pure(s, oracle::random_unit_vector(6, rng));
        const QuantumState b = dephase(evolve(a, 0.4 * k));
        const Projector p = Projector::from_orthonormal_columns(oracle::random_subspace(6, 1 + k % 5, rng));
        const double dp = projector_distinguishability(p, a, b);
        CHECK(dp == doctest::Approx(projector_distinguishability(p.complement(), a, b)).epsilon(1e-12));
        CHECK(dp == doctest::Approx(distinguishability(two_outcome(p), a, b)).epsilon(1e-12));
        CHECK(dp <= trace_distance(a, b) + 1e-12);
        CHECK(distinguishability(two_outcome(p), a, a) == doctest::Approx(0.0));
        CHECK(success_probability(dp) == doctest::Approx(0.5 + dp / 2));
    }
}

TEST_CASE("trace distance of orthogonal pure states is one") {
    const SpectrumPtr s = spec6();
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(6);
    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(6);
    e0(0) = 1.0;
    e1(1) = 1.0;
    CHECK(trace_distance(QuantumState::pure(s, e0), QuantumState::pure(s, e1)) == doctest::Approx(1.0));
    const Projector p = Projector::rank_one(e0);
    CHECK(projector_distinguishability(p, QuantumState::pure(s, e0), QuantumState::pure(s, e1)) == doctest::Approx(1.0));
}

TEST_CASE("refining a measurement never lowers distinguishability") {
    std::mt19937_64 rng(4);
    const SpectrumPtr s = spec6();
    for (int k = 0; k < 20; ++k) {
        const QuantumState a = QuantumState::pure(s, oracle::random_unit_vector(6, rng));
        const QuantumState b = dephase(a);
        const Eigen::MatrixXcd v = oracle::random_subspace(6, 6, rng);
        const Measurement coarse({Projector::from_orthonormal_columns(v.leftCols(3)),
                                  Projector::from_orthonormal_columns(v.rightCols(3))});
        const Measurement fine({Projector::from_orthonormal_columns(v.leftCols(1)),
                                Projector::from_orthonormal_columns(v.middleCols(1, 2)),
                                Projector::from_orthonormal_columns(v.rightCols(3))});
        CHECK(distinguishability(fine, a, b) >= distinguishability(coarse, a, b) - 1e-12);
    }
}
