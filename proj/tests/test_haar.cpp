#include "eqt/haar.hpp"
#include "eqt/parallel.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace eqt;
using cd = std::complex<double>;

namespace {

struct Fixture {
    SpectrumPtr spectrum;
    QuantumState psi;
    QuantumState rho_t;
    QuantumState omega;
};

Fixture fixture(std::size_t d, std::uint64_t seed, double t) {
    std::mt19937_64 rng(seed);
    std::vector<double> lv;
    double e = 0.0;
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (std::size_t i = 0; i < d; ++i) lv.push_back(e += u(rng));
    SpectrumPtr s = share(EnergySpectrum::nondegenerate(lv));
    QuantumState psi = QuantumState::pure(s, oracle::random_unit_vector(d, rng));
    return {s, psi, evolve(psi, t), dephase(psi)};
}

// Subspace of the complement of psi, Gram-Schmidt on projected Gaussian vectors.
Eigen::MatrixXcd constrained_subspace(const Eigen::VectorXcd& psi, std::size_t K, std::mt19937_64& rng) {
    const auto d = psi.size();
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd v(d, static_cast<Eigen::Index>(K));
    v.col(0) = psi;
    for (Eigen::Index c = 1; c < v.cols(); ++c) {
        for (Eigen::Index r = 0; r < d; ++r) {
            const double re = g(rng);
            const double im = g(rng);
            v(r, c) = cd(re, im);
        }
        for (Eigen::Index p = 0; p < c; ++p) v.col(c) -= v.col(p).dot(v.col(c)) * v.col(p);
        v.col(c) /= v.col(c).norm();
    }
    return v;
}

}  // namespace

TEST_CASE("samples are unitary and reproducible") {
    const HaarSampler s(42, 7);
    for (std::uint64_t i = 0; i < 20; ++i) {
        const Eigen::MatrixXcd u = s.sample(i);
        CHECK(unitarity_residual(u) < 1e-10);
        CHECK((u - s.sample(i)).norm() == 0.0);
    }
    CHECK((s.sample(0) - s.sample(1)).norm() > 0.1);
    CHECK((HaarSampler(43, 7).sample(0) - s.sample(0)).norm() > 0.1);
}

TEST_CASE("Haar moments of a single entry") {
    const std::size_t d = 5;
    const HaarSampler s(7, d);
    const std::size_t n = 20000;
    double m2 = 0.0;
    double m4 = 0.0;
    cd m1 = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const cd u = s.sample(i)(1, 2);
        m1 += u;
        m2 += std::norm(u);
        m4 += std::norm(u) * std::norm(u);
    }
    m1 /= static_cast<double>(n);
    m2 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    CHECK(std::abs(m1) < 0.02);
    CHECK(m2 == doctest::Approx(1.0 / d).epsilon(0.03));
    CHECK(m4 == doctest::Approx(2.0 / (d * (d + 1.0))).epsilon(0.05));
}

TEST_CASE("constrained samples fix the excluded vector") {
    const Fixture f = fixture(6, 2, 0.3);
    const HaarSampler s(5, f.psi.amplitudes());
    const Eigen::VectorXcd& v = f.psi.amplitudes();
    CHECK((s.complement_basis().adjoint() * v).norm() < 1e-12);
    for (std::uint64_t i = 0; i < 10; ++i) {
        const Eigen::MatrixXcd u = s.sample(i);
        CHECK(unitarity_residual(u) < 1e-10);
        CHECK((u * v - v).norm() < 1e-10);
    }
    CHECK_THROWS(HaarSampler(1, Eigen::VectorXcd::Ones(4)));
    CHECK_THROWS(HaarSampler(1, f.psi.amplitudes().head(2).normalized().eval()));
}

TEST_CASE("exact second moment against an independent Monte Carlo") {
    const Fixture f = fixture(8, 11, 0.7);
    const Eigen::MatrixXcd x = f.rho_t.density() - f.omega.density();
    const double exact = exact_mean_sq_distinguishability(f.rho_t, f.omega, 3);
    const double d = 8.0;
    const double trx2 = x.squaredNorm();
    CHECK(exact == doctest::Approx(3.0 / d * (d - 3.0) / (d * d - 1.0) * trx2).epsilon(1e-12));
    std::mt19937_64 rng(99);
    const std::size_t n = 20000;
    std::vector<double> samples(n);
    for (auto& s : samples) {
        const Eigen::MatrixXcd v = oracle::random_subspace(8, 3, rng);
        s = std::norm((v.adjoint() * x * v).trace());
    }
    const SampleStats st = sample_stats(samples);
    CHECK(std::abs(st.mean - exact) <= 5.0 * st.stderr_mean);
}

TEST_CASE("twirl coefficients and reconstruction") {
    std::mt19937_64 rng(4);
    const Eigen::MatrixXcd v = oracle::random_subspace(4, 2, rng);
    const Eigen::MatrixXcd p = v * v.adjoint();
    const TwirlCoefficients c = twirl_second_moment(p);
    CHECK(c.alpha == doctest::Approx(2.0 * 3.0 / (4.0 * 5.0)));
    CHECK(c.beta == doctest::Approx(2.0 * 1.0 / (4.0 * 3.0)));
    const Eigen::MatrixXcd r = twirl_reconstruction(c, 4);
    // tr(U A U^dagger (x) U A U^dagger) = tr(A)^2 for every U
    CHECK(r.trace().real() == doctest::Approx(p.trace().real() * p.trace().real()));
    const HaarSampler s(3, 4);
    const MonteCarloTwirl mc = mc_twirl(p, s, 4000);
    const Eigen::MatrixXd gap = (mc.mean - r).cwiseAbs();
    CHECK((gap.array() <= 5.0 * mc.stderr_entry.array() + 1e-12).all());
}

TEST_CASE("closed-form Haar bounds") {
    for (std::size_t d : {3u, 8u, 20u}) {
        for (std::size_t K = 1; K <= d; ++K) {
            CHECK(typical_bound(K, d) <= typical_cap(d) + 1e-15);
        }
        CHECK_THROWS(typical_bound(0, d));
        CHECK(typical_bound(d, d) == 0.0);
    }
    CHECK(typical_cap(8) == doctest::Approx(1.0 / (2.0 * 3.0)));
    const std::vector<std::size_t> ranks = {2, 3, 3};
    const NOutcomeTypical n = n_outcome_typical_bound(ranks, 8);
    CHECK(n.value <= n.cap);
    CHECK(n.cap == doctest::Approx(0.5 * std::sqrt(3.0 / 9.0)));
    CHECK(n_outcome_constrained_bound(0.1, 3, 8) == doctest::Approx(0.1 + 0.5 * std::sqrt(3.0 / 7.0)));
}

TEST_CASE("constrained ensemble against an independent sampler") {
    const Fixture f = fixture(7, 17, 1.3);
    const Eigen::MatrixXcd x = f.rho_t.density() - f.omega.density();
    const std::size_t K = 3;
    const ConstrainedBound b = constrained_mean_bound(f.psi, f.rho_t, f.omega, K);
    CHECK(b.f == doctest::Approx(initial_overlap_excess(f.psi, f.rho_t, f.omega)));
    CHECK(b.tight <= b.value + 1e-15);

    std::mt19937_64 rng(5);
    const std::size_t n = 6000;
    std::vector<double> ref(n);
    for (auto& r : ref) {
        const Eigen::MatrixXcd v = constrained_subspace(f.psi.amplitudes(), K, rng);
        r = std::abs((v.adjoint() * x * v).trace().real());
    }
    const SampleStats rs = sample_stats(ref);
    const HaarSampler s(8, f.psi.amplitudes());
    const HaarMoments lib = sample_constrained_distinguishability(x, K, s, n);
    CHECK(std::abs(rs.mean - lib.d.mean) <= 5.0 * std::hypot(rs.stderr_mean, lib.d.stderr_mean));
    CHECK(rs.mean <= b.tight + 3.0 * rs.stderr_mean);

    // the floor at t = 0
    const Eigen::MatrixXcd x0 = f.psi.density() - f.omega.density();
    const HaarMoments init = sample_constrained_distinguishability(x0, K, s, n);
    const InitialFloor fl = initial_distinguishability_floor(f.psi, f.omega, K);
    CHECK(fl.floor <= fl.exact + 1e-15);
    CHECK(init.d.mean >= fl.floor - 3.0 * init.d.stderr_mean);
    CHECK(init.d.mean == doctest::Approx(fl.exact).epsilon(0.05));
}

TEST_CASE("Monte Carlo estimates do not depend on the worker count") {
    const Fixture f = fixture(6, 3, 0.9);
    const Eigen::MatrixXcd x = f.rho_t.density() - f.omega.density();
    const HaarSampler s(12, 6);
    const HaarMoments a = sample_projector_distinguishability(x, 2, s, 500, 1);
    const HaarMoments b = sample_projector_distinguishability(x, 2, s, 500, 4);
    CHECK(a.d.mean == b.d.mean);
    CHECK(a.d_sq.stderr_mean == b.d_sq.stderr_mean);
    const TwirlResult t1 = twirl_check(f.rho_t, f.omega, 2, s, 300, 1);
    const TwirlResult t2 = twirl_check(f.rho_t, f.omega, 2, s, 300, 3);
    CHECK(t1.mc_mean == t2.mc_mean);
}
