// Haar-random unitaries, exact second-moment (twirl) formulas for
// randomly rotated measurements, and Monte Carlo estimators that check them.
//
// A "typical" two-outcome measurement is {P_U, 1 - P_U} with P_U = U P U^dagger,
// U Haar distributed and P a fixed rank-K projector. The constrained ensemble
// keeps a pure initial state psi fixed: U = psi psi^dagger + (Haar on psi^perp),
// and the measured projector is Pi_U = psi psi^dagger + P_U with P_U acting on psi^perp.

#pragma once

#include "eqt/parallel.hpp"
#include "eqt/states.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>

namespace eqt {

/// Ginibre matrix, QR, then the phase fix Q diag(R_ii / |R_ii|), which makes
/// the law exactly Haar.
Eigen::MatrixXcd sample_haar(std::size_t d, std::mt19937_64& rng);

/// Reproducible source of Haar unitaries: sample i is drawn from its own
/// stream derive_seed(seed, i), so any subset of samples can be regenerated.
class HaarSampler {
public:
    HaarSampler(std::uint64_t seed, std::size_t dim);
    /// Samples fix span{excluded} and are Haar on its orthogonal complement.
    /// Requires dim > 2 and a unit vector.
    HaarSampler(std::uint64_t seed, Eigen::VectorXcd excluded);

    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t dim() const noexcept { return dim_; }
    bool constrained() const noexcept { return excluded_.has_value(); }
    const Eigen::VectorXcd& excluded() const { return excluded_.value(); }
    /// Orthonormal basis of the complement of the excluded vector (dim x dim - 1).
    const Eigen::MatrixXcd& complement_basis() const { return complement_.value(); }

    Eigen::MatrixXcd sample(std::uint64_t index) const;

private:
    std::uint64_t seed_;
    std::size_t dim_;
    std::optional<Eigen::VectorXcd> excluded_;
    std::optional<Eigen::MatrixXcd> complement_;
};

/// max|U^dagger U - 1|.
double unitarity_residual(const Eigen::MatrixXcd& u);

/// <D_{P_U}(rho_t, omega)^2>_U = (K/d) ((d - K)/(d^2 - 1)) tr(rho_t^2 - omega^2).
double exact_mean_sq_distinguishability(const QuantumState& rho_t, const QuantumState& omega, std::size_t K);

/// sqrt(K (d - K) / (d^2 (d + 1))).
double typical_bound(std::size_t K, std::size_t d);
/// 1 / (2 sqrt(d + 1)), the maximum of typical_bound over K.
double typical_cap(std::size_t d);

/// f(t) = tr(rho_0 (rho_t - omega)); its modulus is D_{rho_0}(rho_t, omega).
double initial_overlap_excess(const QuantumState& state0, const QuantumState& rho_t, const QuantumState& omega);

struct ConstrainedBound {
    double value = 0.0;  // |f| + 1 / (2 sqrt(d - 1))
    double tight = 0.0;  // sqrt(f^2 + 1 / (4 (d - 1)))
    double f = 0.0;
};

/// Mean distinguishability of Pi_U = rho_0 + P_U, rank Pi_U = K.
ConstrainedBound constrained_mean_bound(const QuantumState& state0, const QuantumState& rho_t,
                                        const QuantumState& omega, std::size_t K);

struct InitialFloor {
    double floor = 0.0;  // (1 - (K-1)/(d-1)) (1 - 1/d_eff)
    double exact = 0.0;  // (1 - (K-1)/(d-1)) (1 - tr rho_0 omega), exact for pure rho_0
};

InitialFloor initial_distinguishability_floor(const QuantumState& state0, const QuantumState& omega, std::size_t K);

struct NOutcomeTypical {
    double value = 0.0;  // (1/2) sum_j sqrt(K_j (d - K_j) / (d^2 (d + 1)))
    double cap = 0.0;    // (1/2) sqrt(N / (d + 1))
};

/// Ranks must sum to d.
NOutcomeTypical n_outcome_typical_bound(std::span<const std::size_t> ranks, std::size_t d);

/// |f| + (1/2) sqrt(N / (d - 1)).
double n_outcome_constrained_bound(double f, std::size_t N, std::size_t d);

struct TwirlCoefficients {
    double alpha = 0.0;  // weight of the symmetric projector
    double beta = 0.0;   // weight of the antisymmetric projector
};

/// <U^{(x)2} (A (x) A) U^{dagger (x)2}>_U = alpha Pi_S + beta Pi_A for Hermitian A.
/// For a rank-K projector alpha = K(K+1)/(d(d+1)), beta = K(K-1)/(d(d-1)).
TwirlCoefficients twirl_second_moment(const Eigen::MatrixXcd& a);

/// alpha Pi_S + beta Pi_A on C^d (x) C^d, index (i, j) -> i d + j.
Eigen::MatrixXcd twirl_reconstruction(const TwirlCoefficients& c, std::size_t d);

/// Monte Carlo twirl: sample mean of (U A U^dagger) (x) (U A U^dagger), plus
/// the entrywise standard error (of real and imaginary parts, max of the two).
struct MonteCarloTwirl {
    Eigen::MatrixXcd mean;
    Eigen::MatrixXd stderr_entry;
};

MonteCarloTwirl mc_twirl(const Eigen::MatrixXcd& a, const HaarSampler& sampler, std::size_t samples,
                         unsigned workers = 1);

struct TwirlResult {
    double exact = 0.0;
    double mc_mean = 0.0;
    double mc_stderr = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;

    double gap_in_stderr() const;
};

/// First and second moments of a distinguishability over the Haar ensemble,
/// estimated from the same samples.
struct HaarMoments {
    SampleStats d;
    SampleStats d_sq;
};

/// D = |tr(U V V^dagger U^dagger X)| with V the reference basis (orthonormal columns).
HaarMoments sample_projector_distinguishability(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& reference,
                                                const HaarSampler& sampler, std::size_t samples,
                                                unsigned workers = 1);
/// Reference projector onto the first K eigenbasis vectors.
HaarMoments sample_projector_distinguishability(const Eigen::MatrixXcd& x, std::size_t K,
                                                const HaarSampler& sampler, std::size_t samples,
                                                unsigned workers = 1);

/// D_M = (1/2) sum_j |tr(P_jU X)| with P_j consecutive eigenbasis blocks of the given ranks.
HaarMoments sample_measurement_distinguishability(const Eigen::MatrixXcd& x, std::span<const std::size_t> ranks,
                                                  const HaarSampler& sampler, std::size_t samples,
                                                  unsigned workers = 1);

/// Constrained ensemble, Pi_U = psi psi^dagger + P_U with rank Pi_U = K.
/// The sampler must be constrained.
HaarMoments sample_constrained_distinguishability(const Eigen::MatrixXcd& x, std::size_t K,
                                                  const HaarSampler& sampler, std::size_t samples,
                                                  unsigned workers = 1);

/// Constrained N-outcome measurement {psi psi^dagger + P_1U, P_2U, ..., P_NU},
/// ranks of the P_j summing to d - 1.
HaarMoments sample_constrained_measurement(const Eigen::MatrixXcd& x, std::span<const std::size_t> ranks,
                                           const HaarSampler& sampler, std::size_t samples,
                                           unsigned workers = 1);

/// Exact second moment against its Monte Carlo estimate.
TwirlResult twirl_check(const QuantumState& rho_t, const QuantumState& omega, std::size_t K,
                        const HaarSampler& sampler, std::size_t samples, unsigned workers = 1);

}  // namespace eqt
