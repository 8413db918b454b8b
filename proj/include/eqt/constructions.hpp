// Scenario builders (oscillators, Gaussian and random spectra)
// and the slow-equilibration snapshot subspace.

#pragma once

#include "eqt/averaging.hpp"
#include "eqt/measure.hpp"
#include "eqt/spectra.hpp"
#include "eqt/states.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace eqt {

struct Scenario {
    std::string label;
    SpectrumPtr spectrum;
    QuantumState initial_state;
    std::vector<std::pair<std::string, double>> params;

    std::optional<double> param(const std::string& key) const;
};

/// E_n = (n + 1/2) nu, n < levels, equal amplitudes 1/sqrt(levels). With a
/// phase seed every amplitude gets an independent uniform phase.
Scenario harmonic_oscillator_1d(std::size_t levels, double nu, std::optional<std::uint64_t> phase_seed = {});

/// E_n = (n + 1/2) nu with degeneracy (n+1)(n+2)/2; diagonal state with level
/// probabilities proportional to g_n exp(-E_n / temperature).
Scenario harmonic_oscillator_3d_boltzmann(std::size_t levels, double nu, double temperature);

/// Equally spaced levels on [-span sigma, span sigma]; amplitudes
/// sqrt(p(E_n) dE) for the normal density p, renormalized.
Scenario gaussian_spectrum(std::size_t levels, double sigma, double span);

enum class SpacingLaw { wigner, exponential };
enum class DegeneracyProfile { none, random };
enum class AmplitudeLaw { gaussian, flat_phase };

struct RandomScenarioOptions {
    SpacingLaw spacing = SpacingLaw::wigner;
    DegeneracyProfile degeneracy = DegeneracyProfile::none;
    AmplitudeLaw amplitudes = AmplitudeLaw::gaussian;
    double mean_spacing = 1.0;
    int max_degeneracy = 3;
};

/// Draws one level spacing with unit mean.
/// wigner: p(s) = (pi/2) s exp(-pi s^2 / 4); exponential: p(s) = exp(-s).
double draw_spacing(SpacingLaw law, std::mt19937_64& rng);

/// Seeded random spectrum of total dimension d with a random pure state
/// (complex Gaussian amplitudes, or unit-modulus amplitudes with random phases).
Scenario random_scenario(std::uint64_t seed, std::size_t d, const RandomScenarioOptions& options = {});

struct SnapshotSubspace {
    std::size_t K = 0;
    double tau = 0.0;
    double epsilon = 0.0;
    Eigen::MatrixXcd basis;  // orthonormal columns spanning the snapshots
    std::size_t effective_rank = 0;
    std::vector<double> singular_values;

    bool rank_deficient() const noexcept { return effective_rank < K; }
    Projector projector() const;
};

inline constexpr double kSnapshotCutoff = 1e-8;

/// Snapshots psi(j tau), j < K, tau = 2 eps / sigma_E, orthonormalized through an
/// SVD keeping singular values above cutoff * (largest).
SnapshotSubspace snapshot_subspace(const Scenario& scenario, std::size_t K, double epsilon,
                                   double cutoff = kSnapshotCutoff);

struct SlowCheckOptions {
    std::size_t window_samples = 256;
    std::size_t long_samples = 2048;
    double long_time = 0.0;  // 0: 1000 / (mean level spacing)
    std::uint64_t seed = 0;  // jitter of the long-time samples
    unsigned workers = 1;
};

struct SlowCheck {
    TimeSeries window;  // D_P(rho_t, omega) on [0, (2K - 1) eps / sigma_E], bound = floor
    double floor = 0.0;  // 1 - eps^2 - sqrt(K / d_eff)
    double min_value = 0.0;
    bool floor_holds = false;
    std::optional<double> first_violation_t;

    double d_eff = 0.0;
    double sigma_E = 0.0;
    double trace_p_omega = 0.0;
    double sqrt_k_over_deff = 0.0;

    double ceiling = 0.0;  // 2 sqrt(K / d_eff)
    double long_time = 0.0;
    double long_average = 0.0;
    double long_stderr = 0.0;
    bool ceiling_holds = false;

    bool passed() const noexcept { return floor_holds && ceiling_holds; }
};

/// tr(V V^dagger omega) for the equilibrium state of a pure psi, computed level
/// block by level block without forming omega.
double projector_equilibrium_weight(const Eigen::MatrixXcd& basis, const QuantumState& psi);

SlowCheck slow_window_check(const SnapshotSubspace& subspace, const Scenario& scenario,
                            const SlowCheckOptions& options = {});

/// Splits the snapshot basis into N - 1 consecutive blocks (sizes differing by
/// at most one) plus the complement. Requires 2 <= N <= effective_rank + 1.
Measurement partitioned_slow_measurement(const SnapshotSubspace& subspace, std::size_t N);

}  // namespace eqt
