// Closed-form equilibration bounds, reported together with their inputs.

#pragma once

#include "eqt/spectra.hpp"
#include "eqt/states.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eqt {

struct BoundReport {
    std::string name;
    double value = 0.0;
    std::vector<std::pair<std::string, double>> inputs;
    std::optional<double> measured;
    double slack = 0.0;
    std::optional<bool> holds;

    /// Records a measurement; holds = measured <= value + slack.
    BoundReport& compare(double measurement, double slack_allowed = 0.0);
    /// Bounds on probabilities / distinguishabilities say nothing once >= 1.
    bool vacuous() const noexcept { return value >= 1.0; }
    double input(std::string_view key) const;
};

namespace constants {

double kernel_domination();  // 5 pi / 4
/// 2 / (1 - e^{-delta}), the factor in purity <= factor * eta_{delta / 2T}.
double purity_eta_factor(double delta = 2.0);
/// (5 pi / 4) sqrt(2 / (1 - e^{-2})) ~ 5.97, the population-term constant.
double population_term();
/// population_term() + 1 ~ 6.97.
double fast_equilibration();

}  // namespace constants

/// Lorentzian-purity bound 2 eta_{delta / 2T} / (1 - e^{-delta}).
BoundReport purity_eta_bound(const EnergySpectrum& spectrum, const LevelDistribution& dist, double T,
                             double delta = 2.0);

/// <D_P(rho_t, omega)>_T <= c sqrt(eta_{1/T} K), K = min(rank P, rank(1 - P)).
BoundReport fast_equilibration_bound(const EnergySpectrum& spectrum, const LevelDistribution& dist,
                                     std::size_t K, double T);

/// <tr(P rho_t)>_T <= (5 pi / 4) sqrt(2 eta_{1/T} K / (1 - e^{-2})).
BoundReport term_bound_population(const EnergySpectrum& spectrum, const LevelDistribution& dist,
                                  std::size_t K, double T);

/// N-outcome form: <D_M>_T <= (c / 2) sqrt(eta_{1/T}) sum_i sqrt(k_i),
/// k_i = min(rank P_i, d - rank P_i).
BoundReport n_outcome_fast_bound(const EnergySpectrum& spectrum, const LevelDistribution& dist,
                                 std::span<const std::size_t> ranks, double T);

/// <|tr A (rho_t - omega)|^2>_T <= (5 pi / 2) (||A||^2 / d_eff) N(eps) (3/2 + 1 / (eps T)).
/// Pure states only.
BoundReport general_expectation_bound(const QuantumState& state, const GapSet& gaps, double a_norm,
                                      double eps, double T);
BoundReport general_expectation_bound(const QuantumState& state, double a_norm, double eps, double T);

/// <D_M>_T <= (S / 4) sqrt((5 pi N(eps) / (2 d_eff)) (3/2 + 1 / (eps T))), S = total outcomes.
BoundReport general_distinguishability_bound(const QuantumState& state, const GapSet& gaps,
                                             std::size_t total_outcomes, double eps, double T);
BoundReport general_distinguishability_bound(const QuantumState& state, std::size_t total_outcomes,
                                             double eps, double T);

/// Evaluates the distinguishability form on `points` log-spaced eps in
/// [eps_min, eps_max] and returns the smallest.
BoundReport best_epsilon_distinguishability_bound(const QuantumState& state, const GapSet& gaps,
                                                  std::size_t total_outcomes, double T, double eps_min,
                                                  double eps_max, std::size_t points = 41);

/// min(1, 0.4 / (sigma T)).
double gaussian_eta_estimate(double sigma_E, double T);

struct GaussianPurity {
    double exact = 0.0;       // e^{x^2} erfc(x), x = 2 sigma T
    double asymptotic = 0.0;  // 1 / (2 sqrt(pi) sigma T)
};

GaussianPurity gaussian_purity_estimate(double sigma_E, double T);

/// Scaled complementary error function e^{x^2} erfc(x), x >= 0.
double erfcx(double x);

}  // namespace eqt
