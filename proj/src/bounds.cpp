#include "eqt/bounds.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eqt {

namespace {

double eta_value(const EnergySpectrum& spectrum, const LevelDistribution& dist, double eps) {
    return eta(spectrum, dist.p, eps).value;
}

void require_pure(const QuantumState& state, const char* who) {
    if (!state.is_pure()) {
        throw std::invalid_argument(std::string(who) + ": only pure initial states are supported");
    }
}

}  // namespace

BoundReport& BoundReport::compare(double measurement, double slack_allowed) {
    measured = measurement;
    slack = slack_allowed;
    holds = measurement <= value + slack_allowed;
    return *this;
}

double BoundReport::input(std::string_view key) const {
    for (const auto& [k, v] : inputs) {
        if (k == key) return v;
    }
    throw std::out_of_range("BoundReport: no input named " + std::string(key));
}

namespace constants {

double kernel_domination() { return 5.0 * std::numbers::pi / 4.0; }

double purity_eta_factor(double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("purity_eta_factor: delta must be positive");
    return 2.0 / (1.0 - std::exp(-delta));
}

double population_term() { return kernel_domination() * std::sqrt(purity_eta_factor(2.0)); }

double fast_equilibration() { return population_term() + 1.0; }

}  // namespace constants

BoundReport purity_eta_bound(const EnergySpectrum& spectrum, const LevelDistribution& dist, double T,
                             double delta) {
    if (!(T > 0.0)) throw std::invalid_argument("purity_eta_bound: T must be positive");
    const double width = delta / (2.0 * T);
    const double e = eta_value(spectrum, dist, width);
    BoundReport r;
    r.name = "purity_eta";
    r.value = constants::purity_eta_factor(delta) * e;
    r.inputs = {{"T", T}, {"delta", delta}, {"eta", e}, {"window", width}};
    return r;
}

BoundReport fast_equilibration_bound(const EnergySpectrum& spectrum, const LevelDistribution& dist,
                                     std::size_t K, double T) {
    if (K < 1) throw std::invalid_argument("fast_equilibration_bound: K must be at least 1");
    if (!(T > 0.0)) throw std::invalid_argument("fast_equilibration_bound: T must be positive");
    const double e = eta_value(spectrum, dist, 1.0 / T);
    const double c = constants::fast_equilibration();
    BoundReport r;
    r.name = "fast_equilibration";
    r.value = c * std::sqrt(e * static_cast<double>(K));
    r.inputs = {{"K", static_cast<double>(K)}, {"T", T}, {"eta", e}, {"c", c}};
    return r;
}

BoundReport term_bound_population(const EnergySpectrum& spectrum, const LevelDistribution& dist,
                                  std::size_t K, double T) {
    if (K < 1) throw std::invalid_argument("term_bound_population: K must be at least 1");
    if (!(T > 0.0)) throw std::invalid_argument("term_bound_population: T must be positive");
    const double e = eta_value(spectrum, dist, 1.0 / T);
    BoundReport r;
    r.name = "population_term";
    r.value = constants::kernel_domination() *
              std::sqrt(constants::purity_eta_factor(2.0) * e * static_cast<double>(K));
    r.inputs = {{"K", static_cast<double>(K)}, {"T", T}, {"eta", e}, {"c", constants::population_term()}};
    return r;
}

BoundReport n_outcome_fast_bound(const EnergySpectrum& spectrum, const LevelDistribution& dist,
                                 std::span<const std::size_t> ranks, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("n_outcome_fast_bound: T must be positive");
    const std::size_t d = spectrum.dim();
    double root_sum = 0.0;
    std::size_t total = 0;
    for (std::size_t k : ranks) {
        total += k;
        root_sum += std::sqrt(static_cast<double>(std::min(k, d - std::min(k, d))));
    }
    if (total != d) throw std::invalid_argument("n_outcome_fast_bound: ranks must sum to the dimension");
    const double e = eta_value(spectrum, dist, 1.0 / T);
    const double c = constants::fast_equilibration();
    BoundReport r;
    r.name = "n_outcome_fast_equilibration";
    r.value = 0.5 * c * std::sqrt(e) * root_sum;
    r.inputs = {{"N", static_cast<double>(ranks.size())}, {"T", T}, {"eta", e}, {"c", c}};
    return r;
}

BoundReport general_expectation_bound(const QuantumState& state, const GapSet& gaps, double a_norm,
                                      double eps, double T) {
    require_pure(state, "general_expectation_bound");
    if (!(eps > 0.0) || !(T > 0.0)) throw std::invalid_argument("general_expectation_bound: eps and T must be positive");
    const double d_eff = effective_dimension(level_distribution(state));
    const auto n_eps = static_cast<double>(gap_density(gaps, eps));
    BoundReport r;
    r.name = "general_expectation";
    r.value = 2.5 * std::numbers::pi * a_norm * a_norm / d_eff * n_eps * (1.5 + 1.0 / (eps * T));
    r.inputs = {{"T", T}, {"eps", eps}, {"N_eps", n_eps}, {"d_eff", d_eff}, {"A_norm", a_norm}};
    return r;
}

BoundReport general_expectation_bound(const QuantumState& state, double a_norm, double eps, double T) {
    return general_expectation_bound(state, GapSet(state.spectrum()), a_norm, eps, T);
}

BoundReport general_distinguishability_bound(const QuantumState& state, const GapSet& gaps,
                                             std::size_t total_outcomes, double eps, double T) {
    require_pure(state, "general_distinguishability_bound");
    if (total_outcomes < 2) throw std::invalid_argument("general_distinguishability_bound: need at least 2 outcomes");
    if (!(eps > 0.0) || !(T > 0.0)) {
        throw std::invalid_argument("general_distinguishability_bound: eps and T must be positive");
    }
    const double d_eff = effective_dimension(level_distribution(state));
    const auto n_eps = static_cast<double>(gap_density(gaps, eps));
    BoundReport r;
    r.name = "general_distinguishability";
    r.value = static_cast<double>(total_outcomes) / 4.0 *
              std::sqrt(5.0 * std::numbers::pi * n_eps / (2.0 * d_eff) * (1.5 + 1.0 / (eps * T)));
    r.inputs = {{"T", T}, {"eps", eps}, {"N_eps", n_eps}, {"d_eff", d_eff},
                {"S", static_cast<double>(total_outcomes)}};
    return r;
}

BoundReport general_distinguishability_bound(const QuantumState& state, std::size_t total_outcomes,
                                             double eps, double T) {
    return general_distinguishability_bound(state, GapSet(state.spectrum()), total_outcomes, eps, T);
}

BoundReport best_epsilon_distinguishability_bound(const QuantumState& state, const GapSet& gaps,
                                                  std::size_t total_outcomes, double T, double eps_min,
                                                  double eps_max, std::size_t points) {
    if (!(eps_min > 0.0) || !(eps_max >= eps_min) || points < 1) {
        throw std::invalid_argument("best_epsilon_distinguishability_bound: bad eps grid");
    }
    std::optional<BoundReport> best;
    for (std::size_t i = 0; i < points; ++i) {
        const double frac = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
        const double eps = eps_min * std::pow(eps_max / eps_min, frac);
        BoundReport r = general_distinguishability_bound(state, gaps, total_outcomes, eps, T);
        if (!best || r.value < best->value) best = std::move(r);
    }
    return *best;
}

double gaussian_eta_estimate(double sigma_E, double T) {
    const double x = sigma_E * T;
    if (!(x > 0.0)) throw std::invalid_argument("gaussian_eta_estimate: sigma_E T must be positive");
    return std::min(1.0, 0.4 / x);
}

double erfcx(double x) {
    if (x < 0.0) throw std::invalid_argument("erfcx: negative argument");
    if (x < 25.0) return std::exp(x * x) * std::erfc(x);
    // asymptotic series 1/(x sqrt(pi)) sum_k (-1)^k (2k-1)!! / (2x^2)^k
    const double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 8; ++k) {
        term *= -(2.0 * k - 1.0) * inv2x2;
        sum += term;
    }
    return sum / (x * std::sqrt(std::numbers::pi));
}

GaussianPurity gaussian_purity_estimate(double sigma_E, double T) {
    const double x = sigma_E * T;
    if (!(x > 0.0)) throw std::invalid_argument("gaussian_purity_estimate: sigma_E T must be positive");
    return {erfcx(2.0 * x), 1.0 / (2.0 * std::sqrt(std::numbers::pi) * x)};
}

}  // namespace eqt
