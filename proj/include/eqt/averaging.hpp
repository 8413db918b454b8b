// Uniform finite-time averages, Lorentzian averages and the
// Lorentzian-averaged state.
//
// Uniform average:     <f>_T   = (1/T) int_0^T f(t) dt
// Lorentzian average:  <f>_L_T = int f(t) T / (pi (T^2 + (t - T/2)^2)) dt over the real line
// For f >= 0 the first is dominated by 5 pi / 4 times the second.

#pragma once

#include "eqt/states.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace eqt {

/// Uniform sampling of [0, T] with trapezoid weights.
class TimeGrid {
public:
    /// Spacing at most pi / (4 max_frequency), at least min_samples points,
    /// and an even number of intervals so the half-resolution grid exists.
    static TimeGrid uniform(double T, double max_frequency, std::size_t min_samples = 64);

    double T() const noexcept { return T_; }
    double spacing() const noexcept { return spacing_; }
    std::size_t size() const noexcept { return times_.size(); }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

private:
    double T_ = 0.0;
    double spacing_ = 0.0;
    std::vector<double> times_;
    std::vector<double> weights_;
};

struct AverageResult {
    double value = 0.0;
    double refinement_error = 0.0;  // |trapezoid - trapezoid on every other sample|
    bool flagged = false;           // refinement_error > requested tolerance
};

AverageResult time_average(std::span<const double> samples, const TimeGrid& grid, double tol = 1e-6);

AverageResult time_average(const std::function<double(double)>& f, const TimeGrid& grid,
                           double tol = 1e-6, unsigned workers = 1);

/// Cumulative trapezoid average (1/t) int_0^t f; the t = 0 entry is f(0).
std::vector<double> running_average(std::span<const double> times, std::span<const double> values);

struct TimeSeries {
    std::string value_name = "value";
    std::vector<double> times;
    std::vector<double> values;
    std::optional<std::vector<double>> running_avg;
    std::optional<std::vector<double>> bound;
};

/// Header `t,<value_name>[,running_avg][,bound]`, floats at 17 significant digits.
/// A non-empty comment is written first as `# <comment>`.
void write_csv(std::ostream& out, const TimeSeries& series, const std::string& comment = {});

/// <e^{i nu t}>_L_T = e^{-|nu| T} e^{i nu T / 2}.
std::complex<double> lorentzian_phase_average(double nu, double T);

/// omega_L_T: rho_jk -> rho_jk e^{-|E_j - E_k| T} e^{-i (E_j - E_k) T / 2}.
QuantumState lorentzian_state(const QuantumState& state, double T);

struct LorentzianPurity {
    double exact = 0.0;             // sum_jk |rho_jk|^2 e^{-2 |E_j - E_k| T}
    double population_bound = 0.0;  // sum_jk p_j p_k e^{-2 |E_j - E_k| T}; equal to exact for pure states
};

LorentzianPurity purity_closed_form(const QuantumState& state, double T);

/// Kernel mass of the Lorentzian outside [-half_width_factor T, half_width_factor T].
double lorentzian_tail_mass(double T, double half_width_factor = 200.0);

/// Composite Gauss-Legendre estimate of <f>_L_T restricted to
/// [-half_width_factor T, half_width_factor T]. Panels resolve both the kernel
/// (width T) and oscillations up to max_frequency.
double lorentzian_average(const std::function<double(double)>& f, double T, double max_frequency,
                          double half_width_factor = 200.0);

inline constexpr double kKernelDomination = 1.25 * 3.14159265358979323846;  // 5 pi / 4

struct DominationReport {
    double uniform_average = 0.0;
    double lorentzian_average = 0.0;  // truncated window; a lower bound for f >= 0
    double ratio = 0.0;               // uniform / lorentzian
    double slack = 0.0;
    bool holds = false;
};

/// Checks <f>_T <= (5 pi / 4) <f>_L_T + slack for a nonnegative f, where
/// slack covers the trapezoid refinement error of the uniform average.
DominationReport lorentzian_domination_check(const std::function<double(double)>& f, double T,
                                             double max_frequency);

}  // namespace eqt
