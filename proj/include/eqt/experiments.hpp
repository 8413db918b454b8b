// Named, config-driven experiments behind the eqtime CLI.
//
// Every experiment reads a flat JSON parameter object, fills in defaults,
// validates ranges (reporting every bad field at once), runs, writes its
// artifacts into the output directory and returns a list of checks. Outputs
// depend only on the resolved parameters: worker count never changes a byte.

#pragma once

#include "eqt/constructions.hpp"
#include "eqt/io.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqt {

struct FieldError {
    std::string field;
    std::string message;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<FieldError> errors);
    const std::vector<FieldError>& errors() const noexcept { return errors_; }

private:
    std::vector<FieldError> errors_;
};

/// Typed access to a flat JSON parameter object. Every read records the
/// resolved value; finish() reports unknown keys and throws on any error.
class Params {
public:
    explicit Params(json given);

    double real(const std::string& key, double fallback, double lo, double hi);
    std::int64_t integer(const std::string& key, std::int64_t fallback, std::int64_t lo, std::int64_t hi);
    std::uint64_t seed(const std::string& key, std::uint64_t fallback);
    bool flag(const std::string& key, bool fallback);
    std::string text(const std::string& key, const std::string& fallback, const std::vector<std::string>& allowed = {});
    std::vector<double> reals(const std::string& key, const std::vector<double>& fallback, double lo, double hi);
    std::optional<std::string> optional_text(const std::string& key);
    std::optional<std::int64_t> optional_integer(const std::string& key, std::int64_t lo, std::int64_t hi);

    void error(const std::string& field, const std::string& message);
    /// Throws ConfigError listing unknown keys and every recorded problem.
    void finish();
    const json& resolved() const noexcept { return resolved_; }

private:
    const json* lookup(const std::string& key);

    json given_;
    json resolved_ = json::object();
    std::vector<std::string> seen_;
    std::vector<FieldError> errors_;
};

struct RunConfig {
    std::string experiment;
    json params = json::object();  // config file contents with flag overrides applied
    std::filesystem::path out_dir = "out";
    std::filesystem::path base_dir;  // resolves relative paths inside params
    unsigned workers = 1;            // never affects results
};

struct Check {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double limit = 0.0;
    std::string detail;
};

struct ExperimentResult {
    std::string experiment;
    json config;  // resolved parameters
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<Check> checks;
    json summary = json::object();
    std::vector<std::filesystem::path> files;

    bool passed() const;
    const Check* find(const std::string& name) const;
};

inline constexpr std::uint64_t kDefaultSeed = 20140401;

/// figure3, bounds, slow, gaussian, haar, eta, spectrum-info.
const std::vector<std::string>& experiment_names();

ExperimentResult run_experiment(const RunConfig& config);
ExperimentResult run_figure3(const RunConfig& config);
ExperimentResult run_bound_battery(const RunConfig& config);
ExperimentResult run_slow(const RunConfig& config);
ExperimentResult run_gaussian(const RunConfig& config);
ExperimentResult run_haar(const RunConfig& config);
ExperimentResult run_eta(const RunConfig& config);
ExperimentResult run_spectrum_info(const RunConfig& config);

/// Runs the experiment, writes failure.json when anything goes wrong and
/// returns the process exit code: 0 all checks passed, 1 a check failed,
/// 2 invalid configuration, 3 any other error.
int run_and_report(const RunConfig& config, std::ostream& log);

/// Regression pin for the 50-level oscillator: average of D over one period.
inline constexpr double kFigure3AveragePin = 0.0355;

// ---- battery building blocks, shared with the test suites ----

struct BatteryLimits {
    std::size_t d_min = 4;
    std::size_t d_max = 60;
    std::size_t K_max = 8;
};

struct BatteryTrial {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    Scenario scenario;
    Eigen::MatrixXcd projector_basis;  // orthonormal columns, rank K
    std::size_t K = 0;
    std::string projector_kind;  // haar | snapshot | local
    std::string state_kind;      // broad | narrow
};

BatteryTrial make_battery_trial(std::uint64_t base_seed, std::size_t index, const BatteryLimits& limits = {});

struct BoundRow {
    std::string name;
    double T = 0.0;
    std::optional<double> eps;
    std::size_t K = 0;
    double value = 0.0;
    double measured = 0.0;
    double slack = 0.0;
    bool holds = false;
};

struct TrialSettings {
    std::vector<double> T_sigma;  // averaging windows in units of 1 / sigma_E
    std::vector<double> eps_factors = {0.1, 1.0, 10.0};
    std::vector<double> deltas = {0.5, 1.0, 2.0, 4.0};
    std::size_t min_samples = 256;
    double slack = 1e-3;
};

/// Every bound row (the main time-average bound, its intermediate links, purity bounds,
/// gap-density bounds) for one trial.
std::vector<BoundRow> evaluate_trial(const BatteryTrial& trial, const TrialSettings& settings);

/// D(t) = |<psi_0|psi_t>|^2 - sum_n p_n^2| for a pure state.
double initial_state_distinguishability(const QuantumState& psi, double t);

}  // namespace eqt
