#include "eqt/experiments.hpp"

#include "eqt/averaging.hpp"
#include "eqt/bounds.hpp"
#include "eqt/format.hpp"
#include "eqt/haar.hpp"
#include "eqt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace eqt {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- config

namespace {

std::string join_errors(const std::vector<FieldError>& errors) {
    std::string out = "invalid configuration:";
    for (const auto& e : errors) out += " " + e.field + ": " + e.message + ";";
    return out;
}

std::string range_text(double lo, double hi) {
    return "must lie in [" + format_double(lo) + ", " + format_double(hi) + "]";
}

}  // namespace

ConfigError::ConfigError(std::vector<FieldError> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

Params::Params(json given) : given_(std::move(given)) {
    if (given_.is_null()) given_ = json::object();
    if (!given_.is_object()) {
        errors_.push_back({"<root>", "configuration must be a JSON object"});
        given_ = json::object();
    }
}

const json* Params::lookup(const std::string& key) {
    seen_.push_back(key);
    const auto it = given_.find(key);
    return it == given_.end() ? nullptr : &*it;
}

void Params::error(const std::string& field, const std::string& message) { errors_.push_back({field, message}); }

double Params::real(const std::string& key, double fallback, double lo, double hi) {
    double value = fallback;
    if (const json* v = lookup(key)) {
        if (!v->is_number()) {
            error(key, "must be a number");
        } else if (v->get<double>() < lo || v->get<double>() > hi || !std::isfinite(v->get<double>())) {
            error(key, range_text(lo, hi));
        } else {
            value = v->get<double>();
        }
    }
    resolved_[key] = value;
    return value;
}

std::int64_t Params::integer(const std::string& key, std::int64_t fallback, std::int64_t lo, std::int64_t hi) {
    std::int64_t value = fallback;
    if (const json* v = lookup(key)) {
        if (!v->is_number_integer()) {
            error(key, "must be an integer");
        } else if (v->is_number_unsigned() && v->get<std::uint64_t>() > static_cast<std::uint64_t>(hi)) {
            error(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        } else if (v->get<std::int64_t>() < lo || v->get<std::int64_t>() > hi) {
            error(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        } else {
            value = v->get<std::int64_t>();
        }
    }
    resolved_[key] = value;
    return value;
}

std::uint64_t Params::seed(const std::string& key, std::uint64_t fallback) {
    std::uint64_t value = fallback;
    if (const json* v = lookup(key)) {
        if (v->is_number_unsigned()) {
            value = v->get<std::uint64_t>();
        } else if (v->is_number_integer() && v->get<std::int64_t>() >= 0) {
            value = static_cast<std::uint64_t>(v->get<std::int64_t>());
        } else {
            error(key, "must be a non-negative 64-bit integer");
        }
    }
    resolved_[key] = value;
    return value;
}

bool Params::flag(const std::string& key, bool fallback) {
    bool value = fallback;
    if (const json* v = lookup(key)) {
        if (!v->is_boolean()) {
            error(key, "must be true or false");
        } else {
            value = v->get<bool>();
        }
    }
    resolved_[key] = value;
    return value;
}

std::string Params::text(const std::string& key, const std::string& fallback, const std::vector<std::string>& allowed) {
    std::string value = fallback;
    if (const json* v = lookup(key)) {
        if (!v->is_string()) {
            error(key, "must be a string");
        } else if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v->get<std::string>()) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            error(key, "must be one of " + list);
        } else {
            value = v->get<std::string>();
        }
    }
    resolved_[key] = value;
    return value;
}

std::vector<double> Params::reals(const std::string& key, const std::vector<double>& fallback, double lo, double hi) {
    std::vector<double> value = fallback;
    if (const json* v = lookup(key)) {
        bool ok = v->is_array() && !v->empty();
        if (ok) {
            for (const auto& x : *v) ok = ok && x.is_number() && x.get<double>() >= lo && x.get<double>() <= hi;
        }
        if (!ok) {
            error(key, "must be a non-empty list of numbers that each " + range_text(lo, hi).substr(5));
        } else {
            value = v->get<std::vector<double>>();
        }
    }
    resolved_[key] = value;
    return value;
}

std::optional<std::string> Params::optional_text(const std::string& key) {
    const json* v = lookup(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
        error(key, "must be a string");
        return std::nullopt;
    }
    resolved_[key] = *v;
    return v->get<std::string>();
}

std::optional<std::int64_t> Params::optional_integer(const std::string& key, std::int64_t lo, std::int64_t hi) {
    const json* v = lookup(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer() || v->get<std::int64_t>() < lo || v->get<std::int64_t>() > hi) {
        error(key, "must be an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return std::nullopt;
    }
    resolved_[key] = *v;
    return v->get<std::int64_t>();
}

void Params::finish() {
    for (const auto& [key, value] : given_.items()) {
        if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) error(key, "unknown parameter");
    }
    if (!errors_.empty()) throw ConfigError(errors_);
}

// ---------------------------------------------------------------- results

bool ExperimentResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* ExperimentResult::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

namespace {

using cd = std::complex<double>;

ExperimentResult begin(Params& p, const std::string& name) {
    if (auto e = p.optional_text("experiment"); e && *e != name) {
        p.error("experiment", "configuration is for \"" + *e + "\", not \"" + name + "\"");
    }
    ExperimentResult r;
    r.experiment = name;
    r.seed = p.seed("seed", kDefaultSeed);
    return r;
}

void seal(ExperimentResult& r, Params& p) {
    p.finish();
    r.config = p.resolved();
    r.config["experiment"] = r.experiment;
    r.config_hash = config_hash(r.config);
}

std::string header_line(const ExperimentResult& r) {
    return "eqtime " + r.experiment + " config_hash=" + r.config_hash + " seed=" + std::to_string(r.seed);
}

json provenance(const ExperimentResult& r) {
    return {{"experiment", r.experiment}, {"config_hash", r.config_hash}, {"seed", r.seed}, {"config", r.config}};
}

fs::path prepare_out(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    return cfg.out_dir;
}

void add_check(ExperimentResult& r, std::string name, bool passed, double measured, double limit, std::string detail = {}) {
    r.checks.push_back({std::move(name), passed, measured, limit, std::move(detail)});
}

json checks_json(const ExperimentResult& r) {
    json out = json::array();
    for (const auto& c : r.checks) {
        json j = {{"name", c.name}, {"passed", c.passed}, {"measured", c.measured}, {"limit", c.limit}};
        if (!c.detail.empty()) j["detail"] = c.detail;
        out.push_back(std::move(j));
    }
    return out;
}

void write_summary(ExperimentResult& r, const fs::path& dir) {
    std::string stem = r.experiment;
    std::replace(stem.begin(), stem.end(), '-', '_');
    const fs::path path = dir / (stem + "_summary.json");
    json j = r.summary;
    j["provenance"] = provenance(r);
    j["passed"] = r.passed();
    j["checks"] = checks_json(r);
    write_json_file(path, j);
    r.files.push_back(path);
}

void write_json_artifact(ExperimentResult& r, const fs::path& path, json body) {
    body["provenance"] = provenance(r);
    write_json_file(path, body);
    r.files.push_back(path);
}

std::ofstream open_csv(ExperimentResult& r, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    r.files.push_back(path);
    return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        g[i] = lo * std::pow(hi / lo, f);
    }
    return g;
}

// |<psi_0|psi_t>|^2 from the level populations of a pure state.
double survival_probability(const QuantumState& psi, double t) {
    const auto& e = psi.spectrum().index_energies();
    const auto& c = psi.amplitudes();
    cd s = 0.0;
    for (Eigen::Index j = 0; j < c.size(); ++j) s += std::norm(c(j)) * std::polar(1.0, -e[static_cast<std::size_t>(j)] * t);
    return std::norm(s);
}

double projected_population(const Eigen::MatrixXcd& v, const Eigen::VectorXcd& c, const std::vector<double>& e, double t) {
    Eigen::VectorXcd ct(c.size());
    for (Eigen::Index j = 0; j < c.size(); ++j) ct(j) = c(j) * std::polar(1.0, -e[static_cast<std::size_t>(j)] * t);
    return (v.adjoint() * ct).squaredNorm();
}

void write_bound_rows(std::ostream& out, const std::string& header,
                      const std::vector<std::pair<std::string, BoundRow>>& rows) {
    out << "# " << header << '\n' << "name,T,eps,K,value,measured,holds\n";
    for (const auto& [prefix, row] : rows) {
        out << prefix << row.name << ',' << format_double(row.T) << ','
            << (row.eps ? format_double(*row.eps) : std::string()) << ',' << row.K << ','
            << format_double(row.value) << ',' << format_double(row.measured) << ','
            << (row.holds ? "true" : "false") << '\n';
    }
}

BoundRow make_row(std::string name, double T, std::optional<double> eps, std::size_t K, double value,
                  double measured, double slack) {
    return {std::move(name), T, eps, K, value, measured, slack, measured <= value + slack};
}

}  // namespace

// ---------------------------------------------------------------- shared pieces

double initial_state_distinguishability(const QuantumState& psi, double t) {
    if (!psi.is_pure()) throw std::invalid_argument("initial_state_distinguishability: state must be pure");
    double sum_p2 = 0.0;
    for (double p : level_distribution(psi).p) sum_p2 += p * p;
    return std::abs(survival_probability(psi, t) - sum_p2);
}

BatteryTrial make_battery_trial(std::uint64_t base_seed, std::size_t index, const BatteryLimits& limits) {
    if (limits.d_min < 2 || limits.d_max < limits.d_min || limits.K_max < 1) {
        throw std::invalid_argument("make_battery_trial: bad limits");
    }
    const std::uint64_t seed = derive_seed(base_seed, index);
    std::mt19937_64 rng(seed);
    const auto d = std::uniform_int_distribution<std::size_t>(limits.d_min, limits.d_max)(rng);

    RandomScenarioOptions opts;
    opts.spacing = index % 2 == 0 ? SpacingLaw::wigner : SpacingLaw::exponential;
    opts.degeneracy = rng() % 3 == 0 ? DegeneracyProfile::random : DegeneracyProfile::none;
    Scenario sc = random_scenario(rng(), d, opts);
    sc.label = "trial" + std::to_string(index);

    const bool narrow = rng() % 2 == 0;
    if (narrow) {
        const auto& e = sc.spectrum->index_energies();
        const double spread = std::max(sc.spectrum->max_gap(), 1e-9);
        const double center = e[std::uniform_int_distribution<std::size_t>(0, d - 1)(rng)];
        const double width = spread * std::uniform_real_distribution<double>(0.02, 0.3)(rng);
        Eigen::VectorXcd c = sc.initial_state.amplitudes();
        for (Eigen::Index j = 0; j < c.size(); ++j) {
            const double x = e[static_cast<std::size_t>(j)] - center;
            c(j) *= std::exp(-x * x / (4.0 * width * width));
        }
        sc.initial_state = QuantumState::pure(sc.spectrum, normalized(std::move(c)));
        for (auto& [k, v] : sc.params) {
            if (k == "d_eff") v = effective_dimension(level_distribution(sc.initial_state));
        }
    }

    std::size_t K = std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(1, std::min(limits.K_max, d / 2)))(rng);
    Eigen::MatrixXcd basis;
    std::string kind;
    switch (index % 3) {
    case 0: {
        kind = "haar";
        basis = sample_haar(d, rng).leftCols(static_cast<Eigen::Index>(K));
        break;
    }
    case 1: {
        kind = "snapshot";
        const SnapshotSubspace sub = snapshot_subspace(sc, K, 0.5);
        basis = sub.basis;
        K = sub.effective_rank;
        break;
    }
    default: {
        kind = "local";
        const auto& c = sc.initial_state.amplitudes();
        Eigen::Index center = 0;
        c.cwiseAbs2().maxCoeff(&center);
        const auto width = static_cast<Eigen::Index>(std::min(d, 3 * K));
        const Eigen::Index lo = std::clamp<Eigen::Index>(center - width / 2, 0, static_cast<Eigen::Index>(d) - width);
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(K));
        for (Eigen::Index col = 0; col < a.cols(); ++col) {
            for (Eigen::Index row = lo; row < lo + width; ++row) {
                const double re = normal(rng);
                const double im = normal(rng);
                a(row, col) = cd(re, im);
            }
        }
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
        basis = qr.householderQ() * Eigen::MatrixXcd::Identity(a.rows(), a.cols());
        break;
    }
    }
    return BatteryTrial{index, seed, std::move(sc), std::move(basis), K, kind, narrow ? "narrow" : "broad"};
}

std::vector<BoundRow> evaluate_trial(const BatteryTrial& trial, const TrialSettings& settings) {
    const QuantumState& psi = trial.scenario.initial_state;
    const EnergySpectrum& spec = psi.spectrum();
    const LevelDistribution dist = level_distribution(psi);
    const double sigma = energy_moments(dist, spec).stddev;
    const double unit = sigma > 0.0 ? 1.0 / sigma : 1.0;
    const double energy_unit = sigma > 0.0 ? sigma : 1.0;
    const Eigen::MatrixXcd& v = trial.projector_basis;
    const std::size_t K = static_cast<std::size_t>(v.cols());
    const double d_eff = effective_dimension(dist);
    const double weight_omega = projector_equilibrium_weight(v, psi);
    const GapSet gaps(spec);
    const auto& energies = spec.index_energies();
    const Eigen::VectorXcd& c = psi.amplitudes();
    const double kernel = constants::kernel_domination();

    std::vector<BoundRow> rows;
    for (double ts : settings.T_sigma) {
        const double T = ts * unit;
        const TimeGrid grid = TimeGrid::uniform(T, spec.max_gap(), settings.min_samples);
        std::vector<double> pop(grid.size());
        std::vector<double> dist_t(grid.size());
        std::vector<double> dist_sq(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            pop[i] = projected_population(v, c, energies, grid.times()[i]);
            dist_t[i] = std::abs(pop[i] - weight_omega);
            dist_sq[i] = dist_t[i] * dist_t[i];
        }
        const double avg_pop = time_average(pop, grid).value;
        const double avg_d = time_average(dist_t, grid).value;
        const double avg_d2 = time_average(dist_sq, grid).value;

        const BoundReport fast = fast_equilibration_bound(spec, dist, K, T);
        rows.push_back(make_row("fast_equilibration", T, {}, K, fast.value, avg_d, settings.slack));
        const BoundReport popb = term_bound_population(spec, dist, K, T);
        rows.push_back(make_row("population_term", T, {}, K, popb.value, avg_pop, settings.slack));

        const QuantumState omega_l = lorentzian_state(psi, T);
        const double weight_l = std::real((v.adjoint() * omega_l.matrix() * v).trace());
        const double purity_closed = purity_closed_form(psi, T).exact;
        const double purity_matrix = omega_l.matrix().squaredNorm();
        rows.push_back(make_row("chain_triangle", T, {}, K, avg_pop + weight_omega, avg_d, 1e-12));
        rows.push_back(make_row("chain_kernel_domination", T, {}, K, kernel * weight_l, avg_pop, settings.slack));
        rows.push_back(make_row("chain_lorentzian_cauchy_schwarz", T, {}, K,
                                std::sqrt(static_cast<double>(K) * purity_closed), weight_l, 1e-12));
        rows.push_back(make_row("chain_equilibrium_cauchy_schwarz", T, {}, K,
                                std::sqrt(static_cast<double>(K) / d_eff), weight_omega, 1e-12));
        rows.push_back(make_row("purity_dual_path", T, {}, K, 1e-12, std::abs(purity_closed - purity_matrix), 0.0));
        for (double delta : settings.deltas) {
            const BoundReport pb = purity_eta_bound(spec, dist, T, delta);
            rows.push_back(make_row("purity_eta_delta" + format_double(delta), T, {}, K, pb.value, purity_closed, 1e-12));
        }
        for (double f : settings.eps_factors) {
            const double eps = f * energy_unit;
            const BoundReport ge = general_expectation_bound(psi, gaps, 1.0, eps, T);
            rows.push_back(make_row("general_expectation", T, eps, K, ge.value, avg_d2, settings.slack));
            const BoundReport gd = general_distinguishability_bound(psi, gaps, 2, eps, T);
            rows.push_back(make_row("general_distinguishability", T, eps, K, gd.value, avg_d, settings.slack));
        }
    }
    return rows;
}

// ---------------------------------------------------------------- figure3

ExperimentResult run_figure3(const RunConfig& cfg) {
    Params p(cfg.params);
    ExperimentResult r = begin(p, "figure3");
    const auto levels = static_cast<std::size_t>(p.integer("levels", 50, 2, 4000));
    const double nu = p.real("nu", 1.0, 1e-9, 1e9);
    const double t_rev = 2.0 * std::numbers::pi / nu;
    const auto samples = static_cast<std::size_t>(p.integer("samples", 4001, 3, 5'000'000));
    const double t_max = p.real("T_max", t_rev, 1e-12, 1e12);
    const bool phase_check = p.flag("phase_check", true);
    seal(r, p);
    const fs::path dir = prepare_out(cfg);

    const Scenario sc = harmonic_oscillator_1d(levels, nu);
    const QuantumState& psi = sc.initial_state;
    const EnergySpectrum& spec = *sc.spectrum;
    const LevelDistribution dist = level_distribution(psi);
    const double sigma = energy_moments(dist, spec).stddev;
    const double c = constants::fast_equilibration();

    TimeSeries ts;
    ts.value_name = "D";
    ts.times.resize(samples);
    ts.values.resize(samples);
    std::vector<double> bound(samples);
    parallel_for(samples, cfg.workers, [&](std::size_t i) {
        const double t = t_max * static_cast<double>(i) / static_cast<double>(samples - 1);
        ts.times[i] = t;
        ts.values[i] = initial_state_distinguishability(psi, t);
        bound[i] = t > 0.0 ? c * std::sqrt(eta(spec, dist.p, 1.0 / t).value) : c;
    });
    ts.running_avg = running_average(ts.times, ts.values);
    ts.bound = std::move(bound);
    {
        std::ofstream out = open_csv(r, dir / "figure3.csv");
        write_csv(out, ts, header_line(r));
    }

    const double d0 = initial_state_distinguishability(psi, 0.0);
    const double d_rev = initial_state_distinguishability(psi, t_rev);
    const TimeGrid period = TimeGrid::uniform(t_rev, spec.max_gap(), std::max<std::size_t>(samples, 256));
    const AverageResult avg_rev =
        time_average([&](double t) { return initial_state_distinguishability(psi, t); }, period, 1e-6, cfg.workers);

    const double expected_d0 = 1.0 - 1.0 / static_cast<double>(levels);
    add_check(r, "initial_value", std::abs(d0 - expected_d0) <= 1e-9, d0, expected_d0, "D(0) = 1 - 1/levels within 1e-9");
    add_check(r, "revival", std::abs(d_rev - d0) <= 1e-9, std::abs(d_rev - d0), 1e-9, "|D(2 pi / nu) - D(0)|");
    add_check(r, "average_below_fifth", avg_rev.value <= 0.2 * d0, avg_rev.value, 0.2 * d0,
              "period average <= 0.2 D(0)");
    if (levels == 50) {
        add_check(r, "average_regression_pin", avg_rev.value <= kFigure3AveragePin, avg_rev.value, kFigure3AveragePin,
                  "period average at or below the frozen pin");
    }

    // Fast-equilibration bound with K = 1 at T = 50 / sigma_E; below 1 from 50 levels on.
    const double t_inf = 50.0 / sigma;
    const BoundReport fast = fast_equilibration_bound(spec, dist, 1, t_inf);
    const AverageResult avg_inf = time_average([&](double t) { return initial_state_distinguishability(psi, t); },
                                               TimeGrid::uniform(t_inf, spec.max_gap(), 256), 1e-6, cfg.workers);
    add_check(r, "bound_holds_at_50_over_sigma", avg_inf.value <= fast.value + 1e-3, avg_inf.value, fast.value);
    if (levels >= 50) {
        add_check(r, "bound_informative", !fast.vacuous(), fast.value, 1.0, "fast-equilibration bound below 1");
    }

    double phase_diff = 0.0;
    if (phase_check) {
        const Scenario rnd = harmonic_oscillator_1d(levels, nu, r.seed);
        const QuantumState omega = dephase(rnd.initial_state);
        const double base = trace_product(rnd.initial_state, omega);
        std::vector<double> diff(samples);
        parallel_for(samples, cfg.workers, [&](std::size_t i) {
            const QuantumState psi_t = evolve(rnd.initial_state, ts.times[i]);
            const double d_rand = std::abs(overlap(rnd.initial_state, psi_t) - base);
            diff[i] = std::abs(d_rand - ts.values[i]);
        });
        phase_diff = *std::max_element(diff.begin(), diff.end());
        add_check(r, "phase_insensitive", phase_diff <= 1e-12, phase_diff, 1e-12,
                  "random phases change D(t) by at most 1e-12");
    }

    r.summary = {{"D0", d0},
                 {"D_revival", d_rev},
                 {"T_rev", t_rev},
                 {"average_at_T_rev", avg_rev.value},
                 {"average_refinement_error", avg_rev.refinement_error},
                 {"average_pin", kFigure3AveragePin},
                 {"sigma_E", sigma},
                 {"informative",
                  {{"T", t_inf}, {"eta", fast.input("eta")}, {"bound", fast.value}, {"measured_average", avg_inf.value}}}};
    if (phase_check) r.summary["phase_max_abs_diff"] = phase_diff;
    write_summary(r, dir);
    return r;
}

// ---------------------------------------------------------------- bounds

ExperimentResult run_bound_battery(const RunConfig& cfg) {
    Params p(cfg.params);
    ExperimentResult r = begin(p, "bounds");
    const auto trials = static_cast<std::size_t>(p.integer("trials", 200, 1, 100000));
    BatteryLimits limits;
    limits.d_min = static_cast<std::size_t>(p.integer("d_min", 4, 2, 400));
    limits.d_max = static_cast<std::size_t>(p.integer("d_max", 60, 2, 400));
    limits.K_max = static_cast<std::size_t>(p.integer("K_max", 8, 1, 200));
    if (limits.d_max < limits.d_min) p.error("d_max", "must be at least d_min");
    const auto t_points = static_cast<std::size_t>(p.integer("T_points", 12, 1, 200));
    const double t_min = p.real("T_min", 0.1, 1e-6, 1e6);
    const double t_max = p.real("T_max", 100.0, 1e-6, 1e6);
    if (t_max < t_min) p.error("T_max", "must be at least T_min");
    TrialSettings settings;
    settings.min_samples = static_cast<std::size_t>(p.integer("samples", 256, 3, 1'000'000));
    settings.slack = p.real("slack", 1e-3, 0.0, 1.0);
    settings.eps_factors = p.reals("eps_factors", settings.eps_factors, 1e-6, 1e6);
    settings.deltas = p.reals("deltas", settings.deltas, 1e-3, 100.0);
    const auto single = p.optional_integer("trial", 0, 99999);
    if (single && static_cast<std::size_t>(*single) >= trials) p.error("trial", "must be below trials");
    seal(r, p);
    settings.T_sigma = log_grid(t_min, std::max(t_min, t_max), t_points);
    const fs::path dir = prepare_out(cfg);

    std::vector<std::size_t> indices;
    if (single) {
        indices.push_back(static_cast<std::size_t>(*single));
    } else {
        for (std::size_t i = 0; i < trials; ++i) indices.push_back(i);
    }

    struct TrialOutput {
        json provenance;
        std::vector<BoundRow> rows;
    };
    std::vector<TrialOutput> outputs(indices.size());
    parallel_for(indices.size(), cfg.workers, [&](std::size_t k) {
        const BatteryTrial trial = make_battery_trial(r.seed, indices[k], limits);
        const QuantumState& psi = trial.scenario.initial_state;
        const auto dist = level_distribution(psi);
        outputs[k].provenance = {{"trial", trial.index},
                                 {"trial_seed", trial.seed},
                                 {"d", psi.dim()},
                                 {"levels", psi.spectrum().num_levels()},
                                 {"K", trial.K},
                                 {"projector", trial.projector_kind},
                                 {"state", trial.state_kind},
                                 {"d_eff", effective_dimension(dist)},
                                 {"sigma_E", energy_moments(dist, psi.spectrum()).stddev}};
        outputs[k].rows = evaluate_trial(trial, settings);
    });

    std::vector<std::pair<std::string, BoundRow>> flat;
    json violations = json::array();
    std::map<std::string, std::array<std::size_t, 3>> by_name;  // rows, violations, vacuous
    for (const auto& out : outputs) {
        const std::string prefix = "trial" + std::to_string(out.provenance["trial"].get<std::size_t>()) + "/";
        for (const auto& row : out.rows) {
            auto& tally = by_name[row.name];
            ++tally[0];
            if (!row.holds) ++tally[1];
            if (row.value >= 1.0) ++tally[2];
            if (!row.holds) {
                json v = out.provenance;
                v["bound"] = row.name;
                v["T"] = row.T;
                if (row.eps) v["eps"] = *row.eps;
                v["value"] = row.value;
                v["measured"] = row.measured;
                v["slack"] = row.slack;
                violations.push_back(std::move(v));
            }
            flat.emplace_back(prefix, row);
        }
    }
    {
        std::ofstream out = open_csv(r, dir / "bounds.csv");
        write_bound_rows(out, header_line(r), flat);
    }
    json tallies = json::object();
    for (const auto& [name, t] : by_name) tallies[name] = {{"rows", t[0]}, {"violations", t[1]}, {"vacuous", t[2]}};
    const std::size_t n_viol = violations.size();
    write_json_artifact(r, dir / "bounds_verdict.json",
                        {{"violations", n_viol},
                         {"trials", indices.size()},
                         {"rows", flat.size()},
                         {"by_bound", tallies},
                         {"violation_list", violations}});

    for (const auto& [name, t] : by_name) {
        add_check(r, name, t[1] == 0, static_cast<double>(t[1]), 0.0,
                  std::to_string(t[0]) + " rows, " + std::to_string(t[2]) + " vacuous");
    }
    r.summary = {{"violations", n_viol}, {"trials", indices.size()}, {"rows", flat.size()}, {"T_sigma", settings.T_sigma}};
    write_summary(r, dir);
    return r;
}

// ---------------------------------------------------------------- slow

namespace {

struct SlowParams {
    std::size_t d;
    std::size_t K;
    double eps;
};

Scenario slow_scenario(std::uint64_t seed, std::size_t d) {
    RandomScenarioOptions opts;
    opts.amplitudes = AmplitudeLaw::flat_phase;
    Scenario sc = random_scenario(seed, d, opts);
    sc.label = "slow";
    return sc;
}

}  // namespace

ExperimentResult run_slow(const RunConfig& cfg) {
    Params p(cfg.params);
    ExperimentResult r = begin(p, "slow");
    const auto d = static_cast<std::size_t>(p.integer("d", 1024, 4, 4096));
    const auto K = static_cast<std::size_t>(p.integer("K", 16, 1, 512));
    const double eps = p.real("eps", 0.5, 1e-6, 1.0);
    const auto N = static_cast<std::size_t>(p.integer("N", 3, 2, 513));
    SlowCheckOptions opts;
    opts.window_samples = static_cast<std::size_t>(p.integer("samples", 256, 2, 1'000'000));
    opts.long_samples = static_cast<std::size_t>(p.integer("long_samples", 2048, 2, 10'000'000));
    opts.long_time = p.real("T_max", 0.0, 0.0, 1e12);
    const auto partition_samples = static_cast<std::size_t>(p.integer("partition_samples", 64, 2, 100000));
    const auto overlap_pairs = static_cast<std::size_t>(p.integer("overlap_pairs", 64, 1, 100000));
    const auto battery = static_cast<std::size_t>(p.integer("battery", 0, 0, 1000));
    if (K > d) p.error("K", "must not exceed d");
    seal(r, p);
    opts.seed = derive_seed(r.seed, 1);
    opts.workers = cfg.workers;
    const fs::path dir = prepare_out(cfg);

    const Scenario sc = slow_scenario(derive_seed(r.seed, 0), d);
    const SnapshotSubspace sub = snapshot_subspace(sc, K, eps);
    const SlowCheck chk = slow_window_check(sub, sc, opts);
    {
        std::ofstream out = open_csv(r, dir / "slow.csv");
        write_csv(out, chk.window, header_line(r));
    }
    add_check(r, "window_floor", chk.floor_holds, chk.min_value, chk.floor,
              chk.first_violation_t ? "first violation at t = " + format_double(*chk.first_violation_t) : "");
    add_check(r, "equilibrium_weight", chk.trace_p_omega <= chk.sqrt_k_over_deff, chk.trace_p_omega,
              chk.sqrt_k_over_deff, "tr(P omega) <= sqrt(K / d_eff)");
    add_check(r, "long_time_ceiling", chk.ceiling_holds, chk.long_average, chk.ceiling,
              "long-time average <= 2 sqrt(K / d_eff) + 3 stderr");

    // N-outcome refinement dominance
    json partition = nullptr;
    if (N - 1 <= sub.effective_rank) {
        const Measurement m = partitioned_slow_measurement(sub, N);
        const Projector proj = sub.projector();
        const QuantumState omega = dephase(sc.initial_state);
        const double t_end = (2.0 * static_cast<double>(K) - 1.0) * eps / chk.sigma_E;
        TimeSeries ps;
        ps.value_name = "D_partition";
        ps.times.resize(partition_samples);
        ps.values.resize(partition_samples);
        std::vector<double> dp(partition_samples);
        parallel_for(partition_samples, cfg.workers, [&](std::size_t i) {
            const double t = t_end * static_cast<double>(i) / static_cast<double>(partition_samples - 1);
            const QuantumState rho_t = evolve(sc.initial_state, t);
            ps.times[i] = t;
            ps.values[i] = distinguishability(m, rho_t, omega);
            dp[i] = projector_distinguishability(proj, rho_t, omega);
        });
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < partition_samples; ++i) worst = std::min(worst, ps.values[i] - dp[i]);
        ps.bound = std::move(dp);
        std::ofstream out = open_csv(r, dir / "slow_partition.csv");
        write_csv(out, ps, header_line(r));
        add_check(r, "partition_dominance", worst >= -1e-12, worst, -1e-12,
                  "min over t of D_M - D_P for the " + std::to_string(N) + "-outcome refinement");
        partition = {{"N", N}, {"min_gain", worst}, {"samples", partition_samples}};
    } else {
        add_check(r, "partition_dominance", false, static_cast<double>(sub.effective_rank), static_cast<double>(N - 1),
                  "N - 1 exceeds the snapshot rank");
    }

    // overlap lemma |<psi(t)|psi(t')>|^2 >= 1 - eps^2 for |t - t'| <= tau / 2
    {
        std::mt19937_64 rng(derive_seed(r.seed, 2));
        const double t_end = (2.0 * static_cast<double>(K) - 1.0) * eps / chk.sigma_E;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < overlap_pairs; ++i) {
            const double t = t_end * u(rng);
            const double dt = (2.0 * u(rng) - 1.0) * sub.tau / 2.0;
            worst = std::min(worst, survival_probability(sc.initial_state, dt) - (1.0 - eps * eps));
            (void)t;  // the overlap depends on t - t' only
        }
        add_check(r, "overlap_lemma", worst >= -1e-12, worst, 0.0, "min over pairs of |<psi(t)|psi(t')>|^2 - (1 - eps^2)");
    }

    json battery_json = json::array();
    if (battery > 0) {
        struct Out {
            json row;
            bool ok;
        };
        std::vector<Out> outs(battery);
        parallel_for(battery, cfg.workers, [&](std::size_t b) {
            std::mt19937_64 rng(derive_seed(r.seed, 1000 + b));
            const auto db = std::uniform_int_distribution<std::size_t>(256, 2048)(rng);
            const auto kb = std::uniform_int_distribution<std::size_t>(4, 32)(rng);
            const double eb = rng() % 2 == 0 ? 0.25 : 0.5;
            const Scenario s = slow_scenario(rng(), db);
            const SnapshotSubspace sb = snapshot_subspace(s, kb, eb);
            SlowCheckOptions o = opts;
            o.workers = 1;
            o.seed = rng();
            const SlowCheck c = slow_window_check(sb, s, o);
            const bool ok = c.passed() && c.trace_p_omega <= c.sqrt_k_over_deff;
            outs[b] = {{{"d", db}, {"K", kb}, {"eps", eb}, {"effective_rank", sb.effective_rank},
                        {"floor", c.floor}, {"min_value", c.min_value}, {"ceiling", c.ceiling},
                        {"long_average", c.long_average}, {"trace_p_omega", c.trace_p_omega}, {"passed", ok}},
                       ok};
        });
        std::size_t failed = 0;
        for (auto& o : outs) {
            failed += o.ok ? 0 : 1;
            battery_json.push_back(std::move(o.row));
        }
        add_check(r, "battery", failed == 0, static_cast<double>(failed), 0.0,
                  std::to_string(battery) + " scenarios, floor and ceiling together");
    }

    r.summary = {{"d", d},
                 {"K", K},
                 {"eps", eps},
                 {"tau", sub.tau},
                 {"effective_rank", sub.effective_rank},
                 {"rank_deficient", sub.rank_deficient()},
                 {"d_eff", chk.d_eff},
                 {"sigma_E", chk.sigma_E},
                 {"floor", chk.floor},
                 {"min_value", chk.min_value},
                 {"trace_p_omega", chk.trace_p_omega},
                 {"sqrt_K_over_d_eff", chk.sqrt_k_over_deff},
                 {"ceiling", chk.ceiling},
                 {"long_time", chk.long_time},
                 {"long_average", chk.long_average},
                 {"long_stderr", chk.long_stderr},
                 {"partition", partition}};
    if (battery > 0) r.summary["battery"] = battery_json;
    write_summary(r, dir);
    return r;
}

// ---------------------------------------------------------------- gaussian

ExperimentResult run_gaussian(const RunConfig& cfg) {
    Params p(cfg.params);
    ExperimentResult r = begin(p, "gaussian");
    const auto levels = static_cast<std::size_t>(p.integer("levels", 2000, 100, 4000));
    const double span = p.real("span", 8.0, 0.5, 100.0);
    const double sigma = p.real("sigma", 1.0, 1e-9, 1e9);
    const auto points = static_cast<std::size_t>(p.integer("T_points", 12, 1, 1000));
    const double x_min = p.real("T_min", 2.0, 1e-6, 1e6);
    const double x_max = p.real("T_max", 50.0, 1e-6, 1e6);
    if (x_max < x_min) p.error("T_max", "must be at least T_min");
    seal(r, p);
    const fs::path dir = prepare_out(cfg);

    constexpr double kEtaLimit = 0.42;
    constexpr double kPurityTolerance = 0.10;
    constexpr double kPurityFrom = 5.0;

    const Scenario sc = gaussian_spectrum(levels, sigma, span);
    const QuantumState& psi = sc.initial_state;
    const auto dist = level_distribution(psi);
    const double s_meas = energy_moments(dist, *sc.spectrum).stddev;
    const std::vector<double> xs = log_grid(x_min, std::max(x_min, x_max), points);

    struct Row {
        double x, T, eta, eta_x, estimate, erf_form, asymptote, discrete;
    };
    std::vector<Row> rows(xs.size());
    parallel_for(xs.size(), cfg.workers, [&](std::size_t i) {
        const double T = xs[i] / s_meas;
        const double e = eta(*sc.spectrum, dist.p, 1.0 / T).value;
        const GaussianPurity gp = gaussian_purity_estimate(s_meas, T);
        rows[i] = {xs[i], T, e, e * xs[i], gaussian_eta_estimate(s_meas, T), gp.exact, gp.asymptotic,
                   purity_closed_form(psi, T).exact};
    });

    double worst_eta = 0.0;
    double worst_eta_x = 0.0;
    double worst_purity = 0.0;
    for (const auto& row : rows) {
        if (row.eta_x > worst_eta) {
            worst_eta = row.eta_x;
            worst_eta_x = row.x;
        }
        if (row.x >= kPurityFrom) worst_purity = std::max(worst_purity, std::abs(row.erf_form / row.asymptote - 1.0));
    }
    {
        std::ofstream out = open_csv(r, dir / "gaussian.csv");
        out << "# " << header_line(r) << '\n'
            << "sigma_T,T,eta,eta_sigma_T,eta_estimate,purity_erf,purity_asymptotic,purity_discrete\n";
        for (const auto& row : rows) {
            out << format_double(row.x) << ',' << format_double(row.T) << ',' << format_double(row.eta) << ','
                << format_double(row.eta_x) << ',' << format_double(row.estimate) << ',' << format_double(row.erf_form)
                << ',' << format_double(row.asymptote) << ',' << format_double(row.discrete) << '\n';
        }
    }
    add_check(r, "sigma_E_target", std::abs(s_meas / sigma - 1.0) <= 0.01, s_meas, sigma, "within 1%");
    add_check(r, "eta_scaling", worst_eta <= kEtaLimit, worst_eta, kEtaLimit,
              "max over the grid of eta_{1/T} sigma_E T, attained at sigma_E T = " + format_double(worst_eta_x));
    add_check(r, "purity_asymptote", worst_purity <= kPurityTolerance, worst_purity, kPurityTolerance,
              "max relative gap of the erf form to 1/(2 sqrt(pi) sigma_E T) for sigma_E T >= 5");

    json grid = json::array();
    for (const auto& row : rows) {
        grid.push_back({{"sigma_T", row.x}, {"eta", row.eta}, {"eta_sigma_T", row.eta_x},
                        {"purity_erf", row.erf_form}, {"purity_asymptotic", row.asymptote},
                        {"purity_discrete", row.discrete}});
    }
    r.summary = {{"sigma_E_measured", s_meas},
                 {"d_eff", effective_dimension(dist)},
                 {"max_eta_sigma_T", worst_eta},
                 {"max_eta_sigma_T_at", worst_eta_x},
                 {"max_purity_relative_gap", worst_purity},
                 {"grid", grid}};
    write_summary(r, dir);
    return r;
}

// ---------------------------------------------------------------- haar

namespace {

std::vector<std::size_t> random_partition(std::size_t total, std::size_t parts, std::mt19937_64& rng) {
    // parts >= 1 entries, each >= 1, summing to total
    std::vector<std::size_t> cuts;
    std::vector<std::size_t> pool(total - 1);
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i + 1;
    std::shuffle(pool.begin(), pool.end(), rng);
    cuts.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(parts - 1));
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::size_t> out;
    std::size_t prev = 0;
    for (std::size_t c : cuts) {
        out.push_back(c - prev);
        prev = c;
    }
    out.push_back(total - prev);
    return out;
}

}  // namespace

ExperimentResult run_haar(const RunConfig& cfg) {
    Params p(cfg.params);
    ExperimentResult r = begin(p, "haar");
    const auto d = static_cast<std::size_t>(p.integer("d", 8, 2, 256));
    const auto K = static_cast<std::size_t>(p.integer("K", 3, 1, 256));
    const double t = p.real("t", 0.7, 0.0, 1e9);
    const auto samples = static_cast<std::size_t>(p.integer("samples", 2000, 2, 10'000'000));
    const double stderr_limit = p.real("stderr_limit", 1e-3, 0.0, 1.0);
    const auto battery = static_cast<std::size_t>(p.integer("battery", 50, 0, 10000));
    const auto battery_d_max = static_cast<std::size_t>(p.integer("battery_d_max", 16, 3, 128));
    const auto battery_samples = static_cast<std::size_t>(p.integer("battery_samples", 2000, 2, 1'000'000));
    if (K > d) p.error("K", "must not exceed d");
    seal(r, p);
    const fs::path dir = prepare_out(cfg);

    const Scenario sc = random_scenario(derive_seed(r.seed, 0), d);
    const QuantumState rho_t = evolve(sc.initial_state, t);
    const QuantumState omega = dephase(sc.initial_state);
    const HaarSampler sampler(derive_seed(r.seed, 1), d);
    const TwirlResult tw = twirl_check(rho_t, omega, K, sampler, samples, cfg.workers);
    write_json_artifact(r, dir / "haar.json",
                        {{"exact", tw.exact}, {"mc_mean", tw.mc_mean}, {"mc_stderr", tw.mc_stderr},
                         {"samples", tw.samples}, {"seed", tw.seed}});
    add_check(r, "exact_vs_mc", tw.gap_in_stderr() <= 5.0, tw.gap_in_stderr(), 5.0,
              "|MC mean of D^2 - exact| in units of the standard error");
    add_check(r, "mc_stderr", tw.mc_stderr <= stderr_limit, tw.mc_stderr, stderr_limit);

    std::vector<std::pair<std::string, BoundRow>> rows;
    if (battery > 0) {
        std::vector<std::vector<BoundRow>> per(battery);
        parallel_for(battery, cfg.workers, [&](std::size_t b) {
            std::mt19937_64 rng(derive_seed(r.seed, 1000 + b));
            const auto db = std::uniform_int_distribution<std::size_t>(3, battery_d_max)(rng);
            const auto kb = std::uniform_int_distribution<std::size_t>(1, db)(rng);
            const auto nb = std::uniform_int_distribution<std::size_t>(2, std::min<std::size_t>(4, db))(rng);
            const auto nc = std::uniform_int_distribution<std::size_t>(2, std::min<std::size_t>(4, db - 1))(rng);
            const std::vector<std::size_t> ranks = random_partition(db, nb, rng);
            const std::vector<std::size_t> cranks = random_partition(db - 1, nc, rng);
            const Scenario s = random_scenario(rng(), db);
            const QuantumState& psi = s.initial_state;
            const double sig = energy_moments(level_distribution(psi), psi.spectrum()).stddev;
            const double tb = std::uniform_real_distribution<double>(0.0, 5.0)(rng) / std::max(sig, 1e-12);
            const QuantumState rt = evolve(psi, tb);
            const QuantumState om = dephase(psi);
            const Eigen::MatrixXcd x = rt.density() - om.density();
            const Eigen::MatrixXcd x0 = psi.density() - om.density();
            const HaarSampler plain(rng(), db);
            const HaarSampler constrained(rng(), psi.amplitudes());
            auto& out = per[b];

            const HaarMoments typ = sample_projector_distinguishability(x, kb, plain, battery_samples);
            const double slack = 3.0 * typ.d.stderr_mean + 1e-12;
            out.push_back(make_row("typical", tb, {}, kb, typical_bound(kb, db), typ.d.mean, slack));
            out.push_back(make_row("typical_cap", tb, {}, kb, typical_cap(db), typ.d.mean, slack));
            out.push_back(make_row("jensen", tb, {}, kb, std::sqrt(typ.d_sq.mean), typ.d.mean, 1e-12));

            const HaarMoments nout = sample_measurement_distinguishability(x, ranks, plain, battery_samples);
            const NOutcomeTypical nb_bound = n_outcome_typical_bound(ranks, db);
            out.push_back(make_row("n_outcome_typical", tb, {}, ranks.size(), nb_bound.value, nout.d.mean,
                                   3.0 * nout.d.stderr_mean + 1e-12));
            out.push_back(make_row("n_outcome_typical_cap", tb, {}, ranks.size(), nb_bound.cap, nout.d.mean,
                                   3.0 * nout.d.stderr_mean + 1e-12));

            const HaarMoments con = sample_constrained_distinguishability(x, kb, constrained, battery_samples);
            const ConstrainedBound cb = constrained_mean_bound(psi, rt, om, kb);
            out.push_back(make_row("constrained", tb, {}, kb, cb.value, con.d.mean, 3.0 * con.d.stderr_mean + 1e-12));
            out.push_back(make_row("constrained_tight", tb, {}, kb, cb.tight, con.d.mean, 3.0 * con.d.stderr_mean + 1e-12));

            const HaarMoments cn = sample_constrained_measurement(x, cranks, constrained, battery_samples);
            out.push_back(make_row("n_outcome_constrained", tb, {}, cranks.size(),
                                   n_outcome_constrained_bound(cb.f, cranks.size(), db), cn.d.mean,
                                   3.0 * cn.d.stderr_mean + 1e-12));

            // the floor is a lower bound: store it negated so "holds" keeps the <= convention
            const HaarMoments init = sample_constrained_distinguishability(x0, kb, constrained, battery_samples);
            const InitialFloor fl = initial_distinguishability_floor(psi, om, kb);
            out.push_back(make_row("initial_floor", 0.0, {}, kb, -fl.floor, -init.d.mean, 3.0 * init.d.stderr_mean + 1e-12));
        });
        for (std::size_t b = 0; b < battery; ++b) {
            for (auto& row : per[b]) rows.emplace_back("scenario" + std::to_string(b) + "/", std::move(row));
        }
        std::ofstream out = open_csv(r, dir / "haar_battery.csv");
        write_bound_rows(out, header_line(r), rows);
        std::size_t violations = 0;
        for (const auto& [prefix, row] : rows) violations += row.holds ? 0 : 1;
        add_check(r, "battery", violations == 0, static_cast<double>(violations), 0.0,
                  std::to_string(battery) + " scenarios, " + std::to_string(rows.size()) + " comparisons");
        r.summary["battery_rows"] = rows.size();
        r.summary["battery_violations"] = violations;
    }
    r.summary["twirl"] = {{"exact", tw.exact}, {"mc_mean", tw.mc_mean}, {"mc_stderr", tw.mc_stderr},
                          {"samples", tw.samples}, {"seed", tw.seed}, {"gap_in_stderr", tw.gap_in_stderr()}};
    write_summary(r, dir);
    return r;
}

// ---------------------------------------------------------------- eta / spectrum-info

namespace {

struct ScenarioChoice {
    std::string kind;
    std::size_t levels = 0;
    double nu = 1.0;
    double temperature = 10.0;
    double sigma = 1.0;
    double span = 8.0;
    std::optional<std::string> spectrum_path;
    std::optional<std::string> state_path;
    std::optional<std::string> hermitian_path;
};

ScenarioChoice read_scenario_choice(Params& p, const std::string& fallback) {
    ScenarioChoice c;
    c.kind = p.text("scenario", fallback, {"ho1d", "ho3d", "gaussian", "random", "file"});
    if (c.kind == "ho1d") {
        c.levels = static_cast<std::size_t>(p.integer("levels", 50, 2, 4000));
        c.nu = p.real("nu", 1.0, 1e-9, 1e9);
    } else if (c.kind == "ho3d") {
        c.levels = static_cast<std::size_t>(p.integer("levels", 120, 1, 400));
        c.nu = p.real("nu", 1.0, 1e-9, 1e9);
        c.temperature = p.real("temperature", 10.0, 1e-9, 1e9);
    } else if (c.kind == "gaussian") {
        c.levels = static_cast<std::size_t>(p.integer("levels", 2000, 100, 4000));
        c.sigma = p.real("sigma", 1.0, 1e-9, 1e9);
        c.span = p.real("span", 8.0, 0.5, 100.0);
    } else if (c.kind == "random") {
        c.levels = static_cast<std::size_t>(p.integer("d", 40, 1, 4000));
    } else {
        c.spectrum_path = p.optional_text("spectrum");
        c.state_path = p.optional_text("state");
        c.hermitian_path = p.optional_text("hermitian");
        if (!c.spectrum_path && !c.state_path && !c.hermitian_path) {
            p.error("scenario", "\"file\" needs one of spectrum, state or hermitian");
        }
    }
    return c;
}

struct Loaded {
    SpectrumPtr spectrum;
    std::optional<QuantumState> state;
};

Loaded load_choice(const ScenarioChoice& c, std::uint64_t seed, const fs::path& base) {
    auto resolve = [&](const std::string& s) {
        fs::path path = s;
        return path.is_relative() && !base.empty() ? base / path : path;
    };
    if (c.kind == "file") {
        if (c.state_path) {
            const fs::path sp = resolve(*c.state_path);
            QuantumState st = state_from_json(read_json_file(sp), sp.parent_path());
            return {st.spectrum_ptr(), st};
        }
        if (c.spectrum_path) return {share(spectrum_from_json(read_json_file(resolve(*c.spectrum_path)))), std::nullopt};
        const Eigen::MatrixXcd h = complex_matrix_from_json(read_json_file(resolve(*c.hermitian_path)));
        return {share(spectrum_from_hermitian(h).spectrum), std::nullopt};
    }
    Scenario sc = c.kind == "ho1d"       ? harmonic_oscillator_1d(c.levels, c.nu)
                  : c.kind == "ho3d"     ? harmonic_oscillator_3d_boltzmann(c.levels, c.nu, c.temperature)
                  : c.kind == "gaussian" ? gaussian_spectrum(c.levels, c.sigma, c.span)
                                         : random_scenario(seed, c.levels);
    return {sc.spectrum, sc.initial_state};
}

}  // namespace

ExperimentResult run_eta(const RunConfig& cfg) {
    Params p(cfg.params);
    ExperimentResult r = begin(p, "eta");
    const ScenarioChoice choice = read_scenario_choice(p, "ho3d");
    std::vector<double> eps = p.reals("eps", {8.0}, 0.0, 1e12);
    seal(r, p);
    const fs::path dir = prepare_out(cfg);

    const Loaded loaded = load_choice(choice, r.seed, cfg.base_dir);
    if (!loaded.state) throw ConfigError(std::vector<FieldError>{{"state", "eta needs a state (scenario file mode requires \"state\")"}});
    const auto dist = level_distribution(*loaded.state);
    const auto& spec = *loaded.spectrum;
    const double d_eff = effective_dimension(dist);
    const double p_max = *std::max_element(dist.p.begin(), dist.p.end());

    std::sort(eps.begin(), eps.end());
    json results = json::array();
    bool floor_ok = true;
    bool monotone = true;
    double prev = 0.0;
    for (double e : eps) {
        const EtaResult er = eta(spec, dist.p, e);
        results.push_back({{"eps", e}, {"eta", er.value}, {"window", {er.window_lower, er.window_upper}}});
        floor_ok = floor_ok && er.value >= p_max - 1e-12 && p_max >= 1.0 / d_eff - 1e-12;
        monotone = monotone && er.value >= prev - 1e-12;
        prev = er.value;
    }
    add_check(r, "eta_floor", floor_ok, prev, 1.0 / d_eff, "eta >= p_max >= 1 / d_eff");
    add_check(r, "eta_monotone", monotone, static_cast<double>(eps.size()), 0.0, "eta nondecreasing in eps");
    write_json_artifact(r, dir / "eta.json", {{"scenario", choice.kind}, {"d_eff", d_eff}, {"p_max", p_max}, {"results", results}});
    {
        const EtaResult first = eta(spec, dist.p, eps.front());
        std::ofstream out = open_csv(r, dir / "eta_distribution.csv");
        out << "# " << header_line(r) << '\n' << "E,p,in_window\n";
        for (std::size_t n = 0; n < spec.num_levels(); ++n) {
            const double e = spec.levels()[n];
            out << format_double(e) << ',' << format_double(dist.p[n]) << ','
                << (e >= first.window_lower && e <= first.window_upper ? 1 : 0) << '\n';
        }
    }
    r.summary = {{"scenario", choice.kind}, {"d_eff", d_eff}, {"p_max", p_max}, {"results", results}};
    write_summary(r, dir);
    return r;
}

ExperimentResult run_spectrum_info(const RunConfig& cfg) {
    Params p(cfg.params);
    ExperimentResult r = begin(p, "spectrum-info");
    const ScenarioChoice choice = read_scenario_choice(p, "ho1d");
    seal(r, p);
    const fs::path dir = prepare_out(cfg);

    const Loaded loaded = load_choice(choice, r.seed, cfg.base_dir);
    const auto& spec = *loaded.spectrum;
    const GapSet gaps(spec);
    json info = {{"num_levels", spec.num_levels()},
                 {"dim", spec.dim()},
                 {"min_energy", spec.min_energy()},
                 {"max_energy", spec.max_energy()},
                 {"max_gap", spec.max_gap()},
                 {"gap_count", gaps.size()},
                 {"max_degeneracy", *std::max_element(spec.degeneracies().begin(), spec.degeneracies().end())}};
    if (spec.num_levels() > 1) info["min_spacing"] = spec.min_spacing();
    if (loaded.state) {
        const auto dist = level_distribution(*loaded.state);
        const auto m = energy_moments(dist, spec);
        info["state"] = {{"kind", loaded.state->kind() == StateKind::pure       ? "pure"
                                  : loaded.state->kind() == StateKind::diagonal ? "diagonal"
                                                                                : "dense"},
                         {"d_eff", effective_dimension(dist)},
                         {"mean_energy", m.mean},
                         {"sigma_E", m.stddev},
                         {"purity", purity(*loaded.state)}};
    }
    if (choice.hermitian_path) write_json_artifact(r, dir / "spectrum.json", spectrum_to_json(spec));
    write_json_artifact(r, dir / "spectrum_info.json", info);
    r.summary = info;
    write_summary(r, dir);
    return r;
}

// ---------------------------------------------------------------- dispatch

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {"figure3", "bounds", "slow", "gaussian", "haar", "eta", "spectrum-info"};
    return names;
}

ExperimentResult run_experiment(const RunConfig& cfg) {
    const std::string& e = cfg.experiment;
    if (e == "figure3") return run_figure3(cfg);
    if (e == "bounds") return run_bound_battery(cfg);
    if (e == "slow") return run_slow(cfg);
    if (e == "gaussian") return run_gaussian(cfg);
    if (e == "haar") return run_haar(cfg);
    if (e == "eta") return run_eta(cfg);
    if (e == "spectrum-info") return run_spectrum_info(cfg);
    throw ConfigError(std::vector<FieldError>{{"experiment", "unknown experiment \"" + e + "\""}});
}

int run_and_report(const RunConfig& cfg, std::ostream& log) {
    auto write_failure = [&](json body) {
        try {
            fs::create_directories(cfg.out_dir);
            body["experiment"] = cfg.experiment;
            write_json_file(cfg.out_dir / "failure.json", body);
        } catch (const std::exception& e) {
            log << "could not write failure.json: " << e.what() << '\n';
        }
    };
    try {
        const ExperimentResult r = run_experiment(cfg);
        for (const auto& c : r.checks) {
            log << (c.passed ? "PASS " : "FAIL ") << r.experiment << '/' << c.name << "  measured=" << format_double(c.measured)
                << " limit=" << format_double(c.limit);
            if (!c.detail.empty()) log << "  (" << c.detail << ')';
            log << '\n';
        }
        for (const auto& f : r.files) log << "wrote " << f.string() << '\n';
        if (r.passed()) {
            std::error_code ec;
            fs::remove(cfg.out_dir / "failure.json", ec);
            return 0;
        }
        json failures = json::array();
        for (const auto& c : r.checks) {
            if (!c.passed) {
                failures.push_back({{"check", c.name}, {"measured", c.measured}, {"limit", c.limit}, {"detail", c.detail}});
            }
        }
        write_failure({{"status", "check_failed"}, {"failures", failures}, {"provenance", provenance(r)}});
        return 1;
    } catch (const ConfigError& e) {
        json errors = json::array();
        for (const auto& fe : e.errors()) errors.push_back({{"field", fe.field}, {"message", fe.message}});
        log << e.what() << '\n';
        write_failure({{"status", "config_error"}, {"errors", errors}});
        return 2;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        write_failure({{"status", "runtime_error"}, {"message", e.what()}});
        return 3;
    }
}

}  // namespace eqt
