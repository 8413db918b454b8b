#include "eqt/constructions.hpp"

#include "eqt/parallel.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace eqt {

namespace {

using cd = std::complex<double>;

// Same rotating phases as evolve(), without building a QuantumState.
Eigen::VectorXcd evolved_amplitudes(const Eigen::VectorXcd& c, const std::vector<double>& energies, double t) {
    Eigen::VectorXcd out(c.size());
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        out(j) = c(j) * std::polar(1.0, -energies[static_cast<std::size_t>(j)] * t);
    }
    return out;
}

}  // namespace

std::optional<double> Scenario::param(const std::string& key) const {
    for (const auto& [k, v] : params) {
        if (k == key) return v;
    }
    return std::nullopt;
}

Scenario harmonic_oscillator_1d(std::size_t levels, double nu, std::optional<std::uint64_t> phase_seed) {
    if (levels < 2) throw std::invalid_argument("harmonic_oscillator_1d: need at least 2 levels");
    if (!(nu > 0.0)) throw std::invalid_argument("harmonic_oscillator_1d: nu must be positive");
    std::vector<double> e(levels);
    for (std::size_t n = 0; n < levels; ++n) e[n] = (static_cast<double>(n) + 0.5) * nu;
    auto spec = share(EnergySpectrum::nondegenerate(std::move(e)));
    const auto n = static_cast<Eigen::Index>(levels);
    Eigen::VectorXcd c = Eigen::VectorXcd::Constant(n, cd(1.0 / std::sqrt(static_cast<double>(levels)), 0.0));
    if (phase_seed) {
        std::mt19937_64 rng(*phase_seed);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        for (Eigen::Index j = 0; j < n; ++j) c(j) *= std::polar(1.0, phase(rng));
    }
    Scenario s{"ho1d", spec, QuantumState::pure(spec, std::move(c)),
               {{"levels", static_cast<double>(levels)}, {"nu", nu}}};
    if (phase_seed) s.params.emplace_back("phase_seed", static_cast<double>(*phase_seed));
    return s;
}

Scenario harmonic_oscillator_3d_boltzmann(std::size_t levels, double nu, double temperature) {
    if (levels < 1) throw std::invalid_argument("harmonic_oscillator_3d_boltzmann: need at least 1 level");
    if (!(nu > 0.0)) throw std::invalid_argument("harmonic_oscillator_3d_boltzmann: nu must be positive");
    if (!(temperature > 0.0)) throw std::invalid_argument("harmonic_oscillator_3d_boltzmann: temperature must be positive");
    std::vector<double> e(levels);
    std::vector<int> g(levels);
    std::vector<double> w(levels);
    CompensatedSum z;
    for (std::size_t n = 0; n < levels; ++n) {
        e[n] = (static_cast<double>(n) + 0.5) * nu;
        g[n] = static_cast<int>((n + 1) * (n + 2) / 2);
        // relative to the ground level so tiny temperatures do not underflow to all zeros
        w[n] = static_cast<double>(g[n]) * std::exp(-(e[n] - e[0]) / temperature);
        z.add(w[n]);
    }
    auto spec = share(EnergySpectrum(e, g));
    Eigen::VectorXd pops(static_cast<Eigen::Index>(spec->dim()));
    for (std::size_t n = 0; n < levels; ++n) {
        const double per_state = w[n] / z.value() / static_cast<double>(g[n]);
        const auto first = static_cast<Eigen::Index>(spec->first_index(n));
        pops.segment(first, g[n]).setConstant(per_state);
    }
    pops /= pops.sum();
    return {"ho3d_boltzmann", spec, QuantumState::diagonal(spec, std::move(pops), 1e-9),
            {{"levels", static_cast<double>(levels)}, {"nu", nu}, {"temperature", temperature}}};
}

Scenario gaussian_spectrum(std::size_t levels, double sigma, double span) {
    if (levels < 100) throw std::invalid_argument("gaussian_spectrum: need at least 100 levels");
    if (!(sigma > 0.0) || !(span > 0.0)) throw std::invalid_argument("gaussian_spectrum: sigma and span must be positive");
    const double lo = -span * sigma;
    const double de = 2.0 * span * sigma / static_cast<double>(levels - 1);
    std::vector<double> e(levels);
    Eigen::VectorXcd c(static_cast<Eigen::Index>(levels));
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
    for (std::size_t n = 0; n < levels; ++n) {
        e[n] = lo + de * static_cast<double>(n);
        const double p = norm * std::exp(-e[n] * e[n] / (2.0 * sigma * sigma));
        c(static_cast<Eigen::Index>(n)) = std::sqrt(p * de);
    }
    auto spec = share(EnergySpectrum::nondegenerate(std::move(e)));
    return {"gaussian", spec, QuantumState::pure(spec, normalized(std::move(c))),
            {{"levels", static_cast<double>(levels)}, {"sigma", sigma}, {"span", span}}};
}

double draw_spacing(SpacingLaw law, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double u = uniform(rng);
    switch (law) {
    case SpacingLaw::wigner: return std::sqrt(-4.0 * std::log1p(-u) / std::numbers::pi);
    case SpacingLaw::exponential: return -std::log1p(-u);
    }
    return 1.0;
}

Scenario random_scenario(std::uint64_t seed, std::size_t d, const RandomScenarioOptions& options) {
    if (d < 1) throw std::invalid_argument("random_scenario: dimension must be positive");
    if (!(options.mean_spacing > 0.0)) throw std::invalid_argument("random_scenario: mean spacing must be positive");
    if (options.max_degeneracy < 1) throw std::invalid_argument("random_scenario: max degeneracy must be at least 1");
    std::mt19937_64 rng(seed);

    std::vector<int> g;
    if (options.degeneracy == DegeneracyProfile::none) {
        g.assign(d, 1);
    } else {
        std::uniform_int_distribution<int> pick(1, options.max_degeneracy);
        std::size_t used = 0;
        while (used < d) {
            const int k = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(pick(rng)), d - used));
            g.push_back(k);
            used += static_cast<std::size_t>(k);
        }
    }

    std::vector<double> e(g.size());
    double level = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (n > 0) {
            // keep spacings clear of the degeneracy tolerance
            level += std::max(draw_spacing(options.spacing, rng), 1e-6) * options.mean_spacing;
        }
        e[n] = level;
    }
    auto spec = share(EnergySpectrum(std::move(e), std::move(g)));

    const auto n = static_cast<Eigen::Index>(d);
    Eigen::VectorXcd c(n);
    if (options.amplitudes == AmplitudeLaw::gaussian) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double re = normal(rng);
            const double im = normal(rng);
            c(j) = cd(re, im);
        }
    } else {
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        for (Eigen::Index j = 0; j < n; ++j) c(j) = std::polar(1.0, phase(rng));
    }
    Scenario s{"random", spec, QuantumState::pure(spec, normalized(std::move(c))),
               {{"seed", static_cast<double>(seed)}, {"d", static_cast<double>(d)}}};
    s.params.emplace_back("d_eff", effective_dimension(level_distribution(s.initial_state)));
    return s;
}

Projector SnapshotSubspace::projector() const {
    return Projector::from_orthonormal_columns(basis);
}

SnapshotSubspace snapshot_subspace(const Scenario& scenario, std::size_t K, double epsilon, double cutoff) {
    const QuantumState& psi = scenario.initial_state;
    if (!psi.is_pure()) throw std::invalid_argument("snapshot_subspace: initial state must be pure");
    if (K < 1) throw std::invalid_argument("snapshot_subspace: K must be at least 1");
    if (!(epsilon > 0.0)) throw std::invalid_argument("snapshot_subspace: epsilon must be positive");
    if (K > psi.dim()) throw std::invalid_argument("snapshot_subspace: K exceeds the dimension");

    const double sigma = energy_moments(level_distribution(psi), psi.spectrum()).stddev;
    SnapshotSubspace out;
    out.K = K;
    out.epsilon = epsilon;
    out.tau = sigma > 0.0 ? 2.0 * epsilon / sigma : 0.0;

    const auto& energies = psi.spectrum().index_energies();
    const auto d = static_cast<Eigen::Index>(psi.dim());
    Eigen::MatrixXcd snaps(d, static_cast<Eigen::Index>(K));
    for (std::size_t j = 0; j < K; ++j) {
        snaps.col(static_cast<Eigen::Index>(j)) =
            evolved_amplitudes(psi.amplitudes(), energies, out.tau * static_cast<double>(j));
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(snaps, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    out.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double threshold = cutoff * sv(0);
    std::size_t rank = 0;
    while (rank < static_cast<std::size_t>(sv.size()) && sv(static_cast<Eigen::Index>(rank)) > threshold) ++rank;
    out.effective_rank = rank;
    out.basis = svd.matrixU().leftCols(static_cast<Eigen::Index>(rank));
    return out;
}

double projector_equilibrium_weight(const Eigen::MatrixXcd& basis, const QuantumState& psi) {
    if (!psi.is_pure()) throw std::invalid_argument("projector_equilibrium_weight: state must be pure");
    if (basis.rows() != static_cast<Eigen::Index>(psi.dim())) {
        throw std::invalid_argument("projector_equilibrium_weight: dimension mismatch");
    }
    // omega = sum_n Q_n psi psi^dagger Q_n, so tr(P omega) = sum_n ||V^dagger Q_n psi||^2
    const auto& spec = psi.spectrum();
    const auto& c = psi.amplitudes();
    CompensatedSum s;
    for (std::size_t n = 0; n < spec.num_levels(); ++n) {
        const auto first = static_cast<Eigen::Index>(spec.first_index(n));
        const auto g = static_cast<Eigen::Index>(spec.degeneracies()[n]);
        s.add((basis.middleRows(first, g).adjoint() * c.segment(first, g)).squaredNorm());
    }
    return s.value();
}

SlowCheck slow_window_check(const SnapshotSubspace& subspace, const Scenario& scenario,
                            const SlowCheckOptions& options) {
    const QuantumState& psi = scenario.initial_state;
    if (!psi.is_pure()) throw std::invalid_argument("slow_window_check: initial state must be pure");
    if (subspace.basis.rows() != static_cast<Eigen::Index>(psi.dim())) {
        throw std::invalid_argument("slow_window_check: subspace does not match the scenario");
    }
    if (options.window_samples < 2 || options.long_samples < 2) {
        throw std::invalid_argument("slow_window_check: need at least 2 samples per sweep");
    }
    const auto dist = level_distribution(psi);
    const auto& spec = psi.spectrum();
    const auto& energies = spec.index_energies();
    const Eigen::MatrixXcd& v = subspace.basis;

    SlowCheck r;
    r.d_eff = effective_dimension(dist);
    r.sigma_E = energy_moments(dist, spec).stddev;
    const auto K = static_cast<double>(subspace.K);
    r.sqrt_k_over_deff = std::sqrt(K / r.d_eff);
    r.floor = 1.0 - subspace.epsilon * subspace.epsilon - r.sqrt_k_over_deff;
    r.ceiling = 2.0 * r.sqrt_k_over_deff;
    r.trace_p_omega = projector_equilibrium_weight(v, psi);

    auto d_at = [&](double t) {
        const double p_t = v.cols() == 0 ? 0.0 : (v.adjoint() * evolved_amplitudes(psi.amplitudes(), energies, t)).squaredNorm();
        return std::abs(p_t - r.trace_p_omega);
    };

    const double t_end = r.sigma_E > 0.0 ? (2.0 * K - 1.0) * subspace.epsilon / r.sigma_E : 0.0;
    const std::size_t n = options.window_samples;
    r.window.value_name = "D";
    r.window.times.resize(n);
    r.window.values.resize(n);
    parallel_for(n, options.workers, [&](std::size_t i) {
        const double t = t_end * static_cast<double>(i) / static_cast<double>(n - 1);
        r.window.times[i] = t;
        r.window.values[i] = d_at(t);
    });
    r.window.bound = std::vector<double>(n, r.floor);
    r.min_value = r.window.values[0];
    r.floor_holds = true;
    for (std::size_t i = 0; i < n; ++i) {
        r.min_value = std::min(r.min_value, r.window.values[i]);
        if (r.window.values[i] < r.floor && !r.first_violation_t) {
            r.first_violation_t = r.window.times[i];
            r.floor_holds = false;
        }
    }

    double long_time = options.long_time;
    if (long_time <= 0.0) {
        const double mean_spacing =
            spec.num_levels() > 1 ? spec.max_gap() / static_cast<double>(spec.num_levels() - 1) : 1.0;
        long_time = 1000.0 / mean_spacing;
    }
    r.long_time = long_time;
    // one jittered sample per stratum of [0, long_time]
    const std::size_t m = options.long_samples;
    std::vector<double> long_values(m);
    parallel_for(m, options.workers, [&](std::size_t i) {
        std::mt19937_64 rng(derive_seed(options.seed, i));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double t = long_time * (static_cast<double>(i) + u(rng)) / static_cast<double>(m);
        long_values[i] = d_at(t);
    });
    const SampleStats stats = sample_stats(long_values);
    r.long_average = stats.mean;
    r.long_stderr = stats.stderr_mean;
    r.ceiling_holds = r.long_average <= r.ceiling + 3.0 * r.long_stderr;
    return r;
}

Measurement partitioned_slow_measurement(const SnapshotSubspace& subspace, std::size_t N) {
    if (N < 2) throw std::invalid_argument("partitioned_slow_measurement: need N >= 2");
    if (N - 1 > subspace.effective_rank) {
        throw std::invalid_argument("partitioned_slow_measurement: N - 1 exceeds the snapshot rank");
    }
    const std::size_t blocks = N - 1;
    const std::size_t r = subspace.effective_rank;
    std::vector<Projector> outcomes;
    outcomes.reserve(N);
    Eigen::Index start = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        const auto width = static_cast<Eigen::Index>(r / blocks + (b < r % blocks ? 1 : 0));
        outcomes.push_back(Projector::from_orthonormal_columns(subspace.basis.middleCols(start, width)));
        start += width;
    }
    outcomes.push_back(subspace.projector().complement());
    return Measurement(std::move(outcomes));
}

}  // namespace eqt
