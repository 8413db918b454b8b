#include "eqt/averaging.hpp"

#include "eqt/format.hpp"
#include "eqt/parallel.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eqt {

namespace {

using cd = std::complex<double>;

double trapezoid(std::span<const double> samples, double h, std::size_t stride) {
    CompensatedSum s;
    const std::size_t last = samples.size() - 1;
    for (std::size_t i = 0; i <= last; i += stride) {
        const double w = (i == 0 || i == last) ? 0.5 : 1.0;
        s.add(w * samples[i]);
    }
    return s.value() * h * static_cast<double>(stride);
}

// Symmetric level-pair sum  sum_{n,m} p_n p_m e^{-2 |E_n - E_m| T}.
double level_pair_purity(const EnergySpectrum& spec, const std::vector<double>& p, double T) {
    const auto& lv = spec.levels();
    CompensatedSum s;
    for (std::size_t n = 0; n < lv.size(); ++n) {
        s.add(p[n] * p[n]);
        if (p[n] == 0.0) continue;
        for (std::size_t m = n + 1; m < lv.size(); ++m) {
            s.add(2.0 * p[n] * p[m] * std::exp(-2.0 * (lv[m] - lv[n]) * T));
        }
    }
    return s.value();
}

}  // namespace

TimeGrid TimeGrid::uniform(double T, double max_frequency, std::size_t min_samples) {
    if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: T must be positive");
    if (max_frequency < 0.0) throw std::invalid_argument("TimeGrid: max_frequency must be nonnegative");
    std::size_t intervals = std::max<std::size_t>(min_samples, 2) - 1;
    if (max_frequency > 0.0) {
        const double h_max = std::numbers::pi / (4.0 * max_frequency);
        const double needed = std::ceil(T / h_max);
        if (needed > 5e8) throw std::invalid_argument("TimeGrid: too many samples requested");
        intervals = std::max(intervals, static_cast<std::size_t>(needed));
    }
    if (intervals % 2 != 0) ++intervals;

    TimeGrid g;
    g.T_ = T;
    g.spacing_ = T / static_cast<double>(intervals);
    g.times_.resize(intervals + 1);
    g.weights_.assign(intervals + 1, g.spacing_);
    for (std::size_t i = 0; i <= intervals; ++i) {
        g.times_[i] = T * static_cast<double>(i) / static_cast<double>(intervals);
    }
    g.weights_.front() *= 0.5;
    g.weights_.back() *= 0.5;
    return g;
}

AverageResult time_average(std::span<const double> samples, const TimeGrid& grid, double tol) {
    if (samples.size() != grid.size()) throw std::invalid_argument("time_average: sample count mismatch");
    AverageResult r;
    const double fine = trapezoid(samples, grid.spacing(), 1) / grid.T();
    const double coarse = trapezoid(samples, grid.spacing(), 2) / grid.T();
    r.value = fine;
    r.refinement_error = std::abs(fine - coarse);
    r.flagged = r.refinement_error > tol;
    return r;
}

AverageResult time_average(const std::function<double(double)>& f, const TimeGrid& grid, double tol,
                           unsigned workers) {
    std::vector<double> values(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t i) { values[i] = f(grid.times()[i]); });
    return time_average(values, grid, tol);
}

std::vector<double> running_average(std::span<const double> times, std::span<const double> values) {
    if (times.size() != values.size()) throw std::invalid_argument("running_average: length mismatch");
    std::vector<double> out(values.size());
    if (values.empty()) return out;
    out[0] = values[0];
    CompensatedSum integral;
    for (std::size_t i = 1; i < values.size(); ++i) {
        integral.add(0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]));
        const double span = times[i] - times[0];
        out[i] = span > 0.0 ? integral.value() / span : values[i];
    }
    return out;
}

void write_csv(std::ostream& out, const TimeSeries& series, const std::string& comment) {
    const std::size_t n = series.times.size();
    if (series.values.size() != n || (series.running_avg && series.running_avg->size() != n) ||
        (series.bound && series.bound->size() != n)) {
        throw std::invalid_argument("write_csv: column lengths differ");
    }
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "t," << series.value_name;
    if (series.running_avg) out << ",running_avg";
    if (series.bound) out << ",bound";
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        out << format_double(series.times[i]) << ',' << format_double(series.values[i]);
        if (series.running_avg) out << ',' << format_double((*series.running_avg)[i]);
        if (series.bound) out << ',' << format_double((*series.bound)[i]);
        out << '\n';
    }
}

cd lorentzian_phase_average(double nu, double T) {
    return std::exp(-std::abs(nu) * T) * std::polar(1.0, nu * T / 2.0);
}

QuantumState lorentzian_state(const QuantumState& state, double T) {
    if (T < 0.0) throw std::invalid_argument("lorentzian_state: T must be nonnegative");
    if (state.kind() == StateKind::diagonal) return state;
    const auto& e = state.spectrum().index_energies();
    Eigen::MatrixXcd rho = state.density();
    for (Eigen::Index k = 0; k < rho.cols(); ++k) {
        for (Eigen::Index j = 0; j < rho.rows(); ++j) {
            // <e^{-i (E_j - E_k) t}>_L_T
            rho(j, k) *= lorentzian_phase_average(-(e[static_cast<std::size_t>(j)] - e[static_cast<std::size_t>(k)]), T);
        }
    }
    return QuantumState::dense(state.spectrum_ptr(), std::move(rho), 1e-8);
}

LorentzianPurity purity_closed_form(const QuantumState& state, double T) {
    if (T < 0.0) throw std::invalid_argument("purity_closed_form: T must be nonnegative");
    const auto& spec = state.spectrum();
    const LevelDistribution dist = level_distribution(state);
    LorentzianPurity out;
    out.population_bound = level_pair_purity(spec, dist.p, T);
    switch (state.kind()) {
    case StateKind::pure: out.exact = out.population_bound; break;
    case StateKind::diagonal: out.exact = state.populations().squaredNorm(); break;
    case StateKind::dense: {
        const auto& rho = state.matrix();
        const auto& e = spec.index_energies();
        CompensatedSum s;
        for (Eigen::Index k = 0; k < rho.cols(); ++k) {
            for (Eigen::Index j = 0; j < rho.rows(); ++j) {
                const double gap = std::abs(e[static_cast<std::size_t>(j)] - e[static_cast<std::size_t>(k)]);
                s.add(std::norm(rho(j, k)) * std::exp(-2.0 * gap * T));
            }
        }
        out.exact = s.value();
        break;
    }
    }
    return out;
}

double lorentzian_tail_mass(double T, double half_width_factor) {
    // mass of T / (pi (T^2 + s^2)) with s = t - T/2 outside [-L, L]
    const double L = half_width_factor * T;
    const double upper = (L - T / 2.0) / T;
    const double lower = (L + T / 2.0) / T;
    return (std::numbers::pi - std::atan(upper) - std::atan(lower)) / std::numbers::pi;
}

double lorentzian_average(const std::function<double(double)>& f, double T, double max_frequency,
                          double half_width_factor) {
    if (!(T > 0.0)) throw std::invalid_argument("lorentzian_average: T must be positive");
    const double L = half_width_factor * T;
    double h = T / 4.0;
    if (max_frequency > 0.0) h = std::min(h, std::numbers::pi / (2.0 * max_frequency));
    const auto panels = static_cast<std::size_t>(std::ceil(2.0 * L / h));
    if (panels > 50'000'000) throw std::invalid_argument("lorentzian_average: too many quadrature panels");
    h = 2.0 * L / static_cast<double>(panels);
    auto integrand = [&](double t) {
        const double s = t - T / 2.0;
        return f(t) * T / (std::numbers::pi * (T * T + s * s));
    };
    CompensatedSum total;
    for (std::size_t i = 0; i < panels; ++i) {
        const double a = -L + h * static_cast<double>(i);
        total.add(boost::math::quadrature::gauss<double, 10>::integrate(integrand, a, a + h));
    }
    return total.value();
}

DominationReport lorentzian_domination_check(const std::function<double(double)>& f, double T,
                                             double max_frequency) {
    DominationReport r;
    const TimeGrid grid = TimeGrid::uniform(T, max_frequency, 256);
    const AverageResult uniform = time_average(f, grid);
    r.uniform_average = uniform.value;
    r.lorentzian_average = lorentzian_average(f, T, max_frequency);
    r.slack = uniform.refinement_error + 1e-12;
    r.ratio = r.lorentzian_average > 0.0 ? r.uniform_average / r.lorentzian_average : 0.0;
    r.holds = r.uniform_average <= kKernelDomination * r.lorentzian_average + r.slack;
    return r;
}

}  // namespace eqt
