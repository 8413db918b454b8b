// Quantum states written in the Hamiltonian eigenbasis.
//
// Three storage forms share one value type:
//   pure      amplitude vector c_j (density matrix materialized on request)
//   diagonal  populations rho_jj of a state diagonal in the eigenbasis
//   dense     full density matrix
// Unitary evolution is a phase multiplication in this basis.

#pragma once

#include "eqt/spectra.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace eqt {

inline constexpr double kStateTol = 1e-10;

enum class StateKind { pure, diagonal, dense };

class QuantumState {
public:
    /// |c|^2 must sum to 1 within tol.
    static QuantumState pure(SpectrumPtr spectrum, Eigen::VectorXcd amplitudes, double tol = kStateTol);
    /// Populations must be nonnegative and sum to 1 within tol.
    static QuantumState diagonal(SpectrumPtr spectrum, Eigen::VectorXd populations, double tol = kStateTol);
    /// Trace 1 and Hermitian within tol. Positivity is not checked here, see validate_psd.
    static QuantumState dense(SpectrumPtr spectrum, Eigen::MatrixXcd rho, double tol = kStateTol);

    StateKind kind() const noexcept { return kind_; }
    bool is_pure() const noexcept { return kind_ == StateKind::pure; }
    std::size_t dim() const noexcept { return spectrum_->dim(); }
    const EnergySpectrum& spectrum() const noexcept { return *spectrum_; }
    const SpectrumPtr& spectrum_ptr() const noexcept { return spectrum_; }

    const Eigen::VectorXcd& amplitudes() const;  // pure only
    const Eigen::VectorXd& populations() const;  // diagonal only
    const Eigen::MatrixXcd& matrix() const;      // dense only

    Eigen::MatrixXcd density() const;
    Eigen::VectorXd diagonal_entries() const;

private:
    QuantumState(SpectrumPtr spectrum, StateKind kind) : spectrum_(std::move(spectrum)), kind_(kind) {}

    SpectrumPtr spectrum_;
    StateKind kind_;
    Eigen::VectorXcd amplitudes_;
    Eigen::VectorXd populations_;
    Eigen::MatrixXcd rho_;
};

Eigen::VectorXcd normalized(Eigen::VectorXcd v);

/// p_n = tr(Q_n rho), rescaled by the trace so the entries sum to 1 to roundoff.
struct LevelDistribution {
    std::vector<double> p;
};

LevelDistribution level_distribution(const QuantumState& state);

QuantumState evolve(const QuantumState& state, double t);

/// Equilibrium state: keeps blocks inside each energy level, drops the rest.
QuantumState dephase(const QuantumState& state);

double effective_dimension(const LevelDistribution& dist);

struct EnergyMoments {
    double mean = 0.0;
    double stddev = 0.0;
};

EnergyMoments energy_moments(const LevelDistribution& dist, const EnergySpectrum& spectrum);

double purity(const QuantumState& state);

/// |<a|b>|^2 for two pure states.
double overlap(const QuantumState& a, const QuantumState& b);

/// tr(a b), real for Hermitian arguments.
double trace_product(const QuantumState& a, const QuantumState& b);

/// Smallest eigenvalue of the density matrix. O(d^3).
double min_eigenvalue(const QuantumState& state);

/// Throws ValidationError when min_eigenvalue < -tol.
void validate_psd(const QuantumState& state, double tol = 1e-8);

}  // namespace eqt
