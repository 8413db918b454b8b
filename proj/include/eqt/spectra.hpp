// Hamiltonian spectra, energy gaps, the eta window function and gap density.
//
// Eigenbasis indices are grouped level by level: indices
// [first_index(n), first_index(n) + degeneracy(n)) all belong to level n.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace eqt {

inline constexpr double kDefaultDegeneracyTol = 1e-10;

class EnergySpectrum {
public:
    /// Levels must be strictly increasing with adjacent spacing larger than
    /// degeneracy_tol * max(1, max|E|); degeneracies must be positive.
    EnergySpectrum(std::vector<double> levels, std::vector<int> degeneracies,
                   double degeneracy_tol = kDefaultDegeneracyTol);

    static EnergySpectrum nondegenerate(std::vector<double> levels);

    const std::vector<double>& levels() const noexcept { return levels_; }
    const std::vector<int>& degeneracies() const noexcept { return degeneracies_; }
    std::size_t num_levels() const noexcept { return levels_.size(); }
    std::size_t dim() const noexcept { return level_of_index_.size(); }
    bool is_nondegenerate() const noexcept { return dim() == num_levels(); }

    std::size_t level_of(std::size_t index) const { return level_of_index_.at(index); }
    std::size_t first_index(std::size_t level) const { return offsets_.at(level); }
    double energy_of_index(std::size_t index) const { return index_energies_.at(index); }

    /// Energy of every eigenbasis index, length dim().
    const std::vector<double>& index_energies() const noexcept { return index_energies_; }

    double min_energy() const noexcept { return levels_.front(); }
    double max_energy() const noexcept { return levels_.back(); }
    /// Largest |E_j - E_k|; zero for a single level.
    double max_gap() const noexcept { return levels_.back() - levels_.front(); }
    /// Smallest spacing between adjacent levels; +inf for a single level.
    double min_spacing() const noexcept;

    EnergySpectrum negated() const;

private:
    std::vector<double> levels_;
    std::vector<int> degeneracies_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> level_of_index_;
    std::vector<double> index_energies_;
};

using SpectrumPtr = std::shared_ptr<const EnergySpectrum>;

inline SpectrumPtr share(EnergySpectrum s) {
    return std::make_shared<const EnergySpectrum>(std::move(s));
}

struct HermitianDecomposition {
    EnergySpectrum spectrum;
    Eigen::MatrixXcd basis;  // columns: orthonormal eigenvectors in index order
};

/// Diagonalizes H and groups eigenvalues with |E_i - E_j| <= tol * max(1, max|E|)
/// (transitively) into degenerate levels. Throws ValidationError when
/// max|H - H^dagger| exceeds tol * max(1, max|H_ij|).
HermitianDecomposition spectrum_from_hermitian(const Eigen::MatrixXcd& h,
                                               double tol = kDefaultDegeneracyTol);

/// All differences E_j - E_k over ordered pairs of distinct levels, sorted.
class GapSet {
public:
    explicit GapSet(const EnergySpectrum& spectrum);
    const std::vector<double>& gaps() const noexcept { return gaps_; }
    std::size_t size() const noexcept { return gaps_.size(); }

private:
    std::vector<double> gaps_;
};

struct EtaResult {
    double value = 0.0;
    double window_lower = 0.0;  // maximizing closed window [lower, upper]
    double window_upper = 0.0;
};

/// Largest total level probability inside a closed energy window of width eps.
/// level_probs has one entry per level, nonnegative, summing to 1 within 1e-12.
EtaResult eta(const EnergySpectrum& spectrum, std::span<const double> level_probs, double eps);

/// Largest number of gaps (with multiplicity) inside a closed window of width eps.
std::size_t gap_density(const GapSet& gaps, double eps);

}  // namespace eqt
