#include "eqt/spectra.hpp"

#include "eqt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace eqt {

namespace {

double energy_scale(const std::vector<double>& levels) {
    double m = 1.0;
    for (double e : levels) m = std::max(m, std::abs(e));
    return m;
}

}  // namespace

EnergySpectrum::EnergySpectrum(std::vector<double> levels, std::vector<int> degeneracies,
                               double degeneracy_tol)
    : levels_(std::move(levels)), degeneracies_(std::move(degeneracies)) {
    if (levels_.empty()) {
        throw std::invalid_argument("EnergySpectrum: at least one level is required");
    }
    if (levels_.size() != degeneracies_.size()) {
        throw std::invalid_argument("EnergySpectrum: levels and degeneracies differ in length");
    }
    const double min_sep = degeneracy_tol * energy_scale(levels_);
    for (std::size_t n = 0; n < levels_.size(); ++n) {
        if (!std::isfinite(levels_[n])) {
            throw std::invalid_argument("EnergySpectrum: non-finite level " + std::to_string(n));
        }
        if (degeneracies_[n] < 1) {
            throw std::invalid_argument("EnergySpectrum: degeneracy of level " + std::to_string(n) +
                                        " must be positive");
        }
        if (n > 0 && !(levels_[n] - levels_[n - 1] > min_sep)) {
            throw std::invalid_argument("EnergySpectrum: levels " + std::to_string(n - 1) + " and " +
                                        std::to_string(n) +
                                        " are not strictly increasing beyond the degeneracy tolerance");
        }
    }
    offsets_.reserve(levels_.size());
    for (std::size_t n = 0; n < levels_.size(); ++n) {
        offsets_.push_back(level_of_index_.size());
        for (int g = 0; g < degeneracies_[n]; ++g) {
            level_of_index_.push_back(n);
            index_energies_.push_back(levels_[n]);
        }
    }
}

EnergySpectrum EnergySpectrum::nondegenerate(std::vector<double> levels) {
    std::vector<int> deg(levels.size(), 1);
    return EnergySpectrum(std::move(levels), std::move(deg));
}

double EnergySpectrum::min_spacing() const noexcept {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n < levels_.size(); ++n) m = std::min(m, levels_[n] - levels_[n - 1]);
    return m;
}

EnergySpectrum EnergySpectrum::negated() const {
    std::vector<double> lv(levels_.rbegin(), levels_.rend());
    for (double& e : lv) e = -e;
    std::vector<int> dg(degeneracies_.rbegin(), degeneracies_.rend());
    return EnergySpectrum(std::move(lv), std::move(dg), 0.0);
}

HermitianDecomposition spectrum_from_hermitian(const Eigen::MatrixXcd& h, double tol) {
    if (h.rows() != h.cols() || h.rows() == 0) {
        throw std::invalid_argument("spectrum_from_hermitian: matrix must be square and non-empty");
    }
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (asym > tol * scale) {
        throw ValidationError("spectrum_from_hermitian: matrix is not Hermitian, max|H - H^dagger|", asym);
    }
    const Eigen::MatrixXcd sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("spectrum_from_hermitian: eigendecomposition failed");
    }
    const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
    const double escale = std::max({1.0, std::abs(ev(0)), std::abs(ev(ev.size() - 1))});
    const double merge = tol * escale;

    std::vector<double> levels;
    std::vector<int> degs;
    Eigen::Index start = 0;
    for (Eigen::Index i = 1; i <= ev.size(); ++i) {
        // transitive closure: a chain of near-equal neighbours forms one level
        if (i < ev.size() && ev(i) - ev(i - 1) <= merge) continue;
        levels.push_back(ev.segment(start, i - start).mean());
        degs.push_back(static_cast<int>(i - start));
        start = i;
    }
    return {EnergySpectrum(std::move(levels), std::move(degs), tol), solver.eigenvectors()};
}

GapSet::GapSet(const EnergySpectrum& spectrum) {
    const auto& lv = spectrum.levels();
    const std::size_t n = lv.size();
    gaps_.reserve(n * (n - 1));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            if (j != k) gaps_.push_back(lv[j] - lv[k]);
        }
    }
    std::sort(gaps_.begin(), gaps_.end());
}

EtaResult eta(const EnergySpectrum& spectrum, std::span<const double> level_probs, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eta: eps must be positive");
    const auto& lv = spectrum.levels();
    if (level_probs.size() != lv.size()) {
        throw std::invalid_argument("eta: need one probability per level");
    }
    long double total = 0.0L;
    for (double p : level_probs) {
        if (!(p >= -1e-12)) throw std::invalid_argument("eta: negative probability");
        total += p;
    }
    if (std::abs(static_cast<double>(total) - 1.0) > 1e-12) {
        throw ValidationError("eta: probabilities do not sum to 1", static_cast<double>(total) - 1.0);
    }

    // prefix[i] = sum of p over levels [0, i)
    std::vector<long double> prefix(lv.size() + 1, 0.0L);
    for (std::size_t i = 0; i < lv.size(); ++i) prefix[i + 1] = prefix[i] + level_probs[i];

    // The optimum is attained by a window whose left edge sits on a level.
    EtaResult best{-1.0, lv.front(), lv.front() + eps};
    std::size_t right = 0;
    for (std::size_t left = 0; left < lv.size(); ++left) {
        right = std::max(right, left);
        while (right + 1 < lv.size() && lv[right + 1] - lv[left] <= eps) ++right;
        const double mass = static_cast<double>(prefix[right + 1] - prefix[left]);
        if (mass > best.value) best = {mass, lv[left], lv[left] + eps};
    }
    return best;
}

std::size_t gap_density(const GapSet& gaps, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("gap_density: eps must be positive");
    const auto& g = gaps.gaps();
    std::size_t best = 0;
    std::size_t right = 0;
    for (std::size_t left = 0; left < g.size(); ++left) {
        right = std::max(right, left);
        while (right + 1 < g.size() && g[right + 1] - g[left] <= eps) ++right;
        best = std::max(best, right - left + 1);
    }
    return best;
}

}  // namespace eqt
