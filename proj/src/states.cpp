#include "eqt/states.hpp"

#include "eqt/errors.hpp"
#include "eqt/parallel.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace eqt {

namespace {

using cd = std::complex<double>;

void check_dim(const SpectrumPtr& spectrum, Eigen::Index n, const char* who) {
    if (!spectrum) throw std::invalid_argument(std::string(who) + ": null spectrum");
    if (static_cast<std::size_t>(n) != spectrum->dim()) {
        throw std::invalid_argument(std::string(who) + ": dimension does not match spectrum");
    }
}

Eigen::VectorXcd phases(const EnergySpectrum& spectrum, double t) {
    const auto& e = spectrum.index_energies();
    Eigen::VectorXcd ph(static_cast<Eigen::Index>(e.size()));
    for (std::size_t j = 0; j < e.size(); ++j) ph(static_cast<Eigen::Index>(j)) = std::polar(1.0, -e[j] * t);
    return ph;
}

}  // namespace

QuantumState QuantumState::pure(SpectrumPtr spectrum, Eigen::VectorXcd amplitudes, double tol) {
    check_dim(spectrum, amplitudes.size(), "QuantumState::pure");
    const double norm_err = std::abs(amplitudes.squaredNorm() - 1.0);
    if (norm_err > tol) throw ValidationError("QuantumState::pure: amplitudes not normalized", norm_err);
    QuantumState s(std::move(spectrum), StateKind::pure);
    s.amplitudes_ = std::move(amplitudes);
    return s;
}

QuantumState QuantumState::diagonal(SpectrumPtr spectrum, Eigen::VectorXd populations, double tol) {
    check_dim(spectrum, populations.size(), "QuantumState::diagonal");
    if (populations.size() > 0 && populations.minCoeff() < -tol) {
        throw ValidationError("QuantumState::diagonal: negative population", populations.minCoeff());
    }
    const double trace_err = std::abs(populations.sum() - 1.0);
    if (trace_err > tol) throw ValidationError("QuantumState::diagonal: trace differs from 1", trace_err);
    QuantumState s(std::move(spectrum), StateKind::diagonal);
    s.populations_ = std::move(populations);
    return s;
}

QuantumState QuantumState::dense(SpectrumPtr spectrum, Eigen::MatrixXcd rho, double tol) {
    check_dim(spectrum, rho.rows(), "QuantumState::dense");
    if (rho.rows() != rho.cols()) throw std::invalid_argument("QuantumState::dense: matrix must be square");
    const double trace_err = std::abs(rho.trace() - cd(1.0, 0.0));
    if (trace_err > tol) throw ValidationError("QuantumState::dense: trace differs from 1", trace_err);
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol) throw ValidationError("QuantumState::dense: matrix is not Hermitian", herm);
    QuantumState s(std::move(spectrum), StateKind::dense);
    s.rho_ = std::move(rho);
    return s;
}

const Eigen::VectorXcd& QuantumState::amplitudes() const {
    if (kind_ != StateKind::pure) throw std::logic_error("QuantumState: amplitudes of a non-pure state");
    return amplitudes_;
}

const Eigen::VectorXd& QuantumState::populations() const {
    if (kind_ != StateKind::diagonal) throw std::logic_error("QuantumState: populations of a non-diagonal state");
    return populations_;
}

const Eigen::MatrixXcd& QuantumState::matrix() const {
    if (kind_ != StateKind::dense) throw std::logic_error("QuantumState: matrix of a non-dense state");
    return rho_;
}

Eigen::MatrixXcd QuantumState::density() const {
    switch (kind_) {
    case StateKind::pure: return amplitudes_ * amplitudes_.adjoint();
    case StateKind::diagonal: return populations_.cast<cd>().asDiagonal();
    case StateKind::dense: return rho_;
    }
    return {};
}

Eigen::VectorXd QuantumState::diagonal_entries() const {
    switch (kind_) {
    case StateKind::pure: return amplitudes_.cwiseAbs2();
    case StateKind::diagonal: return populations_;
    case StateKind::dense: return rho_.diagonal().real();
    }
    return {};
}

Eigen::VectorXcd normalized(Eigen::VectorXcd v) {
    const double n = v.norm();
    if (!(n > 0.0)) throw std::invalid_argument("normalized: zero vector");
    v /= n;
    return v;
}

LevelDistribution level_distribution(const QuantumState& state) {
    const auto& spec = state.spectrum();
    const Eigen::VectorXd diag = state.diagonal_entries();
    LevelDistribution out;
    out.p.assign(spec.num_levels(), 0.0);
    std::vector<CompensatedSum> acc(spec.num_levels());
    CompensatedSum total;
    for (Eigen::Index j = 0; j < diag.size(); ++j) {
        const double v = std::max(0.0, diag(j));
        acc[spec.level_of(static_cast<std::size_t>(j))].add(v);
        total.add(v);
    }
    const double tr = total.value();
    for (std::size_t n = 0; n < out.p.size(); ++n) out.p[n] = acc[n].value() / tr;
    return out;
}

QuantumState evolve(const QuantumState& state, double t) {
    switch (state.kind()) {
    case StateKind::pure: {
        Eigen::VectorXcd c = phases(state.spectrum(), t).cwiseProduct(state.amplitudes());
        return QuantumState::pure(state.spectrum_ptr(), std::move(c), 1e-8);
    }
    case StateKind::diagonal: return state;
    case StateKind::dense: {
        const Eigen::VectorXcd ph = phases(state.spectrum(), t);
        Eigen::MatrixXcd rho = ph.asDiagonal() * state.matrix() * ph.conjugate().asDiagonal();
        return QuantumState::dense(state.spectrum_ptr(), std::move(rho), 1e-8);
    }
    }
    return state;
}

QuantumState dephase(const QuantumState& state) {
    const auto& spec = state.spectrum();
    if (state.kind() == StateKind::diagonal) return state;
    if (spec.is_nondegenerate()) {
        return QuantumState::diagonal(state.spectrum_ptr(), state.diagonal_entries(), 1e-8);
    }
    const Eigen::MatrixXcd rho = state.density();
    Eigen::MatrixXcd omega = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    for (std::size_t n = 0; n < spec.num_levels(); ++n) {
        const auto a = static_cast<Eigen::Index>(spec.first_index(n));
        const auto g = static_cast<Eigen::Index>(spec.degeneracies()[n]);
        omega.block(a, a, g, g) = rho.block(a, a, g, g);
    }
    return QuantumState::dense(state.spectrum_ptr(), std::move(omega), 1e-8);
}

double effective_dimension(const LevelDistribution& dist) {
    CompensatedSum s;
    for (double p : dist.p) s.add(p * p);
    if (!(s.value() > 0.0)) throw std::invalid_argument("effective_dimension: all-zero distribution");
    return 1.0 / s.value();
}

EnergyMoments energy_moments(const LevelDistribution& dist, const EnergySpectrum& spectrum) {
    if (dist.p.size() != spectrum.num_levels()) {
        throw std::invalid_argument("energy_moments: distribution does not match spectrum");
    }
    const auto& lv = spectrum.levels();
    CompensatedSum mean;
    for (std::size_t n = 0; n < lv.size(); ++n) mean.add(dist.p[n] * lv[n]);
    CompensatedSum var;
    for (std::size_t n = 0; n < lv.size(); ++n) {
        const double dev = lv[n] - mean.value();
        var.add(dist.p[n] * dev * dev);
    }
    return {mean.value(), std::sqrt(std::max(0.0, var.value()))};
}

double purity(const QuantumState& state) {
    switch (state.kind()) {
    case StateKind::pure: {
        const double n = state.amplitudes().squaredNorm();
        return n * n;
    }
    case StateKind::diagonal: return state.populations().squaredNorm();
    case StateKind::dense: return state.matrix().cwiseAbs2().sum();
    }
    return 0.0;
}

double overlap(const QuantumState& a, const QuantumState& b) {
    if (!a.is_pure() || !b.is_pure()) throw std::invalid_argument("overlap: both states must be pure");
    if (a.dim() != b.dim()) throw std::invalid_argument("overlap: dimension mismatch");
    return std::norm(a.amplitudes().dot(b.amplitudes()));
}

double trace_product(const QuantumState& a, const QuantumState& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("trace_product: dimension mismatch");
    // order the pair so that a.kind() <= b.kind() in (pure, diagonal, dense)
    if (static_cast<int>(a.kind()) > static_cast<int>(b.kind())) return trace_product(b, a);
    switch (a.kind()) {
    case StateKind::pure: {
        const auto& c = a.amplitudes();
        switch (b.kind()) {
        case StateKind::pure: return std::norm(c.dot(b.amplitudes()));
        case StateKind::diagonal: return c.cwiseAbs2().dot(b.populations());
        case StateKind::dense: return std::real(c.dot(b.matrix() * c));
        }
        break;
    }
    case StateKind::diagonal:
        if (b.kind() == StateKind::diagonal) return a.populations().dot(b.populations());
        return a.populations().dot(b.matrix().diagonal().real());
    case StateKind::dense:
        return std::real((a.matrix().cwiseProduct(b.matrix().conjugate())).sum());
    }
    return 0.0;
}

double min_eigenvalue(const QuantumState& state) {
    switch (state.kind()) {
    case StateKind::pure: return state.dim() == 1 ? 1.0 : 0.0;
    case StateKind::diagonal: return state.populations().minCoeff();
    case StateKind::dense: {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(state.matrix(), Eigen::EigenvaluesOnly);
        return solver.eigenvalues()(0);
    }
    }
    return 0.0;
}

void validate_psd(const QuantumState& state, double tol) {
    const double m = min_eigenvalue(state);
    if (m < -tol) throw ValidationError("validate_psd: density matrix has a negative eigenvalue", m);
}

}  // namespace eqt
