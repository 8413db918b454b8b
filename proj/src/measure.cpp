#include "eqt/measure.hpp"

#include "eqt/errors.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace eqt {

namespace {

using cd = std::complex<double>;

std::size_t rounded_rank(double trace) {
    return static_cast<std::size_t>(std::llround(std::max(0.0, trace)));
}

}  // namespace

Projector Projector::from_matrix(Eigen::MatrixXcd p, double tol) {
    if (p.rows() != p.cols() || p.rows() == 0) {
        throw std::invalid_argument("Projector: matrix must be square and non-empty");
    }
    Projector out;
    out.dim_ = static_cast<std::size_t>(p.rows());
    out.hermiticity_residual_ = (p - p.adjoint()).cwiseAbs().maxCoeff();
    if (out.hermiticity_residual_ > tol) {
        throw ValidationError("Projector: matrix is not Hermitian", out.hermiticity_residual_);
    }
    out.idempotency_residual_ = (p * p - p).cwiseAbs().maxCoeff();
    if (out.idempotency_residual_ > tol) {
        throw ValidationError("Projector: matrix is not idempotent, max|P^2 - P|", out.idempotency_residual_);
    }
    out.rank_ = rounded_rank(p.trace().real());
    out.matrix_ = std::move(p);
    return out;
}

Projector Projector::rank_one(Eigen::VectorXcd v, double tol) {
    if (v.size() == 0) throw std::invalid_argument("Projector::rank_one: empty vector");
    Projector out;
    out.dim_ = static_cast<std::size_t>(v.size());
    out.rank_ = 1;
    const double n2 = v.squaredNorm();
    // (vv^dagger)^2 - vv^dagger = (|v|^2 - 1) vv^dagger
    out.idempotency_residual_ = std::abs(n2 - 1.0) * v.cwiseAbs2().maxCoeff();
    if (std::abs(n2 - 1.0) > tol) throw ValidationError("Projector::rank_one: vector is not normalized", n2 - 1.0);
    out.vector_ = std::move(v);
    return out;
}

Projector Projector::from_orthonormal_columns(const Eigen::MatrixXcd& v, double tol) {
    if (v.rows() == 0) throw std::invalid_argument("Projector: empty basis");
    if (v.cols() == 1) return rank_one(v.col(0), tol);
    Projector out;
    out.dim_ = static_cast<std::size_t>(v.rows());
    out.rank_ = static_cast<std::size_t>(v.cols());
    if (v.cols() == 0) {
        out.matrix_ = Eigen::MatrixXcd::Zero(v.rows(), v.rows());
        return out;
    }
    const Eigen::MatrixXcd gram = v.adjoint() * v;
    out.idempotency_residual_ =
        (gram - Eigen::MatrixXcd::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
    if (out.idempotency_residual_ > tol) {
        throw ValidationError("Projector: basis columns are not orthonormal", out.idempotency_residual_);
    }
    out.matrix_ = v * v.adjoint();
    out.matrix_ = 0.5 * (out.matrix_ + out.matrix_.adjoint()).eval();
    return out;
}

Projector Projector::zero(std::size_t dim) {
    Projector out;
    out.dim_ = dim;
    out.matrix_ = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    return out;
}

Projector Projector::identity(std::size_t dim) {
    Projector out;
    out.dim_ = dim;
    out.rank_ = dim;
    out.matrix_ = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    return out;
}

Eigen::MatrixXcd Projector::matrix() const {
    if (vector_) return (*vector_) * vector_->adjoint();
    return matrix_;
}

Projector Projector::complement() const {
    Projector out;
    out.dim_ = dim_;
    out.rank_ = dim_ - rank_;
    const auto n = static_cast<Eigen::Index>(dim_);
    out.matrix_ = Eigen::MatrixXcd::Identity(n, n) - matrix();
    out.hermiticity_residual_ = hermiticity_residual_;
    out.idempotency_residual_ = idempotency_residual_;  // (1-P)^2 - (1-P) = P^2 - P
    return out;
}

double Projector::expectation(const QuantumState& state) const {
    if (state.dim() != dim_) throw std::invalid_argument("Projector::expectation: dimension mismatch");
    if (vector_) {
        const auto& v = *vector_;
        switch (state.kind()) {
        case StateKind::pure: return std::norm(v.dot(state.amplitudes()));
        case StateKind::diagonal: return v.cwiseAbs2().dot(state.populations());
        case StateKind::dense: return std::real(v.dot(state.matrix() * v));
        }
    }
    switch (state.kind()) {
    case StateKind::pure: {
        const auto& c = state.amplitudes();
        return std::real(c.dot(matrix_ * c));
    }
    case StateKind::diagonal: return matrix_.diagonal().real().dot(state.populations());
    case StateKind::dense: return expectation(state.matrix());
    }
    return 0.0;
}

double Projector::expectation(const Eigen::MatrixXcd& x) const {
    if (static_cast<std::size_t>(x.rows()) != dim_) {
        throw std::invalid_argument("Projector::expectation: dimension mismatch");
    }
    if (vector_) return std::real(vector_->dot(x * (*vector_)));
    // tr(P X) = sum_jk P_jk X_kj = sum_jk P_jk conj(X_jk) for Hermitian X
    return std::real(matrix_.cwiseProduct(x.conjugate()).sum());
}

Measurement::Measurement(std::vector<Projector> outcomes, double tol) : outcomes_(std::move(outcomes)) {
    if (outcomes_.empty()) throw std::invalid_argument("Measurement: no outcomes");
    const std::size_t d = outcomes_.front().dim();
    const auto n = static_cast<Eigen::Index>(d);
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
    std::vector<Eigen::MatrixXcd> mats;
    mats.reserve(outcomes_.size());
    for (const auto& p : outcomes_) {
        if (p.dim() != d) throw std::invalid_argument("Measurement: projectors of different dimension");
        residuals_.hermiticity = std::max(residuals_.hermiticity, p.hermiticity_residual());
        residuals_.idempotency = std::max(residuals_.idempotency, p.idempotency_residual());
        mats.push_back(p.matrix());
        sum += mats.back();
    }
    residuals_.completeness = (sum - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    // For Hermitian idempotents tr(P_i P_j) = ||P_i P_j||_F^2.
    for (std::size_t i = 0; i < mats.size(); ++i) {
        for (std::size_t j = i + 1; j < mats.size(); ++j) {
            const double t = std::real(mats[i].cwiseProduct(mats[j].conjugate()).sum());
            residuals_.orthogonality = std::max(residuals_.orthogonality, std::sqrt(std::max(0.0, t)));
        }
    }
    if (residuals_.hermiticity > tol) throw ValidationError("Measurement: non-Hermitian outcome", residuals_.hermiticity);
    if (residuals_.idempotency > tol) throw ValidationError("Measurement: non-idempotent outcome", residuals_.idempotency);
    if (residuals_.completeness > tol) {
        throw ValidationError("Measurement: projectors do not sum to identity", residuals_.completeness);
    }
    if (residuals_.orthogonality > std::sqrt(tol)) {
        throw ValidationError("Measurement: projectors are not mutually orthogonal", residuals_.orthogonality);
    }
}

std::vector<std::size_t> Measurement::ranks() const {
    std::vector<std::size_t> r;
    r.reserve(outcomes_.size());
    for (const auto& p : outcomes_) r.push_back(p.rank());
    return r;
}

Measurement two_outcome(const Projector& p) {
    return Measurement({p, p.complement()});
}

double distinguishability(const Measurement& m, const QuantumState& a, const QuantumState& b) {
    if (a.dim() != m.dim() || b.dim() != m.dim()) {
        throw std::invalid_argument("distinguishability: dimension mismatch");
    }
    double s = 0.0;
    for (const auto& p : m.outcomes()) s += std::abs(p.expectation(a) - p.expectation(b));
    return 0.5 * s;
}

double projector_distinguishability(const Projector& p, const QuantumState& a, const QuantumState& b) {
    if (a.dim() != p.dim() || b.dim() != p.dim()) {
        throw std::invalid_argument("projector_distinguishability: dimension mismatch");
    }
    return std::abs(p.expectation(a) - p.expectation(b));
}

double success_probability(double distinguishability) {
    if (!(distinguishability >= 0.0 && distinguishability <= 1.0)) {
        throw std::invalid_argument("success_probability: distinguishability must lie in [0, 1]");
    }
    return 0.5 + 0.5 * distinguishability;
}

double trace_distance(const QuantumState& a, const QuantumState& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
    const Eigen::MatrixXcd diff = a.density() - b.density();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(diff, Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace eqt
