// Projective measurements and the distinguishability functional
//   D_M(a, b) = 1/2 sum_j |tr(a P_j) - tr(b P_j)|.

#pragma once

#include "eqt/states.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace eqt {

inline constexpr double kProjectorTol = 1e-8;

/// An orthogonal projector. Rank-one projectors keep only their unit vector.
class Projector {
public:
    /// Validates Hermiticity and idempotency (P^2 = P) within tol.
    static Projector from_matrix(Eigen::MatrixXcd p, double tol = kProjectorTol);
    /// Projector onto span{v}; v must be a unit vector within tol.
    static Projector rank_one(Eigen::VectorXcd v, double tol = kProjectorTol);
    /// P = V V^dagger for V with orthonormal columns. The idempotency residual
    /// is inferred from max|V^dagger V - 1| instead of forming P^2.
    static Projector from_orthonormal_columns(const Eigen::MatrixXcd& v, double tol = kProjectorTol);
    static Projector zero(std::size_t dim);
    static Projector identity(std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t rank() const noexcept { return rank_; }
    bool is_rank_one() const noexcept { return vector_.has_value(); }
    const Eigen::VectorXcd& vector() const { return vector_.value(); }

    Eigen::MatrixXcd matrix() const;
    Projector complement() const;

    /// tr(P rho).
    double expectation(const QuantumState& state) const;
    /// tr(P X) for an arbitrary Hermitian matrix X.
    double expectation(const Eigen::MatrixXcd& x) const;

    double hermiticity_residual() const noexcept { return hermiticity_residual_; }
    double idempotency_residual() const noexcept { return idempotency_residual_; }

private:
    Projector() = default;

    std::size_t dim_ = 0;
    std::size_t rank_ = 0;
    std::optional<Eigen::VectorXcd> vector_;
    Eigen::MatrixXcd matrix_;
    double hermiticity_residual_ = 0.0;
    double idempotency_residual_ = 0.0;
};

struct MeasurementResiduals {
    double hermiticity = 0.0;
    double idempotency = 0.0;
    double orthogonality = 0.0;  // max_{i<j} ||P_i P_j||_F
    double completeness = 0.0;   // max|sum_j P_j - 1|
};

class Measurement {
public:
    explicit Measurement(std::vector<Projector> outcomes, double tol = kProjectorTol);

    const std::vector<Projector>& outcomes() const noexcept { return outcomes_; }
    std::size_t size() const noexcept { return outcomes_.size(); }
    std::size_t dim() const noexcept { return outcomes_.front().dim(); }
    std::vector<std::size_t> ranks() const;
    const MeasurementResiduals& residuals() const noexcept { return residuals_; }

private:
    std::vector<Projector> outcomes_;
    MeasurementResiduals residuals_;
};

/// {P, 1 - P}.
Measurement two_outcome(const Projector& p);

double distinguishability(const Measurement& m, const QuantumState& a, const QuantumState& b);

/// |tr(P a) - tr(P b)|, equal to the distinguishability of {P, 1 - P}.
double projector_distinguishability(const Projector& p, const QuantumState& a, const QuantumState& b);

/// 1/2 + D/2.
double success_probability(double distinguishability);

/// Half the trace norm of a - b.
double trace_distance(const QuantumState& a, const QuantumState& b);

}  // namespace eqt
