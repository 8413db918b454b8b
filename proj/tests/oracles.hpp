// Independent reference computations used by the test suites. Nothing here
// calls into the library's numerics.

#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using cd = std::complex<double>;

// Number of eigenvalues of the Hermitian h below x, from the signs of the
// LDL^dagger pivots of h - x (Sylvester inertia). No pivoting.
inline std::size_t count_below(const Eigen::MatrixXcd& h, double x) {
    const Eigen::Index n = h.rows();
    Eigen::MatrixXcd a = h - x * Eigen::MatrixXcd::Identity(n, n);
    std::size_t negatives = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        double pivot = a(k, k).real();
        if (std::abs(pivot) < 1e-300) pivot = -1e-300;
        if (pivot < 0.0) ++negatives;
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const cd l = a(i, k) / pivot;
            for (Eigen::Index j = k + 1; j < n; ++j) a(i, j) -= l * std::conj(a(j, k));
        }
    }
    return negatives;
}

// Eigenvalues by bisection on the inertia count, ascending.
inline std::vector<double> bisection_eigenvalues(const Eigen::MatrixXcd& h, double tol = 1e-13) {
    const Eigen::Index n = h.rows();
    double radius = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) radius = std::max(radius, h.row(i).cwiseAbs().sum());
    std::vector<double> out;
    for (Eigen::Index k = 0; k < n; ++k) {
        double lo = -radius - 1.0;
        double hi = radius + 1.0;
        while (hi - lo > tol * std::max(1.0, radius)) {
            const double mid = 0.5 * (lo + hi);
            if (count_below(h, mid) > static_cast<std::size_t>(k)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push_back(0.5 * (lo + hi));
    }
    return out;
}

// max over closed windows [E, E + eps] of the probability inside; O(n^2).
inline double brute_eta(const std::vector<double>& levels, const std::vector<double>& p, double eps) {
    double best = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < levels.size(); ++j) {
            if (levels[j] >= levels[i] && levels[j] <= levels[i] + eps) s += p[j];
        }
        best = std::max(best, s);
    }
    return best;
}

// max over closed windows [g, g + eps] of the number of gaps E_j - E_k (j != k) inside.
inline std::size_t brute_gap_density(const std::vector<double>& levels, double eps) {
    std::vector<double> gaps;
    for (std::size_t j = 0; j < levels.size(); ++j) {
        for (std::size_t k = 0; k < levels.size(); ++k) {
            if (j != k) gaps.push_back(levels[j] - levels[k]);
        }
    }
    std::size_t best = 0;
    for (double g0 : gaps) {
        std::size_t c = 0;
        for (double g : gaps) c += (g >= g0 && g <= g0 + eps) ? 1 : 0;
        best = std::max(best, c);
    }
    return best;
}

// Average of e^{i nu t} under the Cauchy weight T / (pi (T^2 + (t - T/2)^2)).
// Direct Gauss-Kronrod quadrature on |s| <= S plus the first two terms of the
// integration-by-parts tail.
inline cd cauchy_phase_average(double nu, double T) {
    if (nu == 0.0) return 1.0;
    const double w = std::abs(nu);
    const double S = 400.0 * T + 40.0 * std::numbers::pi / w;
    const double piece = std::min(std::numbers::pi / w, T);  // resolve both the kernel and the oscillation
    const auto n = static_cast<int>(std::ceil(S / piece));
    auto f = [&](double s) { return std::cos(w * s) / (T * T + s * s); };
    double integral = 0.0;
    for (int i = 0; i < n; ++i) {
        integral += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, i * piece, (i + 1) * piece, 0, 1e-15);
    }
    const double Se = n * piece;
    const double q = T * T + Se * Se;
    const double tail = -std::sin(w * Se) / (w * q) + 2.0 * Se * std::cos(w * Se) / (w * w * q * q);
    const double real_part = (T / std::numbers::pi) * 2.0 * (integral + tail);
    return real_part * std::polar(1.0, nu * T / 2.0);
}

// Orthonormal basis of a uniformly random K-dimensional subspace via
// modified Gram-Schmidt on complex Gaussian vectors.
inline Eigen::MatrixXcd random_subspace(std::size_t d, std::size_t K, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd v(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(K));
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
            const double re = g(rng);
            const double im = g(rng);
            v(r, c) = cd(re, im);
        }
        for (Eigen::Index p = 0; p < c; ++p) v.col(c) -= v.col(p).dot(v.col(c)) * v.col(p);
        v.col(c) /= v.col(c).norm();
    }
    return v;
}

inline Eigen::MatrixXcd random_hermitian(std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double re = g(rng);
            const double im = g(rng);
            a(i, j) = cd(re, im);
        }
    }
    return 0.5 * (a + a.adjoint());
}

inline Eigen::VectorXcd random_unit_vector(std::size_t d, std::mt19937_64& rng) {
    return random_subspace(d, 1, rng).col(0);
}

// Trapezoid average of samples f(t_i) on a uniform grid over [0, T].
template <class F>
double trapezoid_average(F&& f, double T, std::size_t intervals) {
    const double h = T / static_cast<double>(intervals);
    double s = 0.5 * (f(0.0) + f(T));
    for (std::size_t i = 1; i < intervals; ++i) s += f(h * static_cast<double>(i));
    return s * h / T;
}

}  // namespace oracle
