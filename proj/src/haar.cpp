#include "eqt/haar.hpp"

#include "eqt/measure.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

namespace eqt {

namespace {

using cd = std::complex<double>;

void check_rank(std::size_t K, std::size_t d, const char* who) {
    if (K < 1 || K > d) throw std::invalid_argument(std::string(who) + ": K must lie in [1, d]");
}

// Re sum_i w_i^dagger X w_i = tr(W W^dagger X).
double projected_trace(const Eigen::MatrixXcd& w, const Eigen::MatrixXcd& x) {
    if (w.cols() == 0) return 0.0;
    return std::real((w.adjoint() * x * w).trace());
}

template <class Fn>
HaarMoments collect(const HaarSampler& sampler, std::size_t samples, unsigned workers, Fn&& fn) {
    if (samples < 2) throw std::invalid_argument("Haar Monte Carlo: need at least 2 samples");
    std::vector<double> d(samples);
    std::vector<double> d2(samples);
    parallel_for(samples, workers, [&](std::size_t i) {
        const double v = fn(sampler.sample(i));
        d[i] = v;
        d2[i] = v * v;
    });
    return {sample_stats(d), sample_stats(d2)};
}

void check_x(const Eigen::MatrixXcd& x, const HaarSampler& sampler) {
    if (x.rows() != x.cols() || static_cast<std::size_t>(x.rows()) != sampler.dim()) {
        throw std::invalid_argument("Haar Monte Carlo: operator dimension does not match the sampler");
    }
}

std::size_t rank_sum(std::span<const std::size_t> ranks) {
    std::size_t s = 0;
    for (std::size_t k : ranks) s += k;
    return s;
}

}  // namespace

Eigen::MatrixXcd sample_haar(std::size_t d, std::mt19937_64& rng) {
    if (d == 0) throw std::invalid_argument("sample_haar: dimension must be positive");
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    const auto n = static_cast<Eigen::Index>(d);
    Eigen::MatrixXcd z(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            z(i, j) = cd(re, im);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < n; ++j) {
        const cd rjj = r(j, j);
        const double mod = std::abs(rjj);
        q.col(j) *= mod > 0.0 ? rjj / mod : cd(1.0, 0.0);
    }
    return q;
}

HaarSampler::HaarSampler(std::uint64_t seed, std::size_t dim) : seed_(seed), dim_(dim) {
    if (dim == 0) throw std::invalid_argument("HaarSampler: dimension must be positive");
}

HaarSampler::HaarSampler(std::uint64_t seed, Eigen::VectorXcd excluded)
    : seed_(seed), dim_(static_cast<std::size_t>(excluded.size())) {
    if (dim_ <= 2) throw std::invalid_argument("HaarSampler: the constrained ensemble needs d > 2");
    if (std::abs(excluded.squaredNorm() - 1.0) > 1e-10) {
        throw std::invalid_argument("HaarSampler: excluded vector must be normalized");
    }
    const auto n = excluded.size();
    const Eigen::MatrixXcd column = excluded;
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(column);
    const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
    complement_ = q.rightCols(n - 1);
    excluded_ = std::move(excluded);
}

Eigen::MatrixXcd HaarSampler::sample(std::uint64_t index) const {
    std::mt19937_64 rng(derive_seed(seed_, index));
    if (!excluded_) return sample_haar(dim_, rng);
    const Eigen::MatrixXcd inner = sample_haar(dim_ - 1, rng);
    const Eigen::MatrixXcd& b = *complement_;
    return (*excluded_) * excluded_->adjoint() + b * inner * b.adjoint();
}

double unitarity_residual(const Eigen::MatrixXcd& u) {
    const Eigen::MatrixXcd g = u.adjoint() * u;
    return (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

double exact_mean_sq_distinguishability(const QuantumState& rho_t, const QuantumState& omega, std::size_t K) {
    const std::size_t d = rho_t.dim();
    if (omega.dim() != d) throw std::invalid_argument("exact_mean_sq_distinguishability: dimension mismatch");
    check_rank(K, d, "exact_mean_sq_distinguishability");
    if (d == 1) return 0.0;
    const double dd = static_cast<double>(d);
    const double kk = static_cast<double>(K);
    return kk / dd * (dd - kk) / (dd * dd - 1.0) * (purity(rho_t) - purity(omega));
}

double typical_bound(std::size_t K, std::size_t d) {
    check_rank(K, d, "typical_bound");
    const double dd = static_cast<double>(d);
    const double kk = static_cast<double>(K);
    return std::sqrt(kk * (dd - kk) / (dd * dd * (dd + 1.0)));
}

double typical_cap(std::size_t d) {
    if (d == 0) throw std::invalid_argument("typical_cap: dimension must be positive");
    return 0.5 / std::sqrt(static_cast<double>(d) + 1.0);
}

double initial_overlap_excess(const QuantumState& state0, const QuantumState& rho_t, const QuantumState& omega) {
    return trace_product(state0, rho_t) - trace_product(state0, omega);
}

ConstrainedBound constrained_mean_bound(const QuantumState& state0, const QuantumState& rho_t,
                                        const QuantumState& omega, std::size_t K) {
    if (!state0.is_pure()) throw std::invalid_argument("constrained_mean_bound: initial state must be pure");
    const std::size_t d = state0.dim();
    if (d <= 2) throw std::invalid_argument("constrained_mean_bound: needs d > 2");
    check_rank(K, d, "constrained_mean_bound");
    ConstrainedBound out;
    out.f = initial_overlap_excess(state0, rho_t, omega);
    const double dp = static_cast<double>(d - 1);
    out.value = std::abs(out.f) + 0.5 / std::sqrt(dp);
    out.tight = std::sqrt(out.f * out.f + 0.25 / dp);
    return out;
}

InitialFloor initial_distinguishability_floor(const QuantumState& state0, const QuantumState& omega, std::size_t K) {
    if (!state0.is_pure()) throw std::invalid_argument("initial_distinguishability_floor: initial state must be pure");
    const std::size_t d = state0.dim();
    if (d <= 2) throw std::invalid_argument("initial_distinguishability_floor: needs d > 2");
    check_rank(K, d, "initial_distinguishability_floor");
    const double factor = 1.0 - static_cast<double>(K - 1) / static_cast<double>(d - 1);
    const double d_eff = effective_dimension(level_distribution(state0));
    return {factor * (1.0 - 1.0 / d_eff), factor * (1.0 - trace_product(state0, omega))};
}

NOutcomeTypical n_outcome_typical_bound(std::span<const std::size_t> ranks, std::size_t d) {
    if (ranks.empty()) throw std::invalid_argument("n_outcome_typical_bound: no outcomes");
    if (rank_sum(ranks) != d) throw std::invalid_argument("n_outcome_typical_bound: ranks must sum to d");
    const double dd = static_cast<double>(d);
    double s = 0.0;
    for (std::size_t k : ranks) {
        const double kk = static_cast<double>(k);
        s += std::sqrt(kk * (dd - kk) / (dd * dd * (dd + 1.0)));
    }
    return {0.5 * s, 0.5 * std::sqrt(static_cast<double>(ranks.size()) / (dd + 1.0))};
}

double n_outcome_constrained_bound(double f, std::size_t N, std::size_t d) {
    if (N < 2) throw std::invalid_argument("n_outcome_constrained_bound: need N >= 2");
    if (d <= 2) throw std::invalid_argument("n_outcome_constrained_bound: needs d > 2");
    return std::abs(f) + 0.5 * std::sqrt(static_cast<double>(N) / static_cast<double>(d - 1));
}

TwirlCoefficients twirl_second_moment(const Eigen::MatrixXcd& a) {
    if (a.rows() != a.cols() || a.rows() == 0) throw std::invalid_argument("twirl_second_moment: square matrix required");
    const double d = static_cast<double>(a.rows());
    const double tr = std::real(a.trace());
    const double tr2 = std::real(a.cwiseProduct(a.transpose()).sum());
    TwirlCoefficients c;
    c.alpha = (tr * tr + tr2) / (d * (d + 1.0));
    c.beta = d > 1.0 ? (tr * tr - tr2) / (d * (d - 1.0)) : 0.0;
    return c;
}

Eigen::MatrixXcd twirl_reconstruction(const TwirlCoefficients& c, std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    // alpha (1 + S)/2 + beta (1 - S)/2, S |i j> = |j i>
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n * n, n * n);
    const double diag = 0.5 * (c.alpha + c.beta);
    const double swap = 0.5 * (c.alpha - c.beta);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out(i * n + j, i * n + j) += diag;
            out(j * n + i, i * n + j) += swap;
        }
    }
    return out;
}

MonteCarloTwirl mc_twirl(const Eigen::MatrixXcd& a, const HaarSampler& sampler, std::size_t samples,
                         unsigned workers) {
    if (samples < 2) throw std::invalid_argument("mc_twirl: need at least 2 samples");
    if (static_cast<std::size_t>(a.rows()) != sampler.dim()) throw std::invalid_argument("mc_twirl: dimension mismatch");
    const Eigen::Index n = a.rows();
    const Eigen::Index n2 = n * n;
    std::vector<Eigen::MatrixXcd> draws(samples);
    parallel_for(samples, workers, [&](std::size_t s) {
        const Eigen::MatrixXcd u = sampler.sample(s);
        const Eigen::MatrixXcd r = u * a * u.adjoint();
        Eigen::MatrixXcd k(n2, n2);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) k.block(i * n, j * n, n, n) = r(i, j) * r;
        }
        draws[s] = std::move(k);
    });
    MonteCarloTwirl out;
    out.mean.resize(n2, n2);
    out.stderr_entry.resize(n2, n2);
    std::vector<double> re(samples);
    std::vector<double> im(samples);
    for (Eigen::Index c = 0; c < n2; ++c) {
        for (Eigen::Index r = 0; r < n2; ++r) {
            for (std::size_t s = 0; s < samples; ++s) {
                re[s] = draws[s](r, c).real();
                im[s] = draws[s](r, c).imag();
            }
            const SampleStats sr = sample_stats(re);
            const SampleStats si = sample_stats(im);
            out.mean(r, c) = cd(sr.mean, si.mean);
            out.stderr_entry(r, c) = std::max(sr.stderr_mean, si.stderr_mean);
        }
    }
    return out;
}

double TwirlResult::gap_in_stderr() const {
    const double gap = std::abs(mc_mean - exact);
    if (mc_stderr > 0.0) return gap / mc_stderr;
    return gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

HaarMoments sample_projector_distinguishability(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& reference,
                                                const HaarSampler& sampler, std::size_t samples,
                                                unsigned workers) {
    check_x(x, sampler);
    if (reference.rows() != x.rows()) throw std::invalid_argument("sample_projector_distinguishability: bad reference basis");
    return collect(sampler, samples, workers,
                   [&](const Eigen::MatrixXcd& u) { return std::abs(projected_trace(u * reference, x)); });
}

HaarMoments sample_projector_distinguishability(const Eigen::MatrixXcd& x, std::size_t K,
                                                const HaarSampler& sampler, std::size_t samples,
                                                unsigned workers) {
    check_x(x, sampler);
    check_rank(K, sampler.dim(), "sample_projector_distinguishability");
    const auto k = static_cast<Eigen::Index>(K);
    return collect(sampler, samples, workers,
                   [&](const Eigen::MatrixXcd& u) { return std::abs(projected_trace(u.leftCols(k), x)); });
}

HaarMoments sample_measurement_distinguishability(const Eigen::MatrixXcd& x, std::span<const std::size_t> ranks,
                                                  const HaarSampler& sampler, std::size_t samples,
                                                  unsigned workers) {
    check_x(x, sampler);
    if (rank_sum(ranks) != sampler.dim()) {
        throw std::invalid_argument("sample_measurement_distinguishability: ranks must sum to d");
    }
    return collect(sampler, samples, workers, [&](const Eigen::MatrixXcd& u) {
        double s = 0.0;
        Eigen::Index start = 0;
        for (std::size_t k : ranks) {
            const auto kk = static_cast<Eigen::Index>(k);
            s += std::abs(projected_trace(u.middleCols(start, kk), x));
            start += kk;
        }
        return 0.5 * s;
    });
}

HaarMoments sample_constrained_distinguishability(const Eigen::MatrixXcd& x, std::size_t K,
                                                  const HaarSampler& sampler, std::size_t samples,
                                                  unsigned workers) {
    check_x(x, sampler);
    if (!sampler.constrained()) throw std::invalid_argument("sample_constrained_distinguishability: sampler is not constrained");
    check_rank(K, sampler.dim(), "sample_constrained_distinguishability");
    const Eigen::VectorXcd& psi = sampler.excluded();
    const double base = std::real(psi.dot(x * psi));
    const Eigen::MatrixXcd ref = sampler.complement_basis().leftCols(static_cast<Eigen::Index>(K - 1));
    return collect(sampler, samples, workers,
                   [&](const Eigen::MatrixXcd& u) { return std::abs(base + projected_trace(u * ref, x)); });
}

HaarMoments sample_constrained_measurement(const Eigen::MatrixXcd& x, std::span<const std::size_t> ranks,
                                           const HaarSampler& sampler, std::size_t samples,
                                           unsigned workers) {
    check_x(x, sampler);
    if (!sampler.constrained()) throw std::invalid_argument("sample_constrained_measurement: sampler is not constrained");
    if (ranks.size() < 2) throw std::invalid_argument("sample_constrained_measurement: need at least 2 outcomes");
    if (rank_sum(ranks) != sampler.dim() - 1) {
        throw std::invalid_argument("sample_constrained_measurement: ranks must sum to d - 1");
    }
    const Eigen::VectorXcd& psi = sampler.excluded();
    const double base = std::real(psi.dot(x * psi));
    const Eigen::MatrixXcd& b = sampler.complement_basis();
    return collect(sampler, samples, workers, [&](const Eigen::MatrixXcd& u) {
        const Eigen::MatrixXcd ub = u * b;
        double s = 0.0;
        Eigen::Index start = 0;
        for (std::size_t j = 0; j < ranks.size(); ++j) {
            const auto kk = static_cast<Eigen::Index>(ranks[j]);
            const double t = projected_trace(ub.middleCols(start, kk), x);
            s += std::abs(j == 0 ? base + t : t);
            start += kk;
        }
        return 0.5 * s;
    });
}

TwirlResult twirl_check(const QuantumState& rho_t, const QuantumState& omega, std::size_t K,
                        const HaarSampler& sampler, std::size_t samples, unsigned workers) {
    const Eigen::MatrixXcd x = rho_t.density() - omega.density();
    const HaarMoments m = sample_projector_distinguishability(x, K, sampler, samples, workers);
    TwirlResult r;
    r.exact = exact_mean_sq_distinguishability(rho_t, omega, K);
    r.mc_mean = m.d_sq.mean;
    r.mc_stderr = m.d_sq.stderr_mean;
    r.samples = samples;
    r.seed = sampler.seed();
    return r;
}

}  // namespace eqt
