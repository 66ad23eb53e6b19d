#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "schelling/graph.hpp"

namespace schelling {

/// The K largest singular values of an adjacency matrix, descending.
struct SingularProfile {
    std::vector<double> values;
    std::size_t source_n = 0;
};

/// Profile-likelihood elbow result. `profile_loglik[i]` is the split
/// log-likelihood for d = i + 1.
struct DimEstimate {
    std::size_t d_hat = 1;
    std::vector<double> profile_loglik;
    bool degenerate = false;
};

namespace detail {

inline Eigen::MatrixXd dense_adjacency(const Network& net) {
    const auto n = static_cast<Eigen::Index>(net.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (AgentId i = 0; i < net.size(); ++i) {
        for (AgentId j : net.neighbors(i)) {
            a(i, j) = 1.0;
        }
    }
    return a;
}

/// Eigenvalues of a symmetric matrix, ascending. Only the lower triangle
/// is read.
inline std::vector<double> sym_eigenvalues(Eigen::MatrixXd a) {
    const auto n = static_cast<lapack_int>(a.rows());
    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;
    double unused = 0.0;
    const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'N', 'A', 'L', n, a.data(), n, 0.0, 0.0, 0, 0, 0.0,
                                           &found, w.data(), &unused, 1, support.data());
    if (info != 0) {
        throw std::runtime_error("dsyevr failed with info=" + std::to_string(info));
    }
    w.resize(static_cast<std::size_t>(found));
    return w;
}

}  // namespace detail

/// Singular values of the symmetric 0/1 adjacency matrix, i.e. the
/// eigenvalue magnitudes, largest K kept.
inline SingularProfile singular_values(const Network& net, std::size_t k) {
    const std::size_t n = net.size();
    if (k < 2) {
        throw std::invalid_argument("singular_values: K must be at least 2");
    }
    if (k > n) {
        throw std::invalid_argument("singular_values: K=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
    }
    auto eig = detail::sym_eigenvalues(detail::dense_adjacency(net));
    for (double& v : eig) {
        v = std::abs(v);
    }
    std::sort(eig.begin(), eig.end(), std::greater<>());
    eig.resize(k);
    return {std::move(eig), n};
}

/// Zhu–Ghodsi elbow: split the profile after the first d values, fit one
/// Gaussian per side with a shared maximum-likelihood variance, and keep
/// the d with the largest total log-likelihood (first one on ties).
///
/// With pooled variance v = SS(d)/K the log-likelihood collapses to
/// -K/2 * (log(2*pi*v) + 1). A split with v == 0 fits exactly and scores
/// +inf.
inline DimEstimate zhu_ghodsi_dim(const SingularProfile& profile) {
    const auto& x = profile.values;
    const std::size_t k = x.size();
    if (k < 3) {
        throw std::invalid_argument("zhu_ghodsi_dim: need at least 3 values");
    }
    DimEstimate est;
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) {
        est.degenerate = true;
        est.profile_loglik.assign(k - 1, std::numeric_limits<double>::quiet_NaN());
        return est;
    }

    // Prefix sums give each side's mean; the squared deviations are summed
    // directly to avoid cancellation.
    std::vector<double> prefix(k + 1, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        prefix[i + 1] = prefix[i] + x[i];
    }
    const double kk = static_cast<double>(k);
    double best = -std::numeric_limits<double>::infinity();
    est.profile_loglik.reserve(k - 1);
    for (std::size_t d = 1; d < k; ++d) {
        const double mu1 = prefix[d] / static_cast<double>(d);
        const double mu2 = (prefix[k] - prefix[d]) / static_cast<double>(k - d);
        double ss = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            ss += (x[i] - mu1) * (x[i] - mu1);
        }
        for (std::size_t i = d; i < k; ++i) {
            ss += (x[i] - mu2) * (x[i] - mu2);
        }
        const double var = ss / kk;
        const double ll = var > 0.0 ? -0.5 * kk * (std::log(2.0 * std::numbers::pi * var) + 1.0)
                                    : std::numeric_limits<double>::infinity();
        est.profile_loglik.push_back(ll);
        if (ll > best) {
            best = ll;
            est.d_hat = d;
        }
    }
    return est;
}

/// Adjacency spectral embedding: rows U_i * diag(|lambda|)^(1/2) for the d
/// eigenpairs of largest magnitude.
inline Eigen::MatrixXd ase_embed(const Network& net, std::size_t d) {
    const std::size_t n = net.size();
    if (d < 1 || d > n) {
        throw std::invalid_argument("ase_embed: need 1 <= d <= n");
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(detail::dense_adjacency(net));
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("ase_embed: eigen decomposition failed");
    }
    const Eigen::VectorXd& w = solver.eigenvalues();
    const Eigen::MatrixXd& vecs = solver.eigenvectors();

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    auto mag = [&](std::size_t i) { return std::abs(w(static_cast<Eigen::Index>(i))); };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mag(a) > mag(b); });

    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t c = 0; c < d; ++c) {
        const auto src = static_cast<Eigen::Index>(order[c]);
        Eigen::VectorXd col = vecs.col(src) * std::sqrt(std::abs(w(src)));
        // Fix the sign so the largest-magnitude entry is positive.
        Eigen::Index arg = 0;
        col.cwiseAbs().maxCoeff(&arg);
        if (col(arg) < 0.0) {
            col = -col;
        }
        x.col(static_cast<Eigen::Index>(c)) = col;
    }
    return x;
}

/// One value per line, full round-trip precision.
inline void write_profile(std::ostream& os, const SingularProfile& profile) {
    const auto old = os.precision(17);
    for (double v : profile.values) {
        os << v << '\n';
    }
    os.precision(old);
}

}  // namespace schelling
