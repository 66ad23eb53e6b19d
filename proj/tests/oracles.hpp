#pragma once

// Test-only reference computations. Nothing here calls into the library's
// numerical paths.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

/// Eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations.
/// Row-major n*n input. Slow but independent of LAPACK and Eigen.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t n) {
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                off += at(i, j) * at(i, j);
            }
        }
        if (off < 1e-26) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) < 1e-300) {
                    continue;
                }
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = at(i, i);
    }
    return out;
}

/// Singular values (eigenvalue magnitudes), descending.
inline std::vector<double> jacobi_singular_values(std::vector<double> a, std::size_t n) {
    auto ev = jacobi_eigenvalues(std::move(a), n);
    for (double& v : ev) {
        v = std::abs(v);
    }
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

/// Two-Gaussian split log-likelihood evaluated term by term from the
/// normal density, for one candidate d.
inline double split_loglik(const std::vector<double>& x, std::size_t d) {
    const std::size_t k = x.size();
    double mu1 = 0.0;
    double mu2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        (i < d ? mu1 : mu2) += x[i];
    }
    mu1 /= static_cast<double>(d);
    mu2 /= static_cast<double>(k - d);
    double ss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double r = x[i] - (i < d ? mu1 : mu2);
        ss += r * r;
    }
    const double var = ss / static_cast<double>(k);
    if (var == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    double ll = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double mu = i < d ? mu1 : mu2;
        const double density = std::exp(-(x[i] - mu) * (x[i] - mu) / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
        ll += density > 0.0 ? std::log(density)
                            : -0.5 * std::log(2.0 * std::numbers::pi * var) - (x[i] - mu) * (x[i] - mu) / (2.0 * var);
    }
    return ll;
}

/// Exhaustive argmax over d in [1, K-1], first maximum wins.
inline std::size_t best_split(const std::vector<double>& x) {
    std::size_t best_d = 1;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t d = 1; d < x.size(); ++d) {
        const double ll = split_loglik(x, d);
        if (ll > best) {
            best = ll;
            best_d = d;
        }
    }
    return best_d;
}

}  // namespace oracle
