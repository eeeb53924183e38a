#pragma once

#include "tclab/tensor.hpp"

#include <span>

namespace tclab {

/// m = u * diag(s) * vt, with s nonincreasing and nonnegative.
struct SvdResult {
    Matrix u;   // m x k, orthonormal columns
    Vector s;   // k
    Matrix vt;  // k x n, orthonormal rows

    [[nodiscard]] Matrix reconstruct() const;
};

/// Thin SVD (k = min(m, n)). Each left singular vector is flipped so that its first
/// entry that is not numerically zero is positive; the matching right vector follows.
[[nodiscard]] SvdResult svd(const Eigen::Ref<const Matrix>& m);

/// Like svd() but u is square (m x m), completed with an orthonormal basis of the
/// complement when m > n. s keeps length min(m, n).
[[nodiscard]] SvdResult svd_full_left(const Eigen::Ref<const Matrix>& m);

/// Singular values only, nonincreasing.
[[nodiscard]] Vector singular_values(const Eigen::Ref<const Matrix>& m);

/// Top-r factors of svd(m); 1 <= r <= min(rows, cols).
[[nodiscard]] SvdResult truncated_svd(const Eigen::Ref<const Matrix>& m, std::size_t r);

/// Singular value thresholding U * diag(max(s - tau, 0)) * V^T, the proximal
/// operator of tau * ||.||_*.
[[nodiscard]] Matrix svt(const Eigen::Ref<const Matrix>& m, double tau);

[[nodiscard]] double nuclear_norm(const Eigen::Ref<const Matrix>& m);

/// Shannon entropy -sum p_i ln p_i with 0 ln 0 = 0. p must be a probability vector
/// (nonnegative, summing to 1 within 1e-9).
[[nodiscard]] double entropy(std::span<const double> p);

/// exp(H(sigma / sum sigma)). Lies in [1, #nonzero sigma].
/// An all-zero spectrum has effective rank 1 by convention.
[[nodiscard]] double effective_rank(std::span<const double> sigmas);
[[nodiscard]] double effective_rank(const Vector& sigmas);

/// Number of singular values above rel_tol * s_max.
[[nodiscard]] std::size_t numerical_rank(const Vector& sigmas, double rel_tol = 1e-8);

}  // namespace tclab
