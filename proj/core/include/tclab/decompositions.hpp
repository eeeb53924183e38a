#pragma once

#include "tclab/tensor.hpp"

#include <optional>
#include <vector>

namespace tclab {

/// core x_1 U1 x_2 U2 ... x_N UN. Factor n is I_n x R_n, core is R_1 x ... x R_N.
struct TuckerDecomposition {
    Tensor core;
    std::vector<Matrix> factors;

    [[nodiscard]] Tensor reconstruct() const;
};

/// Higher-order SVD. Factors are square orthogonal, the core is all-orthogonal and
/// ordered, and mode_sigmas[n][i] = ||core_{i_n = i}||_F.
struct HosvdResult {
    Tensor core;
    std::vector<Matrix> factors;
    std::vector<Vector> mode_sigmas;

    [[nodiscard]] Tensor reconstruct() const;
};

[[nodiscard]] HosvdResult hosvd(const Tensor& t);

/// Singular values of every Tucker unfolding; equal to hosvd(t).mode_sigmas but
/// skips forming the core. Vector n has length I_n (zero padded).
[[nodiscard]] std::vector<Vector> tucker_mode_sigmas(const Tensor& t);

/// Frobenius norms of the sub-tensors obtained by fixing mode n at each index.
[[nodiscard]] Vector subtensor_norms(const Tensor& t, std::size_t mode);

/// Keeps the first R_n singular vectors per mode and reconstructs.
[[nodiscard]] Tensor tucker_truncate(const HosvdResult& h, std::span<const std::size_t> ranks);
[[nodiscard]] TuckerDecomposition tucker_truncate_factors(const HosvdResult& h,
                                                          std::span<const std::size_t> ranks);

struct HooiOptions {
    std::size_t max_iters = 50;
    double tol = 1e-10;
    /// Warm start (I_n x R_n orthonormal columns); truncated HOSVD when empty.
    std::vector<Matrix> initial_factors;
};

struct HooiResult {
    TuckerDecomposition decomposition;
    /// ||t - reconstruction||_F after initialisation (entry 0) and after each sweep.
    std::vector<double> fit_errors;
    std::size_t sweeps = 0;
};

/// Higher-order orthogonal iteration. Fit errors are nonincreasing across sweeps.
[[nodiscard]] HooiResult hooi(const Tensor& t, std::span<const std::size_t> ranks,
                              const HooiOptions& options = {});

/// Tensor-train cores T_k of shape R_{k-1} x I_k x R_k, R_0 = R_N = 1.
struct TTResult {
    std::vector<Tensor> cores;
    /// For n in [1, N-1] (stored 0-based), the retained singular values of the n-th
    /// carried matrix of the sweep.
    std::vector<Vector> mode_sigmas;

    [[nodiscard]] std::vector<std::size_t> ranks() const;
};

/// R_n = min(I_1...I_n, I_{n+1}...I_N) with R_0 = R_N = 1.
[[nodiscard]] std::vector<std::size_t> tt_max_ranks(const Shape& shape);

/// Checks R_0 = R_N = 1, R_n within the unconstrained bound and chain feasibility
/// R_n <= R_{n-1} I_n. Throws DomainError.
void validate_tt_ranks(const Shape& shape, std::span<const std::size_t> ranks);

/// Left-to-right TT-SVD. Without ranks every carried matrix keeps its full spectrum
/// and the decomposition is exact.
[[nodiscard]] TTResult tt_svd(const Tensor& t,
                              std::optional<std::vector<std::size_t>> ranks = std::nullopt);

/// Entry (i_1..i_N) = T_1[i_1] T_2[i_2] ... T_N[i_N].
[[nodiscard]] Tensor tt_compose(std::span<const Tensor> cores);

}  // namespace tclab
