#pragma once

#include "tclab/tensor.hpp"

#include <optional>
#include <span>
#include <vector>

namespace tclab {

/// ||w - m||_F / ||m||_F.
[[nodiscard]] double reconstruction_error(const Tensor& w, const Tensor& m);

/// sum_n alpha_n ||W_(n)||_*; alphas default to 1/N and must be nonnegative and sum to 1.
[[nodiscard]] double tucker_nuclear_norm(const Tensor& w, std::optional<std::vector<double>> alphas = std::nullopt);

/// sum_{n=1}^{N-1} alpha_n ||W_[n]||_*; alphas default to 1/(N-1).
[[nodiscard]] double tt_nuclear_norm(const Tensor& w, std::optional<std::vector<double>> alphas = std::nullopt);

/// Effective rank of the HOSVD mode-n singular values (mode is 0-based).
[[nodiscard]] double tucker_effective_rank(const Tensor& w, std::size_t mode);
/// Effective rank of the singular values produced by an untruncated TT-SVD at
/// carried matrix n (0-based, n in [0, N-2]).
[[nodiscard]] double tt_effective_rank(const Tensor& w, std::size_t mode);

[[nodiscard]] std::vector<double> tucker_effective_ranks(const Tensor& w);
[[nodiscard]] std::vector<double> tt_effective_ranks(const Tensor& w);

/// ||truth - tucker_truncate(hosvd(w), ranks)||_F.
[[nodiscard]] double tucker_metric(const Tensor& w, const Tensor& truth, std::span<const std::size_t> ranks);
/// ||truth - tt_compose(tt_svd(w, ranks))||_F with ranks = (1, R_1, ..., R_{N-1}, 1).
[[nodiscard]] double tt_metric(const Tensor& w, const Tensor& truth, std::span<const std::size_t> ranks);

/// Checks alpha_n >= 0 and sum = 1 within 1e-9; returns the default uniform weights
/// when none are given.
[[nodiscard]] std::vector<double> resolve_weights(std::optional<std::vector<double>> alphas, std::size_t count);

}  // namespace tclab
