#include "tclab/metrics.hpp"

#include "tclab/decompositions.hpp"
#include "tclab/error.hpp"
#include "tclab/linalg.hpp"

#include <cmath>
#include <numeric>

namespace tclab {

double reconstruction_error(const Tensor& w, const Tensor& m) {
    if (w.shape() != m.shape()) throw DimensionError("reconstruction_error: shape mismatch");
    const double denom = frobenius_norm(m);
    if (denom == 0.0) throw DomainError("reconstruction_error: ground truth has zero norm");
    return frobenius_norm(w - m) / denom;
}

std::vector<double> resolve_weights(std::optional<std::vector<double>> alphas, std::size_t count) {
    if (count == 0) throw DomainError("nuclear norm needs at least one unfolding");
    if (!alphas) return std::vector<double>(count, 1.0 / static_cast<double>(count));
    if (alphas->size() != count) {
        throw DomainError("expected " + std::to_string(count) + " weights, got " +
                          std::to_string(alphas->size()));
    }
    double total = 0.0;
    for (double a : *alphas) {
        if (!(a >= 0.0)) throw DomainError("weights must be nonnegative");
        total += a;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("weights must sum to 1");
    return std::move(*alphas);
}

double tucker_nuclear_norm(const Tensor& w, std::optional<std::vector<double>> alphas) {
    const auto a = resolve_weights(std::move(alphas), w.order());
    double acc = 0.0;
    for (std::size_t n = 0; n < w.order(); ++n) {
        if (a[n] != 0.0) acc += a[n] * nuclear_norm(mode_n_unfold(w, n));
    }
    return acc;
}

double tt_nuclear_norm(const Tensor& w, std::optional<std::vector<double>> alphas) {
    if (w.order() < 2) throw DimensionError("tt_nuclear_norm: needs order >= 2");
    const auto a = resolve_weights(std::move(alphas), w.order() - 1);
    double acc = 0.0;
    for (std::size_t n = 0; n + 1 < w.order(); ++n) {
        if (a[n] != 0.0) acc += a[n] * nuclear_norm(tt_unfold(w, n + 1));
    }
    return acc;
}

double tucker_effective_rank(const Tensor& w, std::size_t mode) {
    if (mode >= w.order()) {
        throw DimensionError("tucker_effective_rank: mode " + std::to_string(mode + 1) +
                             " outside 1.." + std::to_string(w.order()));
    }
    return effective_rank(singular_values(mode_n_unfold(w, mode)));
}

double tt_effective_rank(const Tensor& w, std::size_t mode) {
    if (w.order() < 2 || mode + 1 >= w.order()) {
        throw DimensionError("tt_effective_rank: mode " + std::to_string(mode + 1) + " outside 1.." +
                             std::to_string(w.order() < 2 ? 0 : w.order() - 1));
    }
    return effective_rank(tt_svd(w).mode_sigmas[mode]);
}

std::vector<double> tucker_effective_ranks(const Tensor& w) {
    std::vector<double> out;
    for (const auto& s : tucker_mode_sigmas(w)) out.push_back(effective_rank(s));
    return out;
}

std::vector<double> tt_effective_ranks(const Tensor& w) {
    if (w.order() < 2) throw DimensionError("tt_effective_ranks: needs order >= 2");
    std::vector<double> out;
    for (const auto& s : tt_svd(w).mode_sigmas) out.push_back(effective_rank(s));
    return out;
}

double tucker_metric(const Tensor& w, const Tensor& truth, std::span<const std::size_t> ranks) {
    if (w.shape() != truth.shape()) throw DimensionError("tucker_metric: shape mismatch");
    return frobenius_norm(truth - tucker_truncate(hosvd(w), ranks));
}

double tt_metric(const Tensor& w, const Tensor& truth, std::span<const std::size_t> ranks) {
    if (w.shape() != truth.shape()) throw DimensionError("tt_metric: shape mismatch");
    const auto tt = tt_svd(w, std::vector<std::size_t>(ranks.begin(), ranks.end()));
    return frobenius_norm(truth - tt_compose(tt.cores));
}

}  // namespace tclab
