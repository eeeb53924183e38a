#include "tclab/baselines.hpp"

#include "tclab/decompositions.hpp"
#include "tclab/error.hpp"
#include "tclab/linalg.hpp"
#include "tclab/metrics.hpp"

#include <cmath>

namespace tclab {

namespace {

Tensor initial_estimate(const ObservationSet& obs, MissingInit init) {
    Tensor x = init == MissingInit::zeros ? Tensor(obs.shape()) : Tensor::filled(obs.shape(), obs.mean());
    obs.project(x);
    return x;
}

double relative_change(const Tensor& next, const Tensor& prev) {
    const double denom = std::max(frobenius_norm(prev), 1e-300);
    return frobenius_norm(next - prev) / denom;
}

// Indicator of the unobserved entries.
std::vector<bool> missing_mask(const ObservationSet& obs) {
    std::vector<bool> missing(obs.shape().size(), true);
    for (auto off : obs.offsets()) missing[off] = false;
    return missing;
}

}  // namespace

CompletionResult halrtc(const ObservationSet& obs, const HalrtcOptions& options) {
    if (!(options.rho > 0.0)) throw DomainError("halrtc: rho must be positive");
    if (!(options.rho_growth >= 1.0)) throw DomainError("halrtc: rho growth must be >= 1");
    if (options.max_iters < 1) throw DomainError("halrtc: max_iters must be positive");
    const Shape& shape = obs.shape();
    const std::size_t N = shape.order();
    const auto alpha = resolve_weights(options.alphas, N);
    const auto missing = missing_mask(obs);

    CompletionResult result;
    Tensor x = initial_estimate(obs, options.init);
    std::vector<Tensor> y(N, Tensor(shape));
    std::vector<Tensor> m(N);
    double rho = options.rho;

    for (std::size_t k = 0; k < options.max_iters; ++k) {
        for (std::size_t n = 0; n < N; ++n) {
            Tensor arg = x;
            for (std::size_t e = 0; e < arg.size(); ++e) arg[e] += y[n][e] / rho;
            m[n] = mode_n_fold(svt(mode_n_unfold(arg, n), alpha[n] / rho), n, shape);
        }
        Tensor next = x;
        for (std::size_t e = 0; e < next.size(); ++e) {
            if (!missing[e]) continue;
            double acc = 0.0;
            for (std::size_t n = 0; n < N; ++n) acc += m[n][e] - y[n][e] / rho;
            next[e] = acc / static_cast<double>(N);
        }
        for (std::size_t n = 0; n < N; ++n) {
            for (std::size_t e = 0; e < next.size(); ++e) y[n][e] -= rho * (m[n][e] - next[e]);
        }
        const double change = relative_change(next, x);
        // primal residual: the auxiliary tensors must agree with the iterate too,
        // otherwise a fully thresholded first sweep would look converged
        double primal = 0.0;
        for (std::size_t n = 0; n < N; ++n) primal = std::max(primal, relative_change(m[n], next));
        x = std::move(next);
        result.objective.push_back(tucker_nuclear_norm(x, alpha));
        result.iterations = k + 1;
        rho = std::min(rho * options.rho_growth, options.rho_max);
        if (!x.all_finite()) throw NumericalError("halrtc: iterate became non-finite");
        if (change < options.tol && primal < options.tol) {
            result.converged = true;
            break;
        }
    }
    result.estimate = std::move(x);
    return result;
}

CompletionResult tt_silrtc(const ObservationSet& obs, const TtSilrtcOptions& options) {
    const Shape& shape = obs.shape();
    const std::size_t N = shape.order();
    if (N < 2) throw DimensionError("tt_silrtc: needs order >= 2");
    if (options.max_iters < 1) throw DomainError("tt_silrtc: max_iters must be positive");
    const auto alpha = resolve_weights(options.alphas, N - 1);
    const auto beta = options.betas.value_or(std::vector<double>(N - 1, 0.1));
    if (beta.size() != N - 1) throw DomainError("tt_silrtc: expected " + std::to_string(N - 1) + " betas");
    double beta_sum = 0.0;
    for (double b : beta) {
        if (!(b > 0.0)) throw DomainError("tt_silrtc: betas must be positive");
        beta_sum += b;
    }
    const auto missing = missing_mask(obs);

    CompletionResult result;
    Tensor x = initial_estimate(obs, options.init);
    for (std::size_t k = 0; k < options.max_iters; ++k) {
        Tensor acc(shape);
        for (std::size_t n = 0; n + 1 < N; ++n) {
            const Tensor mn = tt_fold(svt(tt_unfold(x, n + 1), alpha[n] / beta[n]), shape);
            for (std::size_t e = 0; e < acc.size(); ++e) acc[e] += beta[n] * mn[e];
        }
        Tensor next = x;
        for (std::size_t e = 0; e < next.size(); ++e) {
            if (missing[e]) next[e] = acc[e] / beta_sum;
        }
        const double change = relative_change(next, x);
        x = std::move(next);
        result.objective.push_back(tt_nuclear_norm(x, alpha));
        result.iterations = k + 1;
        if (change < options.tol) {
            result.converged = true;
            break;
        }
    }
    result.estimate = std::move(x);
    return result;
}

CompletionResult hooi_complete(const ObservationSet& obs, std::span<const std::size_t> ranks,
                               const HooiCompleteOptions& options) {
    if (options.outer_iters < 1) throw DomainError("hooi_complete: outer_iters must be positive");
    const Shape& shape = obs.shape();
    if (ranks.size() != shape.order()) throw DomainError("hooi_complete: one rank per mode");
    for (std::size_t n = 0; n < ranks.size(); ++n) {
        if (ranks[n] < 1 || ranks[n] > shape[n]) {
            throw DomainError("hooi_complete: rank " + std::to_string(ranks[n]) + " on mode " +
                              std::to_string(n + 1) + " outside 1.." + std::to_string(shape[n]));
        }
    }

    CompletionResult result;
    Tensor x = initial_estimate(obs, options.init);
    HooiOptions inner;
    inner.max_iters = options.inner_sweeps;
    inner.tol = 0.0;
    const double scale = std::max(std::sqrt(2.0 * completion_loss(Tensor(shape), obs)), 1e-300);
    for (std::size_t k = 0; k < options.outer_iters; ++k) {
        auto fit = hooi(x, ranks, inner);
        inner.initial_factors = fit.decomposition.factors;
        Tensor low_rank = fit.decomposition.reconstruct();
        const double err = std::sqrt(2.0 * completion_loss(low_rank, obs));
        obs.project(low_rank);
        x = std::move(low_rank);
        result.iterations = k + 1;
        const bool first = result.objective.empty();
        const double prev = first ? 0.0 : result.objective.back();
        result.objective.push_back(err);
        if (err <= 1e-13 * scale || (!first && prev - err <= options.tol * prev)) {
            result.converged = true;
            break;
        }
    }
    result.estimate = std::move(x);
    return result;
}

}  // namespace tclab
