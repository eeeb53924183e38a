#pragma once

#include "tclab/error.hpp"
#include "tclab/models.hpp"
#include "tclab/observations.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tclab {

struct TrainConfig {
    double learning_rate = 0.1;
    double loss_tol = 1e-6;
    std::size_t max_iters = 4'000'000;
    std::size_t log_every = 100;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    /// Abort once the loss exceeds this multiple of the initial loss.
    double divergence_factor = 1e6;

    void validate() const;
};

/// Which generalised singular values a trajectory tracks.
enum class SpectrumKind { tucker, tt };

[[nodiscard]] std::string to_string(SpectrumKind kind);
[[nodiscard]] SpectrumKind spectrum_kind_from_string(const std::string& s);

/// Observables of the composed tensor W(t) at one logged step.
struct TrajectoryRow {
    std::size_t step = 0;
    double loss = 0.0;
    std::optional<double> recon_error;
    /// Per mode; Tucker: HOSVD mode singular values, TT: TT-SVD carried singular values.
    std::vector<Vector> sigmas;
    std::vector<double> eranks;
    double nuclear = 0.0;
    /// Distance of the rank-truncated W(t) to the ground truth, when ranks are known.
    std::optional<double> low_rank_metric;

    friend bool operator==(const TrajectoryRow&, const TrajectoryRow&) = default;
};

struct Trajectory {
    SpectrumKind kind = SpectrumKind::tucker;
    std::vector<TrajectoryRow> rows;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Computes a trajectory row for a composed tensor.
[[nodiscard]] TrajectoryRow observe(const Tensor& w, SpectrumKind kind, std::size_t step, double loss,
                                    const Tensor* truth = nullptr,
                                    const std::vector<std::size_t>* metric_ranks = nullptr);

/// Optional instrumentation inputs for a training run.
struct Monitor {
    std::optional<Tensor> ground_truth;
    /// Tucker ranks (N entries) or TT ranks (N+1 entries) for the low-rank metric.
    std::optional<std::vector<std::size_t>> metric_ranks;
};

template <typename Model>
struct TrainResult {
    Model model;
    Trajectory trajectory;
    std::size_t iterations = 0;
    bool converged = false;
    double final_loss = 0.0;
};

/// Thrown when the loss becomes non-finite or blows past the divergence guard.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, std::size_t step, double last_finite_loss, Trajectory partial)
        : NumericalError(what), step_(step), last_loss_(last_finite_loss), partial_(std::move(partial)) {}

    [[nodiscard]] std::size_t step() const noexcept { return step_; }
    [[nodiscard]] double last_finite_loss() const noexcept { return last_loss_; }
    [[nodiscard]] const Trajectory& partial_trajectory() const noexcept { return partial_; }

private:
    std::size_t step_;
    double last_loss_;
    Trajectory partial_;
};

/// Full-batch gradient descent theta <- theta - lr * grad until the loss drops below
/// loss_tol or max_iters updates have been applied. Rows are logged at step 0, every
/// log_every updates, and at the final step.
[[nodiscard]] TrainResult<TuckerUF> train(TuckerUF model, const ObservationSet& obs,
                                          const TrainConfig& cfg, const Monitor& monitor = {});
[[nodiscard]] TrainResult<TTUF> train(TTUF model, const ObservationSet& obs, const TrainConfig& cfg,
                                      const Monitor& monitor = {});

using MetricMap = std::map<std::string, double>;

/// Per-metric mean over runs; only metrics present in every run are kept.
[[nodiscard]] MetricMap multi_seed_average(std::span<const MetricMap> runs);

}  // namespace tclab
