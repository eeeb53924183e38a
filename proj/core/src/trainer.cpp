#include "tclab/trainer.hpp"

#include "tclab/decompositions.hpp"
#include "tclab/linalg.hpp"
#include "tclab/metrics.hpp"

#include <cmath>

namespace tclab {

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0)) throw DomainError("learning rate must be nonnegative");
    if (!(loss_tol > 0.0)) throw DomainError("loss tolerance must be positive");
    if (max_iters < 1) throw DomainError("max_iters must be positive");
    if (log_every < 1) throw DomainError("log_every must be positive");
    if (!(divergence_factor > 1.0)) throw DomainError("divergence factor must exceed 1");
}

std::string to_string(SpectrumKind kind) { return kind == SpectrumKind::tucker ? "tucker" : "tt"; }

SpectrumKind spectrum_kind_from_string(const std::string& s) {
    if (s == "tucker") return SpectrumKind::tucker;
    if (s == "tt") return SpectrumKind::tt;
    throw DomainError("unknown spectrum kind '" + s + "'");
}

TrajectoryRow observe(const Tensor& w, SpectrumKind kind, std::size_t step, double loss,
                      const Tensor* truth, const std::vector<std::size_t>* metric_ranks) {
    TrajectoryRow row;
    row.step = step;
    row.loss = loss;
    if (truth) row.recon_error = reconstruction_error(w, *truth);
    row.sigmas = kind == SpectrumKind::tucker ? tucker_mode_sigmas(w) : tt_svd(w).mode_sigmas;
    double nuclear = 0.0;
    for (const auto& s : row.sigmas) {
        row.eranks.push_back(effective_rank(s));
        nuclear += s.sum();
    }
    row.nuclear = row.sigmas.empty() ? 0.0 : nuclear / static_cast<double>(row.sigmas.size());
    if (truth && metric_ranks) {
        row.low_rank_metric = kind == SpectrumKind::tucker ? tucker_metric(w, *truth, *metric_ranks)
                                                           : tt_metric(w, *truth, *metric_ranks);
    }
    return row;
}

namespace {

template <typename Model>
TrainResult<Model> run(Model model, const ObservationSet& obs, const TrainConfig& cfg,
                       const Monitor& monitor, SpectrumKind kind) {
    cfg.validate();
    if (monitor.ground_truth && monitor.ground_truth->shape() != obs.shape()) {
        throw DimensionError("train: ground truth shape differs from observations");
    }
    const Tensor* truth = monitor.ground_truth ? &*monitor.ground_truth : nullptr;
    const auto* ranks = monitor.metric_ranks ? &*monitor.metric_ranks : nullptr;

    TrainResult<Model> result;
    result.trajectory.kind = kind;
    double initial_loss = 0.0;
    double last_finite = 0.0;
    for (std::size_t step = 0;; ++step) {
        auto eval = evaluate(model, obs);
        if (step == 0) initial_loss = eval.loss;
        if (!std::isfinite(eval.loss) || eval.loss > cfg.divergence_factor * std::max(initial_loss, 1e-300)) {
            throw DivergenceError("training diverged at step " + std::to_string(step) + " (loss " +
                                      std::to_string(eval.loss) + ", last finite " +
                                      std::to_string(last_finite) + ")",
                                  step, last_finite, std::move(result.trajectory));
        }
        last_finite = eval.loss;
        const bool converged = eval.loss < cfg.loss_tol;
        const bool stop = converged || step >= cfg.max_iters;
        if (step % cfg.log_every == 0 || stop) {
            result.trajectory.rows.push_back(observe(eval.composed, kind, step, eval.loss, truth, ranks));
        }
        if (stop) {
            result.iterations = step;
            result.converged = converged;
            result.final_loss = eval.loss;
            break;
        }
        apply_step(model, eval.gradient, cfg.learning_rate);
    }
    result.model = std::move(model);
    return result;
}

}  // namespace

TrainResult<TuckerUF> train(TuckerUF model, const ObservationSet& obs, const TrainConfig& cfg,
                            const Monitor& monitor) {
    if (model.shape() != obs.shape()) throw DimensionError("train: model and observation shapes differ");
    return run(std::move(model), obs, cfg, monitor, SpectrumKind::tucker);
}

TrainResult<TTUF> train(TTUF model, const ObservationSet& obs, const TrainConfig& cfg, const Monitor& monitor) {
    if (model.shape() != obs.shape()) throw DimensionError("train: model and observation shapes differ");
    if (obs.shape().order() < 2) throw DimensionError("train: TT models need order >= 2");
    return run(std::move(model), obs, cfg, monitor, SpectrumKind::tt);
}

MetricMap multi_seed_average(std::span<const MetricMap> runs) {
    if (runs.empty()) throw DomainError("multi_seed_average: no runs");
    MetricMap out;
    for (const auto& [key, _] : runs.front()) {
        double acc = 0.0;
        bool everywhere = true;
        for (const auto& r : runs) {
            auto it = r.find(key);
            if (it == r.end()) {
                everywhere = false;
                break;
            }
            acc += it->second;
        }
        if (everywhere) out[key] = acc / static_cast<double>(runs.size());
    }
    return out;
}

}  // namespace tclab
