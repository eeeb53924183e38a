#include "tclab/cli/experiment.hpp"

#include "tclab/baselines.hpp"
#include "tclab/decompositions.hpp"
#include "tclab/metrics.hpp"
#include "tclab/trainer.hpp"

#include <algorithm>
#include <set>

namespace tclab::cli {

Method method_from_string(const std::string& s) {
    if (s == "tucker-uf") return Method::tucker_uf;
    if (s == "tt-uf") return Method::tt_uf;
    if (s == "halrtc") return Method::halrtc;
    if (s == "tt-silrtc") return Method::tt_silrtc;
    if (s == "hooi") return Method::hooi;
    throw UsageError("unknown method '" + s + "' (expected tucker-uf, tt-uf, halrtc, tt-silrtc or hooi)");
}

std::string to_string(Method m) {
    switch (m) {
        case Method::tucker_uf: return "tucker-uf";
        case Method::tt_uf: return "tt-uf";
        case Method::halrtc: return "halrtc";
        case Method::tt_silrtc: return "tt-silrtc";
        case Method::hooi: return "hooi";
    }
    return "?";
}

bool is_uf(Method m) { return m == Method::tucker_uf || m == Method::tt_uf; }

namespace {

const std::set<std::string> kKnownKeys = {
    "method", "shape", "tucker_rank", "tt_rank", "data_seed", "tensor", "dataset", "dataset_path",
    "observed", "mask_seed", "depth", "init_sigma", "lr", "loss_tol", "max_iters", "log_every",
    "seeds", "rank", "baseline_max_iters", "baseline_tol", "tucker_metric_ranks", "tt_metric_ranks",
    "out", "methods", "depths", "workers"};

std::vector<std::size_t> size_list(const Config& cfg, const std::string& key) {
    try {
        return cfg.get_size_list(key);
    } catch (const SchemaError& e) {
        throw UsageError(e.what());
    }
}

std::size_t size_value(const Config& cfg, const std::string& key) {
    try {
        return cfg.get_size(key);
    } catch (const SchemaError& e) {
        throw UsageError(e.what());
    }
}

double double_value(const Config& cfg, const std::string& key) {
    try {
        return cfg.get_double(key);
    } catch (const SchemaError& e) {
        throw UsageError(e.what());
    }
}

}  // namespace

void check_keys(const Config& cfg) {
    for (const auto& [k, v] : cfg.entries()) {
        if (k.rfind("run.", 0) == 0) continue;
        if (!kKnownKeys.count(k)) throw UsageError("unknown config key '" + k + "'");
    }
}

std::vector<std::size_t> config_depth(const Config& cfg, std::size_t order) {
    if (!cfg.has("depth")) return std::vector<std::size_t>(order, 1);
    auto d = size_list(cfg, "depth");
    if (d.size() != order) {
        throw UsageError("depth has " + std::to_string(d.size()) + " entries for an order-" + std::to_string(order) +
                         " tensor");
    }
    return d;
}

Tensor generate_truth(const Config& cfg) {
    if (!cfg.has("shape")) throw UsageError("no data source: set tensor, dataset or shape");
    const Shape shape(size_list(cfg, "shape"));
    const bool tucker = cfg.has("tucker_rank");
    const bool tt = cfg.has("tt_rank");
    if (tucker == tt) throw UsageError("give exactly one of tucker_rank and tt_rank");
    const std::uint64_t seed = cfg.has("data_seed") ? size_value(cfg, "data_seed") : 1;
    if (tucker) return gen_low_tucker_rank(shape, size_list(cfg, "tucker_rank"), seed);
    return gen_low_tt_rank(shape, size_list(cfg, "tt_rank"), seed);
}

Problem build_problem(const Config& cfg, std::uint64_t seed) {
    const int sources = int(cfg.has("tensor")) + int(cfg.has("dataset")) + int(cfg.has("shape"));
    if (sources != 1) throw UsageError("give exactly one data source: tensor, dataset or shape");

    Tensor full;
    std::vector<std::size_t> present;  // candidate offsets for the mask
    bool intrinsic_gaps = false;
    std::optional<std::vector<std::size_t>> tucker_ranks;
    std::optional<std::vector<std::size_t>> tt_ranks;
    if (cfg.has("tensor")) {
        full = read_tensor(cfg.get("tensor"));
    } else if (cfg.has("dataset")) {
        if (!cfg.has("dataset_path")) throw UsageError("dataset needs dataset_path");
        DatasetSpec spec;
        try {
            spec = dataset_spec(cfg.get("dataset"));
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
        auto ds = load_dataset_tensor(cfg.get("dataset_path"), spec);
        full = std::move(ds.tensor);
        intrinsic_gaps = !ds.missing.empty();
        std::size_t m = 0;
        for (std::size_t f = 0; f < full.size(); ++f) {
            if (m < ds.missing.size() && ds.missing[m] == f) {
                ++m;
                continue;
            }
            present.push_back(f);
        }
    } else {
        full = generate_truth(cfg);
        if (cfg.has("tucker_rank")) tucker_ranks = size_list(cfg, "tucker_rank");
        if (cfg.has("tt_rank")) tt_ranks = size_list(cfg, "tt_rank");
    }
    if (present.empty()) {
        present.resize(full.size());
        for (std::size_t f = 0; f < full.size(); ++f) present[f] = f;
    }
    if (cfg.has("tucker_metric_ranks")) tucker_ranks = size_list(cfg, "tucker_metric_ranks");
    if (cfg.has("tt_metric_ranks")) tt_ranks = size_list(cfg, "tt_metric_ranks");

    const std::size_t count = cfg.has("observed") ? size_value(cfg, "observed") : present.size();
    if (count < 1 || count > present.size()) {
        throw UsageError("observed = " + std::to_string(count) + " outside 1.." + std::to_string(present.size()));
    }
    const std::uint64_t mask_seed = cfg.has("mask_seed") ? size_value(cfg, "mask_seed") : seed;
    std::vector<std::size_t> offsets;
    if (count == present.size()) {
        offsets = present;
    } else {
        for (auto k : sample_mask(Shape{present.size()}, count, mask_seed)) offsets.push_back(present[k]);
    }
    Problem p{std::nullopt, ObservationSet::from_tensor(full, offsets), tucker_ranks, tt_ranks};
    if (!intrinsic_gaps) p.truth = std::move(full);
    return p;
}

MetricMap final_metrics(const Tensor& w, const Problem& problem) {
    MetricMap out;
    out["final_loss"] = completion_loss(w, problem.obs);
    out["tucker_nuclear"] = tucker_nuclear_norm(w);
    const auto te = tucker_effective_ranks(w);
    double mean = 0.0;
    for (std::size_t n = 0; n < te.size(); ++n) {
        out["tucker_erank_mode" + std::to_string(n + 1)] = te[n];
        mean += te[n];
    }
    out["tucker_erank_mean"] = mean / static_cast<double>(te.size());
    if (w.order() >= 2) {
        out["tt_nuclear"] = tt_nuclear_norm(w);
        const auto tte = tt_effective_ranks(w);
        mean = 0.0;
        for (std::size_t n = 0; n < tte.size(); ++n) {
            out["tt_erank_mode" + std::to_string(n + 1)] = tte[n];
            mean += tte[n];
        }
        out["tt_erank_mean"] = mean / static_cast<double>(tte.size());
    }
    if (problem.truth) {
        out["recon_error"] = reconstruction_error(w, *problem.truth);
        if (problem.tucker_ranks) out["tucker_metric"] = tucker_metric(w, *problem.truth, *problem.tucker_ranks);
        if (problem.tt_ranks && w.order() >= 2) out["tt_metric"] = tt_metric(w, *problem.truth, *problem.tt_ranks);
    }
    return out;
}

namespace {

TrainConfig train_config(const Config& cfg) {
    TrainConfig tc;
    if (cfg.has("lr")) tc.learning_rate = double_value(cfg, "lr");
    if (cfg.has("loss_tol")) tc.loss_tol = double_value(cfg, "loss_tol");
    if (cfg.has("max_iters")) tc.max_iters = size_value(cfg, "max_iters");
    if (cfg.has("log_every")) tc.log_every = size_value(cfg, "log_every");
    try {
        tc.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    return tc;
}

template <typename Model>
RunRecord finish(TrainResult<Model> res, const Problem& problem) {
    RunRecord rec;
    rec.final_tensor = forward(res.model);
    rec.trajectory = std::move(res.trajectory);
    rec.final_metrics = final_metrics(rec.final_tensor, problem);
    rec.final_metrics["iterations"] = static_cast<double>(res.iterations);
    rec.final_metrics["converged"] = res.converged ? 1.0 : 0.0;
    return rec;
}

}  // namespace

RunRecord run_cell(const Config& cfg, std::uint64_t seed) {
    check_keys(cfg);
    const Method method = method_from_string(cfg.get_or("method", "tucker-uf"));
    const Problem problem = build_problem(cfg, seed);
    const Shape& shape = problem.obs.shape();

    RunRecord rec;
    if (is_uf(method)) {
        const TrainConfig tc = train_config(cfg);
        InitSpec init;
        init.seed = seed;
        if (cfg.has("init_sigma")) init.sigma = double_value(cfg, "init_sigma");
        if (!(init.sigma > 0.0)) throw UsageError("init_sigma must be positive");
        Monitor monitor;
        monitor.ground_truth = problem.truth;
        if (method == Method::tucker_uf) {
            monitor.metric_ranks = problem.tucker_ranks;
            const auto depth = config_depth(cfg, shape.order());
            rec = finish(train(tucker_uf_init(shape, depth, init), problem.obs, tc, monitor), problem);
        } else {
            if (shape.order() < 2) throw UsageError("tt-uf needs an order >= 2 tensor");
            monitor.metric_ranks = problem.tt_ranks;
            rec = finish(train(tt_uf_init(shape, init), problem.obs, tc, monitor), problem);
        }
    } else {
        CompletionResult res;
        SpectrumKind kind = SpectrumKind::tucker;
        const std::vector<std::size_t>* metric_ranks = nullptr;
        const std::size_t max_iters = cfg.has("baseline_max_iters") ? size_value(cfg, "baseline_max_iters") : 1000;
        if (method == Method::halrtc) {
            HalrtcOptions o;
            o.max_iters = max_iters;
            if (cfg.has("baseline_tol")) o.tol = double_value(cfg, "baseline_tol");
            res = halrtc(problem.obs, o);
            if (problem.tucker_ranks) metric_ranks = &*problem.tucker_ranks;
        } else if (method == Method::tt_silrtc) {
            if (shape.order() < 2) throw UsageError("tt-silrtc needs an order >= 2 tensor");
            TtSilrtcOptions o;
            o.max_iters = max_iters;
            if (cfg.has("baseline_tol")) o.tol = double_value(cfg, "baseline_tol");
            res = tt_silrtc(problem.obs, o);
            kind = SpectrumKind::tt;
            if (problem.tt_ranks) metric_ranks = &*problem.tt_ranks;
        } else {
            if (!cfg.has("rank")) throw UsageError("hooi needs rank");
            const auto ranks = size_list(cfg, "rank");
            if (ranks.size() != shape.order()) throw UsageError("rank needs one entry per mode");
            for (std::size_t n = 0; n < ranks.size(); ++n) {
                if (ranks[n] < 1 || ranks[n] > shape[n]) throw UsageError("rank entry out of range");
            }
            HooiCompleteOptions o;
            o.outer_iters = max_iters;
            if (cfg.has("baseline_tol")) o.tol = double_value(cfg, "baseline_tol");
            res = hooi_complete(problem.obs, ranks, o);
            if (problem.tucker_ranks) metric_ranks = &*problem.tucker_ranks;
        }
        rec.final_tensor = res.estimate;
        const Tensor* truth = problem.truth ? &*problem.truth : nullptr;
        rec.trajectory.kind = kind;
        rec.trajectory.rows.push_back(observe(res.estimate, kind, res.iterations,
                                              completion_loss(res.estimate, problem.obs), truth,
                                              truth ? metric_ranks : nullptr));
        rec.final_metrics = final_metrics(res.estimate, problem);
        rec.final_metrics["iterations"] = static_cast<double>(res.iterations);
        rec.final_metrics["converged"] = res.converged ? 1.0 : 0.0;
        if (!res.objective.empty()) rec.final_metrics["objective"] = res.objective.back();
    }
    rec.seed = seed;
    rec.config = cfg;
    rec.config.set("method", to_string(method));
    rec.config.set("seeds", std::to_string(seed));
    for (const char* k : {"out", "methods", "depths", "workers"}) rec.config.erase(k);
    return rec;
}

}  // namespace tclab::cli
