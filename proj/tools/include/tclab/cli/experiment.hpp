#pragma once

#include "tclab/data_io.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tclab::cli {

/// Bad flags, bad config values or conflicting options. Maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Method { tucker_uf, tt_uf, halrtc, tt_silrtc, hooi };

[[nodiscard]] Method method_from_string(const std::string& s);
[[nodiscard]] std::string to_string(Method m);
[[nodiscard]] bool is_uf(Method m);

/// Ground truth (when known) and the observation set for one run.
struct Problem {
    std::optional<Tensor> truth;
    ObservationSet obs;
    std::optional<std::vector<std::size_t>> tucker_ranks;
    std::optional<std::vector<std::size_t>> tt_ranks;
};

/// Resolves the data source of a config:
///   tensor = <file>                      ground truth from a tensor file
///   dataset = ccds|meteo-uk, dataset_path   real data with its intrinsic mask
///   shape + tucker_rank | tt_rank, data_seed   synthetic ground truth
/// then samples `observed` entries with mask_seed (default: the run seed).
[[nodiscard]] Problem build_problem(const Config& cfg, std::uint64_t seed);

/// Synthetic ground truth from shape/tucker_rank/tt_rank/data_seed.
[[nodiscard]] Tensor generate_truth(const Config& cfg);

/// Runs one (method, seed) cell described by the config. The record's config is a
/// snapshot that re-runs exactly this cell.
[[nodiscard]] RunRecord run_cell(const Config& cfg, std::uint64_t seed);

/// Final observables of a completed tensor.
[[nodiscard]] MetricMap final_metrics(const Tensor& w, const Problem& problem);

/// Rejects keys no command understands.
void check_keys(const Config& cfg);

/// Depth string of the form "2,2,2" from the config, or the default for the shape.
[[nodiscard]] std::vector<std::size_t> config_depth(const Config& cfg, std::size_t order);

}  // namespace tclab::cli
