#pragma once

#include "tclab/observations.hpp"
#include "tclab/tensor.hpp"
#include "tclab/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tclab {

// ---- generators -----------------------------------------------------------

/// Gaussian core of size `ranks` multiplied along every mode by an I_n x R_n
/// matrix with orthonormal columns (QR of a Gaussian draw).
[[nodiscard]] Tensor gen_low_tucker_rank(const Shape& shape, std::span<const std::size_t> ranks, std::uint64_t seed);

/// Composition of Gaussian TT cores. Core k has entries N(0, 1/I_k) so that the
/// expected squared norm equals the product of the interior ranks.
[[nodiscard]] Tensor gen_low_tt_rank(const Shape& shape, std::span<const std::size_t> tt_ranks, std::uint64_t seed);

/// `count` distinct flat offsets drawn uniformly without replacement, sorted.
[[nodiscard]] std::vector<std::size_t> sample_mask(const Shape& shape, std::size_t count, std::uint64_t seed);

// ---- tensor files ---------------------------------------------------------

enum class TensorFormat { binary, text };

/// Binary: "TNSR1", u32 order, u64 dims, little-endian f64 payload.
/// Text: order, dims, then one value per line at round-trip precision.
void write_tensor(const std::filesystem::path& path, const Tensor& t, TensorFormat format = TensorFormat::binary);
/// Detects the flavor from the leading bytes.
[[nodiscard]] Tensor read_tensor(const std::filesystem::path& path);

/// Coordinate CSV with header i1,...,iN,value and 1-based indices.
void write_coordinate_csv(const std::filesystem::path& path, const Tensor& t,
                          std::optional<std::span<const std::size_t>> offsets = std::nullopt);

struct DatasetSpec {
    std::string name;
    Shape shape;
    /// Mode whose slices are z-scored independently (0-based).
    std::optional<std::size_t> zscore_mode;
};

/// Built-in specs: "ccds" (138x17x125) and "meteo-uk" (492x5x16, z-scored per variable).
[[nodiscard]] DatasetSpec dataset_spec(const std::string& name);

struct Dataset {
    Tensor tensor;
    /// Flat offsets of cells absent from the source, sorted. Those cells hold 0.
    std::vector<std::size_t> missing;

    /// Observation set over the present cells.
    [[nodiscard]] ObservationSet observed() const;
};

/// Reads a coordinate CSV or a tensor file and checks it against the spec.
[[nodiscard]] Dataset load_dataset_tensor(const std::filesystem::path& path, const DatasetSpec& spec);

/// Per-slice standardisation along `mode` over the listed-present cells.
void zscore_slices(Tensor& t, std::size_t mode, std::span<const std::size_t> missing = {});

// ---- flat key-value config ------------------------------------------------

/// `key = value` lines, '#' comments, list values separated by commas.
class Config {
public:
    Config() = default;

    static Config parse(const std::string& text);
    static Config load(const std::filesystem::path& path);

    [[nodiscard]] std::string dump() const;
    void save(const std::filesystem::path& path) const;

    [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    void erase(const std::string& key) { values_.erase(key); }
    /// Adds every key of `other`, replacing existing ones.
    void merge(const Config& other);

    [[nodiscard]] std::string get(const std::string& key) const;
    [[nodiscard]] std::string get_or(const std::string& key, const std::string& fallback) const;
    [[nodiscard]] double get_double(const std::string& key) const;
    [[nodiscard]] std::size_t get_size(const std::string& key) const;
    [[nodiscard]] std::vector<std::string> get_list(const std::string& key) const;
    [[nodiscard]] std::vector<std::size_t> get_size_list(const std::string& key) const;

    [[nodiscard]] const std::map<std::string, std::string>& entries() const noexcept { return values_; }

    friend bool operator==(const Config&, const Config&) = default;

private:
    std::map<std::string, std::string> values_;
};

[[nodiscard]] std::vector<std::size_t> parse_size_list(const std::string& s);
[[nodiscard]] std::vector<std::string> split_list(const std::string& s);
[[nodiscard]] std::string join_sizes(std::span<const std::size_t> v);
/// Shortest decimal form that parses back to the same double.
[[nodiscard]] std::string format_double(double x);

// ---- run persistence ------------------------------------------------------

inline constexpr int kRunSchemaVersion = 1;

struct RunRecord {
    Config config;
    std::uint64_t seed = 0;
    Trajectory trajectory;
    MetricMap final_metrics;
    Tensor final_tensor;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Writes config.txt, trajectory.csv, final_metrics.csv and final_tensor.bin into dir.
void persist_run(const RunRecord& record, const std::filesystem::path& dir);
/// Throws SchemaError on missing files, malformed content or a schema version mismatch.
[[nodiscard]] RunRecord load_run(const std::filesystem::path& dir);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
[[nodiscard]] Trajectory read_trajectory_csv(std::istream& in, SpectrumKind kind);

}  // namespace tclab
