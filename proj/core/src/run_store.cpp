#include "tclab/data_io.hpp"

#include "tclab/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace tclab {

namespace {

constexpr const char* kTrajectoryHeader = "step,loss,recon_error,metric_kind,mode,index,value";

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

template <typename T>
T parse_number(std::string_view s, std::size_t lineno) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw SchemaError("trajectory.csv line " + std::to_string(lineno) + ": bad number '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

std::ifstream require(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw SchemaError("run directory is missing " + path.filename().string());
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot read " + path.string());
    return in;
}

}  // namespace

// Long format, one value per line. Scalar metrics use mode = index = 0; per-mode
// quantities use 1-based mode and index.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << kTrajectoryHeader << '\n';
    const std::string metric_kind = traj.kind == SpectrumKind::tucker ? "tucker_metric" : "tt_metric";
    for (const auto& row : traj.rows) {
        const std::string prefix = std::to_string(row.step) + "," + format_double(row.loss) + "," + opt(row.recon_error) + ",";
        for (std::size_t n = 0; n < row.sigmas.size(); ++n) {
            for (Eigen::Index i = 0; i < row.sigmas[n].size(); ++i) {
                out << prefix << "sigma," << n + 1 << ',' << i + 1 << ',' << format_double(row.sigmas[n][i]) << '\n';
            }
        }
        for (std::size_t n = 0; n < row.eranks.size(); ++n) {
            out << prefix << "erank," << n + 1 << ",0," << format_double(row.eranks[n]) << '\n';
        }
        out << prefix << "nuclear,0,0," << format_double(row.nuclear) << '\n';
        if (row.low_rank_metric) out << prefix << metric_kind << ",0,0," << format_double(*row.low_rank_metric) << '\n';
    }
}

Trajectory read_trajectory_csv(std::istream& in, SpectrumKind kind) {
    Trajectory traj;
    traj.kind = kind;
    std::string line;
    if (!std::getline(in, line) || line != kTrajectoryHeader) throw SchemaError("trajectory.csv: bad header");
    std::vector<std::vector<double>> sig;
    auto flush = [&](TrajectoryRow& row) {
        for (const auto& s : sig) row.sigmas.push_back(Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size())));
        sig.clear();
        traj.rows.push_back(std::move(row));
    };
    std::optional<TrajectoryRow> current;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = fields(line);
        if (f.size() != 7) throw SchemaError("trajectory.csv line " + std::to_string(lineno) + ": expected 7 fields");
        const auto step = parse_number<std::size_t>(f[0], lineno);
        if (!current || current->step != step) {
            if (current) {
                if (step <= current->step) throw SchemaError("trajectory.csv: steps not increasing");
                flush(*current);
            }
            current.emplace();
            current->step = step;
            current->loss = parse_number<double>(f[1], lineno);
            if (!f[2].empty()) current->recon_error = parse_number<double>(f[2], lineno);
        }
        const auto mode = parse_number<std::size_t>(f[4], lineno);
        const auto index = parse_number<std::size_t>(f[5], lineno);
        const auto value = parse_number<double>(f[6], lineno);
        if (f[3] == "sigma") {
            if (mode == 0 || index == 0) throw SchemaError("trajectory.csv: sigma rows need mode and index");
            if (sig.size() < mode) sig.resize(mode);
            if (sig[mode - 1].size() != index - 1) throw SchemaError("trajectory.csv: sigma rows out of order");
            sig[mode - 1].push_back(value);
        } else if (f[3] == "erank") {
            if (current->eranks.size() != mode - 1) throw SchemaError("trajectory.csv: erank rows out of order");
            current->eranks.push_back(value);
        } else if (f[3] == "nuclear") {
            current->nuclear = value;
        } else if (f[3] == "tucker_metric" || f[3] == "tt_metric") {
            current->low_rank_metric = value;
        } else {
            throw SchemaError("trajectory.csv: unknown metric_kind '" + std::string(f[3]) + "'");
        }
    }
    if (current) flush(*current);
    return traj;
}

void persist_run(const RunRecord& record, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    Config cfg = record.config;
    cfg.set("run.schema_version", std::to_string(kRunSchemaVersion));
    cfg.set("run.seed", std::to_string(record.seed));
    cfg.set("run.spectrum", to_string(record.trajectory.kind));
    cfg.save(dir / "config.txt");
    {
        std::ofstream out(dir / "trajectory.csv");
        write_trajectory_csv(out, record.trajectory);
        if (!out) throw std::runtime_error("write failed: " + (dir / "trajectory.csv").string());
    }
    {
        std::ofstream out(dir / "final_metrics.csv");
        out << "metric,value\n";
        for (const auto& [k, v] : record.final_metrics) out << k << ',' << format_double(v) << '\n';
        if (!out) throw std::runtime_error("write failed: " + (dir / "final_metrics.csv").string());
    }
    write_tensor(dir / "final_tensor.bin", record.final_tensor);
}

RunRecord load_run(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw SchemaError("not a run directory: " + dir.string());
    RunRecord rec;
    require(dir / "config.txt");
    rec.config = Config::load(dir / "config.txt");
    const auto version = rec.config.get_or("run.schema_version", "");
    if (version != std::to_string(kRunSchemaVersion)) {
        throw SchemaError("run schema version '" + version + "', expected " + std::to_string(kRunSchemaVersion));
    }
    rec.seed = rec.config.get_size("run.seed");
    const auto kind = spectrum_kind_from_string(rec.config.get("run.spectrum"));
    for (const char* k : {"run.schema_version", "run.seed", "run.spectrum"}) rec.config.erase(k);

    auto traj_in = require(dir / "trajectory.csv");
    rec.trajectory = read_trajectory_csv(traj_in, kind);

    auto metrics_in = require(dir / "final_metrics.csv");
    std::string line;
    if (!std::getline(metrics_in, line) || line != "metric,value") throw SchemaError("final_metrics.csv: bad header");
    std::size_t lineno = 1;
    while (std::getline(metrics_in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos) throw SchemaError("final_metrics.csv: malformed line");
        rec.final_metrics[line.substr(0, comma)] = parse_number<double>(std::string_view(line).substr(comma + 1), lineno);
    }
    require(dir / "final_tensor.bin");
    rec.final_tensor = read_tensor(dir / "final_tensor.bin");
    return rec;
}

}  // namespace tclab
