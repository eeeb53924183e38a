#include "tclab/cli/commands.hpp"

#include "tclab/cli/experiment.hpp"
#include "tclab/decompositions.hpp"
#include "tclab/dynamics.hpp"
#include "tclab/linalg.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;

namespace tclab::cli {

namespace {

/// A flag that, when given, overrides one config key.
struct Override {
    const char* flag;
    const char* key;
    const char* help;
};

void add_overrides(CLI::App* app, std::span<const Override> table, std::map<std::string, std::string>& sink) {
    for (const auto& o : table) app->add_option(o.flag, sink[o.key], o.help);
}

Config resolve_config(const std::string& config_path, const std::map<std::string, std::string>& flags,
                      CLI::App* app, std::span<const Override> table) {
    Config cfg;
    if (!config_path.empty()) {
        if (!fs::exists(config_path)) throw UsageError("config file not found: " + config_path);
        cfg = Config::load(config_path);
    }
    for (const auto& o : table) {
        const std::string name = std::string(o.flag).substr(0, std::string(o.flag).find(','));
        if (app->count(name) > 0) cfg.set(o.key, flags.at(o.key));
    }
    check_keys(cfg);
    return cfg;
}

std::vector<std::uint64_t> config_seeds(const Config& cfg) {
    if (!cfg.has("seeds")) return {1, 2, 3};
    std::vector<std::uint64_t> out;
    try {
        for (auto s : cfg.get_size_list("seeds")) out.push_back(s);
    } catch (const SchemaError& e) {
        throw UsageError(e.what());
    }
    if (out.empty()) throw UsageError("seeds is empty");
    return out;
}

void write_summary(const fs::path& path, const std::vector<MetricMap>& runs) {
    const auto mean = multi_seed_average(runs);
    std::ofstream out(path);
    out << "metric,mean\n";
    for (const auto& [k, v] : mean) out << k << ',' << format_double(v) << '\n';
}

constexpr Override kDataFlags[] = {
    {"--shape", "shape", "Tensor shape, e.g. 30,30,30"},
    {"--tucker-rank", "tucker_rank", "Synthetic Tucker rank"},
    {"--tt-rank", "tt_rank", "Synthetic TT rank (N+1 entries)"},
    {"--data-seed", "data_seed", "Seed of the synthetic ground truth"},
    {"--tensor", "tensor", "Ground-truth tensor file"},
    {"--dataset", "dataset", "Built-in dataset spec: ccds or meteo-uk"},
    {"--dataset-path", "dataset_path", "Coordinate CSV or tensor file for --dataset"},
    {"--observed", "observed", "Number of observed entries"},
    {"--mask-seed", "mask_seed", "Mask seed (default: the run seed)"},
    {"--seeds", "seeds", "Run seeds, e.g. 1,2,3"},
    {"--out", "out", "Output directory"},
    {"--tucker-metric-ranks", "tucker_metric_ranks", "Ranks for the Tucker metric"},
    {"--tt-metric-ranks", "tt_metric_ranks", "Ranks for the TT metric"},
};

constexpr Override kTrainFlags[] = {
    {"--model", "method", "tucker or tt"},
    {"--depth", "depth", "Tucker UF depth per mode, e.g. 2,2,2"},
    {"--init-sigma", "init_sigma", "Standard deviation of the initial parameters"},
    {"--lr", "lr", "Learning rate"},
    {"--loss-tol", "loss_tol", "Stop once the loss falls below this"},
    {"--max-iters", "max_iters", "Iteration cap"},
    {"--log-every", "log_every", "Trajectory logging stride"},
};

constexpr Override kBaselineFlags[] = {
    {"--method", "method", "halrtc, tt-silrtc or hooi"},
    {"--rank", "rank", "Tucker rank for hooi"},
    {"--max-iters", "baseline_max_iters", "Iteration cap"},
    {"--tol", "baseline_tol", "Stopping tolerance"},
};

std::vector<Override> concat(std::span<const Override> a, std::span<const Override> b) {
    std::vector<Override> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

fs::path out_dir(const Config& cfg, const char* fallback) { return cfg.get_or("out", fallback); }

// ---- gen ----------------------------------------------------------------------

int cmd_gen(const Config& cfg, const std::string& format) {
    if (!cfg.has("shape")) throw UsageError("gen needs --shape");
    const Tensor t = generate_truth(cfg);
    const fs::path out = cfg.get_or("out", "tensor.bin");
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    if (format != "binary" && format != "text") throw UsageError("--format must be binary or text");
    write_tensor(out, t, format == "binary" ? TensorFormat::binary : TensorFormat::text);

    Config manifest;
    manifest.set("shape", cfg.get("shape"));
    manifest.set("data_seed", cfg.get_or("data_seed", "1"));
    manifest.set("format", format);
    manifest.set("frobenius_norm", format_double(frobenius_norm(t)));
    std::vector<std::size_t> numerical;
    if (cfg.has("tucker_rank")) {
        manifest.set("tucker_rank", cfg.get("tucker_rank"));
        for (const auto& s : tucker_mode_sigmas(t)) numerical.push_back(numerical_rank(s));
        manifest.set("numerical_tucker_rank", join_sizes(numerical));
    } else {
        manifest.set("tt_rank", cfg.get("tt_rank"));
        numerical.push_back(1);
        for (const auto& s : tt_svd(t).mode_sigmas) numerical.push_back(numerical_rank(s));
        numerical.push_back(1);
        manifest.set("numerical_tt_rank", join_sizes(numerical));
    }
    manifest.save(out.string() + ".manifest");
    std::cout << "wrote " << out.string() << " shape " << t.shape().to_string() << " numerical rank "
              << join_sizes(numerical) << '\n';
    return kOk;
}

// ---- train / baseline -------------------------------------------------------------

int run_seeds(Config cfg, const char* fallback_out) {
    const auto seeds = config_seeds(cfg);
    const fs::path root = out_dir(cfg, fallback_out);
    std::vector<MetricMap> metrics;
    for (auto seed : seeds) {
        const RunRecord rec = run_cell(cfg, seed);
        const fs::path dir = seeds.size() == 1 && cfg.has("run.seed") ? root : root / ("seed-" + std::to_string(seed));
        persist_run(rec, dir);
        metrics.push_back(rec.final_metrics);
        std::cout << cfg.get_or("method", "tucker-uf") << " seed " << seed << ": iterations "
                  << rec.final_metrics.at("iterations") << ", final loss " << rec.final_metrics.at("final_loss");
        if (rec.final_metrics.count("recon_error")) std::cout << ", recon error " << rec.final_metrics.at("recon_error");
        std::cout << "  -> " << dir.string() << '\n';
    }
    fs::create_directories(root);
    write_summary(root / "summary.csv", metrics);
    return kOk;
}

int cmd_train(Config cfg) {
    const std::string model = cfg.get_or("method", "tucker-uf");
    if (model == "tucker") cfg.set("method", "tucker-uf");
    else if (model == "tt") cfg.set("method", "tt-uf");
    else if (!is_uf(method_from_string(model))) throw UsageError("train runs UF models; use baseline for " + model);
    return run_seeds(std::move(cfg), "run");
}

int cmd_baseline(Config cfg) {
    if (!cfg.has("method")) throw UsageError("baseline needs --method");
    if (is_uf(method_from_string(cfg.get("method")))) throw UsageError("use train for UF models");
    return run_seeds(std::move(cfg), "baseline");
}

// ---- sweep --------------------------------------------------------------------

struct Cell {
    std::string method;
    std::string depth;  // empty unless tucker-uf
    std::size_t observed = 0;
    std::uint64_t seed = 0;

    [[nodiscard]] std::string dir_name() const {
        std::string d = depth;
        std::replace(d.begin(), d.end(), ',', '-');
        return method + (d.empty() ? "" : "_d" + d) + "/n" + std::to_string(observed) + "/seed-" + std::to_string(seed);
    }
    auto key() const { return std::tie(method, depth, observed, seed); }
};

std::vector<Cell> sweep_cells(const Config& cfg) {
    if (!cfg.has("methods")) throw UsageError("sweep config needs methods");
    if (!cfg.has("observed")) throw UsageError("sweep config needs observed");
    std::vector<std::string> depths;
    if (cfg.has("depths")) {
        for (auto d : cfg.get_list("depths")) {
            std::replace(d.begin(), d.end(), ':', ',');
            depths.push_back(d);
        }
    } else {
        depths.push_back(cfg.get_or("depth", ""));
    }
    std::vector<Cell> cells;
    for (const auto& m : cfg.get_list("methods")) {
        const Method method = method_from_string(m);
        for (auto n : cfg.get_size_list("observed")) {
            for (auto seed : config_seeds(cfg)) {
                if (method == Method::tucker_uf) {
                    for (const auto& d : depths) cells.push_back({m, d, n, seed});
                } else {
                    cells.push_back({m, "", n, seed});
                }
            }
        }
    }
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.key() < b.key(); });
    return cells;
}

int cmd_sweep(const Config& cfg, std::size_t workers, bool resume) {
    const fs::path root = out_dir(cfg, "sweep");
    const auto cells = sweep_cells(cfg);
    if (workers < 1) throw UsageError("--workers must be >= 1");
    std::vector<std::optional<MetricMap>> results(cells.size());
    std::vector<std::string> errors(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;

    auto work = [&] {
        for (;;) {
            const std::size_t k = next++;
            if (k >= cells.size()) return;
            const Cell& c = cells[k];
            const fs::path dir = root / "cells" / c.dir_name();
            try {
                if (resume && fs::exists(dir / "final_tensor.bin")) {
                    results[k] = load_run(dir).final_metrics;
                    std::lock_guard lock(log_mutex);
                    std::cout << "skip " << c.dir_name() << " (complete)\n";
                    continue;
                }
                Config cell = cfg;
                cell.set("method", c.method);
                cell.set("observed", std::to_string(c.observed));
                if (!c.depth.empty()) cell.set("depth", c.depth);
                const RunRecord rec = run_cell(cell, c.seed);
                persist_run(rec, dir);
                results[k] = rec.final_metrics;
                std::lock_guard lock(log_mutex);
                std::cout << "done " << c.dir_name() << '\n';
            } catch (const std::exception& e) {
                errors[k] = e.what();
                std::lock_guard lock(log_mutex);
                std::cerr << "FAILED " << c.dir_name() << ": " << e.what() << '\n';
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w + 1 < std::min(workers, cells.size()); ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    fs::create_directories(root);
    {
        std::ofstream out(root / "sweep.csv");
        out << "method,depth,mask_size,seed,metric,value\n";
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (!results[k]) continue;
            const Cell& c = cells[k];
            std::string depth = c.depth;
            std::replace(depth.begin(), depth.end(), ',', ':');
            for (const auto& [metric, value] : *results[k]) {
                out << c.method << ',' << depth << ',' << c.observed << ',' << c.seed << ',' << metric << ','
                    << format_double(value) << '\n';
            }
        }
    }
    std::size_t failed = 0;
    {
        std::ofstream out(root / "failures.csv");
        out << "method,depth,mask_size,seed,error\n";
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (errors[k].empty()) continue;
            ++failed;
            std::string msg = errors[k];
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            std::string depth = cells[k].depth;
            std::replace(depth.begin(), depth.end(), ',', ':');
            out << cells[k].method << ',' << depth << ',' << cells[k].observed << ',' << cells[k].seed << ',' << msg
                << '\n';
        }
    }
    std::cout << cells.size() - failed << "/" << cells.size() << " cells complete -> " << (root / "sweep.csv").string()
              << '\n';
    return failed == 0 ? kOk : kPartialSweep;
}

// ---- analyze ------------------------------------------------------------------

int cmd_analyze(const std::vector<std::string>& inputs, const fs::path& out, double trim, std::size_t top,
                const std::string& modes) {
    std::map<std::string, LabelledRuns> groups;
    for (const auto& in : inputs) {
        const auto dirs = find_run_dirs(in);
        if (dirs.empty()) throw SchemaError("no run directories under " + in);
        for (const auto& dir : dirs) {
            RunRecord rec = load_run(dir);
            const std::string label = rec.config.get_or("depth", rec.config.get_or("method", dir.string()));
            auto& g = groups[label];
            g.label = label;
            g.runs.push_back(std::move(rec.trajectory));
        }
    }
    CloudSelection sel;
    sel.top = top;
    if (!modes.empty()) {
        std::vector<std::size_t> m;
        for (auto v : parse_size_list(modes)) {
            if (v < 1) throw UsageError("--modes are 1-based");
            m.push_back(v - 1);
        }
        sel.modes = m;
    }
    std::vector<LabelledRuns> list;
    for (auto& [label, g] : groups) list.push_back(std::move(g));
    const DepthReport report = depth_sweep_report(list, sel, trim);

    fs::create_directories(out);
    {
        std::ofstream f(out / "slopes.csv");
        f << "label,slope,intercept,r2,points_used,points,excluded,window_lo,window_hi\n";
        for (const auto& r : report.rows) {
            f << '"' << r.label << "\"," << format_double(r.fit.slope) << ',' << format_double(r.fit.intercept) << ','
              << format_double(r.fit.r2) << ',' << r.fit.used << ',' << r.points << ',' << r.excluded << ','
              << format_double(report.window.lo) << ',' << format_double(report.window.hi) << '\n';
            std::cout << "depth " << r.label << ": slope " << r.fit.slope << " (r2 " << r.fit.r2 << ", "
                      << r.fit.used << " points, " << r.excluded << " excluded)\n";
        }
    }
    {
        std::ofstream f(out / "points.csv");
        f << "label,run,mode,index,step,ln_sigma,ln_sigma_dot_minus_ln_gamma\n";
        for (const auto& g : list) {
            for (std::size_t r = 0; r < g.runs.size(); ++r) {
                for (const auto& p : dynamics_points(g.runs[r], sel).points) {
                    f << '"' << g.label << "\"," << r + 1 << ',' << p.mode + 1 << ',' << p.index + 1 << ','
                      << p.step << ',' << format_double(p.ln_sigma) << ',' << format_double(p.ln_rate) << '\n';
                }
            }
        }
    }
    return kOk;
}

}  // namespace

std::vector<fs::path> find_run_dirs(const fs::path& root) {
    std::vector<fs::path> out;
    if (!fs::is_directory(root)) return out;
    if (fs::exists(root / "config.txt") && fs::exists(root / "trajectory.csv")) return {root};
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_directory() && fs::exists(entry.path() / "trajectory.csv")) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Tensor completion with unconstrained factorizations"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    std::map<std::string, std::string> flags;
    std::string config_path;

    auto* gen = app.add_subcommand("gen", "Generate a synthetic low-rank tensor");
    std::string format = "binary";
    add_overrides(gen, std::span(kDataFlags).first(4), flags);
    gen->add_option("--out", flags["out"], "Output tensor file");
    gen->add_option("--format", format, "binary or text")->check(CLI::IsMember({"binary", "text"}));
    gen->add_option("--config", config_path, "Config file");
    const std::vector<Override> gen_table = {kDataFlags[0], kDataFlags[1], kDataFlags[2], kDataFlags[3],
                                             {"--out", "out", ""}};

    const auto train_table = concat(kDataFlags, kTrainFlags);
    auto* train_cmd = app.add_subcommand("train", "Train Tucker or TT unconstrained factorizations");
    add_overrides(train_cmd, train_table, flags);
    train_cmd->add_option("--config", config_path, "Config file (flags override it)");

    const auto baseline_table = concat(kDataFlags, kBaselineFlags);
    auto* base_cmd = app.add_subcommand("baseline", "Run HALRTC, TT-SILRTC or HOOI completion");
    add_overrides(base_cmd, baseline_table, flags);
    base_cmd->add_option("--config", config_path, "Config file (flags override it)");

    auto* sweep_cmd = app.add_subcommand("sweep", "Run a grid of methods x mask sizes x seeds");
    std::size_t workers = 1;
    bool resume = false;
    const Override sweep_flags[] = {{"--out", "out", "Output directory"},
                                    {"--methods", "methods", "Methods to run"},
                                    {"--observed", "observed", "Mask sizes"},
                                    {"--seeds", "seeds", "Seeds"},
                                    {"--max-iters", "max_iters", "UF iteration cap"}};
    sweep_cmd->add_option("--config", config_path, "Grid config file")->required();
    add_overrides(sweep_cmd, sweep_flags, flags);
    sweep_cmd->add_option("--workers", workers, "Cells run in parallel")->check(CLI::PositiveNumber);
    sweep_cmd->add_flag("--resume", resume, "Skip cells whose run directory is complete");

    auto* analyze_cmd = app.add_subcommand("analyze", "Fit singular value dynamics slopes per depth");
    std::vector<std::string> inputs;
    std::string analyze_out = "analysis";
    double trim = 0.1;
    std::size_t top = 0;
    std::string modes;
    analyze_cmd->add_option("runs", inputs, "Run directories (searched recursively)")->required();
    analyze_cmd->add_option("--out", analyze_out, "Output directory");
    analyze_cmd->add_option("--trim", trim, "Fraction of the ln sigma range trimmed at each end")
        ->check(CLI::Range(0.0, 0.49));
    analyze_cmd->add_option("--top", top, "Leading singular values per mode (0 = all)");
    analyze_cmd->add_option("--modes", modes, "1-based modes to include (default all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen(resolve_config(config_path, flags, gen, gen_table), format);
        if (train_cmd->parsed()) return cmd_train(resolve_config(config_path, flags, train_cmd, train_table));
        if (base_cmd->parsed()) return cmd_baseline(resolve_config(config_path, flags, base_cmd, baseline_table));
        if (sweep_cmd->parsed()) return cmd_sweep(resolve_config(config_path, flags, sweep_cmd, sweep_flags), workers, resume);
        if (analyze_cmd->parsed()) return cmd_analyze(inputs, analyze_out, trim, top, modes);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const DivergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << " (last finite loss " << e.last_finite_loss() << ")\n";
        return kNumerical;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const DimensionError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("tclab");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace tclab::cli
