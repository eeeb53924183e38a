#include "tclab/dynamics.hpp"

#include "tclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tclab {

std::vector<SeriesPoint> differentiate(std::span<const double> t, std::span<const double> values) {
    if (t.size() != values.size()) throw DimensionError("differentiate: length mismatch");
    const std::size_t n = t.size();
    if (n < 3) throw DomainError("differentiate: need at least 3 samples, got " + std::to_string(n));
    for (std::size_t k = 1; k < n; ++k) {
        if (!(t[k] > t[k - 1])) throw DomainError("differentiate: sample times must increase strictly");
    }
    std::vector<SeriesPoint> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k].t = t[k];
        out[k].value = values[k];
    }
    out[0].derivative = (values[1] - values[0]) / (t[1] - t[0]);
    out[n - 1].derivative = (values[n - 1] - values[n - 2]) / (t[n - 1] - t[n - 2]);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double h0 = t[k] - t[k - 1];
        const double h1 = t[k + 1] - t[k];
        // exact for quadratics on uneven grids
        // written over differences so a flat stretch gives exactly zero
        out[k].derivative = (h0 * h0 * (values[k + 1] - values[k]) + h1 * h1 * (values[k] - values[k - 1])) /
                            (h0 * h1 * (h0 + h1));
    }
    return out;
}

std::vector<SeriesPoint> differentiate_trajectory(const Trajectory& traj, std::size_t mode, std::size_t index) {
    std::vector<double> t;
    std::vector<double> v;
    for (const auto& row : traj.rows) {
        if (mode >= row.sigmas.size()) throw DimensionError("differentiate_trajectory: mode out of range");
        const auto& s = row.sigmas[mode];
        if (index >= static_cast<std::size_t>(s.size())) {
            throw DimensionError("differentiate_trajectory: index out of range");
        }
        t.push_back(static_cast<double>(row.step));
        v.push_back(s[static_cast<Eigen::Index>(index)]);
    }
    return differentiate(t, v);
}

DynamicsCloud dynamics_points(const Trajectory& traj, const CloudSelection& selection) {
    DynamicsCloud cloud;
    if (traj.rows.empty()) return cloud;
    for (const auto& row : traj.rows) {
        if (!row.recon_error) throw DomainError("dynamics_points: trajectory lacks reconstruction errors");
    }
    const std::size_t modes = traj.rows.front().sigmas.size();
    std::vector<std::size_t> mode_list;
    if (selection.modes) {
        mode_list = *selection.modes;
    } else {
        for (std::size_t n = 0; n < modes; ++n) mode_list.push_back(n);
    }
    for (auto n : mode_list) {
        if (n >= modes) throw DimensionError("dynamics_points: mode " + std::to_string(n + 1) + " out of range");
        const auto count = static_cast<std::size_t>(traj.rows.front().sigmas[n].size());
        const std::size_t top = selection.top == 0 ? count : std::min(selection.top, count);
        for (std::size_t i = 0; i < top; ++i) {
            const auto series = differentiate_trajectory(traj, n, i);
            for (std::size_t k = 0; k < series.size(); ++k) {
                const double gamma = *traj.rows[k].recon_error;
                const auto& p = series[k];
                if (!(p.value > 0.0) || !(p.derivative > 0.0) || !(gamma > 0.0)) {
                    ++cloud.excluded;
                    continue;
                }
                cloud.points.push_back(
                    {std::log(p.value), std::log(p.derivative) - std::log(gamma), n, i, traj.rows[k].step});
            }
        }
    }
    return cloud;
}

Window default_window(std::span<const DynamicsPoint> points, double trim) {
    if (points.empty()) throw DomainError("default_window: no points");
    auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                        [](const auto& a, const auto& b) { return a.ln_sigma < b.ln_sigma; });
    const double span = hi->ln_sigma - lo->ln_sigma;
    return {lo->ln_sigma + trim * span, hi->ln_sigma - trim * span};
}

SlopeFit fit_dynamics_slope(std::span<const DynamicsPoint> points, std::optional<Window> window) {
    const Window w = window.value_or(Window{-std::numeric_limits<double>::infinity(),
                                            std::numeric_limits<double>::infinity()});
    double sx = 0.0, sy = 0.0;
    std::size_t n = 0;
    for (const auto& p : points) {
        if (p.ln_sigma < w.lo || p.ln_sigma > w.hi) continue;
        sx += p.ln_sigma;
        sy += p.ln_rate;
        ++n;
    }
    if (n < 2) throw DomainError("fit_dynamics_slope: " + std::to_string(n) + " point(s) in window, need 2");
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : points) {
        if (p.ln_sigma < w.lo || p.ln_sigma > w.hi) continue;
        const double dx = p.ln_sigma - mx;
        const double dy = p.ln_rate - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 1e-300)) throw DomainError("fit_dynamics_slope: degenerate window (ln sigma constant)");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.used = n;
    return fit;
}

DepthReport depth_sweep_report(std::span<const LabelledRuns> groups, const CloudSelection& selection, double trim) {
    std::vector<DynamicsCloud> clouds;
    std::vector<DynamicsPoint> pooled;
    for (const auto& group : groups) {
        DynamicsCloud cloud;
        for (const auto& traj : group.runs) {
            auto c = dynamics_points(traj, selection);
            cloud.points.insert(cloud.points.end(), c.points.begin(), c.points.end());
            cloud.excluded += c.excluded;
        }
        pooled.insert(pooled.end(), cloud.points.begin(), cloud.points.end());
        clouds.push_back(std::move(cloud));
    }
    if (pooled.empty()) throw DomainError("depth_sweep_report: no usable dynamics points");
    DepthReport report;
    report.window = default_window(pooled, trim);
    for (std::size_t k = 0; k < groups.size(); ++k) {
        DepthSlope row;
        row.label = groups[k].label;
        row.points = clouds[k].points.size();
        row.excluded = clouds[k].excluded;
        row.fit = fit_dynamics_slope(clouds[k].points, report.window);
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace tclab
