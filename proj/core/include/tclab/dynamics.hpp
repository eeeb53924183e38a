#pragma once

#include "tclab/trainer.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tclab {

struct SeriesPoint {
    double t = 0.0;
    double value = 0.0;
    double derivative = 0.0;
};

/// Derivative of a sampled series with possibly uneven gaps: second-order central
/// differences at interior samples, one-sided differences at both ends.
/// Needs at least 3 samples with strictly increasing t.
[[nodiscard]] std::vector<SeriesPoint> differentiate(std::span<const double> t, std::span<const double> values);

/// sigma^n_i(t) from a trajectory (mode and index 0-based), differentiated over steps.
[[nodiscard]] std::vector<SeriesPoint> differentiate_trajectory(const Trajectory& traj, std::size_t mode,
                                                                std::size_t index);

/// One point of the (ln sigma, ln sigma_dot - ln gamma) cloud.
struct DynamicsPoint {
    double ln_sigma = 0.0;
    double ln_rate = 0.0;  // ln sigma_dot - ln gamma
    std::size_t mode = 0;
    std::size_t index = 0;
    std::size_t step = 0;
};

struct DynamicsCloud {
    std::vector<DynamicsPoint> points;
    /// Samples dropped because sigma, sigma_dot or gamma was not positive.
    std::size_t excluded = 0;
};

/// Which singular values feed the cloud.
struct CloudSelection {
    std::optional<std::vector<std::size_t>> modes;  // all modes when empty
    std::size_t top = 0;                            // leading indices per mode; 0 = all
};

/// Builds the cloud from a trajectory that carries reconstruction errors (gamma).
[[nodiscard]] DynamicsCloud dynamics_points(const Trajectory& traj, const CloudSelection& selection = {});

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t used = 0;
};

struct Window {
    double lo = 0.0;
    double hi = 0.0;
};

/// Default window: the observed ln sigma range with the bottom and top `trim` fraction removed.
[[nodiscard]] Window default_window(std::span<const DynamicsPoint> points, double trim = 0.1);

/// Ordinary least squares of ln_rate on ln_sigma over points whose ln_sigma lies in the
/// window. Throws DomainError when fewer than 2 points fall inside or ln_sigma does not vary.
[[nodiscard]] SlopeFit fit_dynamics_slope(std::span<const DynamicsPoint> points, std::optional<Window> window = {});

struct DepthSlope {
    std::string label;
    SlopeFit fit;
    std::size_t points = 0;
    std::size_t excluded = 0;
};

/// Runs sharing a label (typically one depth over several seeds) pool their points.
struct LabelledRuns {
    std::string label;
    std::vector<Trajectory> runs;
};

struct DepthReport {
    Window window;
    std::vector<DepthSlope> rows;
};

/// One slope per label, all fitted over the window derived from the pooled clouds.
[[nodiscard]] DepthReport depth_sweep_report(std::span<const LabelledRuns> groups, const CloudSelection& selection = {},
                                             double trim = 0.1);

}  // namespace tclab
