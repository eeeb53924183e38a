#pragma once

#include "tclab/observations.hpp"
#include "tclab/tensor.hpp"

#include <optional>
#include <vector>

namespace tclab {

/// How unobserved entries are filled before the first iteration.
enum class MissingInit { zeros, observed_mean };

struct CompletionResult {
    Tensor estimate;
    /// Per iteration: weighted nuclear norm of the projected iterate (HALRTC, TT-SILRTC)
    /// or the fit error on Omega before re-projection (HOOI imputation).
    std::vector<double> objective;
    std::size_t iterations = 0;
    /// False when the iteration cap was hit before the stopping rule fired.
    bool converged = false;
};

struct HalrtcOptions {
    std::optional<std::vector<double>> alphas;  // uniform 1/N by default
    double rho = 1e-2;
    double rho_growth = 1.05;
    double rho_max = 1e6;
    std::size_t max_iters = 1000;
    double tol = 1e-6;
    MissingInit init = MissingInit::zeros;
};

/// ADMM on min sum_n alpha_n ||X_(n)||_* s.t. X = M on Omega, with one auxiliary
/// tensor and one multiplier per mode. The returned tensor matches obs exactly on Omega.
[[nodiscard]] CompletionResult halrtc(const ObservationSet& obs, const HalrtcOptions& options = {});

struct TtSilrtcOptions {
    std::optional<std::vector<double>> alphas;  // uniform 1/(N-1) by default
    std::optional<std::vector<double>> betas;   // 0.1 each by default
    std::size_t max_iters = 1000;
    double tol = 1e-6;
    MissingInit init = MissingInit::zeros;
};

/// Block coordinate descent on
///   sum_n alpha_n ||M_n||_* + beta_n / 2 ||M_n - X_[n]||_F^2,  X = M on Omega,
/// over the TT unfoldings n = 1..N-1.
[[nodiscard]] CompletionResult tt_silrtc(const ObservationSet& obs, const TtSilrtcOptions& options = {});

struct HooiCompleteOptions {
    std::size_t outer_iters = 200;
    std::size_t inner_sweeps = 2;
    double tol = 1e-7;
    MissingInit init = MissingInit::zeros;
};

/// Imputation loop: fill the missing entries with the current estimate, refit a
/// rank-(R_1..R_N) Tucker model by warm-started HOOI, re-impose the observations.
[[nodiscard]] CompletionResult hooi_complete(const ObservationSet& obs, std::span<const std::size_t> ranks,
                                             const HooiCompleteOptions& options = {});

}  // namespace tclab
