#pragma once

#include "tclab/observations.hpp"
#include "tclab/tensor.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace tclab {

/// Gaussian initialisation: every parameter entry ~ N(0, sigma^2).
struct InitSpec {
    double sigma = 0.05;
    std::uint64_t seed = 1;
};

/// Deep Tucker unconstrained factorisation
///   W = D x_1 (V^(1)_1 ... V^(1)_{k_1}) x_2 ... x_N (V^(N)_1 ... V^(N)_{k_N}).
/// Every V^(n)_i is square I_n x I_n; k_n = 0 leaves mode n untouched.
struct TuckerUF {
    Tensor core;
    std::vector<std::vector<Matrix>> factors;

    [[nodiscard]] const Shape& shape() const noexcept { return core.shape(); }
    [[nodiscard]] std::vector<std::size_t> depth() const;
    [[nodiscard]] std::size_t parameter_count() const;
};

struct TuckerGradient {
    Tensor core;
    std::vector<std::vector<Matrix>> factors;
};

[[nodiscard]] TuckerUF tucker_uf_init(const Shape& shape, std::span<const std::size_t> depth,
                                      const InitSpec& init);
[[nodiscard]] Tensor tucker_uf_forward(const TuckerUF& m);

/// Gradient of the completion loss given the densified residual R = W - M on Omega
/// (zero elsewhere):
///   dD     = R x_1 A_1^T ... x_N A_N^T,              A_n = V^(n)_1 ... V^(n)_{k_n}
///   dA_n   = R_(n) (D x_{m != n} A_m)_(n)^T
///   dV^(n)_i = (V_1 ... V_{i-1})^T dA_n (V_{i+1} ... V_k)^T
[[nodiscard]] TuckerGradient tucker_uf_grad(const TuckerUF& m, const Tensor& residual);

/// Tensor-train unconstrained factorisation W_{i_1..i_N} = W_1[i_1] ... W_N[i_N] with
/// the maximal ranks R_n = min(I_1..I_n, I_{n+1}..I_N).
struct TTUF {
    std::vector<Tensor> cores;

    [[nodiscard]] Shape shape() const;
    [[nodiscard]] std::vector<std::size_t> ranks() const;
    [[nodiscard]] std::size_t parameter_count() const;
};

struct TTGradient {
    std::vector<Tensor> cores;
};

[[nodiscard]] TTUF tt_uf_init(const Shape& shape, const InitSpec& init);
[[nodiscard]] Tensor tt_uf_forward(const TTUF& m);

/// Accumulates, for every observed (i_1..i_N) with residual r, the term
/// r * L^T R^T into dW_n[i_n], where L = W_1[i_1]..W_{n-1}[i_{n-1}] and
/// R = W_{n+1}[i_{n+1}]..W_N[i_N].
[[nodiscard]] TTGradient tt_uf_grad(const TTUF& m, const ObservationSet& obs,
                                    std::span<const double> residuals);

/// Same gradient from the densified residual, using left/right interface matrices.
/// Cheaper than the per-observation sum once Omega is a sizeable fraction of the tensor.
[[nodiscard]] TTGradient tt_uf_grad_dense(const TTUF& m, const Tensor& residual);

/// One evaluation of the completion loss, the composed tensor and the gradient.
template <typename Gradient>
struct Evaluation {
    double loss = 0.0;
    Tensor composed;
    Gradient gradient;
};

[[nodiscard]] Evaluation<TuckerGradient> evaluate(const TuckerUF& m, const ObservationSet& obs);
[[nodiscard]] Evaluation<TTGradient> evaluate(const TTUF& m, const ObservationSet& obs);

/// theta <- theta - step * gradient.
void apply_step(TuckerUF& m, const TuckerGradient& g, double step);
void apply_step(TTUF& m, const TTGradient& g, double step);

[[nodiscard]] inline Tensor forward(const TuckerUF& m) { return tucker_uf_forward(m); }
[[nodiscard]] inline Tensor forward(const TTUF& m) { return tt_uf_forward(m); }

}  // namespace tclab
