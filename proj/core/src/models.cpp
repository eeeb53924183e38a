#include "tclab/models.hpp"

#include "tclab/decompositions.hpp"
#include "tclab/error.hpp"
#include "tclab/random.hpp"

#include <optional>

namespace tclab {

namespace {

using ConstRowMap = Eigen::Map<const RowMatrix>;
using RowMap = Eigen::Map<RowMatrix>;

std::optional<Matrix> chain_product(const std::vector<Matrix>& chain) {
    if (chain.empty()) return std::nullopt;
    Matrix a = chain.front();
    for (std::size_t i = 1; i < chain.size(); ++i) a = a * chain[i];
    return a;
}

// partials[n] = D x_1 A_1 ... x_{n} A_{n} (0-based: modes < n applied); partials[N] = W.
std::vector<Tensor> forward_partials(const TuckerUF& m, const std::vector<std::optional<Matrix>>& a) {
    std::vector<Tensor> partials;
    partials.reserve(a.size() + 1);
    partials.push_back(m.core);
    for (std::size_t n = 0; n < a.size(); ++n) {
        partials.push_back(a[n] ? mode_n_product(partials.back(), n, *a[n]) : partials.back());
    }
    return partials;
}

std::vector<std::optional<Matrix>> mode_matrices(const TuckerUF& m) {
    std::vector<std::optional<Matrix>> a;
    a.reserve(m.factors.size());
    for (const auto& chain : m.factors) a.push_back(chain_product(chain));
    return a;
}

TuckerGradient backward(const TuckerUF& m, const std::vector<std::optional<Matrix>>& a,
                        const std::vector<Tensor>& partials, Tensor residual) {
    const std::size_t N = a.size();
    TuckerGradient g;
    g.factors.resize(N);
    Tensor b = std::move(residual);
    for (std::size_t n = N; n-- > 0;) {
        if (!a[n]) continue;
        const Matrix ga = contract_except(b, partials[n], n);
        b = mode_n_product_transposed(b, n, *a[n]);

        const auto& chain = m.factors[n];
        const std::size_t k = chain.size();
        const auto dim = static_cast<Eigen::Index>(m.core.dim(n));
        // suffix[i] = V_{i+1} ... V_k
        std::vector<Matrix> suffix(k, Matrix::Identity(dim, dim));
        for (std::size_t i = k - 1; i-- > 0;) suffix[i] = chain[i + 1] * suffix[i + 1];
        Matrix prefix = Matrix::Identity(dim, dim);
        g.factors[n].reserve(k);
        for (std::size_t i = 0; i < k; ++i) {
            g.factors[n].push_back(prefix.transpose() * ga * suffix[i].transpose());
            prefix = prefix * chain[i];
        }
    }
    g.core = std::move(b);
    return g;
}

void check_depth(const Shape& shape, std::span<const std::size_t> depth) {
    if (depth.size() != shape.order()) {
        throw DimensionError("depth has " + std::to_string(depth.size()) + " entries for an order-" +
                             std::to_string(shape.order()) + " tensor");
    }
}

void check_sigma(const InitSpec& init) {
    if (!(init.sigma > 0.0)) throw DomainError("init sigma must be positive");
}

// Slice W_n[i] of a core (R0 x I x R1) as a strided R0 x R1 view.
using SliceMap = Eigen::Map<const RowMatrix, 0, Eigen::OuterStride<>>;
SliceMap core_slice(const Tensor& core, std::size_t i) {
    const auto r0 = static_cast<Eigen::Index>(core.dim(0));
    const auto r1 = static_cast<Eigen::Index>(core.dim(2));
    return SliceMap(core.data() + i * core.dim(2), r0, r1,
                    Eigen::OuterStride<>(static_cast<Eigen::Index>(core.dim(1) * core.dim(2))));
}

}  // namespace

std::vector<std::size_t> TuckerUF::depth() const {
    std::vector<std::size_t> d;
    for (const auto& chain : factors) d.push_back(chain.size());
    return d;
}

std::size_t TuckerUF::parameter_count() const {
    std::size_t count = core.size();
    for (const auto& chain : factors)
        for (const auto& v : chain) count += static_cast<std::size_t>(v.size());
    return count;
}

TuckerUF tucker_uf_init(const Shape& shape, std::span<const std::size_t> depth, const InitSpec& init) {
    check_depth(shape, depth);
    check_sigma(init);
    Rng rng(init.seed);
    TuckerUF m;
    m.core = rng.gaussian(shape, init.sigma);
    m.factors.resize(shape.order());
    for (std::size_t n = 0; n < shape.order(); ++n) {
        for (std::size_t i = 0; i < depth[n]; ++i) {
            m.factors[n].push_back(rng.gaussian(shape[n], shape[n], init.sigma));
        }
    }
    return m;
}

Tensor tucker_uf_forward(const TuckerUF& m) {
    Tensor w = m.core;
    for (std::size_t n = 0; n < m.factors.size(); ++n) {
        if (auto a = chain_product(m.factors[n])) w = mode_n_product(w, n, *a);
    }
    return w;
}

TuckerGradient tucker_uf_grad(const TuckerUF& m, const Tensor& residual) {
    if (residual.shape() != m.shape()) throw DimensionError("tucker_uf_grad: residual shape mismatch");
    const auto a = mode_matrices(m);
    return backward(m, a, forward_partials(m, a), residual);
}

Evaluation<TuckerGradient> evaluate(const TuckerUF& m, const ObservationSet& obs) {
    if (obs.shape() != m.shape()) throw DimensionError("evaluate: observation shape mismatch");
    const auto a = mode_matrices(m);
    auto partials = forward_partials(m, a);
    Evaluation<TuckerGradient> e;
    e.composed = partials.back();
    e.loss = completion_loss(e.composed, obs);
    e.gradient = backward(m, a, partials, obs.residual(e.composed));
    return e;
}

void apply_step(TuckerUF& m, const TuckerGradient& g, double step) {
    auto core = m.core.values();
    const auto gc = g.core.values();
    for (std::size_t k = 0; k < core.size(); ++k) core[k] -= step * gc[k];
    for (std::size_t n = 0; n < m.factors.size(); ++n)
        for (std::size_t i = 0; i < m.factors[n].size(); ++i) m.factors[n][i] -= step * g.factors[n][i];
}

Shape TTUF::shape() const {
    std::vector<std::size_t> dims;
    for (const auto& c : cores) dims.push_back(c.dim(1));
    return Shape(std::move(dims));
}

std::vector<std::size_t> TTUF::ranks() const {
    std::vector<std::size_t> r{1};
    for (const auto& c : cores) r.push_back(c.dim(2));
    return r;
}

std::size_t TTUF::parameter_count() const {
    std::size_t count = 0;
    for (const auto& c : cores) count += c.size();
    return count;
}

TTUF tt_uf_init(const Shape& shape, const InitSpec& init) {
    if (shape.order() == 0) throw DimensionError("tt_uf_init: order-0 shape");
    check_sigma(init);
    const auto r = tt_max_ranks(shape);
    Rng rng(init.seed);
    TTUF m;
    for (std::size_t n = 0; n < shape.order(); ++n) {
        m.cores.push_back(rng.gaussian(Shape{r[n], shape[n], r[n + 1]}, init.sigma));
    }
    return m;
}

Tensor tt_uf_forward(const TTUF& m) { return tt_compose(m.cores); }

TTGradient tt_uf_grad(const TTUF& m, const ObservationSet& obs, std::span<const double> residuals) {
    if (residuals.size() != obs.size()) throw DimensionError("tt_uf_grad: one residual per observation");
    if (obs.shape() != m.shape()) throw DimensionError("tt_uf_grad: observation shape mismatch");
    const std::size_t N = m.cores.size();
    TTGradient g;
    for (const auto& c : m.cores) g.cores.emplace_back(c.shape());

    std::vector<Eigen::RowVectorXd> left(N + 1);
    std::vector<Vector> right(N + 1);
    for (std::size_t k = 0; k < obs.size(); ++k) {
        const auto idx = obs.index(k);
        left[0] = Eigen::RowVectorXd::Ones(1);
        for (std::size_t n = 0; n < N; ++n) left[n + 1] = left[n] * core_slice(m.cores[n], idx[n]);
        right[N] = Vector::Ones(1);
        for (std::size_t n = N; n-- > 0;) right[n] = core_slice(m.cores[n], idx[n]) * right[n + 1];

        const double r = residuals[k];
        for (std::size_t n = 0; n < N; ++n) {
            auto& gc = g.cores[n];
            const auto r0 = static_cast<Eigen::Index>(gc.dim(0));
            const auto r1 = static_cast<Eigen::Index>(gc.dim(2));
            Eigen::Map<RowMatrix, 0, Eigen::OuterStride<>> slice(
                gc.data() + idx[n] * gc.dim(2), r0, r1,
                Eigen::OuterStride<>(static_cast<Eigen::Index>(gc.dim(1) * gc.dim(2))));
            slice.noalias() += r * left[n].transpose() * right[n + 1].transpose();
        }
    }
    return g;
}

namespace {

// left[n]: (I_1..I_{n}) x R_n interface, left[0] = [1].
std::vector<RowMatrix> left_interfaces(const TTUF& m) {
    std::vector<RowMatrix> left{RowMatrix::Ones(1, 1)};
    for (const auto& c : m.cores) {
        const auto r0 = static_cast<Eigen::Index>(c.dim(0));
        const auto i = static_cast<Eigen::Index>(c.dim(1));
        const auto r1 = static_cast<Eigen::Index>(c.dim(2));
        const RowMatrix next = left.back() * ConstRowMap(c.data(), r0, i * r1);
        left.push_back(Eigen::Map<const RowMatrix>(next.data(), left.back().rows() * i, r1));
    }
    return left;
}

// right[n]: R_n x (I_{n+1}..I_N) interface, right[N] = [1].
std::vector<RowMatrix> right_interfaces(const TTUF& m) {
    const std::size_t N = m.cores.size();
    std::vector<RowMatrix> right(N + 1);
    right[N] = RowMatrix::Ones(1, 1);
    for (std::size_t n = N; n-- > 0;) {
        const auto& c = m.cores[n];
        const auto r0 = static_cast<Eigen::Index>(c.dim(0));
        const auto dim = static_cast<Eigen::Index>(c.dim(1));
        const auto suffix = right[n + 1].cols();
        RowMatrix out(r0, dim * suffix);
        for (Eigen::Index i = 0; i < dim; ++i) {
            out.middleCols(i * suffix, suffix).noalias() =
                core_slice(c, static_cast<std::size_t>(i)) * right[n + 1];
        }
        right[n] = std::move(out);
    }
    return right;
}

TTGradient dense_gradient(const TTUF& m, const Tensor& residual, const std::vector<RowMatrix>& left) {
    const auto right = right_interfaces(m);
    TTGradient g;
    for (std::size_t n = 0; n < m.cores.size(); ++n) {
        const auto& c = m.cores[n];
        Tensor gc(c.shape());
        const auto prefix = left[n].rows();
        const auto dim = static_cast<Eigen::Index>(c.dim(1));
        const auto suffix = right[n + 1].cols();
        const auto r1 = static_cast<Eigen::Index>(c.dim(2));
        // residual viewed as (prefix, I_n, suffix)
        for (Eigen::Index i = 0; i < dim; ++i) {
            Eigen::Map<const RowMatrix, 0, Eigen::OuterStride<>> block(
                residual.data() + i * suffix, prefix, suffix, Eigen::OuterStride<>(dim * suffix));
            Eigen::Map<RowMatrix, 0, Eigen::OuterStride<>> out(
                gc.data() + i * r1, static_cast<Eigen::Index>(c.dim(0)), r1, Eigen::OuterStride<>(dim * r1));
            out.noalias() = left[n].transpose() * (block * right[n + 1].transpose());
        }
        g.cores.push_back(std::move(gc));
    }
    return g;
}

}  // namespace

TTGradient tt_uf_grad_dense(const TTUF& m, const Tensor& residual) {
    if (residual.shape() != m.shape()) throw DimensionError("tt_uf_grad_dense: residual shape mismatch");
    return dense_gradient(m, residual, left_interfaces(m));
}

Evaluation<TTGradient> evaluate(const TTUF& m, const ObservationSet& obs) {
    if (obs.shape() != m.shape()) throw DimensionError("evaluate: observation shape mismatch");
    const auto left = left_interfaces(m);
    Evaluation<TTGradient> e;
    const auto& full = left.back();
    e.composed = Tensor(m.shape(), std::vector<double>(full.data(), full.data() + full.size()));
    e.loss = completion_loss(e.composed, obs);
    e.gradient = dense_gradient(m, obs.residual(e.composed), left);
    return e;
}

void apply_step(TTUF& m, const TTGradient& g, double step) {
    for (std::size_t n = 0; n < m.cores.size(); ++n) {
        auto c = m.cores[n].values();
        const auto gc = g.cores[n].values();
        for (std::size_t k = 0; k < c.size(); ++k) c[k] -= step * gc[k];
    }
}

}  // namespace tclab
