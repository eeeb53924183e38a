#include "tclab/decompositions.hpp"

#include "tclab/error.hpp"
#include "tclab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tclab {

namespace {

using ConstRowMap = Eigen::Map<const RowMatrix>;

void check_tucker_ranks(const Shape& shape, std::span<const std::size_t> ranks, const char* what) {
    if (ranks.size() != shape.order()) {
        throw DomainError(std::string(what) + ": expected " + std::to_string(shape.order()) +
                          " ranks, got " + std::to_string(ranks.size()));
    }
    for (std::size_t n = 0; n < ranks.size(); ++n) {
        if (ranks[n] < 1 || ranks[n] > shape[n]) {
            throw DomainError(std::string(what) + ": rank " + std::to_string(ranks[n]) +
                              " on mode " + std::to_string(n + 1) + " outside 1.." +
                              std::to_string(shape[n]));
        }
    }
}

// Leading block core[:R_1, ..., :R_N].
Tensor leading_block(const Tensor& t, std::span<const std::size_t> ranks) {
    Tensor out{Shape(std::vector<std::size_t>(ranks.begin(), ranks.end()))};
    MultiIndex idx(ranks.size(), 0);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = t.at(idx);
        for (std::size_t n = ranks.size(); n-- > 0;) {
            if (++idx[n] < ranks[n]) break;
            idx[n] = 0;
        }
    }
    return out;
}

Tensor multiply_all(Tensor t, std::span<const Matrix> factors) {
    for (std::size_t n = 0; n < factors.size(); ++n) t = mode_n_product(t, n, factors[n]);
    return t;
}

Tensor project_all(Tensor t, std::span<const Matrix> factors, std::size_t skip) {
    for (std::size_t n = 0; n < factors.size(); ++n) {
        if (n != skip) t = mode_n_product_transposed(t, n, factors[n]);
    }
    return t;
}

}  // namespace

Tensor TuckerDecomposition::reconstruct() const { return multiply_all(core, factors); }

Tensor HosvdResult::reconstruct() const { return multiply_all(core, factors); }

Vector subtensor_norms(const Tensor& t, std::size_t mode) {
    if (mode >= t.order()) throw DimensionError("subtensor_norms: mode out of range");
    const std::size_t prefix = t.shape().span_size(0, mode);
    const std::size_t dim = t.dim(mode);
    const std::size_t suffix = t.shape().span_size(mode + 1, t.order());
    Vector sq = Vector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t p = 0; p < prefix; ++p) {
        for (std::size_t i = 0; i < dim; ++i) {
            const double* row = t.data() + (p * dim + i) * suffix;
            double acc = 0.0;
            for (std::size_t q = 0; q < suffix; ++q) acc += row[q] * row[q];
            sq[static_cast<Eigen::Index>(i)] += acc;
        }
    }
    return sq.cwiseSqrt();
}

HosvdResult hosvd(const Tensor& t) {
    HosvdResult h;
    h.factors.reserve(t.order());
    for (std::size_t n = 0; n < t.order(); ++n) {
        h.factors.push_back(svd_full_left(mode_n_unfold(t, n)).u);
    }
    h.core = project_all(t, h.factors, t.order());
    for (std::size_t n = 0; n < t.order(); ++n) h.mode_sigmas.push_back(subtensor_norms(h.core, n));
    return h;
}

std::vector<Vector> tucker_mode_sigmas(const Tensor& t) {
    std::vector<Vector> out;
    out.reserve(t.order());
    for (std::size_t n = 0; n < t.order(); ++n) {
        Vector s = Vector::Zero(static_cast<Eigen::Index>(t.dim(n)));
        const Vector sv = singular_values(mode_n_unfold(t, n));
        s.head(sv.size()) = sv;
        out.push_back(std::move(s));
    }
    return out;
}

TuckerDecomposition tucker_truncate_factors(const HosvdResult& h, std::span<const std::size_t> ranks) {
    check_tucker_ranks(h.core.shape(), ranks, "tucker_truncate");
    TuckerDecomposition d;
    d.core = leading_block(h.core, ranks);
    for (std::size_t n = 0; n < ranks.size(); ++n) {
        d.factors.push_back(h.factors[n].leftCols(static_cast<Eigen::Index>(ranks[n])));
    }
    return d;
}

Tensor tucker_truncate(const HosvdResult& h, std::span<const std::size_t> ranks) {
    return tucker_truncate_factors(h, ranks).reconstruct();
}

HooiResult hooi(const Tensor& t, std::span<const std::size_t> ranks, const HooiOptions& options) {
    check_tucker_ranks(t.shape(), ranks, "hooi");
    if (options.max_iters < 1) throw DomainError("hooi: max_iters must be >= 1");

    HooiResult result;
    auto& d = result.decomposition;
    if (options.initial_factors.empty()) {
        d = tucker_truncate_factors(hosvd(t), ranks);
    } else {
        if (options.initial_factors.size() != t.order()) throw DomainError("hooi: one initial factor per mode");
        for (std::size_t n = 0; n < t.order(); ++n) {
            const auto& u = options.initial_factors[n];
            if (static_cast<std::size_t>(u.rows()) != t.dim(n) || static_cast<std::size_t>(u.cols()) != ranks[n]) {
                throw DimensionError("hooi: initial factor " + std::to_string(n + 1) + " has wrong shape");
            }
        }
        d.factors = options.initial_factors;
        d.core = project_all(t, d.factors, t.order());
    }
    const double scale = std::max(frobenius_norm(t), std::numeric_limits<double>::min());
    result.fit_errors.push_back(frobenius_norm(t - d.reconstruct()));

    for (std::size_t sweep = 0; sweep < options.max_iters; ++sweep) {
        for (std::size_t n = 0; n < t.order(); ++n) {
            const Tensor y = project_all(t, d.factors, n);
            d.factors[n] = svd_full_left(mode_n_unfold(y, n)).u.leftCols(static_cast<Eigen::Index>(ranks[n]));
        }
        d.core = project_all(t, d.factors, t.order());
        const double fit = frobenius_norm(t - d.reconstruct());
        const double prev = result.fit_errors.back();
        result.fit_errors.push_back(fit);
        result.sweeps = sweep + 1;
        if (fit <= 1e-14 * scale || std::abs(prev - fit) <= options.tol * std::max(prev, 1e-300)) break;
    }
    return result;
}

std::vector<std::size_t> TTResult::ranks() const {
    std::vector<std::size_t> r{1};
    for (const auto& c : cores) r.push_back(c.dim(2));
    return r;
}

std::vector<std::size_t> tt_max_ranks(const Shape& shape) {
    const std::size_t N = shape.order();
    std::vector<std::size_t> r(N + 1, 1);
    for (std::size_t n = 1; n < N; ++n) {
        r[n] = std::min(shape.span_size(0, n), shape.span_size(n, N));
    }
    return r;
}

void validate_tt_ranks(const Shape& shape, std::span<const std::size_t> ranks) {
    const std::size_t N = shape.order();
    if (ranks.size() != N + 1) {
        throw DomainError("TT rank tuple needs " + std::to_string(N + 1) + " entries, got " +
                          std::to_string(ranks.size()));
    }
    if (ranks.front() != 1 || ranks.back() != 1) {
        throw DomainError("TT rank tuple must start and end with 1");
    }
    const auto bound = tt_max_ranks(shape);
    for (std::size_t n = 1; n < N; ++n) {
        if (ranks[n] < 1 || ranks[n] > bound[n]) {
            throw DomainError("TT rank R_" + std::to_string(n) + " = " + std::to_string(ranks[n]) +
                              " outside 1.." + std::to_string(bound[n]));
        }
        if (ranks[n] > ranks[n - 1] * shape[n - 1]) {
            throw DomainError("TT rank R_" + std::to_string(n) + " = " + std::to_string(ranks[n]) +
                              " exceeds R_" + std::to_string(n - 1) + " * I_" + std::to_string(n));
        }
    }
}

TTResult tt_svd(const Tensor& t, std::optional<std::vector<std::size_t>> ranks) {
    const std::size_t N = t.order();
    if (N == 0) throw DimensionError("tt_svd: order-0 tensor");
    if (ranks) validate_tt_ranks(t.shape(), *ranks);

    TTResult result;
    RowMatrix carried = ConstRowMap(t.data(), 1, static_cast<Eigen::Index>(t.size()));
    std::size_t r_prev = 1;
    for (std::size_t n = 0; n + 1 < N; ++n) {
        const auto rows = static_cast<Eigen::Index>(r_prev * t.dim(n));
        const auto cols = carried.size() / rows;
        const RowMatrix c = Eigen::Map<const RowMatrix>(carried.data(), rows, cols);
        const auto f = svd(c);
        const auto r = ranks ? static_cast<Eigen::Index>((*ranks)[n + 1]) : std::min(rows, cols);

        Tensor core{Shape{r_prev, t.dim(n), static_cast<std::size_t>(r)}};
        Eigen::Map<RowMatrix>(core.data(), rows, r) = f.u.leftCols(r);
        result.cores.push_back(std::move(core));
        result.mode_sigmas.push_back(f.s.head(r));

        carried = f.s.head(r).asDiagonal() * f.vt.topRows(r);
        r_prev = static_cast<std::size_t>(r);
    }
    Tensor last{Shape{r_prev, t.dim(N - 1), 1}};
    std::copy(carried.data(), carried.data() + carried.size(), last.data());
    result.cores.push_back(std::move(last));
    return result;
}

Tensor tt_compose(std::span<const Tensor> cores) {
    if (cores.empty()) throw DimensionError("tt_compose: no cores");
    std::vector<std::size_t> dims;
    std::size_t r_prev = 1;
    for (std::size_t k = 0; k < cores.size(); ++k) {
        const auto& c = cores[k];
        if (c.order() != 3 || c.dim(0) != r_prev) {
            throw DimensionError("tt_compose: core " + std::to_string(k + 1) + " has shape " +
                                 c.shape().to_string() + ", expected leading rank " +
                                 std::to_string(r_prev));
        }
        dims.push_back(c.dim(1));
        r_prev = c.dim(2);
    }
    if (r_prev != 1) throw DimensionError("tt_compose: last core must have trailing rank 1");

    RowMatrix acc = RowMatrix::Ones(1, 1);
    for (const auto& c : cores) {
        const auto r0 = static_cast<Eigen::Index>(c.dim(0));
        const auto i = static_cast<Eigen::Index>(c.dim(1));
        const auto r1 = static_cast<Eigen::Index>(c.dim(2));
        const RowMatrix next = acc * ConstRowMap(c.data(), r0, i * r1);
        acc = Eigen::Map<const RowMatrix>(next.data(), acc.rows() * i, r1);
    }
    return Tensor(Shape(std::move(dims)), std::vector<double>(acc.data(), acc.data() + acc.size()));
}

}  // namespace tclab
