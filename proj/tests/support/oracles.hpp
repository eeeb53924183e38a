// Independent reference implementations for the unit and acceptance tests.
// Everything here is written with explicit index loops and never calls the
// library routine it is used to check.
#pragma once

#include "tclab/random.hpp"
#include "tclab/tensor.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using tclab::Matrix;
using tclab::MultiIndex;
using tclab::Shape;
using tclab::Tensor;

inline std::size_t flat(const Shape& s, const MultiIndex& idx) {
    std::size_t f = 0;
    for (std::size_t n = 0; n < s.order(); ++n) f = f * s[n] + idx[n];
    return f;
}

inline MultiIndex unflat(const Shape& s, std::size_t f) {
    MultiIndex idx(s.order());
    for (std::size_t n = s.order(); n-- > 0;) {
        idx[n] = f % s[n];
        f /= s[n];
    }
    return idx;
}

/// Column of entry idx in the mode-n unfolding: modes n+1..N, 1..n-1 read
/// left to right, rightmost fastest.
inline std::size_t tucker_column(const Shape& s, const MultiIndex& idx, std::size_t n) {
    std::size_t col = 0;
    const std::size_t N = s.order();
    for (std::size_t k = 1; k < N; ++k) {
        const std::size_t m = (n + k) % N;
        col = col * s[m] + idx[m];
    }
    return col;
}

inline Matrix unfold(const Tensor& t, std::size_t n) {
    const Shape& s = t.shape();
    Matrix m(static_cast<Eigen::Index>(s[n]), static_cast<Eigen::Index>(s.size() / s[n]));
    for (std::size_t f = 0; f < s.size(); ++f) {
        const auto idx = unflat(s, f);
        m(static_cast<Eigen::Index>(idx[n]), static_cast<Eigen::Index>(tucker_column(s, idx, n))) = t[f];
    }
    return m;
}

inline Matrix tt_unfold(const Tensor& t, std::size_t row_modes) {
    const Shape& s = t.shape();
    std::size_t rows = 1;
    for (std::size_t n = 0; n < row_modes; ++n) rows *= s[n];
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(s.size() / rows));
    for (std::size_t f = 0; f < s.size(); ++f) {
        const auto idx = unflat(s, f);
        std::size_t r = 0, c = 0;
        for (std::size_t n = 0; n < s.order(); ++n) {
            if (n < row_modes) r = r * s[n] + idx[n];
            else c = c * s[n] + idx[n];
        }
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t[f];
    }
    return m;
}

/// (T x_n U)_{..j..} = sum_i T_{..i..} U_{j i}
inline Tensor mode_product(const Tensor& t, std::size_t n, const Matrix& u) {
    auto dims = t.shape().dims();
    dims[n] = static_cast<std::size_t>(u.rows());
    Tensor out{Shape(dims)};
    for (std::size_t f = 0; f < out.size(); ++f) {
        auto idx = unflat(out.shape(), f);
        const std::size_t j = idx[n];
        double acc = 0.0;
        for (std::size_t i = 0; i < t.dim(n); ++i) {
            idx[n] = i;
            acc += t[flat(t.shape(), idx)] * u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
        }
        out[f] = acc;
    }
    return out;
}

/// Entry-by-entry TT contraction: W_{i_1..i_N} = G_1[i_1] ... G_N[i_N].
inline Tensor tt_contract(const std::vector<Tensor>& cores) {
    std::vector<std::size_t> dims;
    for (const auto& c : cores) dims.push_back(c.dim(1));
    Tensor out{Shape(dims)};
    for (std::size_t f = 0; f < out.size(); ++f) {
        const auto idx = unflat(out.shape(), f);
        Matrix acc = Matrix::Identity(1, 1);
        for (std::size_t k = 0; k < cores.size(); ++k) {
            const auto& c = cores[k];
            Matrix slice(static_cast<Eigen::Index>(c.dim(0)), static_cast<Eigen::Index>(c.dim(2)));
            for (std::size_t a = 0; a < c.dim(0); ++a)
                for (std::size_t b = 0; b < c.dim(2); ++b) slice(a, b) = c.at({a, idx[k], b});
            acc = acc * slice;
        }
        out[f] = acc(0, 0);
    }
    return out;
}

inline Tensor random_tensor(tclab::Rng& rng, const Shape& s) { return rng.gaussian(s); }

inline double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

/// Relative deviation ||g_fd - g|| / ||g|| between an analytic gradient block and
/// central differences of f, perturbing each parameter in place.
inline double fd_check(std::span<double> params, std::span<const double> analytic, const std::function<double()>& f,
                       double h = 1e-4) {
    double diff = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double keep = params[k];
        params[k] = keep + h;
        const double up = f();
        params[k] = keep - h;
        const double down = f();
        params[k] = keep;
        const double numeric = (up - down) / (2.0 * h);
        diff += (numeric - analytic[k]) * (numeric - analytic[k]);
        norm += analytic[k] * analytic[k];
    }
    return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-300);
}

inline std::span<double> as_span(Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
inline std::span<const double> as_span(const Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }

}  // namespace oracle
