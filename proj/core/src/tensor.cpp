#include "tclab/tensor.hpp"

#include "tclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace tclab {

namespace {

using ConstRowMap = Eigen::Map<const RowMatrix>;
using RowMap = Eigen::Map<RowMatrix>;

void check_mode(const Shape& shape, std::size_t mode, const char* what) {
    if (mode >= shape.order()) {
        std::ostringstream msg;
        msg << what << ": mode " << mode + 1 << " out of range for order-" << shape.order()
            << " tensor";
        throw DimensionError(msg.str());
    }
}

// A tensor viewed as (prefix, I_n, suffix) around one mode.
struct ModeView {
    std::size_t prefix;
    std::size_t dim;
    std::size_t suffix;
};

ModeView mode_view(const Shape& shape, std::size_t mode) {
    return {shape.span_size(0, mode), shape[mode], shape.span_size(mode + 1, shape.order())};
}

Shape replace_dim(const Shape& shape, std::size_t mode, std::size_t dim) {
    auto dims = shape.dims();
    dims[mode] = dim;
    return Shape(std::move(dims));
}

}  // namespace

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    for (std::size_t n = 0; n < dims_.size(); ++n) {
        if (dims_[n] == 0) {
            throw DimensionError("dimension " + std::to_string(n + 1) + " of shape is zero");
        }
        if (size_ > std::numeric_limits<std::size_t>::max() / dims_[n]) {
            throw DimensionError("shape element count overflows");
        }
        size_ *= dims_[n];
    }
}

Shape::Shape(std::initializer_list<std::size_t> dims) : Shape(std::vector<std::size_t>(dims)) {}

std::vector<std::size_t> Shape::strides() const {
    std::vector<std::size_t> s(dims_.size(), 1);
    for (std::size_t n = dims_.size(); n-- > 1;) s[n - 1] = s[n] * dims_[n];
    return s;
}

std::size_t Shape::span_size(std::size_t first, std::size_t last) const {
    std::size_t p = 1;
    for (std::size_t n = first; n < last && n < dims_.size(); ++n) p *= dims_[n];
    return p;
}

std::string Shape::to_string() const {
    std::ostringstream out;
    out << '(';
    for (std::size_t n = 0; n < dims_.size(); ++n) out << (n ? "x" : "") << dims_[n];
    out << ')';
    return out.str();
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)), values_(shape_.size(), 0.0) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    if (values_.size() != shape_.size()) {
        throw DimensionError("tensor of shape " + shape_.to_string() + " needs " +
                             std::to_string(shape_.size()) + " values, got " +
                             std::to_string(values_.size()));
    }
}

Tensor Tensor::filled(Shape shape, double value) {
    Tensor t(std::move(shape));
    std::fill(t.values_.begin(), t.values_.end(), value);
    return t;
}

Tensor Tensor::from_matrix(const Eigen::Ref<const Matrix>& m) {
    Tensor t(Shape{static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
    RowMap(t.data(), m.rows(), m.cols()) = m;
    return t;
}

std::size_t Tensor::offset(std::span<const std::size_t> index) const {
    if (index.size() != order()) {
        throw DimensionError("multi-index of length " + std::to_string(index.size()) +
                             " for order-" + std::to_string(order()) + " tensor");
    }
    std::size_t flat = 0;
    for (std::size_t n = 0; n < index.size(); ++n) {
        if (index[n] >= shape_[n]) {
            throw DimensionError("index " + std::to_string(index[n] + 1) + " out of range 1.." +
                                 std::to_string(shape_[n]) + " on mode " + std::to_string(n + 1));
        }
        flat = flat * shape_[n] + index[n];
    }
    return flat;
}

MultiIndex Tensor::unravel(std::size_t flat) const {
    MultiIndex index(order());
    for (std::size_t n = order(); n-- > 0;) {
        index[n] = flat % shape_[n];
        flat /= shape_[n];
    }
    return index;
}

double Tensor::at(std::span<const std::size_t> index) const { return values_[offset(index)]; }
double& Tensor::at(std::span<const std::size_t> index) { return values_[offset(index)]; }
double Tensor::at(std::initializer_list<std::size_t> index) const {
    return at(std::span<const std::size_t>(index.begin(), index.size()));
}

double& Tensor::at(std::initializer_list<std::size_t> index) {
    return at(std::span<const std::size_t>(index.begin(), index.size()));
}

Matrix Tensor::to_matrix() const {
    if (order() != 2) throw DimensionError("to_matrix needs an order-2 tensor");
    return ConstRowMap(data(), static_cast<Eigen::Index>(shape_[0]),
                       static_cast<Eigen::Index>(shape_[1]));
}

bool Tensor::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Tensor& Tensor::operator+=(const Tensor& other) {
    if (shape_ != other.shape_) throw DimensionError("tensor addition: shape mismatch");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
    if (shape_ != other.shape_) throw DimensionError("tensor subtraction: shape mismatch");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return *this;
}

Tensor& Tensor::operator*=(double c) noexcept {
    for (double& v : values_) v *= c;
    return *this;
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator*(double c, Tensor a) { return a *= c; }

double inner_product(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) {
        throw DimensionError("inner_product: shapes " + a.shape().to_string() + " and " +
                             b.shape().to_string() + " differ");
    }
    const auto n = static_cast<Eigen::Index>(a.size());
    return Eigen::Map<const Vector>(a.data(), n).dot(Eigen::Map<const Vector>(b.data(), n));
}

double frobenius_norm(const Tensor& a) {
    return Eigen::Map<const Vector>(a.data(), static_cast<Eigen::Index>(a.size())).norm();
}

Tensor slice(const Tensor& t, std::size_t mode, std::size_t index) {
    check_mode(t.shape(), mode, "slice");
    if (index >= t.dim(mode)) {
        throw DimensionError("slice: index " + std::to_string(index + 1) + " out of range 1.." +
                             std::to_string(t.dim(mode)));
    }
    auto dims = t.shape().dims();
    dims.erase(dims.begin() + static_cast<std::ptrdiff_t>(mode));
    const auto v = mode_view(t.shape(), mode);
    Tensor out{Shape(std::move(dims))};
    for (std::size_t p = 0; p < v.prefix; ++p) {
        const double* src = t.data() + (p * v.dim + index) * v.suffix;
        std::copy(src, src + v.suffix, out.data() + p * v.suffix);
    }
    return out;
}

Tensor outer_product(std::span<const Vector> vectors) {
    if (vectors.empty()) throw DimensionError("outer_product: no vectors");
    std::vector<std::size_t> dims;
    for (const auto& v : vectors) {
        if (v.size() == 0) throw DimensionError("outer_product: empty vector");
        dims.push_back(static_cast<std::size_t>(v.size()));
    }
    std::vector<double> acc(vectors[0].data(), vectors[0].data() + vectors[0].size());
    for (std::size_t n = 1; n < vectors.size(); ++n) {
        const auto& v = vectors[n];
        std::vector<double> next;
        next.reserve(acc.size() * static_cast<std::size_t>(v.size()));
        for (double a : acc) {
            for (Eigen::Index i = 0; i < v.size(); ++i) next.push_back(a * v[i]);
        }
        acc = std::move(next);
    }
    return Tensor(Shape(std::move(dims)), std::move(acc));
}

Matrix mode_n_unfold(const Tensor& t, std::size_t mode) {
    check_mode(t.shape(), mode, "mode_n_unfold");
    const auto v = mode_view(t.shape(), mode);
    // entry (p, i, q) -> row i, column q * prefix + p
    Matrix m(static_cast<Eigen::Index>(v.dim), static_cast<Eigen::Index>(v.prefix * v.suffix));
    for (std::size_t p = 0; p < v.prefix; ++p) {
        for (std::size_t i = 0; i < v.dim; ++i) {
            const double* src = t.data() + (p * v.dim + i) * v.suffix;
            for (std::size_t q = 0; q < v.suffix; ++q) {
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q * v.prefix + p)) = src[q];
            }
        }
    }
    return m;
}

Tensor mode_n_fold(const Eigen::Ref<const Matrix>& m, std::size_t mode, const Shape& shape) {
    check_mode(shape, mode, "mode_n_fold");
    const auto v = mode_view(shape, mode);
    if (static_cast<std::size_t>(m.rows()) != v.dim ||
        static_cast<std::size_t>(m.cols()) != v.prefix * v.suffix) {
        throw DimensionError("mode_n_fold: matrix does not match shape " + shape.to_string());
    }
    Tensor t(shape);
    for (std::size_t p = 0; p < v.prefix; ++p) {
        for (std::size_t i = 0; i < v.dim; ++i) {
            double* dst = t.data() + (p * v.dim + i) * v.suffix;
            for (std::size_t q = 0; q < v.suffix; ++q) {
                dst[q] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q * v.prefix + p));
            }
        }
    }
    return t;
}

Matrix tt_unfold(const Tensor& t, std::size_t row_modes) {
    if (row_modes < 1 || row_modes >= t.order()) {
        throw DimensionError("tt_unfold: mode " + std::to_string(row_modes) +
                             " outside 1.." + std::to_string(t.order() == 0 ? 0 : t.order() - 1));
    }
    const auto rows = static_cast<Eigen::Index>(t.shape().span_size(0, row_modes));
    const auto cols = static_cast<Eigen::Index>(t.size()) / rows;
    return ConstRowMap(t.data(), rows, cols);
}

Tensor tt_fold(const Eigen::Ref<const Matrix>& m, const Shape& shape) {
    if (static_cast<std::size_t>(m.size()) != shape.size()) {
        throw DimensionError("tt_fold: matrix does not match shape " + shape.to_string());
    }
    Tensor t(shape);
    RowMap(t.data(), m.rows(), m.cols()) = m;
    return t;
}

Tensor mode_n_product(const Tensor& t, std::size_t mode, const Eigen::Ref<const Matrix>& u) {
    check_mode(t.shape(), mode, "mode_n_product");
    const auto v = mode_view(t.shape(), mode);
    if (static_cast<std::size_t>(u.cols()) != v.dim) {
        throw DimensionError("mode_n_product: matrix has " + std::to_string(u.cols()) +
                             " columns, mode " + std::to_string(mode + 1) + " has size " +
                             std::to_string(v.dim));
    }
    const auto rows = static_cast<std::size_t>(u.rows());
    Tensor out(replace_dim(t.shape(), mode, rows));
    const auto I = static_cast<Eigen::Index>(v.dim);
    const auto J = static_cast<Eigen::Index>(rows);
    const auto Q = static_cast<Eigen::Index>(v.suffix);
    if (v.suffix == 1) {
        const auto P = static_cast<Eigen::Index>(v.prefix);
        RowMap(out.data(), P, J).noalias() = ConstRowMap(t.data(), P, I) * u.transpose();
        return out;
    }
    for (std::size_t p = 0; p < v.prefix; ++p) {
        RowMap(out.data() + p * rows * v.suffix, J, Q).noalias() =
            u * ConstRowMap(t.data() + p * v.dim * v.suffix, I, Q);
    }
    return out;
}

Tensor mode_n_product_transposed(const Tensor& t, std::size_t mode,
                                 const Eigen::Ref<const Matrix>& u) {
    check_mode(t.shape(), mode, "mode_n_product");
    const auto v = mode_view(t.shape(), mode);
    if (static_cast<std::size_t>(u.rows()) != v.dim) {
        throw DimensionError("mode_n_product: transposed matrix has " + std::to_string(u.rows()) +
                             " rows, mode " + std::to_string(mode + 1) + " has size " +
                             std::to_string(v.dim));
    }
    const auto cols = static_cast<std::size_t>(u.cols());
    Tensor out(replace_dim(t.shape(), mode, cols));
    const auto I = static_cast<Eigen::Index>(v.dim);
    const auto J = static_cast<Eigen::Index>(cols);
    const auto Q = static_cast<Eigen::Index>(v.suffix);
    if (v.suffix == 1) {
        const auto P = static_cast<Eigen::Index>(v.prefix);
        RowMap(out.data(), P, J).noalias() = ConstRowMap(t.data(), P, I) * u;
        return out;
    }
    for (std::size_t p = 0; p < v.prefix; ++p) {
        RowMap(out.data() + p * cols * v.suffix, J, Q).noalias() =
            u.transpose() * ConstRowMap(t.data() + p * v.dim * v.suffix, I, Q);
    }
    return out;
}

Matrix contract_except(const Tensor& a, const Tensor& b, std::size_t mode) {
    check_mode(a.shape(), mode, "contract_except");
    check_mode(b.shape(), mode, "contract_except");
    if (replace_dim(a.shape(), mode, 1) != replace_dim(b.shape(), mode, 1)) {
        throw DimensionError("contract_except: shapes " + a.shape().to_string() + " and " +
                             b.shape().to_string() + " differ outside mode " +
                             std::to_string(mode + 1));
    }
    const auto va = mode_view(a.shape(), mode);
    const auto I = static_cast<Eigen::Index>(va.dim);
    const auto J = static_cast<Eigen::Index>(b.dim(mode));
    const auto Q = static_cast<Eigen::Index>(va.suffix);
    if (va.suffix == 1) {
        const auto P = static_cast<Eigen::Index>(va.prefix);
        return ConstRowMap(a.data(), P, I).transpose() * ConstRowMap(b.data(), P, J);
    }
    Matrix out = Matrix::Zero(I, J);
    for (std::size_t p = 0; p < va.prefix; ++p) {
        out.noalias() += ConstRowMap(a.data() + p * static_cast<std::size_t>(I * Q), I, Q) *
                         ConstRowMap(b.data() + p * static_cast<std::size_t>(J * Q), J, Q).transpose();
    }
    return out;
}

}  // namespace tclab
