#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace tclab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dimensions (I_1, ..., I_N) of an N-way array. Every dimension is >= 1.
///
/// An order-0 shape (no dimensions) is allowed and describes a single scalar;
/// it only arises from slicing an order-1 tensor.
class Shape {
public:
    Shape() = default;
    explicit Shape(std::vector<std::size_t> dims);
    Shape(std::initializer_list<std::size_t> dims);

    [[nodiscard]] std::size_t order() const noexcept { return dims_.size(); }
    [[nodiscard]] std::size_t operator[](std::size_t mode) const { return dims_.at(mode); }
    [[nodiscard]] const std::vector<std::size_t>& dims() const noexcept { return dims_; }

    /// Number of entries, the product of all dimensions.
    [[nodiscard]] std::size_t size() const noexcept { return size_; }

    /// Row-major strides: the last index varies fastest.
    [[nodiscard]] std::vector<std::size_t> strides() const;

    /// Product of dims in [first, last).
    [[nodiscard]] std::size_t span_size(std::size_t first, std::size_t last) const;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Shape&, const Shape&) = default;

private:
    std::vector<std::size_t> dims_;
    std::size_t size_ = 1;
};

using MultiIndex = std::vector<std::size_t>;

/// Dense real N-way array stored lexicographically, last index fastest.
///
/// Indices are 0-based in the API; error messages report them 1-based.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape);
    Tensor(Shape shape, std::vector<double> values);

    static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
    static Tensor filled(Shape shape, double value);
    /// Wraps a matrix as an order-2 tensor of the same shape.
    static Tensor from_matrix(const Eigen::Ref<const Matrix>& m);

    [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t order() const noexcept { return shape_.order(); }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::size_t dim(std::size_t mode) const { return shape_[mode]; }

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] const double* data() const noexcept { return values_.data(); }
    [[nodiscard]] double* data() noexcept { return values_.data(); }

    [[nodiscard]] double& operator[](std::size_t flat) { return values_[flat]; }
    [[nodiscard]] double operator[](std::size_t flat) const { return values_[flat]; }

    [[nodiscard]] double at(std::span<const std::size_t> index) const;
    [[nodiscard]] double& at(std::span<const std::size_t> index);
    [[nodiscard]] double at(std::initializer_list<std::size_t> index) const;
    [[nodiscard]] double& at(std::initializer_list<std::size_t> index);

    [[nodiscard]] std::size_t offset(std::span<const std::size_t> index) const;
    [[nodiscard]] MultiIndex unravel(std::size_t flat) const;

    /// Copy of an order-2 tensor as an Eigen matrix.
    [[nodiscard]] Matrix to_matrix() const;

    [[nodiscard]] bool all_finite() const noexcept;

    Tensor& operator+=(const Tensor& other);
    Tensor& operator-=(const Tensor& other);
    Tensor& operator*=(double c) noexcept;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    Shape shape_;
    std::vector<double> values_ = std::vector<double>(1, 0.0);
};

[[nodiscard]] Tensor operator+(Tensor a, const Tensor& b);
[[nodiscard]] Tensor operator-(Tensor a, const Tensor& b);
[[nodiscard]] Tensor operator*(double c, Tensor a);

[[nodiscard]] double inner_product(const Tensor& a, const Tensor& b);
[[nodiscard]] double frobenius_norm(const Tensor& a);

/// Fixes `mode` at `index`; the result has that mode removed.
/// Slicing an order-1 tensor yields an order-0 singleton.
[[nodiscard]] Tensor slice(const Tensor& t, std::size_t mode, std::size_t index);

/// v_1 o v_2 o ... o v_N.
[[nodiscard]] Tensor outer_product(std::span<const Vector> vectors);

// Tucker unfolding along mode n: an I_n x (I_{n+1} ... I_N I_1 ... I_{n-1}) matrix.
// Column index is lexicographic over (i_{n+1}, ..., i_N, i_1, ..., i_{n-1}) with
// i_{n-1} varying fastest. Norms and ranks never depend on this choice.
[[nodiscard]] Matrix mode_n_unfold(const Tensor& t, std::size_t mode);
[[nodiscard]] Tensor mode_n_fold(const Eigen::Ref<const Matrix>& m, std::size_t mode, const Shape& shape);

// TT unfolding after mode n (n in [1, N-1], passed as the number of row modes):
// rows are (i_1..i_n), columns (i_{n+1}..i_N), both lexicographic. With
// last-index-fastest storage this is a plain reshape.
[[nodiscard]] Matrix tt_unfold(const Tensor& t, std::size_t row_modes);
[[nodiscard]] Tensor tt_fold(const Eigen::Ref<const Matrix>& m, const Shape& shape);

/// (T x_n U)_{..j..} = sum_i T_{..i..} U_{j,i}. Requires u.cols() == I_n.
[[nodiscard]] Tensor mode_n_product(const Tensor& t, std::size_t mode, const Eigen::Ref<const Matrix>& u);
/// T x_n U^T, without materialising the transpose.
[[nodiscard]] Tensor mode_n_product_transposed(const Tensor& t, std::size_t mode,
                                               const Eigen::Ref<const Matrix>& u);

/// a_(n) * b_(n)^T: contracts two equally shaped-but-for-mode-n tensors over every
/// other mode. Result is a.dim(n) x b.dim(n).
[[nodiscard]] Matrix contract_except(const Tensor& a, const Tensor& b, std::size_t mode);

}  // namespace tclab
