#pragma once

#include "tclab/tensor.hpp"

#include <span>
#include <vector>

namespace tclab {

/// The observed entries Omega of a partially known tensor M, kept sorted by flat
/// offset. Never empty; offsets are distinct and in range.
class ObservationSet {
public:
    ObservationSet(Shape shape, std::vector<std::size_t> offsets, std::vector<double> values);

    /// Observes `truth` at the given flat offsets.
    static ObservationSet from_tensor(const Tensor& truth, std::span<const std::size_t> offsets);
    /// Every entry of `truth`.
    static ObservationSet full(const Tensor& truth);

    [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t size() const noexcept { return offsets_.size(); }
    [[nodiscard]] std::span<const std::size_t> offsets() const noexcept { return offsets_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] MultiIndex index(std::size_t k) const;

    /// Observed values at their positions, zeros elsewhere.
    [[nodiscard]] Tensor densify() const;
    /// Mask tensor: 1 on Omega, 0 elsewhere.
    [[nodiscard]] Tensor indicator() const;
    /// W - M on Omega, zero elsewhere.
    [[nodiscard]] Tensor residual(const Tensor& w) const;
    /// Overwrites the observed entries of w with their values.
    void project(Tensor& w) const;
    /// Mean of the observed values.
    [[nodiscard]] double mean() const;

private:
    Shape shape_;
    std::vector<std::size_t> offsets_;
    std::vector<double> values_;
};

/// 1/2 sum over Omega of (W - M)^2.
[[nodiscard]] double completion_loss(const Tensor& w, const ObservationSet& obs);

}  // namespace tclab
