#include "tclab/observations.hpp"

#include "tclab/error.hpp"

#include <algorithm>
#include <numeric>

namespace tclab {

ObservationSet::ObservationSet(Shape shape, std::vector<std::size_t> offsets, std::vector<double> values)
    : shape_(std::move(shape)) {
    if (offsets.empty()) throw DomainError("observation set is empty");
    if (offsets.size() != values.size()) {
        throw DimensionError("observation set: " + std::to_string(offsets.size()) + " indices but " +
                             std::to_string(values.size()) + " values");
    }
    std::vector<std::size_t> order(offsets.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return offsets[a] < offsets[b]; });
    offsets_.reserve(order.size());
    values_.reserve(order.size());
    for (auto k : order) {
        if (offsets[k] >= shape_.size()) {
            throw DimensionError("observation offset " + std::to_string(offsets[k]) +
                                 " out of range for shape " + shape_.to_string());
        }
        if (!offsets_.empty() && offsets_.back() == offsets[k]) {
            throw DomainError("observation set repeats offset " + std::to_string(offsets[k]));
        }
        offsets_.push_back(offsets[k]);
        values_.push_back(values[k]);
    }
}

ObservationSet ObservationSet::from_tensor(const Tensor& truth, std::span<const std::size_t> offsets) {
    std::vector<double> values;
    values.reserve(offsets.size());
    for (auto k : offsets) {
        if (k >= truth.size()) throw DimensionError("observation offset out of range");
        values.push_back(truth[k]);
    }
    return {truth.shape(), std::vector<std::size_t>(offsets.begin(), offsets.end()), std::move(values)};
}

ObservationSet ObservationSet::full(const Tensor& truth) {
    std::vector<std::size_t> all(truth.size());
    std::iota(all.begin(), all.end(), 0);
    return from_tensor(truth, all);
}

MultiIndex ObservationSet::index(std::size_t k) const {
    MultiIndex idx(shape_.order());
    std::size_t flat = offsets_.at(k);
    for (std::size_t n = shape_.order(); n-- > 0;) {
        idx[n] = flat % shape_[n];
        flat /= shape_[n];
    }
    return idx;
}

Tensor ObservationSet::densify() const {
    Tensor t(shape_);
    for (std::size_t k = 0; k < offsets_.size(); ++k) t[offsets_[k]] = values_[k];
    return t;
}

Tensor ObservationSet::indicator() const {
    Tensor t(shape_);
    for (auto off : offsets_) t[off] = 1.0;
    return t;
}

Tensor ObservationSet::residual(const Tensor& w) const {
    if (w.shape() != shape_) throw DimensionError("residual: shape mismatch");
    Tensor r(shape_);
    for (std::size_t k = 0; k < offsets_.size(); ++k) r[offsets_[k]] = w[offsets_[k]] - values_[k];
    return r;
}

void ObservationSet::project(Tensor& w) const {
    if (w.shape() != shape_) throw DimensionError("project: shape mismatch");
    for (std::size_t k = 0; k < offsets_.size(); ++k) w[offsets_[k]] = values_[k];
}

double ObservationSet::mean() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

double completion_loss(const Tensor& w, const ObservationSet& obs) {
    if (w.shape() != obs.shape()) {
        throw DimensionError("completion_loss: tensor shape " + w.shape().to_string() +
                             " differs from observation shape " + obs.shape().to_string());
    }
    double acc = 0.0;
    const auto offs = obs.offsets();
    const auto vals = obs.values();
    for (std::size_t k = 0; k < offs.size(); ++k) {
        const double d = w[offs[k]] - vals[k];
        acc += d * d;
    }
    return 0.5 * acc;
}

}  // namespace tclab
