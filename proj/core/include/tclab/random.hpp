#pragma once

#include "tclab/tensor.hpp"

#include <cstdint>
#include <random>

namespace tclab {

/// Seeded source for every random draw in the library. Streams are reproducible
/// on a given platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }

    /// Uniform integer in [0, n).
    std::size_t uniform_index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

    /// Row-major fill of an r x c matrix with N(0, stddev^2) entries.
    Matrix gaussian(std::size_t rows, std::size_t cols, double stddev = 1.0) {
        Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = stddev * normal();
        return m;
    }

    Tensor gaussian(const Shape& shape, double stddev = 1.0) {
        Tensor t(shape);
        for (double& v : t.values()) v = stddev * normal();
        return t;
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace tclab
