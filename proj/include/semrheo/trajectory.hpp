#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string_view>
#include <utility>

#include "semrheo/errors.hpp"

namespace semrheo {

enum class Provenance { walk, document, synthetic };

constexpr std::string_view to_string(Provenance p) noexcept
{
    switch (p) {
    case Provenance::walk: return "walk";
    case Provenance::document: return "document";
    case Provenance::synthetic: return "synthetic";
    }
    return "unknown";
}

/// Ordered sequence of D-dimensional points, one per row.
///
/// Construction checks that every coordinate is finite and that there is at
/// least one point and one dimension. Operations that need displacements
/// (msd, step_lengths, ...) check N >= 2 themselves.
template <typename Scalar>
class BasicTrajectory {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    explicit BasicTrajectory(Matrix points, Provenance provenance = Provenance::synthetic)
        : points_(std::move(points)), provenance_(provenance)
    {
        if (points_.rows() < 1 || points_.cols() < 1) {
            throw InvariantError("trajectory needs at least one point of dimension >= 1");
        }
        if (!points_.allFinite()) {
            throw InvariantError("trajectory contains a non-finite coordinate");
        }
    }

    const Matrix& points() const noexcept { return points_; }
    Provenance provenance() const noexcept { return provenance_; }

    Eigen::Index size() const noexcept { return points_.rows(); }
    Eigen::Index dims() const noexcept { return points_.cols(); }

    auto point(Eigen::Index i) const { return points_.row(i); }

private:
    Matrix points_;
    Provenance provenance_;
};

using Trajectory = BasicTrajectory<double>;

} // namespace semrheo
