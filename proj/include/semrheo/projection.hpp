#pragma once

#include <Eigen/Core>

#include <array>

namespace semrheo {

struct Projection2D {
    Eigen::MatrixX2d coords;                     // one row per input point
    std::array<double, 2> explained_variance{};  // fraction of total variance per axis
    bool degenerate = false;                     // rank < 2: second axis is all zeros
};

struct PcaOptions {
    double tolerance = 1e-10;
    int max_iterations = 1000;
};

/// Projects centered points onto the top two principal directions of their
/// covariance, found by power iteration with deflation. Each axis is signed
/// so that its largest-magnitude loading is positive.
Projection2D pca_2d(const Eigen::Ref<const Eigen::MatrixXd>& points, const PcaOptions& options = {});

template <typename Derived>
Projection2D pca_2d(const Eigen::MatrixBase<Derived>& points, const PcaOptions& options = {})
{
    const Eigen::MatrixXd p = points.template cast<double>();
    return pca_2d(Eigen::Ref<const Eigen::MatrixXd>(p), options);
}

} // namespace semrheo
