#include "semrheo/projection.hpp"

#include <cmath>

#include "semrheo/errors.hpp"

namespace semrheo {

namespace {

struct Eigenpair {
    double value = 0.0;
    Eigen::VectorXd vector;
};

// Largest-magnitude component made positive (first one wins on ties).
void fix_sign(Eigen::VectorXd& v)
{
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) {
        v = -v;
    }
}

// Dominant eigenpair of a symmetric positive semi-definite matrix.
Eigenpair power_iteration(const Eigen::MatrixXd& c, const PcaOptions& options)
{
    const Eigen::Index d = c.rows();
    // Irregular deterministic start; a start orthogonal to the dominant
    // eigenvector would need exact cancellation against these weights.
    Eigen::VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        v[i] = 1.0 + std::fmod(0.6180339887498949 * static_cast<double>(i + 1), 1.0);
    }
    v.normalize();

    Eigenpair pair{0.0, v};
    for (int it = 0; it < options.max_iterations; ++it) {
        Eigen::VectorXd w = c * v;
        const double norm = w.norm();
        if (norm == 0.0) {
            return Eigenpair{0.0, v};
        }
        w /= norm;
        fix_sign(w);
        const double change = (w - v).norm();
        v = std::move(w);
        if (change < options.tolerance) {
            break;
        }
    }
    pair.vector = v;
    pair.value = std::max(0.0, v.dot(c * v));
    return pair;
}

} // namespace

Projection2D pca_2d(const Eigen::Ref<const Eigen::MatrixXd>& points, const PcaOptions& options)
{
    if (points.rows() < 3) {
        throw InsufficientDataError("projection needs at least 3 points");
    }
    if (points.cols() < 2) {
        throw InvalidArgument("projection needs dimension >= 2");
    }
    if (!points.allFinite()) {
        throw InvariantError("projection input contains a non-finite coordinate");
    }

    const Eigen::RowVectorXd centroid = points.colwise().mean();
    const Eigen::MatrixXd centered = points.rowwise() - centroid;
    const Eigen::MatrixXd cov =
        (centered.transpose() * centered) / static_cast<double>(points.rows() - 1);
    const double total = cov.trace();

    Projection2D proj;
    proj.coords = Eigen::MatrixX2d::Zero(points.rows(), 2);
    if (total <= 0.0) {
        proj.degenerate = true;
        return proj;
    }

    const Eigenpair first = power_iteration(cov, options);
    const Eigen::MatrixXd deflated = cov - first.value * first.vector * first.vector.transpose();
    Eigenpair second = power_iteration(deflated, options);

    // Relative to the leading variance, anything at rounding level is rank loss.
    constexpr double kRankTolerance = 1e-12;
    proj.degenerate = second.value <= kRankTolerance * first.value;

    proj.coords.col(0) = centered * first.vector;
    proj.explained_variance[0] = first.value / total;
    if (!proj.degenerate) {
        proj.coords.col(1) = centered * second.vector;
        proj.explained_variance[1] = second.value / total;
    }
    return proj;
}

} // namespace semrheo
