#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "semrheo/errors.hpp"
#include "semrheo/trajectory.hpp"

namespace semrheo {

/// Mean squared displacement per delay. delays[n-1] == n, counts[n-1] == N - n.
struct MsdCurve {
    std::vector<std::size_t> delays;
    std::vector<double> values;
    std::vector<std::size_t> counts;

    std::size_t size() const noexcept { return delays.size(); }
    bool empty() const noexcept { return delays.empty(); }

    /// Number of trajectory points the curve was computed from.
    std::size_t point_count() const noexcept { return empty() ? 0 : delays.front() + counts.front(); }
};

/// Inclusive delay range [lo, hi].
struct FitWindow {
    std::size_t lo = 1;
    std::size_t hi = 1;

    friend bool operator==(const FitWindow&, const FitWindow&) = default;
};

struct PowerLawFit {
    double alpha = 0.0;
    double log_amplitude = 0.0;  // intercept of ln(MSD) against ln(delay)
    double r2 = 0.0;
    FitWindow window;
};

struct Segment {
    FitWindow window;
    double alpha = 0.0;
};

enum class Regime { ballistic, superdiffusive, diffusive, subdiffusive, confined };

std::string_view to_string(Regime r) noexcept;

struct DiffusionReport {
    PowerLawFit fit;
    std::vector<Segment> segments;
    Regime regime = Regime::diffusive;
    std::optional<double> plateau_level;
    std::optional<double> tail_exponent;
};

// ---------------------------------------------------------------------------
// Dense kernels. Templated on the Eigen expression so float/double/long double
// point matrices work alike; accumulation happens in the matrix scalar type.

/// e_i - e_j for 0 <= i < j < N.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
displacement(const Eigen::MatrixBase<Derived>& points, Eigen::Index i, Eigen::Index j)
{
    if (i < 0 || j >= points.rows() || i >= j) {
        throw InvalidArgument("displacement needs 0 <= i < j < N");
    }
    return (points.row(i) - points.row(j)).transpose();
}

/// MSD(n) = 1/(N-n) * sum_i |e_{i+n} - e_i|^2 for n = 1 .. max_delay
/// (max_delay == 0 or >= N means N - 1). Sums run in index order.
template <typename Derived>
MsdCurve msd(const Eigen::MatrixBase<Derived>& points, std::size_t max_delay = 0)
{
    const auto n_points = static_cast<std::size_t>(points.rows());
    if (n_points < 2) {
        throw InsufficientDataError("msd needs at least 2 points");
    }
    const std::size_t last = (max_delay == 0 || max_delay >= n_points) ? n_points - 1 : max_delay;
    MsdCurve curve;
    curve.delays.reserve(last);
    curve.values.reserve(last);
    curve.counts.reserve(last);
    for (std::size_t n = 1; n <= last; ++n) {
        const auto m = static_cast<Eigen::Index>(n_points - n);
        const auto sum = (points.bottomRows(m) - points.topRows(m)).squaredNorm();
        curve.delays.push_back(n);
        curve.values.push_back(static_cast<double>(sum) / static_cast<double>(m));
        curve.counts.push_back(n_points - n);
    }
    return curve;
}

/// |e_{i+1} - e_i| for consecutive points.
template <typename Derived>
std::vector<double> step_lengths(const Eigen::MatrixBase<Derived>& points)
{
    if (points.rows() < 2) {
        throw InsufficientDataError("step_lengths needs at least 2 points");
    }
    const Eigen::Index m = points.rows() - 1;
    std::vector<double> lengths(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        lengths[static_cast<std::size_t>(i)] =
            static_cast<double>((points.row(i + 1) - points.row(i)).norm());
    }
    return lengths;
}

template <typename Scalar>
MsdCurve msd(const BasicTrajectory<Scalar>& traj, std::size_t max_delay = 0)
{
    return msd(traj.points(), max_delay);
}

template <typename Scalar>
std::vector<double> step_lengths(const BasicTrajectory<Scalar>& traj)
{
    return step_lengths(traj.points());
}

// ---------------------------------------------------------------------------
// Curve analysis.

/// Full range for curves of <= 100 delays, otherwise delays 1 .. N/4 where N is
/// the trajectory length.
FitWindow default_fit_window(const MsdCurve& curve);

/// OLS of ln(MSD) on ln(delay) over the window; zero values are skipped.
/// Throws InsufficientDataError when fewer than two usable points remain.
PowerLawFit fit_power_law(const MsdCurve& curve, FitWindow window);

struct Segmentation {
    std::vector<Segment> segments;
    double sse = 0.0;                 // log-log SSE of the chosen segmentation
    double single_segment_sse = 0.0;  // SSE with no breakpoint
    std::vector<std::size_t> grid;    // delays the search ran on
};

inline constexpr std::size_t kMaxSegmentGrid = 50;
inline constexpr std::size_t kMinSegmentPoints = 3;
inline constexpr double kSegmentMseFloor = 1e-12;

/// Piecewise log-log line fit with up to `max_breakpoints` (<= 2) breaks.
///
/// Usable curve points in the window are resampled to at most 50 log-spaced
/// delays; every placement of 0..max_breakpoints breaks with >= 3 grid points
/// per segment is tried. The breakpoint count minimizes the BIC
/// n ln(max(SSE/n, 1e-12)) + (#params) ln(n), #params = 2 per segment + 1 per
/// breakpoint; ties keep fewer breakpoints.
Segmentation segment_phases_detailed(const MsdCurve& curve, std::size_t max_breakpoints,
                                     std::optional<FitWindow> window = std::nullopt);

std::vector<Segment> segment_phases(const MsdCurve& curve, std::size_t max_breakpoints,
                                    std::optional<FitWindow> window = std::nullopt);

struct PlateauTest {
    bool detected = false;
    double terminal_slope = 0.0;
    double relative_rise = 0.0;
    double level = 0.0;        // mean MSD over the terminal decade
    FitWindow terminal{};
};

inline constexpr double kPlateauMaxSlope = 0.1;
inline constexpr double kPlateauMaxRise = 0.1;

/// Plateau test on the last decade [max(lo, hi/10), hi] of the window: the
/// log-log slope and the relative rise between the lower and upper thirds of
/// the decade must both stay below 0.1 in magnitude.
PlateauTest detect_plateau(const MsdCurve& curve, FitWindow window);

/// confined if a plateau was detected, otherwise by alpha:
/// >= 1.8 ballistic, (1.1, 1.8) superdiffusive, [0.9, 1.1] diffusive, < 0.9 subdiffusive.
Regime classify_regime(const PowerLawFit& fit, const PlateauTest& plateau);

/// Hill estimator on the ceil(tail_fraction * M) largest of the M positive lengths.
double tail_exponent(std::span<const double> lengths, double tail_fraction = 0.1);

struct AnalysisOptions {
    std::optional<FitWindow> window;
    std::size_t max_breakpoints = 2;
    double tail_fraction = 0.1;
};

/// fit -> segmentation -> plateau -> regime. Throws DegenerateDataError when
/// every MSD value is zero. When the window holds too few points for the
/// requested breakpoints, fewer are used; below three points the single fit
/// becomes the only segment.
DiffusionReport analyze_curve(const MsdCurve& curve, const AnalysisOptions& options = {});

struct TrajectoryAnalysis {
    MsdCurve curve;
    DiffusionReport report;
};

/// msd + analyze_curve, plus the Hill tail exponent of the step lengths when
/// at least 20 are positive.
TrajectoryAnalysis analyze_trajectory(const Trajectory& traj, const AnalysisOptions& options = {});

} // namespace semrheo
