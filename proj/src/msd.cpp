#include "semrheo/msd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace semrheo {

std::string_view to_string(Regime r) noexcept
{
    switch (r) {
    case Regime::ballistic: return "ballistic";
    case Regime::superdiffusive: return "superdiffusive";
    case Regime::diffusive: return "diffusive";
    case Regime::subdiffusive: return "subdiffusive";
    case Regime::confined: return "confined";
    }
    return "unknown";
}

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double sse = 0.0;
    double sst = 0.0;
};

// OLS of y on x; centered sums.
LineFit ols(std::span<const double> x, std::span<const double> y)
{
    const auto n = static_cast<double>(x.size());
    const double xm = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - xm;
        const double dy = y[i] - ym;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LineFit fit;
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = ym - fit.slope * xm;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        fit.sse += r * r;
    }
    fit.sst = syy;
    return fit;
}

FitWindow clip_window(const MsdCurve& curve, FitWindow window)
{
    if (curve.empty()) {
        throw InsufficientDataError("empty MSD curve");
    }
    if (window.lo >= window.hi) {
        throw InvalidArgument("fit window needs lo < hi");
    }
    const FitWindow clipped{std::max(window.lo, curve.delays.front()),
                            std::min(window.hi, curve.delays.back())};
    if (clipped.lo > clipped.hi) {
        throw InsufficientDataError("fit window does not intersect the curve");
    }
    return clipped;
}

// Log-transformed usable points (value > 0) inside the window.
struct LogPoints {
    std::vector<std::size_t> delays;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> values;
};

LogPoints usable_points(const MsdCurve& curve, FitWindow window)
{
    LogPoints pts;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const std::size_t d = curve.delays[i];
        if (d < window.lo || d > window.hi || !(curve.values[i] > 0.0)) {
            continue;
        }
        pts.delays.push_back(d);
        pts.x.push_back(std::log(static_cast<double>(d)));
        pts.y.push_back(std::log(curve.values[i]));
        pts.values.push_back(curve.values[i]);
    }
    return pts;
}

// Resamples to at most kMaxSegmentGrid points, nearest usable delay to each
// log-spaced target, duplicates collapsed.
LogPoints log_grid(const LogPoints& pts)
{
    if (pts.delays.size() <= kMaxSegmentGrid) {
        return pts;
    }
    LogPoints grid;
    const double x0 = pts.x.front();
    const double x1 = pts.x.back();
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (std::size_t g = 0; g < kMaxSegmentGrid; ++g) {
        const double target =
            x0 + (x1 - x0) * static_cast<double>(g) / static_cast<double>(kMaxSegmentGrid - 1);
        auto it = std::lower_bound(pts.x.begin(), pts.x.end(), target);
        auto idx = static_cast<std::size_t>(it - pts.x.begin());
        if (idx == pts.x.size()) {
            idx = pts.x.size() - 1;
        } else if (idx > 0 && target - pts.x[idx - 1] <= pts.x[idx] - target) {
            --idx;
        }
        if (idx == prev) {
            continue;
        }
        prev = idx;
        grid.delays.push_back(pts.delays[idx]);
        grid.x.push_back(pts.x[idx]);
        grid.y.push_back(pts.y[idx]);
        grid.values.push_back(pts.values[idx]);
    }
    return grid;
}

} // namespace

FitWindow default_fit_window(const MsdCurve& curve)
{
    if (curve.empty()) {
        throw InsufficientDataError("empty MSD curve");
    }
    if (curve.size() < 2) {
        throw InsufficientDataError("a fit window needs at least 2 delays");
    }
    const std::size_t last = curve.delays.back();
    if (curve.size() <= 100) {
        return FitWindow{curve.delays.front(), last};
    }
    const std::size_t quarter = std::max<std::size_t>(curve.point_count() / 4, 2);
    return FitWindow{curve.delays.front(), std::min(quarter, last)};
}

PowerLawFit fit_power_law(const MsdCurve& curve, FitWindow window)
{
    const FitWindow clipped = clip_window(curve, window);
    const LogPoints pts = usable_points(curve, clipped);
    if (pts.x.size() < 2) {
        throw InsufficientDataError("power-law fit needs at least 2 positive MSD values in ["
                                    + std::to_string(clipped.lo) + ", "
                                    + std::to_string(clipped.hi) + "]");
    }
    const LineFit line = ols(pts.x, pts.y);
    PowerLawFit fit;
    fit.alpha = line.slope;
    fit.log_amplitude = line.intercept;
    // A constant log-curve has no variance to explain; the flat line is exact.
    const double scale = std::max(1.0, std::abs(pts.y.front()));
    const double tiny = 1e-24 * static_cast<double>(pts.x.size()) * scale * scale;
    if (line.sst <= tiny) {
        fit.r2 = line.sse <= tiny ? 1.0 : 0.0;
    } else {
        fit.r2 = 1.0 - line.sse / line.sst;
    }
    fit.window = clipped;
    return fit;
}

Segmentation segment_phases_detailed(const MsdCurve& curve, std::size_t max_breakpoints,
                                     std::optional<FitWindow> window)
{
    if (max_breakpoints > 2) {
        throw InvalidArgument("at most 2 breakpoints are supported");
    }
    const FitWindow clipped = clip_window(curve, window.value_or(default_fit_window(curve)));
    const LogPoints grid = log_grid(usable_points(curve, clipped));
    const std::size_t n = grid.x.size();
    const std::size_t needed = (max_breakpoints + 1) * kMinSegmentPoints;
    if (n < needed) {
        throw InsufficientDataError("segmentation with " + std::to_string(max_breakpoints)
                                    + " breakpoints needs " + std::to_string(needed)
                                    + " usable grid points, have " + std::to_string(n));
    }

    const std::span<const double> xs(grid.x);
    const std::span<const double> ys(grid.y);
    // fits[a][b]: line over grid points [a, b)
    std::vector<std::vector<LineFit>> fits(n, std::vector<LineFit>(n + 1));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + kMinSegmentPoints; b <= n; ++b) {
            fits[a][b] = ols(xs.subspan(a, b - a), ys.subspan(a, b - a));
        }
    }

    // Gaussian BIC on the log-log residuals: n ln(SSE/n) + (#params) ln(n).
    // The floor keeps exact (noiseless) fits from rewarding spurious breaks.
    const double n_pts = static_cast<double>(n);
    const double log_n = std::log(n_pts);
    const auto score = [&](double sse, std::size_t breaks) {
        const double params = static_cast<double>(2 * (breaks + 1) + breaks);
        return n_pts * std::log(std::max(sse / n_pts, kSegmentMseFloor)) + params * log_n;
    };

    // bounds: segment starts followed by n
    std::vector<std::size_t> best_bounds{0, n};
    double best_sse = fits[0][n].sse;
    double best_score = score(best_sse, 0);
    const double single_sse = best_sse;

    if (max_breakpoints >= 1) {
        std::vector<std::size_t> bounds;
        double sse1 = std::numeric_limits<double>::infinity();
        for (std::size_t b1 = kMinSegmentPoints; b1 + kMinSegmentPoints <= n; ++b1) {
            const double s = fits[0][b1].sse + fits[b1][n].sse;
            if (s < sse1) {
                sse1 = s;
                bounds = {0, b1, n};
            }
        }
        if (score(sse1, 1) < best_score) {
            best_score = score(sse1, 1);
            best_sse = sse1;
            best_bounds = bounds;
        }
    }
    if (max_breakpoints >= 2) {
        std::vector<std::size_t> bounds;
        double sse2 = std::numeric_limits<double>::infinity();
        for (std::size_t b1 = kMinSegmentPoints; b1 + 2 * kMinSegmentPoints <= n; ++b1) {
            for (std::size_t b2 = b1 + kMinSegmentPoints; b2 + kMinSegmentPoints <= n; ++b2) {
                const double s = fits[0][b1].sse + fits[b1][b2].sse + fits[b2][n].sse;
                if (s < sse2) {
                    sse2 = s;
                    bounds = {0, b1, b2, n};
                }
            }
        }
        if (score(sse2, 2) < best_score) {
            best_sse = sse2;
            best_bounds = bounds;
        }
    }

    Segmentation result;
    result.sse = best_sse;
    result.single_segment_sse = single_sse;
    result.grid = grid.delays;
    for (std::size_t s = 0; s + 1 < best_bounds.size(); ++s) {
        const std::size_t a = best_bounds[s];
        const std::size_t b = best_bounds[s + 1];
        result.segments.push_back(
            Segment{FitWindow{grid.delays[a], grid.delays[b - 1]}, fits[a][b].slope});
    }
    return result;
}

std::vector<Segment> segment_phases(const MsdCurve& curve, std::size_t max_breakpoints,
                                    std::optional<FitWindow> window)
{
    return segment_phases_detailed(curve, max_breakpoints, window).segments;
}

PlateauTest detect_plateau(const MsdCurve& curve, FitWindow window)
{
    const FitWindow clipped = clip_window(curve, window);
    PlateauTest test;
    test.terminal = FitWindow{std::max(clipped.lo, clipped.hi / 10), clipped.hi};
    if (test.terminal.lo >= test.terminal.hi) {
        return test;
    }
    const LogPoints pts = usable_points(curve, test.terminal);
    if (pts.x.size() < kMinSegmentPoints) {
        return test;
    }
    test.terminal_slope = ols(pts.x, pts.y).slope;

    const double span = pts.x.back() - pts.x.front();
    const double lower_edge = pts.x.front() + span / 3.0;
    const double upper_edge = pts.x.back() - span / 3.0;
    double lower_sum = 0.0;
    double upper_sum = 0.0;
    std::size_t lower_n = 0;
    std::size_t upper_n = 0;
    for (std::size_t i = 0; i < pts.x.size(); ++i) {
        if (pts.x[i] <= lower_edge) {
            lower_sum += pts.values[i];
            ++lower_n;
        }
        if (pts.x[i] >= upper_edge) {
            upper_sum += pts.values[i];
            ++upper_n;
        }
    }
    const double lower_mean = lower_sum / static_cast<double>(lower_n);
    const double upper_mean = upper_sum / static_cast<double>(upper_n);
    test.relative_rise = upper_mean / lower_mean - 1.0;
    test.level = std::accumulate(pts.values.begin(), pts.values.end(), 0.0)
               / static_cast<double>(pts.values.size());
    test.detected = std::abs(test.terminal_slope) < kPlateauMaxSlope
                 && std::abs(test.relative_rise) < kPlateauMaxRise;
    return test;
}

Regime classify_regime(const PowerLawFit& fit, const PlateauTest& plateau)
{
    if (plateau.detected) {
        return Regime::confined;
    }
    if (fit.alpha >= 1.8) {
        return Regime::ballistic;
    }
    if (fit.alpha > 1.1) {
        return Regime::superdiffusive;
    }
    if (fit.alpha >= 0.9) {
        return Regime::diffusive;
    }
    return Regime::subdiffusive;
}

double tail_exponent(std::span<const double> lengths, double tail_fraction)
{
    if (!(tail_fraction > 0.0 && tail_fraction <= 0.5)) {
        throw InvalidArgument("tail_fraction must be in (0, 0.5]");
    }
    std::vector<double> positive;
    positive.reserve(lengths.size());
    for (double x : lengths) {
        if (x > 0.0 && std::isfinite(x)) {
            positive.push_back(x);
        }
    }
    constexpr std::size_t kMinLengths = 20;
    if (positive.size() < kMinLengths) {
        throw InsufficientDataError("tail exponent needs at least 20 positive lengths, have "
                                    + std::to_string(positive.size()));
    }
    const auto k = static_cast<std::size_t>(
        std::ceil(tail_fraction * static_cast<double>(positive.size())));
    // k + 1 largest values in descending order
    std::partial_sort(positive.begin(), positive.begin() + static_cast<std::ptrdiff_t>(k + 1),
                      positive.end(), std::greater<>());
    const double threshold = positive[k];
    double log_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        log_sum += std::log(positive[i] / threshold);
    }
    if (!(log_sum > 0.0)) {
        throw InsufficientDataError("tail order statistics are all equal");
    }
    return static_cast<double>(k) / log_sum;
}

DiffusionReport analyze_curve(const MsdCurve& curve, const AnalysisOptions& options)
{
    if (std::none_of(curve.values.begin(), curve.values.end(), [](double v) { return v > 0.0; })) {
        throw DegenerateDataError("every MSD value is zero (constant trajectory)");
    }
    FitWindow window = options.window.value_or(default_fit_window(curve));
    window.hi = std::min(window.hi, curve.delays.back());

    DiffusionReport report;
    report.fit = fit_power_law(curve, window);

    const std::size_t grid_points = log_grid(usable_points(curve, report.fit.window)).x.size();
    if (grid_points >= kMinSegmentPoints) {
        const std::size_t feasible = grid_points / kMinSegmentPoints - 1;
        report.segments =
            segment_phases(curve, std::min(options.max_breakpoints, feasible), report.fit.window);
    } else {
        report.segments = {Segment{report.fit.window, report.fit.alpha}};
    }

    const PlateauTest plateau = detect_plateau(curve, report.fit.window);
    report.regime = classify_regime(report.fit, plateau);
    if (plateau.detected) {
        report.plateau_level = plateau.level;
    }
    return report;
}

TrajectoryAnalysis analyze_trajectory(const Trajectory& traj, const AnalysisOptions& options)
{
    TrajectoryAnalysis result;
    result.curve = msd(traj);
    result.report = analyze_curve(result.curve, options);
    try {
        const auto lengths = step_lengths(traj);
        result.report.tail_exponent = tail_exponent(lengths, options.tail_fraction);
    } catch (const InsufficientDataError&) {
        result.report.tail_exponent.reset();
    }
    return result;
}

} // namespace semrheo
