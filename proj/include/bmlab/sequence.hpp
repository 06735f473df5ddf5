#pragma once

// Separated real sequences, their generators, and continuous counting functions.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bmlab/error.hpp"

namespace bmlab {

struct Window {
    double lo{0.0};
    double hi{0.0};

    double width() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
    /// Half-width of the largest origin-centred interval [-R, R] inside the window.
    double symmetric_radius() const noexcept { return std::min(-lo, hi); }
};

/// Finite window of a separated sequence. Construct through load_sequence.
class SeparatedSequence {
public:
    SeparatedSequence() = default;

    std::span<const double> points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    double delta() const noexcept { return delta_; }
    const Window& window() const noexcept { return window_; }

    double operator[](std::size_t k) const { return points_[k]; }

private:
    friend SeparatedSequence load_sequence(std::vector<double>, std::optional<Window>,
                                           std::optional<double>);
    std::vector<double> points_;
    double delta_{std::numeric_limits<double>::infinity()};
    Window window_{};
};

/// Sorts, validates separation and fixes the window. A single point gets an
/// infinite delta and, absent an explicit window, the window [p - 1/2, p + 1/2].
inline SeparatedSequence load_sequence(std::vector<double> points,
                                       std::optional<Window> window = std::nullopt,
                                       std::optional<double> min_delta = std::nullopt) {
    require(!points.empty(), ErrorKind::InvalidArgument, "sequence must contain at least one point");
    for (double p : points)
        require(std::isfinite(p), ErrorKind::InvalidArgument, "sequence points must be finite");
    std::sort(points.begin(), points.end());

    double delta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < points.size(); ++k) {
        const double gap = points[k] - points[k - 1];
        if (gap == 0.0)
            fail(ErrorKind::DuplicatePoint, "point " + std::to_string(points[k]) + " occurs twice");
        delta = std::min(delta, gap);
    }
    if (min_delta && delta < *min_delta)
        fail(ErrorKind::NotSeparated, "minimum gap " + std::to_string(delta) +
                                          " is below the required " + std::to_string(*min_delta));

    Window w;
    if (window) {
        w = *window;
        require(w.lo < w.hi, ErrorKind::EmptyWindow, "window must satisfy lo < hi");
        require(w.lo <= points.front() && points.back() <= w.hi, ErrorKind::OutOfWindow,
                "window does not contain every point");
    } else if (points.size() == 1) {
        w = {points.front() - 0.5, points.front() + 0.5};
    } else {
        w = {points.front(), points.back()};
    }

    SeparatedSequence seq;
    seq.points_ = std::move(points);
    seq.delta_ = delta;
    seq.window_ = w;
    return seq;
}

/// Reads one real per line; blank lines and lines starting with '#' are skipped.
inline std::vector<double> read_sequence_file(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open sequence file '" + path + "'");
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t\r");
        const char* begin = line.data() + first;
        const char* end = line.data() + last + 1;
        if (*begin == '+') ++begin;
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end)
            fail(ErrorKind::Io, path + ":" + std::to_string(lineno) + ": not a real number");
        values.push_back(value);
    }
    return values;
}

// ---------------------------------------------------------------------------
// Generators

struct Lattice {
    double step{1.0};
    std::int64_t n_lo{0};
    std::int64_t n_hi{0};
};

/// lambda_n = n + n / log(|n| + 2)
struct LogPerturbedLattice {
    std::int64_t n_lo{0};
    std::int64_t n_hi{0};
};

/// {sign(n) n^2}; n = 0 contributes the single point 0.
struct SymmetricSquares {
    std::int64_t n_lo{0};
    std::int64_t n_hi{0};
};

using GeneratorSpec = std::variant<Lattice, LogPerturbedLattice, SymmetricSquares>;

inline double log_perturbed_point(std::int64_t n) {
    const double x = static_cast<double>(n);
    return x + x / std::log(std::abs(x) + 2.0);
}

inline SeparatedSequence generate(const GeneratorSpec& spec) {
    std::vector<double> points;
    auto check_range = [](std::int64_t lo, std::int64_t hi) {
        require(lo <= hi, ErrorKind::EmptyRange, "generator index range is empty");
    };
    std::visit(
        [&](const auto& g) {
            using G = std::decay_t<decltype(g)>;
            check_range(g.n_lo, g.n_hi);
            points.reserve(static_cast<std::size_t>(g.n_hi - g.n_lo + 1));
            for (std::int64_t n = g.n_lo; n <= g.n_hi; ++n) {
                if constexpr (std::is_same_v<G, Lattice>) {
                    require(g.step > 0.0, ErrorKind::InvalidArgument, "lattice step must be positive");
                    points.push_back(g.step * static_cast<double>(n));
                } else if constexpr (std::is_same_v<G, LogPerturbedLattice>) {
                    points.push_back(log_perturbed_point(n));
                } else {
                    const double sq = static_cast<double>(n) * static_cast<double>(n);
                    points.push_back(n < 0 ? -sq : sq);
                }
            }
        },
        spec);
    return load_sequence(std::move(points));
}

enum class GeneratorKind { Lattice, Squares, LogPerturbed };

/// Index range covering [-radius, radius] for the given family.
inline GeneratorSpec spec_within_radius(GeneratorKind kind, double radius, double step = 1.0) {
    require(radius > 0.0, ErrorKind::InvalidArgument, "radius must be positive");
    switch (kind) {
    case GeneratorKind::Lattice: {
        require(step > 0.0, ErrorKind::InvalidArgument, "lattice step must be positive");
        const auto n = static_cast<std::int64_t>(std::floor(radius / step));
        return Lattice{step, -n, n};
    }
    case GeneratorKind::Squares: {
        const auto n = static_cast<std::int64_t>(std::floor(std::sqrt(radius)));
        return SymmetricSquares{-n, n};
    }
    case GeneratorKind::LogPerturbed: {
        // lambda_n is odd and increasing in n, so bracket the last index by doubling then bisect.
        std::int64_t lo = 0, hi = 1;
        while (log_perturbed_point(hi) <= radius) hi *= 2;
        while (hi - lo > 1) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            (log_perturbed_point(mid) <= radius ? lo : hi) = mid;
        }
        return LogPerturbedLattice{-lo, lo};
    }
    }
    fail(ErrorKind::UnknownGenerator, "unknown generator kind");
}

// ---------------------------------------------------------------------------
// Piecewise-linear functions

struct Breakpoint {
    double x{0.0};
    double y{0.0};
};

/// Continuous piecewise-linear function with linear extrapolation past both ends.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;

    PiecewiseLinear(std::vector<Breakpoint> breakpoints, double left_slope, double right_slope)
        : breakpoints_(std::move(breakpoints)), left_slope_(left_slope), right_slope_(right_slope) {
        require(!breakpoints_.empty(), ErrorKind::InvalidArgument,
                "piecewise-linear function needs at least one breakpoint");
        for (std::size_t i = 1; i < breakpoints_.size(); ++i)
            require(breakpoints_[i].x > breakpoints_[i - 1].x, ErrorKind::InvalidArgument,
                    "breakpoint abscissae must be strictly increasing");
    }

    std::span<const Breakpoint> breakpoints() const noexcept { return breakpoints_; }
    double left_slope() const noexcept { return left_slope_; }
    double right_slope() const noexcept { return right_slope_; }

    double operator()(double x) const noexcept {
        const auto& b = breakpoints_;
        if (x <= b.front().x) return b.front().y + left_slope_ * (x - b.front().x);
        if (x >= b.back().x) return b.back().y + right_slope_ * (x - b.back().x);
        const auto it = std::upper_bound(b.begin(), b.end(), x,
                                         [](double v, const Breakpoint& p) { return v < p.x; });
        const Breakpoint& r = *it;
        const Breakpoint& l = *(it - 1);
        if (x == l.x) return l.y;
        return l.y + (r.y - l.y) * ((x - l.x) / (r.x - l.x));
    }

    /// Slope of the linear piece containing x (right-continuous at breakpoints).
    double slope_at(double x) const noexcept {
        const auto& b = breakpoints_;
        if (x < b.front().x) return left_slope_;
        if (x >= b.back().x) return right_slope_;
        const auto it = std::upper_bound(b.begin(), b.end(), x,
                                         [](double v, const Breakpoint& p) { return v < p.x; });
        return ((it)->y - (it - 1)->y) / ((it)->x - (it - 1)->x);
    }

    /// x -> slope * x + offset - f(x), built exactly on the same breakpoints.
    PiecewiseLinear affine_minus(double slope, double offset = 0.0) const {
        std::vector<Breakpoint> out;
        out.reserve(breakpoints_.size());
        for (const auto& p : breakpoints_) out.push_back({p.x, slope * p.x + offset - p.y});
        return {std::move(out), slope - left_slope_, slope - right_slope_};
    }

private:
    std::vector<Breakpoint> breakpoints_;
    double left_slope_{0.0};
    double right_slope_{0.0};
};

/// n_Lambda: rises by one between neighbouring points and vanishes at the origin.
/// Outside the data the end segments are extended, and the value at 0 is read off
/// that extension when 0 is not covered by the data.
inline PiecewiseLinear counting_function(const SeparatedSequence& seq) {
    const auto pts = seq.points();
    require(pts.size() >= 2, ErrorKind::SinglePoint, "counting function needs at least two points");
    const std::size_t n = pts.size();
    const double left_slope = 1.0 / (pts[1] - pts[0]);
    const double right_slope = 1.0 / (pts[n - 1] - pts[n - 2]);

    double at_zero = 0.0;
    if (0.0 <= pts.front()) {
        at_zero = left_slope * (0.0 - pts.front());
    } else if (0.0 >= pts.back()) {
        at_zero = static_cast<double>(n - 1) + right_slope * (0.0 - pts.back());
    } else {
        const auto it = std::lower_bound(pts.begin(), pts.end(), 0.0);
        const auto k = static_cast<std::size_t>(it - pts.begin());
        if (*it == 0.0) {
            at_zero = static_cast<double>(k);
        } else {
            const double t = (0.0 - pts[k - 1]) / (pts[k] - pts[k - 1]);
            at_zero = static_cast<double>(k - 1) + t;
        }
    }

    std::vector<Breakpoint> bps;
    bps.reserve(n);
    for (std::size_t k = 0; k < n; ++k) bps.push_back({pts[k], static_cast<double>(k) - at_zero});
    return {std::move(bps), left_slope, right_slope};
}

/// Number of points in the closed range [lo, hi]; the range must lie in the window.
inline std::size_t count_in(const SeparatedSequence& seq, double lo, double hi) {
    require(lo <= hi, ErrorKind::InvalidArgument, "count range must satisfy lo <= hi");
    const Window& w = seq.window();
    if (lo < w.lo || hi > w.hi)
        fail(ErrorKind::OutOfWindow, "range [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                         "] exceeds the data window");
    const auto pts = seq.points();
    const auto first = std::lower_bound(pts.begin(), pts.end(), lo);
    const auto last = std::upper_bound(pts.begin(), pts.end(), hi);
    return static_cast<std::size_t>(last - first);
}

} // namespace bmlab
