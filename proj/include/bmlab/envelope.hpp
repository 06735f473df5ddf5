#pragma once

// Interval families, the shortness functional sum |I|^2 / (1 + dist(I, 0)^2), and
// extraction of the components of {x : gamma(x) < max_{t >= x} gamma(t)}.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bmlab/error.hpp"
#include "bmlab/fit.hpp"
#include "bmlab/sequence.hpp"

namespace bmlab {

struct Interval {
    double left{0.0};
    double right{0.0};

    double length() const noexcept { return right - left; }
    double distance_to_origin() const noexcept {
        if (left <= 0.0 && 0.0 <= right) return 0.0;
        return std::min(std::abs(left), std::abs(right));
    }
    bool contains_open(double x) const noexcept { return left < x && x < right; }
};

inline Interval make_interval(double left, double right) {
    require(left < right, ErrorKind::InvalidArgument, "interval needs left < right");
    return {left, right};
}

inline std::size_t count_in(const SeparatedSequence& seq, const Interval& interval) {
    return count_in(seq, interval.left, interval.right);
}

inline double shortness_term(const Interval& interval) {
    const double len = interval.length();
    const double d = interval.distance_to_origin();
    return len * len / (1.0 + d * d);
}

enum class EdgeFlag { Interior, TouchesWindowEdge };

constexpr std::string_view to_string(EdgeFlag flag) noexcept {
    return flag == EdgeFlag::Interior ? "interior" : "edge";
}

/// Ordered family of intervals with pairwise disjoint interiors.
class IntervalFamily {
public:
    IntervalFamily() = default;

    explicit IntervalFamily(std::vector<Interval> intervals, std::vector<EdgeFlag> flags = {})
        : intervals_(std::move(intervals)), flags_(std::move(flags)) {
        if (flags_.empty()) flags_.assign(intervals_.size(), EdgeFlag::Interior);
        require(flags_.size() == intervals_.size(), ErrorKind::InvalidArgument,
                "one edge flag per interval is required");
        for (std::size_t k = 0; k < intervals_.size(); ++k) {
            require(intervals_[k].left < intervals_[k].right, ErrorKind::InvalidArgument,
                    "family intervals need left < right");
            if (k > 0)
                require(intervals_[k].left >= intervals_[k - 1].right, ErrorKind::InvalidArgument,
                        "family intervals must be sorted and disjoint");
        }
    }

    /// Sorts by left endpoint before validating.
    static IntervalFamily from_unsorted(std::vector<Interval> intervals) {
        std::sort(intervals.begin(), intervals.end(),
                  [](const Interval& a, const Interval& b) { return a.left < b.left; });
        return IntervalFamily(std::move(intervals));
    }

    std::span<const Interval> intervals() const noexcept { return intervals_; }
    std::span<const EdgeFlag> flags() const noexcept { return flags_; }
    std::size_t size() const noexcept { return intervals_.size(); }
    bool empty() const noexcept { return intervals_.empty(); }
    const Interval& operator[](std::size_t k) const { return intervals_[k]; }

    bool contains_open(double x) const noexcept {
        auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                                   [](double v, const Interval& i) { return v < i.left; });
        if (it == intervals_.begin()) return false;
        return (it - 1)->contains_open(x);
    }

    /// Sub-family of intervals lying inside [-radius, radius].
    IntervalFamily within(double radius) const {
        std::vector<Interval> keep;
        std::vector<EdgeFlag> keep_flags;
        for (std::size_t k = 0; k < intervals_.size(); ++k) {
            if (intervals_[k].left >= -radius && intervals_[k].right <= radius) {
                keep.push_back(intervals_[k]);
                keep_flags.push_back(flags_[k]);
            }
        }
        return IntervalFamily(std::move(keep), std::move(keep_flags));
    }

private:
    std::vector<Interval> intervals_;
    std::vector<EdgeFlag> flags_;
};

/// Sum of |I|^2 / (1 + dist(I,0)^2) over the intervals inside [-radius, radius].
inline double shortness_partial_sum(const IntervalFamily& family, double radius) {
    double sum = 0.0;
    for (const auto& i : family.intervals())
        if (i.left >= -radius && i.right <= radius) sum += shortness_term(i);
    return sum;
}

/// Same sum restricted to intervals flagged as touching the window edge.
inline double edge_partial_sum(const IntervalFamily& family, double radius) {
    double sum = 0.0;
    for (std::size_t k = 0; k < family.size(); ++k) {
        const auto& i = family[k];
        if (family.flags()[k] == EdgeFlag::TouchesWindowEdge && i.left >= -radius && i.right <= radius)
            sum += shortness_term(i);
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Short / long classification from finitely many radii

enum class Shortness { Short, Long, Inconclusive };
enum class GrowthModel { Bounded, LogGrowth, Other };

constexpr std::string_view to_string(Shortness s) noexcept {
    switch (s) {
    case Shortness::Short: return "Short";
    case Shortness::Long: return "Long";
    case Shortness::Inconclusive: return "Inconclusive";
    }
    return "?";
}

constexpr std::string_view to_string(GrowthModel m) noexcept {
    switch (m) {
    case GrowthModel::Bounded: return "Bounded";
    case GrowthModel::LogGrowth: return "LogGrowth";
    case GrowthModel::Other: return "Other";
    }
    return "?";
}

/// Decision thresholds for reading a verdict off partial sums S(R_1) <= ... <= S(R_n).
///
/// Short: the last relative increment (S_n - S_{n-1}) / S_n is at most
///   `convergence_tol` and S_n <= `cap_factor` * R_n^2. (4 R^2 is the value of a
///   single component filling [-R, R], so sums near that scale mean the window
///   is dominated by one component.)
/// Long: otherwise, if S grows linearly in log R (LogGrowth) or as a power of R
///   (Other, fitted on log S vs log R) with coefficient of determination at least
///   `min_r_squared`, and the last increment is at least `min_persistence` times
///   the mean increment (convergent tails have decaying increments).
/// Anything else is Inconclusive.
struct ShortnessThresholds {
    double convergence_tol{1e-3};
    double min_r_squared{0.99};
    std::size_t min_radii{4};
    double cap_factor{1.0};
    double min_persistence{0.25};
};

struct GrowthFit {
    GrowthModel model{GrowthModel::Bounded};
    double coefficient{0.0}; ///< limit estimate, log slope, or power exponent
    double r_squared{0.0};
};

struct ShortnessReport {
    std::vector<double> radii;
    std::vector<double> partial_sums;
    std::vector<double> edge_sums; ///< part of each partial sum carried by edge-flagged intervals
    GrowthFit fit;
    Shortness verdict{Shortness::Inconclusive};
    bool degenerate{false}; ///< every radius produced an empty family
    double last_relative_increment{0.0};
    double cap{0.0};
    ShortnessThresholds thresholds;
};

namespace detail {

inline ShortnessReport decide_shortness(ShortnessReport report) {
    const auto& th = report.thresholds;
    const auto& r = report.radii;
    const auto& s = report.partial_sums;
    const std::size_t n = s.size();

    report.cap = th.cap_factor * r.back() * r.back();
    const double last = s.back();
    const double step = s[n - 1] - s[n - 2];
    report.last_relative_increment = last > 0.0 ? step / last : 0.0;

    if (report.degenerate) {
        report.verdict = Shortness::Short;
        report.fit = {GrowthModel::Bounded, 0.0, 1.0};
        return report;
    }
    if (report.last_relative_increment <= th.convergence_tol && last <= report.cap) {
        report.verdict = Shortness::Short;
        report.fit = {GrowthModel::Bounded, last, 1.0};
        return report;
    }

    std::vector<double> log_r(n);
    for (std::size_t i = 0; i < n; ++i) log_r[i] = std::log(r[i]);
    const LineFit log_fit = fit_line(log_r, s);

    LineFit power_fit{0.0, 0.0, 0.0};
    std::vector<double> px, py;
    for (std::size_t i = 0; i < n; ++i) {
        if (s[i] > 0.0) {
            px.push_back(log_r[i]);
            py.push_back(std::log(s[i]));
        }
    }
    const bool power_ok = px.size() >= th.min_radii;
    if (power_ok) power_fit = fit_line(px, py);

    const double mean_step = (s.back() - s.front()) / static_cast<double>(n - 1);
    const bool persistent = mean_step > 0.0 && step >= th.min_persistence * mean_step;

    if (persistent && log_fit.slope > 0.0 && log_fit.r_squared >= th.min_r_squared) {
        report.verdict = Shortness::Long;
        report.fit = {GrowthModel::LogGrowth, log_fit.slope, log_fit.r_squared};
    } else if (persistent && power_ok && power_fit.slope > 0.0 &&
               power_fit.r_squared >= th.min_r_squared) {
        report.verdict = Shortness::Long;
        report.fit = {GrowthModel::Other, power_fit.slope, power_fit.r_squared};
    } else {
        report.verdict = Shortness::Inconclusive;
        if (power_ok && power_fit.r_squared > log_fit.r_squared)
            report.fit = {GrowthModel::Other, power_fit.slope, power_fit.r_squared};
        else
            report.fit = {GrowthModel::LogGrowth, log_fit.slope, log_fit.r_squared};
    }
    return report;
}

} // namespace detail

/// Evaluates the shortness sum of `family_at_radius(R)` at every R in `radii`
/// (strictly increasing) and classifies the trend.
template <class FamilyAt>
ShortnessReport classify_short_long(FamilyAt&& family_at_radius, std::span<const double> radii,
                                    const ShortnessThresholds& thresholds = {}) {
    require(radii.size() >= std::max<std::size_t>(thresholds.min_radii, 2), ErrorKind::InvalidArgument,
            "classification needs at least " + std::to_string(thresholds.min_radii) + " radii");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        require(radii[i] > 0.0, ErrorKind::InvalidArgument, "radii must be positive");
        if (i > 0)
            require(radii[i] > radii[i - 1], ErrorKind::InvalidArgument,
                    "radii must be strictly increasing");
    }

    ShortnessReport report;
    report.thresholds = thresholds;
    report.radii.assign(radii.begin(), radii.end());
    bool all_empty = true;
    for (double r : radii) {
        const IntervalFamily family = family_at_radius(r);
        all_empty = all_empty && family.empty();
        report.partial_sums.push_back(shortness_partial_sum(family, r));
        report.edge_sums.push_back(edge_partial_sum(family, r));
    }
    report.degenerate = all_empty;
    return detail::decide_shortness(std::move(report));
}

/// Classifies a fixed family by its restrictions to [-R, R].
inline ShortnessReport classify_family(const IntervalFamily& family, std::span<const double> radii,
                                       const ShortnessThresholds& thresholds = {}) {
    return classify_short_long([&](double r) { return family.within(r); }, radii, thresholds);
}

/// Increasing geometric ladder ending at r_max.
inline std::vector<double> radius_ladder(double r_max, std::size_t count, double ratio = 2.0) {
    require(r_max > 0.0 && ratio > 1.0 && count >= 1, ErrorKind::InvalidArgument,
            "radius ladder needs r_max > 0, ratio > 1, count >= 1");
    std::vector<double> radii(count);
    double r = r_max;
    for (std::size_t i = count; i-- > 0;) {
        radii[i] = r;
        r /= ratio;
    }
    return radii;
}

// ---------------------------------------------------------------------------
// BM family of a piecewise-linear function

/// Connected components of {x in window : gamma(x) < max_{[x, window.hi]} gamma}.
///
/// One right-to-left pass over the linear pieces keeps the running maximum S of
/// gamma over [x_{i+1}, hi]. On a piece the set {gamma < S} is an interval whose
/// left end is either the piece's left knot or the closed-form crossing with S.
/// A knot joins two neighbouring pieces only when the knot itself lies strictly
/// below the running maximum; plateaus at the maximum are excluded.
inline IntervalFamily bm_family(const PiecewiseLinear& gamma, Window window) {
    require(window.lo < window.hi, ErrorKind::EmptyWindow, "window must satisfy lo < hi");

    std::vector<double> xs;
    std::vector<double> g;
    xs.push_back(window.lo);
    g.push_back(gamma(window.lo));
    const auto bps = gamma.breakpoints();
    auto it = std::upper_bound(bps.begin(), bps.end(), window.lo,
                               [](double v, const Breakpoint& p) { return v < p.x; });
    for (; it != bps.end() && it->x < window.hi; ++it) {
        xs.push_back(it->x);
        g.push_back(it->y);
    }
    xs.push_back(window.hi);
    g.push_back(gamma(window.hi));

    const std::size_t last = xs.size() - 1;
    std::vector<Interval> reversed;
    double running_max = g[last];
    bool open = false;
    Interval current{};
    bool right_knot_in_set = false;

    for (std::size_t i = last; i-- > 0;) {
        const double gl = g[i], gr = g[i + 1];
        double piece_left = std::numeric_limits<double>::quiet_NaN();
        if (gr < running_max) {
            if (gl <= running_max) {
                piece_left = xs[i];
            } else {
                const double t = (gl - running_max) / (gl - gr);
                piece_left = xs[i] + t * (xs[i + 1] - xs[i]);
            }
        } else if (gl < running_max) {
            piece_left = xs[i];
        }

        if (!std::isnan(piece_left) && piece_left < xs[i + 1]) {
            if (open && current.left == xs[i + 1] && right_knot_in_set) {
                current.left = piece_left;
            } else {
                if (open) reversed.push_back(current);
                current = {piece_left, xs[i + 1]};
                open = true;
            }
        }
        right_knot_in_set = gl < running_max;
        running_max = std::max(running_max, gl);
    }
    if (open) reversed.push_back(current);

    std::vector<Interval> intervals(reversed.rbegin(), reversed.rend());
    std::vector<EdgeFlag> flags;
    flags.reserve(intervals.size());
    for (const auto& c : intervals)
        flags.push_back(c.left <= window.lo || c.right >= window.hi ? EdgeFlag::TouchesWindowEdge
                                                                    : EdgeFlag::Interior);
    return IntervalFamily(std::move(intervals), std::move(flags));
}

enum class AlmostDecreasing { Yes, No, Inconclusive };

constexpr std::string_view to_string(AlmostDecreasing v) noexcept {
    switch (v) {
    case AlmostDecreasing::Yes: return "Yes";
    case AlmostDecreasing::No: return "No";
    case AlmostDecreasing::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct AlmostDecreasingResult {
    AlmostDecreasing verdict{AlmostDecreasing::Inconclusive};
    ShortnessReport report;
};

/// Shortness of BM(gamma) read through the windows [-R, R], R in `radii`.
/// Components touching a window edge are kept in the sums (clipped to the
/// window) and their share is reported in `edge_sums`.
inline AlmostDecreasingResult is_almost_decreasing(const PiecewiseLinear& gamma,
                                                   std::span<const double> radii,
                                                   const ShortnessThresholds& thresholds = {}) {
    AlmostDecreasingResult result;
    result.report = classify_short_long([&](double r) { return bm_family(gamma, {-r, r}); }, radii,
                                        thresholds);
    switch (result.report.verdict) {
    case Shortness::Short: result.verdict = AlmostDecreasing::Yes; break;
    case Shortness::Long: result.verdict = AlmostDecreasing::No; break;
    case Shortness::Inconclusive: result.verdict = AlmostDecreasing::Inconclusive; break;
    }
    return result;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_family_csv(std::ostream& out, const IntervalFamily& family) {
    out << "left,right,flag\n";
    for (std::size_t k = 0; k < family.size(); ++k)
        out << format_real(family[k].left) << ',' << format_real(family[k].right) << ','
            << to_string(family.flags()[k]) << '\n';
}

/// Reads `left,right[,flag]` rows; a header row and '#' comments are skipped.
inline IntervalFamily read_family_csv(std::istream& in, const std::string& name = "<stream>") {
    std::vector<Interval> intervals;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::stringstream ss(line);
        std::string a, b;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        double l = 0.0, r = 0.0;
        try {
            std::size_t pa = 0, pb = 0;
            l = std::stod(a, &pa);
            r = std::stod(b, &pb);
        } catch (const std::exception&) {
            if (intervals.empty() && lineno == 1) continue; // header
            fail(ErrorKind::Io, name + ":" + std::to_string(lineno) + ": expected left,right");
        }
        if (!(l < r)) fail(ErrorKind::Io, name + ":" + std::to_string(lineno) + ": needs left < right");
        intervals.push_back({l, r});
    }
    try {
        return IntervalFamily::from_unsorted(std::move(intervals));
    } catch (const Error& e) {
        fail(ErrorKind::Io, name + ": " + e.what());
    }
}

inline IntervalFamily read_family_csv_file(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open interval file '" + path + "'");
    return read_family_csv(in, path);
}

} // namespace bmlab
