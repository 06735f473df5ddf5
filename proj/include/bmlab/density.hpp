#pragma once

// Interior Beurling-Malliavin density by bisection on a, where the trial at a asks
// whether a*x - n_Lambda(x) is almost decreasing, plus interval-family witnesses
// for non-Polya behaviour and the strong-regularity integral.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bmlab/envelope.hpp"
#include "bmlab/error.hpp"
#include "bmlab/sequence.hpp"

namespace bmlab {

enum class PolyaClass { Polya, NotPolya, Inconclusive };

constexpr std::string_view to_string(PolyaClass c) noexcept {
    switch (c) {
    case PolyaClass::Polya: return "Polya";
    case PolyaClass::NotPolya: return "NotPolya";
    case PolyaClass::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct DensityTrial {
    double a{0.0};
    AlmostDecreasing verdict{AlmostDecreasing::Inconclusive};
    ShortnessReport report;
};

struct DensityReport {
    double a_lower{0.0};                ///< largest a with verdict Yes (0 if none)
    double a_upper{0.0};                ///< smallest a with verdict No
    std::vector<DensityTrial> trials;   ///< in issue order
    PolyaClass polya_class{PolyaClass::Inconclusive};
    double gap_lower{0.0};              ///< 2 pi a_lower
    double gap_upper{0.0};              ///< 2 pi a_upper
    double a_tolerance{0.0};
    double a_max{0.0};                  ///< initial bisection cap 2 / delta
    double resolution{0.0};             ///< 1 / R_max: slope differences the window can separate
    std::vector<double> radii;
    Window window;
    std::size_t points{0};
    std::string note;
};

/// Default density ladder: halvings of r_max (the largest origin-centred radius of
/// the window unless a smaller one is given), between 4 and 10 rungs, stopping
/// before rungs shorter than 8 delta.
inline std::vector<double> default_density_radii(const SeparatedSequence& seq,
                                                 std::optional<double> limit = std::nullopt) {
    double r_max = seq.window().symmetric_radius();
    if (limit) r_max = std::min(r_max, *limit);
    if (!(r_max > 0.0)) return {};
    std::size_t count = 1;
    double r = r_max;
    while (count < 10 && r / 2.0 >= 8.0 * seq.delta()) {
        r /= 2.0;
        ++count;
    }
    return radius_ladder(r_max, std::max<std::size_t>(count, 4));
}

struct DensityOptions {
    double a_tolerance{0.05};
    std::vector<double> radii; ///< empty: default_density_radii
    ShortnessThresholds thresholds{};
    std::size_t max_trials{64};
};

/// gamma_a(x) = a x - n_Lambda(x) on the breakpoints of n_Lambda.
inline PiecewiseLinear gamma_for(const PiecewiseLinear& counting, double a) {
    return counting.affine_minus(a);
}

/// Brackets D_*(Lambda) = sup{a : a x - n_Lambda(x) is almost decreasing}.
///
/// Trials are issued by bisection on [0, 2/delta]; a = 0 is taken as Yes without
/// a trial since -n_Lambda is nonincreasing. When a trial is
/// Inconclusive the search keeps shrinking the gaps between the definite
/// verdicts and the inconclusive zone, so the final bracket is the tightest
/// one the definite trials support.
///
/// Classification: Polya when a_lower >= 2 tol, NotPolya when a_upper <= 2 tol,
/// otherwise Inconclusive; also Inconclusive when tol is finer than the window
/// resolution 1/R_max.
inline DensityReport interior_density(const SeparatedSequence& seq, const DensityOptions& options = {}) {
    require(seq.size() >= 16, ErrorKind::InvalidArgument, "density needs at least 16 points");
    require(options.a_tolerance > 0.0, ErrorKind::InvalidArgument, "a_tolerance must be positive");

    DensityReport rep;
    rep.a_tolerance = options.a_tolerance;
    rep.window = seq.window();
    rep.points = seq.size();
    rep.radii = options.radii.empty() ? default_density_radii(seq) : options.radii;
    if (rep.radii.size() < options.thresholds.min_radii)
        fail(ErrorKind::WindowTooSmall, "window does not contain an origin-centred radius ladder");
    require(rep.radii.back() <= seq.window().symmetric_radius(), ErrorKind::OutOfWindow,
            "density radii must lie inside the data window");
    rep.a_max = 2.0 / seq.delta();
    rep.resolution = 1.0 / rep.radii.back();

    const PiecewiseLinear counting = counting_function(seq);
    auto run_trial = [&](double a) {
        auto result = is_almost_decreasing(gamma_for(counting, a), rep.radii, options.thresholds);
        rep.trials.push_back({a, result.verdict, std::move(result.report)});
        return rep.trials.back().verdict;
    };

    double lo = 0.0;
    double hi = rep.a_max;
    bool hi_is_no = false;
    switch (run_trial(rep.a_max)) {
    case AlmostDecreasing::No: hi_is_no = true; break;
    case AlmostDecreasing::Yes: lo = rep.a_max; break;
    case AlmostDecreasing::Inconclusive: break;
    }

    const double step = std::max(options.a_tolerance, rep.resolution);
    while (rep.trials.size() < options.max_trials && lo < hi) {
        double inc_min = std::numeric_limits<double>::infinity();
        double inc_max = -std::numeric_limits<double>::infinity();
        for (const auto& t : rep.trials) {
            if (t.verdict == AlmostDecreasing::Inconclusive && t.a > lo && t.a < hi) {
                inc_min = std::min(inc_min, t.a);
                inc_max = std::max(inc_max, t.a);
            }
        }
        // a_max itself may be the inconclusive point.
        if (!hi_is_no) inc_max = std::max(inc_max, hi), inc_min = std::min(inc_min, hi);

        double next;
        if (std::isinf(inc_min)) {
            if (hi - lo <= step) break;
            next = 0.5 * (lo + hi);
        } else {
            const double left_gap = inc_min - lo;
            const double right_gap = hi_is_no ? hi - inc_max : 0.0;
            if (std::max(left_gap, right_gap) <= step) break;
            next = left_gap >= right_gap ? 0.5 * (lo + inc_min) : 0.5 * (inc_max + hi);
        }
        switch (run_trial(next)) {
        case AlmostDecreasing::Yes: lo = next; break;
        case AlmostDecreasing::No:
            hi = next;
            hi_is_no = true;
            break;
        case AlmostDecreasing::Inconclusive: break;
        }
    }

    const bool any_definite = std::any_of(rep.trials.begin(), rep.trials.end(), [](const auto& t) {
        return t.verdict != AlmostDecreasing::Inconclusive;
    });
    if (!any_definite) fail(ErrorKind::WindowTooSmall, "every density trial was inconclusive");

    rep.a_lower = lo;
    rep.a_upper = hi_is_no ? hi : std::numeric_limits<double>::infinity();
    rep.gap_lower = 2.0 * std::numbers::pi * rep.a_lower;
    rep.gap_upper = 2.0 * std::numbers::pi * rep.a_upper;

    const double tol = options.a_tolerance;
    if (tol < rep.resolution) {
        rep.polya_class = PolyaClass::Inconclusive;
        rep.note = "tolerance is finer than the window resolution 1/R";
    } else if (rep.a_lower >= 2.0 * tol) {
        rep.polya_class = PolyaClass::Polya;
    } else if (rep.a_upper <= 2.0 * tol) {
        rep.polya_class = PolyaClass::NotPolya;
    } else {
        rep.polya_class = PolyaClass::Inconclusive;
        rep.note = "density bracket straddles the decision tolerance";
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Witness families on geometric ladders

struct WitnessFamily {
    IntervalFamily family;
    std::vector<std::size_t> counts;
    std::vector<double> ratios; ///< counts[k] / |I_k|, aligned with family
    ShortnessReport shortness;
    double ladder_ratio{0.0};
};

struct WitnessSearchResult {
    std::optional<WitnessFamily> witness;
    std::vector<double> ladders_tried;
    std::size_t candidates_examined{0};
};

/// Candidate intervals [r^k, r^{k+1}] and their mirrors inside the window,
/// ordered by k with the positive interval first.
inline std::vector<Interval> ladder_candidates(const Window& window, double ratio) {
    std::vector<Interval> out;
    const double reach = std::max(std::abs(window.lo), std::abs(window.hi));
    for (double lo = 1.0; lo <= reach; lo *= ratio) {
        const double hi = lo * ratio;
        if (window.lo <= lo && hi <= window.hi) out.push_back({lo, hi});
        if (window.lo <= -hi && -lo <= window.hi) out.push_back({-hi, -lo});
    }
    return out;
}

namespace detail {

inline WitnessSearchResult ladder_search(const SeparatedSequence& seq,
                                         const std::function<bool(double ratio, std::size_t index)>& accept,
                                         const ShortnessThresholds& thresholds) {
    WitnessSearchResult result;
    const Window& w = seq.window();
    const double reach = std::max(std::abs(w.lo), std::abs(w.hi));
    for (double ratio : {4.0, 2.0}) {
        result.ladders_tried.push_back(ratio);
        std::vector<Interval> chosen;
        std::vector<std::size_t> counts;
        for (const Interval& cand : ladder_candidates(w, ratio)) {
            ++result.candidates_examined;
            const std::size_t c = count_in(seq, cand);
            if (accept(static_cast<double>(c) / cand.length(), chosen.size())) {
                chosen.push_back(cand);
                counts.push_back(c);
            }
        }
        if (chosen.empty()) continue;

        std::vector<double> radii;
        for (double r = ratio; r <= reach; r *= ratio) radii.push_back(r);
        if (radii.size() < thresholds.min_radii) continue;

        std::vector<std::size_t> order(chosen.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return chosen[a].left < chosen[b].left; });
        WitnessFamily wf;
        std::vector<Interval> sorted;
        for (std::size_t i : order) {
            sorted.push_back(chosen[i]);
            wf.counts.push_back(counts[i]);
            wf.ratios.push_back(static_cast<double>(counts[i]) / chosen[i].length());
        }
        wf.family = IntervalFamily(std::move(sorted));
        wf.ladder_ratio = ratio;
        wf.shortness = classify_family(wf.family, radii, thresholds);
        if (wf.shortness.verdict == Shortness::Long) {
            result.witness = std::move(wf);
            return result;
        }
    }
    return result;
}

} // namespace detail

/// cap[n] = c / sqrt(n + 1), a decreasing cap sequence tending to zero.
inline std::vector<double> default_ratio_cap(std::size_t length = 64, double c = 0.5) {
    std::vector<double> cap(length);
    for (std::size_t n = 0; n < length; ++n) cap[n] = c / std::sqrt(static_cast<double>(n + 1));
    return cap;
}

/// Greedy search for a long family with #(Lambda cap I_n)/|I_n| <= ratio_cap[n]
/// (the last cap entry is reused past the end). Ladders with ratio 4 are tried
/// before ratio 2.
inline WitnessSearchResult null_ratio_witness(const SeparatedSequence& seq,
                                              std::span<const double> ratio_cap,
                                              const ShortnessThresholds& thresholds = {}) {
    require(!ratio_cap.empty(), ErrorKind::InvalidArgument, "ratio cap must be nonempty");
    for (std::size_t i = 0; i < ratio_cap.size(); ++i) {
        require(ratio_cap[i] > 0.0, ErrorKind::InvalidArgument, "ratio cap must be positive");
        if (i > 0)
            require(ratio_cap[i] <= ratio_cap[i - 1], ErrorKind::InvalidArgument,
                    "ratio cap must be decreasing");
    }
    const std::vector<double> cap(ratio_cap.begin(), ratio_cap.end());
    return detail::ladder_search(
        seq,
        [&cap](double ratio, std::size_t index) {
            return ratio <= cap[std::min(index, cap.size() - 1)];
        },
        thresholds);
}

/// Long family with |#(Lambda cap I_n)/|I_n| - a| >= epsilon for all n, if the
/// ladders contain one; absence is evidence of a-regularity at this window only.
inline WitnessSearchResult regularity_witness_search(const SeparatedSequence& seq, double a,
                                                     double epsilon,
                                                     const ShortnessThresholds& thresholds = {}) {
    require(a >= 0.0 && epsilon > 0.0, ErrorKind::InvalidArgument, "need a >= 0 and epsilon > 0");
    return detail::ladder_search(
        seq, [=](double ratio, std::size_t) { return std::abs(ratio - a) >= epsilon; }, thresholds);
}

// ---------------------------------------------------------------------------
// Strong regularity

namespace detail {

// atan(v) - atan(u) without cancellation when u and v are close.
inline double atan_difference(double u, double v) {
    const double den = 1.0 + u * v;
    if (den > 0.0) return std::atan((v - u) / den);
    return std::atan(v) - std::atan(u);
}

// log((1 + v^2) / (1 + u^2))
inline double log_ratio(double u, double v) {
    return std::log1p((v - u) * (v + u) / (1.0 + u * u));
}

// Integral over [u, v] of (fu + p (x - u)) / (1 + x^2), p the slope.
inline double linear_over_lorentz(double u, double v, double fu, double p) {
    return (fu - p * u) * atan_difference(u, v) + 0.5 * p * log_ratio(u, v);
}

inline double abs_linear_over_lorentz(double u, double v, double fu, double fv) {
    if (u >= v) return 0.0;
    const double p = (fv - fu) / (v - u);
    if ((fu >= 0.0 && fv >= 0.0) || (fu <= 0.0 && fv <= 0.0)) {
        const double val = linear_over_lorentz(u, v, fu, p);
        return (fu + fv >= 0.0) ? val : -val;
    }
    const double root = u + fu / (fu - fv) * (v - u);
    return std::abs(linear_over_lorentz(u, root, fu, p)) + std::abs(linear_over_lorentz(root, v, 0.0, p));
}

} // namespace detail

/// Integral over [-R, R] of |n_Lambda(x) - a x| / (1 + x^2) for each R, in closed
/// form on each linear piece (split at sign changes).
inline std::vector<double> strong_regularity_integral(const SeparatedSequence& seq, double a,
                                                      std::span<const double> radii) {
    require(a >= 0.0, ErrorKind::InvalidArgument, "a must be nonnegative");
    const PiecewiseLinear f = counting_function(seq).affine_minus(a); // a x - n(x)
    const auto bps = f.breakpoints();
    std::vector<double> out;
    out.reserve(radii.size());
    for (double r : radii) {
        require(r > 0.0, ErrorKind::InvalidArgument, "radii must be positive");
        std::vector<double> knots{-r};
        for (const auto& b : bps)
            if (b.x > -r && b.x < r) knots.push_back(b.x);
        knots.push_back(r);
        double total = 0.0;
        double fu = f(knots.front());
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            const double fv = f(knots[i + 1]);
            total += detail::abs_linear_over_lorentz(knots[i], knots[i + 1], fu, fv);
            fu = fv;
        }
        out.push_back(total);
    }
    return out;
}

} // namespace bmlab
