#pragma once

// F(z) = cos sqrt(2 pi z) * cos sqrt(-2 pi z): evaluation, zeros, growth along iR,
// and suprema of entire functions on sequences.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "bmlab/error.hpp"
#include "bmlab/fit.hpp"
#include "bmlab/multiprecision.hpp"
#include "bmlab/sequence.hpp"

namespace bmlab {

using cdouble = std::complex<double>;

/// |2 pi z| up to which eval_qcos sums the power series.
inline constexpr double qcos_series_limit = 30.0;

/// With s = sqrt(2 pi z), F = cos(s) cosh(s) = sum_k (-4)^k (2 pi z)^{2k} / (4k)!.
/// The product series has only real coefficients of one sign pattern per power of
/// w^2, so it is branch free and well conditioned for moderate |w|.
inline cdouble eval_qcos_series(cdouble z) {
    const cdouble w = 2.0 * std::numbers::pi * z;
    const cdouble w2 = w * w;
    cdouble term = 1.0;
    cdouble sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double m = 4.0 * k;
        term *= -4.0 * w2 / (m * (m - 1.0) * (m - 2.0) * (m - 3.0));
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum) && k > 2) break;
    }
    return sum;
}

/// Principal-branch evaluation cos(sqrt(w)) cos(sqrt(-w)), w = 2 pi z.
inline cdouble eval_qcos_branch(cdouble z) {
    const cdouble w = 2.0 * std::numbers::pi * z;
    return std::cos(std::sqrt(w)) * std::cos(std::sqrt(-w));
}

/// Same series as eval_qcos_series summed in MPFR at `digits` decimal digits; used
/// as a reference where the double series would cancel catastrophically.
inline cdouble eval_qcos_series_mp(cdouble z, unsigned digits = 60) {
    MpPrecisionGuard guard(digits);
    const mp_real two_pi = 2 * boost::math::constants::pi<mp_real>();
    const mp_real wr = two_pi * mp_real(z.real());
    const mp_real wi = two_pi * mp_real(z.imag());
    const mp_real w2r = wr * wr - wi * wi;
    const mp_real w2i = 2 * wr * wi;
    mp_real tr = 1, ti = 0, sr = 1, si = 0;
    const mp_real tiny = pow(mp_real(10), -static_cast<int>(digits));
    for (int k = 1; k < 100000; ++k) {
        const mp_real m = 4 * k;
        const mp_real c = -4 / (m * (m - 1) * (m - 2) * (m - 3));
        const mp_real nr = c * (tr * w2r - ti * w2i);
        const mp_real ni = c * (tr * w2i + ti * w2r);
        tr = nr;
        ti = ni;
        sr += tr;
        si += ti;
        if (k > 2 && abs(tr) + abs(ti) <= tiny * (abs(sr) + abs(si))) break;
    }
    return {sr.convert_to<double>(), si.convert_to<double>()};
}

/// F(z), by series for |2 pi z| <= 30 and by principal square roots beyond.
inline cdouble eval_qcos(cdouble z) {
    return std::abs(2.0 * std::numbers::pi * z) <= qcos_series_limit ? eval_qcos_series(z)
                                                                     : eval_qcos_branch(z);
}

/// log|cos w| = s Im w + log|(1 + exp(2 i s w)) / 2|, s = sign(Im w); no overflow.
inline double log_abs_cos(cdouble w) {
    const double sgn = w.imag() >= 0.0 ? 1.0 : -1.0;
    const cdouble e = std::exp(cdouble(0.0, 2.0 * sgn) * w);
    return sgn * w.imag() + std::log(std::abs((1.0 + e) / 2.0));
}

/// log|F(z)| without forming F; valid far beyond the overflow range of cosh.
inline double log_abs_qcos(cdouble z) {
    const cdouble w = 2.0 * std::numbers::pi * z;
    return log_abs_cos(std::sqrt(w)) + log_abs_cos(std::sqrt(-w));
}

/// Callable wrapper exposing both F and its log-modulus path.
struct Qcos {
    cdouble operator()(cdouble z) const { return eval_qcos(z); }
    double log_abs(cdouble z) const { return log_abs_qcos(z); }
};

/// cos(a z) with a log-modulus path.
struct ScaledCos {
    double a{1.0};
    cdouble operator()(cdouble z) const { return std::cos(a * z); }
    double log_abs(cdouble z) const { return log_abs_cos(a * z); }
};

/// {+-pi (2k+1)^2 / 8 : k >= 0} within the window.
inline SeparatedSequence zero_set_qcos(Window window) {
    require(window.lo < window.hi, ErrorKind::EmptyWindow, "window must satisfy lo < hi");
    std::vector<double> zeros;
    const double reach = std::max(std::abs(window.lo), std::abs(window.hi));
    for (std::int64_t k = 0;; ++k) {
        const double odd = static_cast<double>(2 * k + 1);
        const double z = std::numbers::pi * odd * odd / 8.0;
        if (z > reach) break;
        if (window.contains(z)) zeros.push_back(z);
        if (window.contains(-z)) zeros.push_back(-z);
    }
    require(!zeros.empty(), ErrorKind::EmptyWindow, "window contains no zeros");
    return load_sequence(std::move(zeros), window);
}

template <class F>
concept HasLogAbs = requires(const F& f, cdouble z) {
    { f.log_abs(z) } -> std::convertible_to<double>;
};

struct TypeEstimate {
    std::vector<double> y_values;
    std::vector<double> log_moduli; ///< log|f(iy)|
    double fitted_type{0.0};        ///< slope against y over the top half
    double fitted_sqrt_coeff{0.0};  ///< slope against sqrt(y) over the top half
    bool log_path{false};           ///< log-modulus evaluated without forming f
    std::size_t overflowed{0};      ///< samples where |f| was not finite (excluded from fits)
};

/// `count` points geometrically spaced on [lo, hi].
inline std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    require(lo > 0.0 && hi > lo && count >= 2, ErrorKind::InvalidArgument, "need 0 < lo < hi, count >= 2");
    std::vector<double> out(count);
    const double step = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) out[k] = lo * std::exp(step * static_cast<double>(k));
    out.back() = hi;
    return out;
}

/// Growth of log|f(iy)|. The type is the least-squares slope against y over the
/// upper half of the samples; the sqrt coefficient is the slope against sqrt(y).
template <class F>
TypeEstimate type_estimate(const F& f, std::span<const double> y_values) {
    const std::size_t n = y_values.size();
    require(n >= 8, ErrorKind::InvalidArgument, "type estimate needs at least 8 heights");
    for (std::size_t k = 0; k < n; ++k) {
        require(y_values[k] > 0.0, ErrorKind::InvalidArgument, "heights must be positive");
        if (k > 0) require(y_values[k] > y_values[k - 1], ErrorKind::InvalidArgument, "heights must increase");
    }
    require(y_values.back() >= 1e3 * y_values.front(), ErrorKind::InvalidArgument,
            "heights must span at least three decades");

    TypeEstimate est;
    est.y_values.assign(y_values.begin(), y_values.end());
    est.log_path = HasLogAbs<F>;
    for (double y : y_values) {
        double v;
        if constexpr (HasLogAbs<F>)
            v = f.log_abs(cdouble(0.0, y));
        else
            v = std::log(std::abs(f(cdouble(0.0, y))));
        if (!std::isfinite(v) && v > 0.0) ++est.overflowed;
        est.log_moduli.push_back(v);
    }

    std::vector<double> ys, sq, lm;
    for (std::size_t k = n / 2; k < n; ++k) {
        if (!std::isfinite(est.log_moduli[k])) continue;
        ys.push_back(y_values[k]);
        sq.push_back(std::sqrt(y_values[k]));
        lm.push_back(est.log_moduli[k]);
    }
    require(ys.size() >= 2, ErrorKind::NumericalBreakdown, "too few finite samples in the upper half");
    est.fitted_type = fit_line(ys, lm).slope;
    est.fitted_sqrt_coeff = fit_line(sq, lm).slope;
    return est;
}

struct SupOnSequence {
    double sup_abs{0.0};
    double argmax{0.0};
};

template <class F>
SupOnSequence sup_on_sequence(const F& f, const SeparatedSequence& seq) {
    SupOnSequence out{-1.0, 0.0};
    for (double x : seq.points()) {
        const double v = std::abs(f(cdouble(x, 0.0)));
        if (v > out.sup_abs || std::isnan(v)) {
            out.sup_abs = v;
            out.argmax = x;
            if (std::isnan(v)) break;
        }
    }
    return out;
}

} // namespace bmlab
