#pragma once

// Discrete measures and their Fourier transforms, explicit gap measures on the
// integer lattice, the Cauchy-transform decay test, and Gram-matrix probes.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bmlab/envelope.hpp"
#include "bmlab/error.hpp"
#include "bmlab/fit.hpp"
#include "bmlab/multiprecision.hpp"
#include "bmlab/sequence.hpp"

namespace bmlab {

using cdouble = std::complex<double>;

struct Atom {
    double point{0.0};
    cdouble weight{};
};

/// Finite atomic measure sum_n w_n delta_{lambda_n} with strictly increasing atoms.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;

    explicit DiscreteMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
        for (std::size_t k = 0; k < atoms_.size(); ++k) {
            require(std::isfinite(atoms_[k].point) && std::isfinite(atoms_[k].weight.real()) &&
                        std::isfinite(atoms_[k].weight.imag()),
                    ErrorKind::InvalidArgument, "measure atoms must be finite");
            if (k > 0 && !(atoms_[k].point > atoms_[k - 1].point))
                fail(atoms_[k].point == atoms_[k - 1].point ? ErrorKind::DuplicatePoint
                                                            : ErrorKind::InvalidArgument,
                     "measure atoms must be strictly increasing");
        }
    }

    std::span<const Atom> atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    bool empty() const noexcept { return atoms_.empty(); }

    double total_variation() const noexcept {
        double tv = 0.0;
        for (const auto& a : atoms_) tv += std::abs(a.weight);
        return tv;
    }

    std::vector<double> points() const {
        std::vector<double> p;
        p.reserve(atoms_.size());
        for (const auto& a : atoms_) p.push_back(a.point);
        return p;
    }

    std::vector<cdouble> weights() const {
        std::vector<cdouble> w;
        w.reserve(atoms_.size());
        for (const auto& a : atoms_) w.push_back(a.weight);
        return w;
    }

private:
    std::vector<Atom> atoms_;
};

/// mu^(x) = sum_n w_n exp(i x lambda_n).
inline cdouble fourier_transform(const DiscreteMeasure& mu, double x) {
    cdouble sum{};
    for (const auto& a : mu.atoms()) sum += a.weight * std::polar(1.0, x * a.point);
    return sum;
}

// ---------------------------------------------------------------------------
// Gap measures on Z

/// C^k spline bump (k >= 0) or the C-infinity glue bump.
struct Smoothness {
    static constexpr int infinite = -1;
    int order{infinite};

    static constexpr Smoothness c_infinity() { return {}; }
    static constexpr Smoothness c(int k) { return {k}; }
    bool is_infinite() const noexcept { return order < 0; }
};

inline std::string to_string(Smoothness s) {
    return s.is_infinite() ? std::string("inf") : std::to_string(s.order);
}

namespace detail {

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

/// exp(-1/u - 1/(1-u)) on (0, 1), zero elsewhere.
inline double glue_bump(double u) {
    if (!(u > 0.0 && u < 1.0)) return 0.0;
    return std::exp(-1.0 / u - 1.0 / (1.0 - u));
}

/// Real Fourier coefficients c_n = (1/2pi) int phi0(s) cos(n s) ds, n = 0..N, of an
/// even bump phi0 supported in [-half_width, half_width].
inline std::vector<double> even_bump_coefficients(double half_width, std::size_t n_max, Smoothness s) {
    std::vector<double> c(n_max + 1);
    if (s.is_infinite()) {
        // Periodic trapezoid rule: exact up to aliasing from |n +- M|, where the
        // coefficients are already below double resolution.
        std::size_t m = 4096;
        while (m < 8 * n_max) m *= 2;
        std::vector<double> s_nodes, values;
        for (std::size_t j = 0; j < m; ++j) {
            const double sj = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(j) /
                                                      static_cast<double>(m);
            const double v = glue_bump((sj + half_width) / (2.0 * half_width));
            if (v > 0.0) {
                s_nodes.push_back(sj);
                values.push_back(v);
            }
        }
        for (std::size_t n = 0; n <= n_max; ++n) {
            double acc = 0.0;
            for (std::size_t j = 0; j < s_nodes.size(); ++j)
                acc += values[j] * std::cos(static_cast<double>(n) * s_nodes[j]);
            c[n] = acc / static_cast<double>(m);
        }
    } else {
        // Centred cardinal B-spline of degree d = k + 1 with d + 1 knot intervals.
        const int d = s.order + 1;
        const double h = 2.0 * half_width / static_cast<double>(d + 1);
        for (std::size_t n = 0; n <= n_max; ++n)
            c[n] = std::pow(sinc(static_cast<double>(n) * h / 2.0), d + 1) / (2.0 * std::numbers::pi);
    }
    return c;
}

inline DiscreteMeasure periodic_bump_measure(double centre, double half_width, std::int64_t n_max,
                                             Smoothness s) {
    const auto c = even_bump_coefficients(half_width, static_cast<std::size_t>(n_max), s);
    const bool at_pi = centre == std::numbers::pi;
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(2 * n_max + 1));
    double tv = 0.0;
    for (std::int64_t n = -n_max; n <= n_max; ++n) {
        const double cn = c[static_cast<std::size_t>(std::abs(n))];
        cdouble w;
        if (at_pi)
            w = (n % 2 == 0) ? cn : -cn; // exp(-i n pi), kept exactly real
        else
            w = cn * std::polar(1.0, -static_cast<double>(n) * centre);
        atoms.push_back({static_cast<double>(n), w});
        tv += std::abs(w);
    }
    require(tv > 0.0, ErrorKind::NumericalBreakdown, "bump coefficients vanished");
    for (auto& a : atoms) a.weight /= tv;
    return DiscreteMeasure(std::move(atoms));
}

inline void check_gap_arguments(double a, std::int64_t n_max, Smoothness s) {
    if (!(a > 0.0 && a < 2.0 * std::numbers::pi))
        fail(ErrorKind::BadGap, "gap length must lie in (0, 2 pi)");
    require(n_max >= 32, ErrorKind::InvalidArgument, "gap measure needs N >= 32");
    require(s.is_infinite() || s.order >= 0, ErrorKind::InvalidArgument, "smoothness must be >= 0");
}

} // namespace detail

/// Margin m = (2 pi - a) / 8 between the designed gap and the bump support.
inline double gap_margin(double a) { return (2.0 * std::numbers::pi - a) / 8.0; }

/// mu = sum_{|n| <= N} w_n delta_n with mu^ approximating a nonnegative 2pi-periodic
/// bump supported in [a + m, 2pi - m], hence vanishing on [0, a] up to truncation.
/// Total variation is normalized to 1.
inline DiscreteMeasure lattice_gap_measure(double a, std::int64_t n_max,
                                           Smoothness s = Smoothness::c_infinity()) {
    detail::check_gap_arguments(a, n_max, s);
    const double m = gap_margin(a);
    const double lo = a + m, hi = 2.0 * std::numbers::pi - m;
    return detail::periodic_bump_measure(0.5 * (lo + hi), 0.5 * (hi - lo), n_max, s);
}

/// Symmetric variant: bump supported in [a/2 + m, 2pi - a/2 - m], so the weights are
/// real and even and mu^ vanishes on [-a/2, a/2] (with margin m on both sides).
inline DiscreteMeasure centered_lattice_gap_measure(double a, std::int64_t n_max,
                                                    Smoothness s = Smoothness::c_infinity()) {
    detail::check_gap_arguments(a, n_max, s);
    const double m = gap_margin(a);
    return detail::periodic_bump_measure(std::numbers::pi, std::numbers::pi - a / 2.0 - m, n_max, s);
}

struct GapVerification {
    double max_abs{0.0};
    double argmax{0.0};
    std::size_t samples{0};
    Interval interval;
    double grid_step{0.0};
};

/// Maximum of |mu^| over a uniform grid on the interval (endpoints included, spacing
/// at most grid_step).
inline GapVerification verify_gap(const DiscreteMeasure& mu, const Interval& interval, double grid_step) {
    require(grid_step > 0.0, ErrorKind::InvalidArgument, "grid step must be positive");
    require(interval.left <= interval.right, ErrorKind::InvalidArgument, "interval needs left <= right");
    GapVerification out;
    out.interval = interval;
    out.grid_step = grid_step;
    const double width = interval.length();
    const auto steps = static_cast<std::size_t>(std::ceil(width / grid_step));
    out.samples = steps + 1;
    out.argmax = interval.left;
    out.max_abs = -1.0;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double x = steps == 0 ? interval.left
                                    : (k == steps ? interval.right
                                                  : interval.left + width * static_cast<double>(k) /
                                                                        static_cast<double>(steps));
        const double v = std::abs(fourier_transform(mu, x));
        if (v > out.max_abs) {
            out.max_abs = v;
            out.argmax = x;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cauchy-transform decay

enum class CauchyVerdict { VanishesCompatible, NotVanishing };

constexpr std::string_view to_string(CauchyVerdict v) noexcept {
    return v == CauchyVerdict::VanishesCompatible ? "VanishesCompatible" : "NotVanishing";
}

/// log|v(y)| ~ log_scale + rate * y + power * log y
struct DecayFit {
    double log_scale{0.0};
    double rate{0.0};
    double power{0.0};
};

struct CauchyBranch {
    std::vector<cdouble> values;
    DecayFit fit;
    double last_abs{0.0};
};

struct CauchyDecayReport {
    double x{0.0};
    std::vector<double> y_values;
    CauchyBranch plus;  ///< y -> +infinity
    CauchyBranch minus; ///< y -> -infinity
    double tolerance{1e-6};
    CauchyVerdict verdict{CauchyVerdict::NotVanishing};
};

inline std::vector<double> default_cauchy_heights() {
    std::vector<double> y;
    for (int k = 1; k <= 16; ++k) y.push_back(static_cast<double>(k));
    return y;
}

/// e^{x y} sum_n w_n / (lambda_n - i y) along y -> +-infinity. VanishesCompatible when
/// both branches are below `tolerance` at the largest height.
inline CauchyDecayReport cauchy_decay(const DiscreteMeasure& mu, double x, std::span<const double> y_values,
                                      double tolerance = 1e-6) {
    require(y_values.size() >= 3, ErrorKind::InvalidArgument, "cauchy_decay needs at least three heights");
    for (std::size_t k = 0; k < y_values.size(); ++k) {
        require(y_values[k] > 0.0, ErrorKind::InvalidArgument, "heights must be positive");
        if (k > 0)
            require(y_values[k] > y_values[k - 1], ErrorKind::InvalidArgument, "heights must increase");
    }
    require(tolerance > 0.0, ErrorKind::InvalidArgument, "tolerance must be positive");

    CauchyDecayReport rep;
    rep.x = x;
    rep.tolerance = tolerance;
    rep.y_values.assign(y_values.begin(), y_values.end());

    std::vector<double> log_y;
    for (double y : y_values) log_y.push_back(std::log(y));

    auto branch = [&](double sign) {
        CauchyBranch b;
        std::vector<double> log_abs;
        for (double y : y_values) {
            const double ys = sign * y;
            cdouble sum{};
            for (const auto& a : mu.atoms()) sum += a.weight / cdouble(a.point, -ys);
            const cdouble v = std::exp(x * ys) * sum;
            b.values.push_back(v);
            log_abs.push_back(std::log(std::max(std::abs(v), std::numeric_limits<double>::denorm_min())));
        }
        const Eigen::Vector3d c = fit_two_regressors(y_values, log_y, log_abs);
        b.fit = {c(0), c(1), c(2)};
        b.last_abs = std::abs(b.values.back());
        return b;
    };
    rep.plus = branch(1.0);
    rep.minus = branch(-1.0);
    rep.verdict = (rep.plus.last_abs <= tolerance && rep.minus.last_abs <= tolerance)
                      ? CauchyVerdict::VanishesCompatible
                      : CauchyVerdict::NotVanishing;
    return rep;
}

// ---------------------------------------------------------------------------
// Gram matrices of exponentials on [0, a]

/// G[m][n] = int_0^a exp(i (lambda_m - lambda_n) t) dt = exp(i d a/2) a sinc(d a/2).
inline Eigen::MatrixXcd gram_matrix(std::span<const double> points, double a) {
    require(a > 0.0, ErrorKind::InvalidArgument, "Gram interval length must be positive");
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXcd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        g(i, i) = a;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double d = points[static_cast<std::size_t>(i)] - points[static_cast<std::size_t>(j)];
            const cdouble v = std::polar(a * detail::sinc(d * a / 2.0), d * a / 2.0);
            g(i, j) = v;
            g(j, i) = std::conj(v);
        }
    }
    return g;
}

inline Eigen::MatrixXcd gram_matrix(const SeparatedSequence& seq, double a) {
    return gram_matrix(seq.points(), a);
}

/// c^* G c
inline double quadratic_form(const Eigen::MatrixXcd& g, const Eigen::VectorXcd& c) {
    return (c.adjoint() * g * c)(0, 0).real();
}

enum class GapProbeClass { DecaysToZero, BoundedBelow, Inconclusive };

constexpr std::string_view to_string(GapProbeClass c) noexcept {
    switch (c) {
    case GapProbeClass::DecaysToZero: return "DecaysToZero";
    case GapProbeClass::BoundedBelow: return "BoundedBelow";
    case GapProbeClass::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct GapProbeReport {
    double gap_length{0.0};
    std::vector<std::size_t> sizes;
    std::vector<double> min_eigenvalues;       ///< may underflow to 0; see log10 values
    std::vector<double> log10_min_eigenvalues;
    std::vector<double> max_eigenvalues;
    std::vector<unsigned> digits;              ///< decimal digits used; 0 means double precision
    std::vector<double> minimizer_l1;          ///< l1 norm of the unit l2 minimizer
    std::vector<double> minimizer_l2;
    GapProbeClass classification{GapProbeClass::Inconclusive};
    double fall_factor{10.0};
    double band_factor{2.0};
    double log10_fall{0.0}; ///< log10(lambda_min(first) / lambda_min(last))
    bool monotone{false};
};

/// Indices of the N points closest to the centre of the data (by the point nearest 0).
inline std::vector<double> centered_window(const SeparatedSequence& seq, std::size_t n) {
    require(n >= 1 && n <= seq.size(), ErrorKind::WindowTooSmall,
            "requested " + std::to_string(n) + " points from a window of " + std::to_string(seq.size()));
    const auto pts = seq.points();
    std::size_t k0 = 0;
    for (std::size_t k = 1; k < pts.size(); ++k)
        if (std::abs(pts[k]) < std::abs(pts[k0])) k0 = k;
    std::size_t start = k0 >= n / 2 ? k0 - n / 2 : 0;
    start = std::min(start, pts.size() - n);
    return {pts.begin() + static_cast<std::ptrdiff_t>(start),
            pts.begin() + static_cast<std::ptrdiff_t>(start + n)};
}

namespace detail {

struct EigenProbe {
    double log10_min{0.0};
    double min{0.0};
    double max{0.0};
    double l1{0.0};
    double l2{0.0};
    bool resolved{false};
};

// The Hermitian Gram matrix is D S D^* with D = diag(exp(i lambda_m a/2)) and
// S_mn = a sinc((lambda_m - lambda_n) a/2), so spectra and minimizer moduli come from S.
inline EigenProbe probe_double(std::span<const double> pts, double a) {
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd s(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            s(i, j) = a * sinc((pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(j)]) * a / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    require(es.info() == Eigen::Success, ErrorKind::NumericalBreakdown, "eigensolver did not converge");
    EigenProbe p;
    p.min = es.eigenvalues()(0);
    p.max = es.eigenvalues()(n - 1);
    const double noise = 100.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * p.max;
    p.resolved = p.min > noise;
    p.log10_min = p.min > 0.0 ? std::log10(p.min) : -std::numeric_limits<double>::infinity();
    const Eigen::VectorXd v = es.eigenvectors().col(0);
    p.l1 = v.lpNorm<1>();
    p.l2 = v.norm();
    return p;
}

inline EigenProbe probe_mp(std::span<const double> pts, double a, unsigned digits) {
    MpPrecisionGuard guard(digits);
    using M = Eigen::Matrix<mp_real, Eigen::Dynamic, Eigen::Dynamic>;
    using V = Eigen::Matrix<mp_real, Eigen::Dynamic, 1>;
    const auto n = static_cast<Eigen::Index>(pts.size());
    const mp_real am(a);
    M s(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        s(i, i) = am;
        for (Eigen::Index j = 0; j < i; ++j) {
            const mp_real d = mp_real(pts[static_cast<std::size_t>(i)]) - mp_real(pts[static_cast<std::size_t>(j)]);
            const mp_real v = 2 * sin(d * am / 2) / d;
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    Eigen::SelfAdjointEigenSolver<M> es(s, Eigen::EigenvaluesOnly);
    require(es.info() == Eigen::Success, ErrorKind::NumericalBreakdown, "eigensolver did not converge");
    const mp_real lmin = es.eigenvalues()(0);
    const mp_real lmax = es.eigenvalues()(n - 1);

    EigenProbe p;
    const mp_real noise = 100 * n * std::numeric_limits<mp_real>::epsilon() * lmax;
    p.resolved = lmin > noise;
    p.min = lmin.convert_to<double>();
    p.max = lmax.convert_to<double>();
    p.log10_min = lmin > 0 ? log10(lmin).convert_to<double>() : -std::numeric_limits<double>::infinity();

    if (p.resolved) {
        // Inverse iteration shifted to lambda_min / 2.
        M shifted = s;
        for (Eigen::Index i = 0; i < n; ++i) shifted(i, i) -= lmin / 2;
        Eigen::LDLT<M> ldlt(shifted);
        V x(n);
        for (Eigen::Index i = 0; i < n; ++i) x(i) = mp_real(1) + mp_real(i) / (3 * n);
        for (int it = 0; it < 12; ++it) {
            x = ldlt.solve(x);
            x /= x.norm();
        }
        mp_real l1 = 0;
        for (Eigen::Index i = 0; i < n; ++i) l1 += abs(x(i));
        p.l1 = l1.convert_to<double>();
        p.l2 = 1.0;
    }
    return p;
}

} // namespace detail

/// lambda_min of the Gram matrix of exp(i lambda t) on [0, a] over centred windows of
/// the requested sizes. Double precision is tried first; unresolved eigenvalues (below
/// the solver's noise floor) are recomputed in MPFR with growing precision.
inline GapProbeReport min_gap_residual(const SeparatedSequence& seq, double a, std::span<const std::size_t> sizes) {
    require(a > 0.0, ErrorKind::InvalidArgument, "gap length must be positive");
    require(!sizes.empty(), ErrorKind::InvalidArgument, "at least one window size is required");
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        require(sizes[k] >= 1, ErrorKind::InvalidArgument, "window sizes must be positive");
        if (sizes[k] > 512)
            fail(ErrorKind::SizeGuard, "dense eigensolves are limited to N <= 512");
        if (k > 0) require(sizes[k] > sizes[k - 1], ErrorKind::InvalidArgument, "sizes must increase");
    }

    GapProbeReport rep;
    rep.gap_length = a;
    std::optional<std::pair<std::size_t, double>> prev_mp; // (N, log10 lambda_min) of last MPFR solve
    for (std::size_t n : sizes) {
        const auto pts = centered_window(seq, n);
        detail::EigenProbe p = detail::probe_double(pts, a);
        unsigned digits = 0;
        if (!p.resolved) {
            digits = 40;
            if (prev_mp) {
                const double scaled = -prev_mp->second * static_cast<double>(n) / static_cast<double>(prev_mp->first);
                digits = std::max(digits, static_cast<unsigned>(std::ceil(scaled)) + 24);
            }
            for (;;) {
                p = detail::probe_mp(pts, a, digits);
                if (p.resolved) break;
                digits *= 2;
                if (digits > 2000)
                    fail(ErrorKind::NumericalBreakdown, "smallest eigenvalue unresolved at 2000 digits");
            }
            prev_mp = {{n, p.log10_min}};
        }
        rep.sizes.push_back(n);
        rep.min_eigenvalues.push_back(p.min);
        rep.log10_min_eigenvalues.push_back(p.log10_min);
        rep.max_eigenvalues.push_back(p.max);
        rep.digits.push_back(digits);
        rep.minimizer_l1.push_back(p.l1);
        rep.minimizer_l2.push_back(p.l2);
    }

    const auto& lg = rep.log10_min_eigenvalues;
    rep.log10_fall = lg.front() - lg.back();
    rep.monotone = true;
    for (std::size_t k = 1; k < lg.size(); ++k) rep.monotone = rep.monotone && lg[k] <= lg[k - 1];
    const double band = std::log10(rep.band_factor);
    const bool within_band = std::all_of(lg.begin(), lg.end(), [&](double v) { return std::abs(v - lg.front()) <= band; });
    if (lg.size() >= 2 && rep.monotone && rep.log10_fall >= std::log10(rep.fall_factor))
        rep.classification = GapProbeClass::DecaysToZero;
    else if (within_band)
        rep.classification = GapProbeClass::BoundedBelow;
    else
        rep.classification = GapProbeClass::Inconclusive;
    return rep;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_measure_csv(std::ostream& out, const DiscreteMeasure& mu) {
    out << "point,re,im\n";
    for (const auto& a : mu.atoms())
        out << format_real(a.point) << ',' << format_real(a.weight.real()) << ','
            << format_real(a.weight.imag()) << '\n';
}

/// Reads `point,re[,im]` rows; a header row and '#' comments are skipped.
inline DiscreteMeasure read_measure_csv(std::istream& in, const std::string& name = "<stream>") {
    std::vector<Atom> atoms;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::stringstream ss(line);
        std::string f[3];
        for (auto& s : f) std::getline(ss, s, ',');
        try {
            const double p = std::stod(f[0]);
            const double re = std::stod(f[1]);
            const double im = f[2].empty() ? 0.0 : std::stod(f[2]);
            atoms.push_back({p, {re, im}});
        } catch (const std::exception&) {
            if (atoms.empty() && lineno == 1) continue;
            fail(ErrorKind::Io, name + ":" + std::to_string(lineno) + ": expected point,re,im");
        }
    }
    std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.point < y.point; });
    try {
        return DiscreteMeasure(std::move(atoms));
    } catch (const Error& e) {
        fail(ErrorKind::Io, name + ": " + e.what());
    }
}

inline DiscreteMeasure read_measure_csv_file(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open measure file '" + path + "'");
    return read_measure_csv(in, path);
}

} // namespace bmlab
