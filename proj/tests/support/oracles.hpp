#pragma once

// Reference computations for tests. Nothing here calls into the library's numerics;
// each oracle recomputes its quantity from first principles (grids, quadrature, FFT).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

/// A continuous piecewise-linear function given by knots and end slopes, evaluated
/// by plain interpolation.
struct Polyline {
    std::vector<double> xs;
    std::vector<double> ys;
    double left_slope{0.0};
    double right_slope{0.0};

    double operator()(double x) const {
        if (x <= xs.front()) return ys.front() + left_slope * (x - xs.front());
        if (x >= xs.back()) return ys.back() + right_slope * (x - xs.back());
        std::size_t k = 0;
        while (xs[k + 1] < x) ++k;
        const double t = (x - xs[k]) / (xs[k + 1] - xs[k]);
        return ys[k] * (1.0 - t) + ys[k + 1] * t;
    }
};

/// Counting function of a sorted point set, computed by brute force: the rank of x
/// interpolated between neighbours, shifted so that it vanishes at 0.
inline double counting(const std::vector<double>& pts, double x) {
    auto rank = [&](double t) {
        if (t <= pts.front()) return (t - pts.front()) / (pts[1] - pts[0]);
        if (t >= pts.back()) return static_cast<double>(pts.size() - 1) +
                                    (t - pts.back()) / (pts[pts.size() - 1] - pts[pts.size() - 2]);
        std::size_t k = 0;
        while (pts[k + 1] < t) ++k;
        return static_cast<double>(k) + (t - pts[k]) / (pts[k + 1] - pts[k]);
    };
    return rank(x) - rank(0.0);
}

struct GridComponent {
    double first{0.0}; ///< first grid sample inside the set
    double last{0.0};  ///< last grid sample inside the set
};

/// Samples f on lo, lo + h, ..., hi and returns maximal runs of samples with
/// f(x) < sup of f over (x, hi]. The sup is taken over later samples and over
/// `knots` (for a polyline, its breakpoints make the sup exact).
inline std::vector<GridComponent> suffix_max_components(const std::function<double(double)>& f, double lo,
                                                        double hi, double h, std::vector<double> knots = {}) {
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / h + 1e-9));
    std::vector<double> x(n + 1), v(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        x[k] = k == n ? hi : lo + h * static_cast<double>(k);
        v[k] = f(x[k]);
    }
    std::sort(knots.begin(), knots.end());
    std::vector<bool> in(n + 1, false);
    double best = v[n];
    std::size_t next_knot = knots.size();
    for (std::size_t k = n + 1; k-- > 0;) {
        while (next_knot > 0 && knots[next_knot - 1] > x[k]) {
            --next_knot;
            if (knots[next_knot] <= hi) best = std::max(best, f(knots[next_knot]));
        }
        in[k] = v[k] < best;
        best = std::max(best, v[k]);
    }
    std::vector<GridComponent> out;
    for (std::size_t k = 0; k <= n; ++k) {
        if (!in[k]) continue;
        if (k > 0 && in[k - 1])
            out.back().last = x[k];
        else
            out.push_back({x[k], x[k]});
    }
    return out;
}

/// Adaptive Gauss-Kronrod (15 point) integral.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 15, tol, &err);
}

/// Sum of the integrals over consecutive breakpoints (the integrand may have kinks there).
inline double integrate_piecewise(const std::function<double(double)>& f, std::vector<double> cuts,
                                  double tol = 1e-13) {
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
        if (cuts[k + 1] > cuts[k]) total += integrate(f, cuts[k], cuts[k + 1], tol);
    return total;
}

} // namespace oracle
