#pragma once

#include <cmath>
#include <span>

#include <Eigen/Dense>

#include "bmlab/error.hpp"

namespace bmlab {

struct LineFit {
    double slope{0.0};
    double intercept{0.0};
    double r_squared{0.0};
};

/// Ordinary least squares y ~ slope * x + intercept. A constant y gives r_squared = 1
/// when the fit is exact (zero residual) and 0 otherwise.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, ErrorKind::InvalidArgument,
            "line fit needs at least two paired samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    require(sxx > 0.0, ErrorKind::InvalidArgument, "line fit needs distinct abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : (ss_res == 0.0 ? 1.0 : 0.0);
    return fit;
}

/// y ~ c0 + c1 * u + c2 * v by column-pivoted QR. Returns {c0, c1, c2}.
inline Eigen::Vector3d fit_two_regressors(std::span<const double> u, std::span<const double> v,
                                          std::span<const double> y) {
    require(u.size() == y.size() && v.size() == y.size() && y.size() >= 3,
            ErrorKind::InvalidArgument, "two-regressor fit needs at least three samples");
    const auto n = static_cast<Eigen::Index>(y.size());
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, 0) = 1.0;
        a(i, 1) = u[static_cast<std::size_t>(i)];
        a(i, 2) = v[static_cast<std::size_t>(i)];
        b(i) = y[static_cast<std::size_t>(i)];
    }
    return a.colPivHouseholderQr().solve(b);
}

} // namespace bmlab
