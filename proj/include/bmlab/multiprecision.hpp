#pragma once

// Arbitrary-precision real for Eigen dense solvers (MPFR backend, runtime precision).

#include <limits>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <Eigen/Core>

namespace bmlab {

using mp_real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                              boost::multiprecision::et_off>;

/// Sets the default precision of mp_real for the lifetime of the guard.
class MpPrecisionGuard {
public:
    explicit MpPrecisionGuard(unsigned digits10) : saved_(mp_real::default_precision()) {
        mp_real::default_precision(digits10);
    }
    ~MpPrecisionGuard() { mp_real::default_precision(saved_); }
    MpPrecisionGuard(const MpPrecisionGuard&) = delete;
    MpPrecisionGuard& operator=(const MpPrecisionGuard&) = delete;

private:
    unsigned saved_;
};

} // namespace bmlab

namespace Eigen {

// Boost's own Eigen adaptor predates the infinity()/quiet_NaN() members this Eigen expects.
template <>
struct NumTraits<bmlab::mp_real> : GenericNumTraits<bmlab::mp_real> {
    using Real = bmlab::mp_real;
    using NonInteger = bmlab::mp_real;
    using Literal = bmlab::mp_real;
    using Nested = bmlab::mp_real;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 10,
        AddCost = 10,
        MulCost = 40
    };
    static Real epsilon() { return std::numeric_limits<Real>::epsilon(); }
    static Real dummy_precision() { return 1000 * epsilon(); }
    static Real highest() { return (std::numeric_limits<Real>::max)(); }
    static Real lowest() { return (std::numeric_limits<Real>::lowest)(); }
    static Real infinity() { return std::numeric_limits<Real>::infinity(); }
    static Real quiet_NaN() { return std::numeric_limits<Real>::quiet_NaN(); }
    static int digits10() { return static_cast<int>(Real::default_precision()); }
};

} // namespace Eigen
