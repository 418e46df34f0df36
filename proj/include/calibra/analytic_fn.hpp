#pragma once

// Scalar analytic functions of one (chart) variable, evaluable at complex
// arguments.  Two backings: explicit closures with hand-written derivatives,
// or a Chebyshev series whose derivatives are coefficient operations.

#include <functional>
#include <memory>

#include "calibra/cheb.hpp"
#include "calibra/common.hpp"

namespace calibra {

class AnalyticFn {
public:
    using Closure = std::function<cplx(cplx)>;

    AnalyticFn() = default;

    // d[k] is the k-th derivative.  Provide as many as downstream code will
    // differentiate (curve charts need up to order 3).
    static AnalyticFn closed(std::vector<Closure> derivatives, double radius);
    static AnalyticFn constant(double value);
    // Real polynomial in the variable, coefficients lowest order first.
    static AnalyticFn poly(const std::vector<double>& coeffs);
    static AnalyticFn from_cheb(const Cheb& series, int extra_derivatives = 3);

    // Chebyshev refit of an arbitrary callable on [a,b].
    static AnalyticFn fit(const std::function<cplx(double)>& f, double a, double b,
                          int extra_derivatives = 3);

    cplx operator()(cplx z) const { return levels_->at(shift_)(z); }
    cplx d1(cplx z) const { return deriv_at(1, z); }
    cplx d2(cplx z) const { return deriv_at(2, z); }
    cplx d3(cplx z) const { return deriv_at(3, z); }
    double real_at(double x) const { return (*this)(cplx(x, 0)).real(); }

    AnalyticFn derivative() const;
    // Antiderivative vanishing at `base`, realized as a Chebyshev refit on
    // [a,b] (exact for polynomial content up to fit tolerance).
    AnalyticFn antiderivative_on(double a, double b, double base) const;

    double radius() const { return radius_; }
    bool valid() const { return levels_ && !levels_->empty(); }

private:
    cplx deriv_at(size_t k, cplx z) const;
    std::shared_ptr<std::vector<Closure>> levels_;
    size_t shift_ = 0;   // derivative() advances this instead of copying
    double radius_ = 0.0;
};

}  // namespace calibra
