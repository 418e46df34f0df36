#pragma once

// Pointwise algebra on AnalyticFn closures, enough derivative levels for the
// field assembly (values through third derivatives where the inputs allow).
// Internal to the library sources.

#include <algorithm>

#include "calibra/analytic_fn.hpp"

namespace calibra {

inline AnalyticFn fn_scale(const AnalyticFn& f, double c) {
    return AnalyticFn::closed({[f, c](cplx z) { return c * f(z); },
                               [f, c](cplx z) { return c * f.d1(z); },
                               [f, c](cplx z) { return c * f.d2(z); },
                               [f, c](cplx z) { return c * f.d3(z); }},
                              f.radius());
}

inline AnalyticFn fn_sum(const AnalyticFn& a, const AnalyticFn& b) {
    const double r = std::min(a.radius(), b.radius());
    return AnalyticFn::closed({[a, b](cplx z) { return a(z) + b(z); },
                               [a, b](cplx z) { return a.d1(z) + b.d1(z); },
                               [a, b](cplx z) { return a.d2(z) + b.d2(z); },
                               [a, b](cplx z) { return a.d3(z) + b.d3(z); }},
                              r);
}

inline AnalyticFn fn_diff(const AnalyticFn& a, const AnalyticFn& b) {
    return fn_sum(a, fn_scale(b, -1.0));
}

// Product with two derivative levels; the factors only need d1/d2.
inline AnalyticFn fn_product(const AnalyticFn& a, const AnalyticFn& b) {
    const double r = std::min(a.radius(), b.radius());
    return AnalyticFn::closed(
        {[a, b](cplx z) { return a(z) * b(z); },
         [a, b](cplx z) { return a.d1(z) * b(z) + a(z) * b.d1(z); },
         [a, b](cplx z) { return a.d2(z) * b(z) + 2.0 * a.d1(z) * b.d1(z) + a(z) * b.d2(z); }},
        r);
}

}  // namespace calibra
