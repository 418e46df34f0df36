#include "calibra/euler_check.hpp"

#include <algorithm>
#include <cmath>

namespace calibra {

namespace {

AnalyticFn add_constant(const AnalyticFn& f, double c) {
    if (c == 0.0) return f;
    std::vector<AnalyticFn::Closure> levels;
    levels.push_back([f, c](cplx z) { return f(z) + c; });
    levels.push_back([f](cplx z) { return f.d1(z); });
    levels.push_back([f](cplx z) { return f.d2(z); });
    levels.push_back([f](cplx z) { return f.d3(z); });
    return AnalyticFn::closed(std::move(levels), f.radius());
}

double sup_on_axis(const AnalyticFn& f, double a, double b, int n = 2049) {
    double m = 0.0;
    for (double x : linspace(a, b, n)) m = std::max(m, std::abs(f.real_at(x)));
    return m;
}

}  // namespace

double Candidate::sup_curvature() const {
    return sup_on_axis(curv, xi_lo(), xi_hi());
}

Candidate make_candidate(const CurveChart& chart, const AnalyticFn& lower_trace,
                         const AnalyticFn& upper_trace, const AnalyticFn& lower_normal,
                         const AnalyticFn& upper_normal) {
    const double a = chart.xi_lo(), b = chart.xi_hi();
    const AnalyticFn zero = AnalyticFn::constant(0.0);

    double min_gap = std::numeric_limits<double>::infinity();
    double min_lower = std::numeric_limits<double>::infinity();
    double gap_at = a;
    for (double x : linspace(a, b, 2049)) {
        const double lo = lower_trace.real_at(x), hi = upper_trace.real_at(x);
        if (hi - lo < min_gap) { min_gap = hi - lo; gap_at = x; }
        min_lower = std::min(min_lower, lo);
    }
    if (!(min_gap > 0.0))
        throw Error("traces touch near xi = " + std::to_string(gap_at) +
                    " (gap " + std::to_string(min_gap) + "); branches must stay apart");

    Candidate c;
    c.chart = chart;
    c.curv = curvature_profile(chart.curve());
    c.shift = 1.0 - min_lower;
    c.min_gap = min_gap;
    c.trace[0] = add_constant(lower_trace, c.shift);
    c.trace[1] = add_constant(upper_trace, c.shift);
    c.normal[0] = lower_normal.valid() ? lower_normal : zero;
    c.normal[1] = upper_normal.valid() ? upper_normal : zero;

    // Continuations get queried on the overhang as well, so demand a slightly
    // larger radius than the collar halfwidth alone.
    const double reach = std::hypot(chart.halfwidth(), chart.overhang());
    for (int i = 0; i < 2; ++i) {
        c.u[i] = HarmonicFunction::from_cauchy(c.trace[i], c.normal[i], a, b, reach);
        c.slope[i] = c.trace[i].derivative();
        const double s1 = sup_on_axis(c.slope[i], a, b);
        const double s2 = sup_on_axis(c.slope[i].derivative(), a, b);
        c.c1_norm[i] = s1 + s2;
        c.c2_norm[i] = s2;
        c.sup_slope = std::max(c.sup_slope, s1);
    }
    return c;
}

EulerReport check_euler(const Candidate& c, double tol, int n_grid) {
    EulerReport r;
    r.tol = tol;
    const double a = c.xi_lo(), b = c.xi_hi();
    const double hw = c.chart.halfwidth();
    r.xi = linspace(a, b, n_grid);

    // (i) FD Laplacian, Richardson-extrapolated so the h^2 truncation cancels.
    const double h = 0.2 * hw;
    const auto fd_lap = [&](const HarmonicFunction& u, double x, double y, double s) {
        return (u.value(x + s, y) + u.value(x - s, y) + u.value(x, y + s) +
                u.value(x, y - s) - 4.0 * u.value(x, y)) / (s * s);
    };
    for (int i = 0; i < 2; ++i) {
        for (double eta : {-0.55 * hw, -0.25 * hw, 0.0, 0.25 * hw, 0.55 * hw}) {
            for (double xi : linspace(a + h, b - h, 65)) {
                const double lh = fd_lap(c.u[i], xi, eta, h);
                const double lh2 = fd_lap(c.u[i], xi, eta, 0.5 * h);
                const double res = std::abs((4.0 * lh2 - lh) / 3.0);
                if (res > r.max_interior) {
                    r.max_interior = res;
                    r.worst_interior_xi = xi;
                    r.worst_interior_eta = eta;
                    r.worst_interior_branch = i;
                }
            }
        }
    }

    // (ii) and (iii) on the axis grid.
    for (int i = 0; i < 2; ++i) r.normal_residual[i].reserve(r.xi.size());
    r.jump_residual.reserve(r.xi.size());
    for (double xi : r.xi) {
        for (int i = 0; i < 2; ++i) {
            const double nr = std::abs(c.u[i].grad(xi, 0.0).y);
            r.normal_residual[i].push_back(nr);
            r.max_normal = std::max(r.max_normal, nr);
        }
        const double s1 = c.u[0].grad(xi, 0.0).x, s2 = c.u[1].grad(xi, 0.0).x;
        const double jr = std::abs(s2 * s2 - s1 * s1 - c.curv.real_at(xi));
        r.jump_residual.push_back(jr);
        r.max_jump = std::max(r.max_jump, jr);
    }

    r.pass = r.max_interior <= tol && r.max_normal <= tol && r.max_jump <= tol;
    return r;
}

}  // namespace calibra
