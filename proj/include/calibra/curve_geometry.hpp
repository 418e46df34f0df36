#pragma once

// Plane curves given analytically, their arc-length form, and the conformal
// collar chart built from them.  A curve is stored as one complex map
// W(t) = x(t) + i y(t); the chart is W evaluated at xi + i*eta, which makes
// the collar coordinates conformal with metric factor gamma = |W'|.
// Orientation: the normal nu = (-y', x') is the +eta direction.

#include "calibra/analytic_fn.hpp"
#include "calibra/common.hpp"

namespace calibra {

struct AnalyticCurve {
    AnalyticFn position;      // W(t), with derivatives up to order 3
    double t0 = 0.0, t1 = 1.0;
    bool unit_speed = false;  // |W'| == 1 on [t0,t1]

    Vec2 point(double t) const {
        cplx w = position(cplx(t, 0));
        return {w.real(), w.imag()};
    }
    Vec2 velocity(double t) const {
        cplx w = position.d1(cplx(t, 0));
        return {w.real(), w.imag()};
    }
    double speed(double t) const { return std::abs(position.d1(cplx(t, 0))); }
    double param_length() const { return t1 - t0; }
    // Arc length; exact for unit-speed curves, quadrature otherwise.
    double length() const;

    // Rejects irregular curves (vanishing velocity, with the parameter value)
    // and self-intersections found by dyadic sampling at 2^-12 of the span.
    void validate() const;
};

// Same trace, opposite traversal (flips the normal side).
AnalyticCurve reversed(const AnalyticCurve& c);

// Same trace, parameter interval shifted to be symmetric about 0.  The collar
// constructions anchor integrals and the tangent-angle ODE at xi = 0, so
// fixture curves go through this before build_chart.
AnalyticCurve recentered(const AnalyticCurve& c);

// Unit-speed reparameterization on [0, length].  Constant-speed inputs keep
// their closed form; otherwise the curve is refit spectrally.  Postcondition:
// | |W'| - 1 | <= tol on a 10^3 sample grid.
AnalyticCurve arc_length_reparameterize(const AnalyticCurve& c, double tol = 1e-9);

// Signed curvature of a unit-speed curve: curv = x'' y' - y'' x' (equal to
// d_eta gamma on the axis).  Returned with one derivative level.
AnalyticFn curvature_profile(const AnalyticCurve& c);

class CurveChart {
public:
    CurveChart() = default;
    CurveChart(AnalyticCurve curve, double halfwidth, double overhang);

    const AnalyticCurve& curve() const { return curve_; }
    double halfwidth() const { return halfwidth_; }
    double xi_lo() const { return curve_.t0; }
    double xi_hi() const { return curve_.t1; }
    double length() const { return curve_.t1 - curve_.t0; }
    // Analytic objects may be evaluated slightly past the ends of the curve;
    // characteristics leaning out of [xi_lo, xi_hi] rely on this margin.
    double overhang() const { return overhang_; }

    Vec2 map(double xi, double eta) const;
    double gamma(double xi, double eta) const;
    // Columns of the Jacobian of the map; |tau_*| = gamma, mutually orthogonal.
    Vec2 tau_xi(double xi, double eta) const;
    Vec2 tau_eta(double xi, double eta) const;

    // Chart coordinates of a cartesian point (Newton on W).  Throws when the
    // point is outside the collar.
    Vec2 invert(Vec2 p) const;

private:
    AnalyticCurve curve_;
    double halfwidth_ = 0.0;
    double overhang_ = 0.0;
    std::vector<std::pair<cplx, cplx>> seeds_;  // (zeta, W(zeta)) for inversion
};

// Validates and wraps a unit-speed curve.  halfwidth <= 0 picks the default
// min(0.25 * continuation radius, 0.1 * length).  Rejects non-unit-speed
// curves, halfwidths beyond the continuation radius, and collars on which
// the map fails injectivity sampling (with an overlap witness).
CurveChart build_chart(const AnalyticCurve& unit_speed_curve, double halfwidth = 0.0);

// Cartesian components of the 3-field with chart components (v.x, v.y, v.z)
// at (xi, eta): (1/gamma^2) * (v.x tau_xi + v.y tau_eta + v.z e_z).
Vec3 chart_to_cartesian(const CurveChart& chart, double xi, double eta, const Vec3& v);

// Convenience constructors for the curve shapes the fixtures use.
AnalyticCurve make_line(Vec2 start, double angle, double len);
// Arc of radius R starting at angle phi0, traversed clockwise when
// clockwise=true (curvature +1/R: the +eta side is the outside).
AnalyticCurve make_circle_arc(double radius, double phi0, double arc_len, bool clockwise);
AnalyticCurve make_sine(double amplitude, double wavenumber, double x_span);
AnalyticCurve make_ellipse_arc(double ax, double ay, double t0, double t1);

}  // namespace calibra
