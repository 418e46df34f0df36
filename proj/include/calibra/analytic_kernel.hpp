#pragma once

// Harmonic functions on the collar built from complex Cauchy data, the
// characteristic flow of their gradient, generic transport along that flow,
// and exact vertical (z) quadrature of piecewise-affine field profiles.

#include <functional>

#include "calibra/analytic_fn.hpp"
#include "calibra/common.hpp"
#include "calibra/ode.hpp"

namespace calibra {

// w(xi,eta) = Re F(xi+i eta) + Im G(xi+i eta); harmonic by construction.
// F continues the boundary values w(.,0), G' continues d_eta w(.,0).
class HarmonicFunction {
public:
    HarmonicFunction() = default;
    HarmonicFunction(AnalyticFn F, AnalyticFn G) : F_(std::move(F)), G_(std::move(G)) {}

    // Cauchy data on the axis: trace f and normal derivative g, both analytic.
    // Rejects data whose continuation radius cannot cover `halfwidth`.
    static HarmonicFunction from_cauchy(const AnalyticFn& f, const AnalyticFn& g,
                                        double a, double b, double halfwidth);

    double value(double xi, double eta) const {
        const cplx z(xi, eta);
        return F_(z).real() + G_(z).imag();
    }
    Vec2 grad(double xi, double eta) const {
        const cplx z(xi, eta);
        const cplx fp = F_.d1(z), gp = G_.d1(z);
        return {fp.real() + gp.imag(), -fp.imag() + gp.real()};
    }
    // Hessian entries; dyy = -dxx by harmonicity.
    double dxx(double xi, double eta) const {
        const cplx z(xi, eta);
        return F_.d2(z).real() + G_.d2(z).imag();
    }
    double dxy(double xi, double eta) const {
        const cplx z(xi, eta);
        return -F_.d2(z).imag() + G_.d2(z).real();
    }

    const AnalyticFn& F() const { return F_; }
    const AnalyticFn& G() const { return G_; }
    bool valid() const { return F_.valid() && G_.valid(); }

private:
    AnalyticFn F_, G_;
};

struct StripSpec {
    double xi_lo = 0.0, xi_hi = 1.0;
    double halfwidth = 0.1;
    double overhang = 0.0;   // footpoints may run this far past the xi range
    int n_char = 129;        // stored characteristics
    int n_levels = 65;       // stored eta levels per characteristic
};

// Characteristic flow of grad w: curves eta -> (p(foot,eta), eta) tangent to
// the gradient, labeled by their axis footpoint.
class FlowMap {
public:
    FlowMap() = default;
    FlowMap(const HarmonicFunction& w, const StripSpec& strip);

    // Footpoint-to-position map along the characteristic (fixed-step RK4,
    // deterministic; step count scales with |eta|).
    double p(double foot, double eta) const;
    // Inverse in the footpoint: p(q(xi,eta), eta) = xi.  Monotone bracketing
    // plus bisection to 1e-12; `hint` (a nearby footpoint) tightens the
    // initial bracket.  Throws DomainShrink when (xi,eta) has no footpoint
    // inside the strip.
    double q(double xi, double eta, double hint = std::nan("")) const;
    // d(foot)/d(xi) of the inverse map at (xi,eta): the sensitivity of the
    // characteristic endpoint, integrated alongside it.
    double q_sensitivity(double foot, double eta) const;

    struct Characteristic {
        double foot;
        std::vector<double> x;  // positions at the stored eta levels
    };
    const std::vector<double>& levels() const { return levels_; }
    const std::vector<Characteristic>& bundle() const { return bundle_; }
    const StripSpec& strip() const { return strip_; }

private:
    double seed_foot(double xi, double eta) const;
    const HarmonicFunction* w_ = nullptr;
    StripSpec strip_;
    std::vector<double> levels_;
    std::vector<Characteristic> bundle_;
};

// Solution of drift . grad(beta) = source with beta(.,0) = init, evaluated by
// integrating the characteristic through the query point back to the axis.
// drift must have a nonvanishing eta component on the strip.
class TransportSolution {
public:
    using Field2 = std::function<Vec2(double, double)>;
    using Field1 = std::function<double(double, double)>;
    using TraceFn = std::function<double(double)>;

    TransportSolution() = default;
    TransportSolution(Field2 drift, Field1 source, TraceFn init, StripSpec strip);

    double value(double xi, double eta) const;
    double footpoint(double xi, double eta) const;

    const StripSpec& strip() const { return strip_; }

private:
    friend TransportSolution solve_transport(Field2, Field1, TraceFn, const StripSpec&);
    std::array<double, 2> trace_back(double xi, double eta) const;  // {foot, -integral}
    Field2 drift_;
    Field1 source_;
    TraceFn init_;
    StripSpec strip_;
};

TransportSolution solve_transport(TransportSolution::Field2 drift,
                                  TransportSolution::Field1 source,
                                  TransportSolution::TraceFn init,
                                  const StripSpec& strip);

// ---- exact z-quadrature of piecewise profiles ----

enum class SegmentKind { Vertical, Gradient, Flow };

// One z-interval of a field column: xi/eta components affine in z,
// z component quadratic in z.
struct ZSegment {
    double lo = 0.0, hi = 0.0;
    Vec2 flat{};   // constant part of the (xi,eta) components
    Vec2 slope{};  // coefficient of z in the (xi,eta) components
    double z0 = 0.0, z1 = 0.0, z2 = 0.0;  // z-component: z0 + z1*z + z2*z^2
    SegmentKind kind = SegmentKind::Vertical;
};

struct ZProfile {
    std::vector<ZSegment> segs;  // contiguous, ordered by z
    // When true the outermost segments are z-constant and the field keeps
    // those values for all z beyond the span (with vanishing xi/eta part),
    // so quadrature ignores the tails and point queries clamp.  When false
    // the field is undefined outside the span and queries there throw.
    bool saturated_tails = true;
    double z_lo() const { return segs.front().lo; }
    double z_hi() const { return segs.back().hi; }
};

// Integral of the (xi,eta) components over z from s to t, exact per segment
// (antisymmetric in s,t; contributions outside the span are zero).
Vec2 vertical_quadrature(const ZProfile& profile, double s, double t);

// Field column sampled at one z (xi/eta components and z component).
Vec3 profile_value(const ZProfile& profile, double z);

}  // namespace calibra
