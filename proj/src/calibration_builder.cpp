#include "calibra/calibration_builder.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "fn_ops.hpp"

namespace calibra {

namespace {

const OdeOptions& tight_opts() {
    static const OdeOptions opt{1e-12, 1e-14, 200000};
    return opt;
}

double sup_abs_on(const AnalyticFn& f, double a, double b, int n = 1025) {
    double m = 0.0;
    for (double x : linspace(a, b, n)) m = std::max(m, std::abs(f.real_at(x)));
    return m;
}

// Gradient-block column segment: components 2 g - 2 ((c0 - z) / v) (0, q),
// z-part |g - ((c0 - z) / v) (0, q)|^2.  Affine resp. quadratic in z.
ZSegment grad_segment(double z_from, double z_to, double c0, Vec2 g, double v, double q) {
    ZSegment s;
    s.lo = z_from;
    s.hi = z_to;
    s.kind = SegmentKind::Gradient;
    const double rate = q / v;
    s.flat = {2.0 * g.x, 2.0 * (g.y - rate * c0)};
    s.slope = {0.0, 2.0 * rate};
    const double alpha = g.y - rate * c0;
    s.z0 = g.x * g.x + alpha * alpha;
    s.z1 = 2.0 * alpha * rate;
    s.z2 = rate * rate;
    return s;
}

ZSegment vertical_segment(double z_from, double z_to, double omega) {
    ZSegment s;
    s.lo = z_from;
    s.hi = z_to;
    s.kind = SegmentKind::Vertical;
    s.z0 = omega;
    return s;
}

ZSegment slab_segment(double z_from, double z_to, Vec2 drift, double mu) {
    ZSegment s;
    s.lo = z_from;
    s.hi = z_to;
    s.kind = SegmentKind::Flow;
    s.flat = drift;
    s.z0 = mu;
    return s;
}

}  // namespace

BuildConstants compute_constants(double l, double k, const Candidate& cand,
                                 Variant variant) {
    BuildConstants bc;
    bc.N = 1.0 + std::max(kPi / (4.0 * l), k);
    bc.d = 1.0 / (1.0 + 16.0 * l * l * bc.N * bc.N / (kPi * kPi));
    if (variant == Variant::Dirichlet) {
        const double s2 = cand.c2_norm[0] * cand.c2_norm[0] + cand.c2_norm[1] * cand.c2_norm[1];
        bc.h = std::max(1.0, 1.1 * (32.0 / (kPi * kPi)) * (2.0 - bc.d) * l * l * s2);
    } else {
        const double s1 = cand.c1_norm[0] * cand.c1_norm[0] + cand.c1_norm[1] * cand.c1_norm[1];
        bc.h = std::max(1.0, (64.0 / (kPi * kPi)) * l * l * s1);
    }
    bc.c_tilde = 78.0;
    bc.c = capacity_constant();
    return bc;
}

double capacity_constant() { return std::max(78.0, 64.0 / (kPi * kPi)); }

BuildParams select_parameters(const Candidate& cand, Variant variant, double eps,
                              double K_min) {
    BuildParams p;
    p.variant = variant;
    p.eps = eps;
    p.lambda = std::max(10.0, 4.0 / cand.min_gap);
    const double l = cand.half_length(), k = cand.sup_curvature();
    p.consts = compute_constants(l, k, cand, variant);

    if (variant == Variant::Dirichlet) {
        p.M = cand.sup_slope < 1e-12 ? 1.0 : 1.1 * cand.sup_slope;
        if (2.0 * eps * p.M >= 0.9)
            throw DomainShrink("2 eps M = " + std::to_string(2.0 * eps * p.M) +
                               " leaves no room for the transport slab");
        // keep the block half-width eps^2 M^2 / v^2 comfortably above the
        // squared slopes off the axis: v may grow by 5% at most
        p.halfwidth = std::min(cand.chart.halfwidth(), 0.05 * eps / p.M);
    } else {
        const double s1 = cand.c1_norm[0] * cand.c1_norm[0] + cand.c1_norm[1] * cand.c1_norm[1];
        const double lower = p.consts.c * (1.0 + l * l + l * l * k * k) * s1;
        if (!(lower < K_min))
            throw Error("domain too large for graph calibration: block-slope window (" +
                        std::to_string(lower) + ", " + std::to_string(K_min) + ") is empty");
        p.M = std::isfinite(K_min) ? 0.5 * (lower + K_min) : std::max(1.0, 1.1 * lower);
        p.Mp = std::max(0.2, 2.2 * cand.sup_slope);
        if (eps * (p.Mp + 6.0 * eps * p.M) >= 0.9)
            throw DomainShrink("outer blocks too thick: eps (Mp + 6 eps M) = " +
                               std::to_string(eps * (p.Mp + 6.0 * eps * p.M)));
        p.halfwidth = std::min({cand.chart.halfwidth(), 0.1 * eps / p.Mp, 0.1 / p.M});
    }

    const double e1 = p.slab_share();
    const double supA = sup_abs_on(fn_sum(cand.slope[0], cand.slope[1]),
                                   cand.xi_lo(), cand.xi_hi());
    const double drift = (variant == Variant::Dirichlet ? 2.0 : 4.0) * eps * supA;
    p.mu = 1.1 * (p.lambda * p.lambda / 4.0) * (e1 * e1 + drift * drift);
    return p;
}

RiccatiSolution solve_riccati_n(const AnalyticFn& curvature, double l, double lo,
                                double hi, double N, const RiccatiClosures* closures) {
    if (!(lo < 0.0 && 0.0 < hi))
        throw Error("tangent-angle solve anchored at 0, which must lie inside [" +
                    std::to_string(lo) + ", " + std::to_string(hi) + "]");
    const double target = kPi * kPi / (16.0 * l * l);
    auto rhs = [&curvature, closures, target](double xi, double tau) {
        const double kap = curvature.real_at(xi);
        const double a = closures ? closures->a(xi) : 1.0;
        const double h = closures ? closures->h(xi, tau) : 2.0 * tau * tau;
        return (h - tau * tau - kap * kap + target) / a;
    };

    RiccatiSolution sol;
    try {
        for (double end : {lo, hi}) {
            ode_integrate_path(rhs, 0.0, linspace(0.0, end, 129), [&](double xi, double tau) {
                sol.sup_tau = std::max(sol.sup_tau, std::abs(tau));
                if (std::abs(tau) > N)
                    throw DomainShrink("tangent slope " + std::to_string(tau) + " at xi=" +
                                       std::to_string(xi) + " escaped the bound " +
                                       std::to_string(N) + "; blocks too thick");
            }, tight_opts());
        }
        sol.tau = AnalyticFn::fit(
            [&rhs](double x) {
                // fit nodes can land within rounding of the anchor; the
                // integrator cannot start on a span that short
                if (std::abs(x) < 1e-11) return cplx(x * rhs(0.0, 0.0), 0.0);
                return cplx(ode_integrate(rhs, 0.0, 0.0, x, tight_opts()), 0.0);
            },
            lo, hi);
    } catch (const DomainShrink&) {
        throw;
    } catch (const Error& e) {
        throw DomainShrink(std::string("tangent-angle equation blew up: ") + e.what());
    }
    const AnalyticFn T = sol.tau.antiderivative_on(lo, hi, 0.0);
    const AnalyticFn tau = sol.tau;
    sol.n = AnalyticFn::closed(
        {[T](cplx z) { return std::exp(T(z)); },
         [T, tau](cplx z) { return tau(z) * std::exp(T(z)); },
         [T, tau](cplx z) {
             const cplx t = tau(z);
             return (tau.d1(z) + t * t) * std::exp(T(z));
         },
         [T, tau](cplx z) {
             const cplx t = tau(z);
             return (tau.d2(z) + 3.0 * t * tau.d1(z) + t * t * t) * std::exp(T(z));
         }},
        std::min(T.radius(), tau.radius()));
    return sol;
}

RiccatiClosures finite_width_closures(const Candidate& cand, double eps, double M) {
    const double e1 = 1.0 - 2.0 * eps * M;
    const double e2 = 2.0 * eps / e1;
    const AnalyticFn A = fn_sum(cand.slope[0], cand.slope[1]);
    const AnalyticFn Ap = A.derivative();
    const AnalyticFn B = fn_product(A, cand.curv).derivative();
    const AnalyticFn kap = cand.curv;

    RiccatiClosures cl;
    cl.a = [A, e1, e2](double xi) {
        const double Av = A.real_at(xi);
        return e1 * (1.0 + e2 * e2 * Av * Av);
    };
    cl.h = [A, Ap, B, kap, e1, e2](double xi, double tau) {
        const double Av = A.real_at(xi);
        const double a = e1 * (1.0 + e2 * e2 * Av * Av);
        const double P = a * tau - e2 * Av * kap.real_at(xi);
        return tau * tau + P * P + e2 * B.real_at(xi) -
               2.0 * e1 * e2 * e2 * Av * Ap.real_at(xi) * tau;
    };
    return cl;
}

WFrame build_w_sigma(const Candidate& cand, const AnalyticFn& n, const BuildParams& params) {
    const double lo = cand.xi_lo(), hi = cand.xi_hi();
    const double e1 = params.slab_share();
    const double pref = (params.variant == Variant::Dirichlet ? 2.0 : 4.0) * params.eps / e1;

    const AnalyticFn integrand = fn_product(n, fn_sum(cand.slope[0], cand.slope[1]));
    const AnalyticFn f = fn_scale(integrand.antiderivative_on(lo, hi, 0.0), -pref);

    WFrame frame;
    frame.n = n;
    frame.pref_sigma = e1;
    const double reach = std::hypot(params.halfwidth, cand.chart.overhang());
    frame.w = std::make_shared<const HarmonicFunction>(
        HarmonicFunction::from_cauchy(f, n, lo, hi, reach));

    StripSpec strip;
    strip.xi_lo = lo;
    strip.xi_hi = hi;
    strip.halfwidth = params.halfwidth;
    strip.overhang = cand.chart.overhang();
    frame.flow = FlowMap(*frame.w, strip);
    return frame;
}

CalibrationField::CalibrationField(Candidate cand, BuildParams params, WFrame frame)
    : cand_(std::move(cand)), params_(std::move(params)), frame_(std::move(frame)) {}

double CalibrationField::mid_at(double xi) const {
    return 0.5 * (cand_.trace[0].real_at(xi) + cand_.trace[1].real_at(xi));
}

CalibrationField::Column CalibrationField::column(double xi, double eta,
                                                  double foot_hint) const {
    Column c;
    c.xi = xi;
    c.eta = eta;
    const double eps = params_.eps, M = params_.M, Mp = params_.Mp;
    for (int i = 0; i < 2; ++i) {
        c.u[i] = cand_.u[i].value(xi, eta);
        c.du[i] = cand_.u[i].grad(xi, eta);
    }

    if (params_.variant == Variant::Dirichlet) {
        c.v[0] = eps + M * eta;
        c.v[1] = eps - M * eta;
        for (int i = 0; i < 2; ++i) {
            if (c.v[i] <= 0.0)
                throw DomainShrink("block width hit zero at eta=" + std::to_string(eta));
            c.omega[i] = eps * eps * M * M / (c.v[i] * c.v[i]) - c.du[i].norm2();
        }
    } else {
        c.v[0] = 1.0 + M * eta;
        c.v[1] = 1.0 - M * eta;
        c.vt[0] = 2.0 * eps + Mp * eta;
        c.vt[1] = 2.0 * eps - Mp * eta;
        for (int i = 0; i < 2; ++i)
            if (c.v[i] <= 0.0 || c.vt[i] <= 0.0 || c.v[i] >= 2.0)
                throw DomainShrink("block width degenerate at eta=" + std::to_string(eta));
        // the inner and outer blocks share their interface value, which ties
        // the pad level to both slopes
        const double r0 = eps * (M + Mp * c.v[1] / c.vt[0]);
        const double r1 = eps * (M + Mp * c.v[0] / c.vt[1]);
        c.omega[0] = r0 * r0 - c.du[0].norm2();
        c.omega[1] = r1 * r1 - c.du[1].norm2();
    }

    c.foot = frame_.flow.q(xi, eta, foot_hint);
    c.sigma = frame_.pref_sigma / frame_.n.real_at(c.foot);
    c.sw = c.sigma * frame_.w->grad(xi, eta);

    if (eta == 0.0) {
        c.band[0] = c.band[1] = mid_at(xi);
        return c;
    }

    // both pad levels ride the same characteristic; sigma is constant along
    // it, so the transport reduces to one quadrature per level
    const double mu = params_.mu;
    const Candidate& cd = cand_;
    const BuildParams& pp = params_;
    const HarmonicFunction& w = *frame_.w;
    using S3 = std::array<double, 3>;
    auto rhs = [&cd, &pp, &w, mu, eps, M, Mp](double s, const S3& y) -> S3 {
        const double x = y[0];
        const Vec2 g = w.grad(x, s);
        if (std::abs(g.y) < 1e-12 * (1.0 + std::abs(g.x)))
            throw DomainShrink("transport drift parallel to the axis at xi=" +
                               std::to_string(x));
        const Vec2 d0 = cd.u[0].grad(x, s), d1 = cd.u[1].grad(x, s);
        double o0, o1;
        if (pp.variant == Variant::Dirichlet) {
            const double v0 = eps + M * s, v1 = eps - M * s;
            o0 = eps * eps * M * M / (v0 * v0) - d0.norm2();
            o1 = eps * eps * M * M / (v1 * v1) - d1.norm2();
        } else {
            const double v0 = 1.0 + M * s, v1 = 1.0 - M * s;
            const double t0 = 2.0 * eps + Mp * s, t1 = 2.0 * eps - Mp * s;
            const double r0 = eps * (M + Mp * v1 / t0), r1 = eps * (M + Mp * v0 / t1);
            o0 = r0 * r0 - d0.norm2();
            o1 = r1 * r1 - d1.norm2();
        }
        return {g.x / g.y, (mu - o0) / g.y, (mu - o1) / g.y};
    };
    S3 end;
    try {
        end = ode_integrate(rhs, S3{c.foot, 0.0, 0.0}, 0.0, eta, tight_opts());
    } catch (const DomainShrink&) {
        throw;
    } catch (const Error& e) {
        throw DomainShrink(std::string("transport characteristic failed: ") + e.what());
    }
    if (std::abs(end[0] - xi) > 1e-7 * (1.0 + std::abs(xi)))
        throw DomainShrink("characteristic through (" + std::to_string(xi) + ", " +
                           std::to_string(eta) + ") drifted from its footpoint");
    const double scale = frame_.n.real_at(c.foot) / (params_.lambda * frame_.pref_sigma);
    const double mid = mid_at(c.foot);
    c.band[0] = mid + scale * end[1];
    c.band[1] = mid + scale * end[2];
    return c;
}

ZProfile CalibrationField::profile_of(const Column& c) const {
    const double eps = params_.eps, M = params_.M, Mp = params_.Mp;
    const double s_lo = c.band[0], s_hi = c.band[1] + 1.0 / params_.lambda;
    const Vec2 drift = params_.lambda * c.sw;

    ZProfile pr;
    if (params_.variant == Variant::Dirichlet) {
        const double b_lo = c.u[0] + eps, b_hi = c.u[1] - eps;
        if (!(b_lo < s_lo && s_lo < s_hi && s_hi < b_hi))
            throw DomainShrink("transition levels out of order at (" + std::to_string(c.xi) +
                               ", " + std::to_string(c.eta) + ")");
        pr.saturated_tails = true;
        pr.segs = {
            vertical_segment(c.u[0] - 2.0 * eps, c.u[0] - eps, c.omega[0]),
            grad_segment(c.u[0] - eps, c.u[0] + eps, c.u[0], c.du[0], c.v[0], M),
            vertical_segment(c.u[0] + eps, s_lo, c.omega[0]),
            slab_segment(s_lo, s_hi, drift, params_.mu),
            vertical_segment(s_hi, c.u[1] - eps, c.omega[1]),
            grad_segment(c.u[1] - eps, c.u[1] + eps, c.u[1], c.du[1], c.v[1], -M),
            vertical_segment(c.u[1] + eps, c.u[1] + 2.0 * eps, c.omega[1]),
        };
    } else {
        const double in0 = c.u[0] + eps * c.v[0], in1 = c.u[1] - eps * c.v[1];
        const double out0 = c.u[0] + 2.0 * eps, out1 = c.u[1] - 2.0 * eps;
        if (!(in0 < out0 && out0 < s_lo && s_lo < s_hi && s_hi < out1 && out1 < in1))
            throw DomainShrink("transition levels out of order at (" + std::to_string(c.xi) +
                               ", " + std::to_string(c.eta) + ")");
        const Vec2 g0{c.du[0].x, c.du[0].y + eps * M};
        const Vec2 g1{c.du[1].x, c.du[1].y + eps * M};
        pr.saturated_tails = false;
        pr.segs = {
            grad_segment(c.u[0] - eps * c.v[0], in0, c.u[0], c.du[0], c.v[0], M),
            grad_segment(in0, out0, in0, g0, c.vt[0], Mp),
            vertical_segment(out0, s_lo, c.omega[0]),
            slab_segment(s_lo, s_hi, drift, params_.mu),
            vertical_segment(s_hi, out1, c.omega[1]),
            grad_segment(out1, in1, in1, g1, c.vt[1], -Mp),
            grad_segment(in1, c.u[1] + eps * c.v[1], c.u[1], c.du[1], c.v[1], -M),
        };
    }
    return pr;
}

ZProfile CalibrationField::profile(double xi, double eta) const {
    return profile_of(column(xi, eta));
}

std::vector<double> CalibrationField::interfaces(const Column& c) const {
    const double eps = params_.eps;
    const double s_lo = c.band[0], s_hi = c.band[1] + 1.0 / params_.lambda;
    if (params_.variant == Variant::Dirichlet)
        return {c.u[0] - eps, c.u[0] + eps, s_lo, s_hi, c.u[1] - eps, c.u[1] + eps};
    return {c.u[0] + eps * c.v[0], c.u[0] + 2.0 * eps, s_lo, s_hi,
            c.u[1] - 2.0 * eps, c.u[1] - eps * c.v[1]};
}

namespace {

// Cheap internal gate: jump identities on the axis, region ordering, and
// positivity of the vertical and slab z-components on a coarse grid.
std::optional<std::string> quick_check(const CalibrationField& field) {
    const Candidate& cand = field.candidate();
    const BuildParams& p = field.params();
    const double a = cand.xi_lo(), b = cand.xi_hi();

    for (double xi : linspace(a, b, 9)) {
        const ZProfile pr = field.profile(xi, 0.0);
        const Vec2 I = vertical_quadrature(pr, cand.trace[0].real_at(xi),
                                           cand.trace[1].real_at(xi));
        if (std::abs(I.x) > 1e-8 || std::abs(I.y - 1.0) > 1e-8)
            return "axis jump integral off (0,1) by (" + std::to_string(I.x) + ", " +
                   std::to_string(I.y - 1.0) + ") at xi=" + std::to_string(xi);
    }

    double foot = std::numeric_limits<double>::quiet_NaN();
    for (double xi : linspace(a, b, 17)) {
        foot = std::numeric_limits<double>::quiet_NaN();
        for (double eta : linspace(-p.halfwidth, p.halfwidth, 9)) {
            const auto col = field.column(xi, eta, foot);
            foot = col.foot;
            for (int i = 0; i < 2; ++i)
                if (col.omega[i] <= 0.0)
                    return "vertical z-component nonpositive at (" + std::to_string(xi) +
                           ", " + std::to_string(eta) + ")";
            const Vec2 drift = p.lambda * col.sw;
            if (4.0 * p.mu - drift.norm2() <= 0.0)
                return "slab cone margin nonpositive at (" + std::to_string(xi) + ", " +
                       std::to_string(eta) + ")";
            (void)field.profile_of(col);  // ordering check
        }
    }
    return std::nullopt;
}

}  // namespace

CalibrationField assemble_field(const Candidate& cand, Variant variant,
                                const AssembleOptions& opts) {
    const double l = cand.half_length();
    const double lo = cand.xi_lo() - cand.chart.overhang();
    const double hi = cand.xi_hi() + cand.chart.overhang();
    std::string worst = "no parameters admissible before the eps floor";

    for (double eps = 0.1 * cand.min_gap; eps >= opts.eps_floor; eps *= 0.5) {
        BuildParams base;
        try {
            base = select_parameters(cand, variant, eps, opts.K_min);
        } catch (const DomainShrink& e) {
            worst = e.what();
            continue;
        }
        for (int shrink = 0; shrink < 3; ++shrink) {
            BuildParams p = base;
            p.halfwidth = base.halfwidth * std::pow(0.5, shrink);
            try {
                RiccatiClosures cl;
                const RiccatiClosures* clp = nullptr;
                if (variant == Variant::Dirichlet) {
                    cl = finite_width_closures(cand, eps, p.M);
                    clp = &cl;
                }
                const RiccatiSolution ric =
                    solve_riccati_n(cand.curv, l, lo, hi, p.consts.N, clp);
                p.n = ric.n;
                const WFrame frame = build_w_sigma(cand, p.n, p);
                CalibrationField field(cand, p, frame);
                if (auto bad = quick_check(field)) {
                    worst = *bad;
                    continue;
                }
                if (opts.gate && !opts.gate(field)) {
                    worst = "external gate rejected the field";
                    continue;
                }
                return field;
            } catch (const DomainShrink& e) {
                worst = e.what();
            }
        }
    }
    throw Error("field assembly failed; worst condition: " + worst);
}

}  // namespace calibra
