#include "calibra/calibration_verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include "calibra/curve_geometry.hpp"

namespace calibra {
namespace {

// Closed inequalities: a margin pinched to zero passes.  The slack absorbs
// transport quadrature noise at the pinch (the trace pair on the axis, where
// the jump integral has unit length by construction); genuine violations
// show up orders of magnitude below it.
constexpr double kSlack = 1e-9;

Vec3 seg_eval(const ZSegment& s, double z) {
    return {s.flat.x + s.slope.x * z, s.flat.y + s.slope.y * z,
            s.z0 + z * (s.z1 + z * s.z2)};
}

void track_residual(ResidualCheck& c, double r, double xi, double eta, double z,
                    double t = 0.0) {
    if (std::abs(r) >= c.worst) {
        c.worst = std::abs(r);
        c.where = {xi, eta, z, t, r};
    }
}

void track_margin(MarginCheck& c, double m, double xi, double eta, double z,
                  double t = 0.0) {
    if (m <= c.min) {
        c.min = m;
        c.where = {xi, eta, z, t, m};
    }
}

// z-lattice for the pairwise bound: half uniform across the span, the rest
// packed around the trace values where the integral is longest, plus the
// trace pair itself (the bound is tight there on the axis).
std::vector<double> pair_lattice(double z_lo, double z_hi, double u1, double u2,
                                 int n) {
    std::vector<double> v;
    v.reserve(n + 2);
    const int nb = n / 2, nc = (n - nb) / 2;
    for (double z : linspace(z_lo, z_hi, nb)) v.push_back(z);
    const double w1 = 0.6 * (u1 - z_lo), w2 = 0.6 * (z_hi - u2);
    const double gap = u2 - u1;
    for (double z : linspace(u1 - w1, u1 + 0.25 * gap, nc)) v.push_back(z);
    for (double z : linspace(u2 - 0.25 * gap, u2 + w2, nc)) v.push_back(z);
    v.push_back(u1);
    v.push_back(u2);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            v.end());
    return v;
}

bool inside(const ZSegment& s, double z) { return z > s.lo && z < s.hi; }

}  // namespace

double block_caps(const BuildParams& p, double eta) {
    const double e = p.eps;
    if (p.variant == Variant::Dirichlet) {
        const double v1 = e + p.M * eta, v2 = e - p.M * eta;
        return p.M * e * e * (1.0 / v1 + 1.0 / v2);
    }
    const double v1 = 1.0 + p.M * eta, v2 = 1.0 - p.M * eta;
    const double t1 = 2.0 * e + p.Mp * eta, t2 = 2.0 * e - p.Mp * eta;
    return 6.0 * e * e * p.M + e * e * p.Mp * (v2 * v2 / t1 + v1 * v1 / t2);
}

double block_caps_d2(const BuildParams& p) {
    const double e = p.eps;
    if (p.variant == Variant::Dirichlet) return 4.0 * p.M * p.M * p.M / e;
    // (f^2/g)'' = 2 (f'g - f g')^2 / g^3 for affine f, g
    const double s = 2.0 * e * p.M + p.Mp;
    return e * e * p.Mp * 4.0 * s * s / (8.0 * e * e * e);
}

VerificationReport verify_field(const FieldLike& field, const VerifyGrid& grid,
                                double tol) {
    VerificationReport rep;
    rep.grid = grid;
    rep.tol = tol;
    const Candidate& cand = field.candidate();
    const BuildParams& p = field.params();
    const double hw = p.halfwidth;
    const double dxi = 1e-4;
    const double deta = std::min(1e-4, 0.04 * hw);

    rep.xi_axis = linspace(cand.xi_lo(), cand.xi_hi(), grid.n_xi);
    rep.eta_axis = linspace(-0.9 * hw, 0.9 * hw, grid.n_eta);
    rep.cone_grid.reserve(rep.xi_axis.size() * rep.eta_axis.size());
    rep.length_grid.reserve(rep.cone_grid.capacity());

    rep.cone.min = std::numeric_limits<double>::infinity();
    rep.length.min = std::numeric_limits<double>::infinity();
    rep.rho_min = std::numeric_limits<double>::infinity();
    rep.rho_max = 0.0;

    for (double xi : rep.xi_axis) {
        for (double eta : rep.eta_axis) {
            const ZProfile pc = field.profile(xi, eta);
            const ZProfile px[2] = {field.profile(xi - dxi, eta),
                                    field.profile(xi + dxi, eta)};
            const ZProfile pe[2] = {field.profile(xi, eta - deta),
                                    field.profile(xi, eta + deta)};
            const size_t ns = pc.segs.size();
            const bool aligned = px[0].segs.size() == ns && px[1].segs.size() == ns &&
                                 pe[0].segs.size() == ns && pe[1].segs.size() == ns;

            double cone_here = std::numeric_limits<double>::infinity();
            for (size_t k = 0; k < ns; ++k) {
                const ZSegment& s = pc.segs[k];
                // interior divergence, flat chart form
                for (double frac : {0.3, 0.7}) {
                    const double z = s.lo + frac * (s.hi - s.lo);
                    if (!aligned || !inside(px[0].segs[k], z) ||
                        !inside(px[1].segs[k], z) || !inside(pe[0].segs[k], z) ||
                        !inside(pe[1].segs[k], z))
                        continue;
                    const double div_x = (seg_eval(px[1].segs[k], z).x -
                                          seg_eval(px[0].segs[k], z).x) /
                                         (2.0 * dxi);
                    const double div_y = (seg_eval(pe[1].segs[k], z).y -
                                          seg_eval(pe[0].segs[k], z).y) /
                                         (2.0 * deta);
                    const double div_z = s.z1 + 2.0 * s.z2 * z;
                    track_residual(rep.interior, div_x + div_y + div_z, xi, eta, z);
                }
                // cone bound; equality on the gradient blocks
                for (double frac : {0.25, 0.5, 0.75}) {
                    const double z = s.lo + frac * (s.hi - s.lo);
                    const Vec3 v = seg_eval(s, z);
                    const double m = 4.0 * v.z - v.x * v.x - v.y * v.y;
                    if (s.kind == SegmentKind::Gradient) {
                        track_residual(rep.tangency, m, xi, eta, z);
                    } else {
                        cone_here = std::min(cone_here, m);
                        track_margin(rep.cone, m, xi, eta, z);
                    }
                }
            }
            rep.cone_grid.push_back(cone_here);

            // seams: normal traces of (phi, phi^z) match across moving interfaces
            if (aligned) {
                for (size_t k = 0; k + 1 < ns; ++k) {
                    const double S = pc.segs[k].hi;
                    const double Sx =
                        (px[1].segs[k].hi - px[0].segs[k].hi) / (2.0 * dxi);
                    const double Sy =
                        (pe[1].segs[k].hi - pe[0].segs[k].hi) / (2.0 * deta);
                    const Vec3 lo = seg_eval(pc.segs[k], S);
                    const Vec3 hi = seg_eval(pc.segs[k + 1], S);
                    const double defect =
                        (hi.z - lo.z) - Sx * (hi.x - lo.x) - Sy * (hi.y - lo.y);
                    track_residual(rep.seams, defect, xi, eta, S);
                }
            }

            // contact with the trace data at z = u_i
            const double u1 = cand.u[0].value(xi, eta);
            const double u2 = cand.u[1].value(xi, eta);
            for (int i = 0; i < 2; ++i) {
                const double ui = i == 0 ? u1 : u2;
                const Vec2 g = cand.u[i].grad(xi, eta);
                const Vec3 v = profile_value(pc, ui);
                const double res =
                    std::max({std::abs(v.x - 2.0 * g.x), std::abs(v.y - 2.0 * g.y),
                              std::abs(v.z - g.x * g.x - g.y * g.y)});
                track_residual(rep.contact, res, xi, eta, ui, double(i));
            }

            // pairwise length bound against gamma
            const double ga = cand.chart.gamma(xi, eta);
            const auto zs = pair_lattice(pc.z_lo(), pc.z_hi(), u1, u2, grid.n_st);
            std::vector<Vec2> pref(zs.size());
            for (size_t k = 0; k < zs.size(); ++k)
                pref[k] = vertical_quadrature(pc, zs.front(), zs[k]);
            double len_here = std::numeric_limits<double>::infinity();
            for (size_t a = 0; a < zs.size(); ++a) {
                for (size_t b = a + 1; b < zs.size(); ++b) {
                    const Vec2 I = pref[b] - pref[a];
                    const double m = ga * ga - I.x * I.x - I.y * I.y;
                    if (m < len_here) len_here = m;
                    track_margin(rep.length, m, xi, eta, zs[a], zs[b]);
                }
            }
            rep.length_grid.push_back(len_here);

            // polar diagnostics of the trace-to-trace integral
            const Vec2 I = vertical_quadrature(pc, u1, u2);
            const double rho = std::hypot(I.x, I.y);
            const double theta = std::atan2(I.x, I.y);
            rep.rho_min = std::min(rep.rho_min, rho);
            rep.rho_max = std::max(rep.rho_max, rho);
            rep.theta_abs_max = std::max(rep.theta_abs_max, std::abs(theta));
            if (eta != 0.0)
                rep.theta_slope_max =
                    std::max(rep.theta_slope_max, std::abs(theta) / std::abs(eta));
        }
    }

    // axis: the trace-to-trace integral must be exactly the unit jump
    for (double xi : rep.xi_axis) {
        const ZProfile pr = field.profile(xi, 0.0);
        const double u1 = cand.u[0].value(xi, 0.0), u2 = cand.u[1].value(xi, 0.0);
        const Vec2 I = vertical_quadrature(pr, u1, u2);
        const double res = std::max(std::abs(I.x), std::abs(I.y - 1.0));
        track_residual(rep.axis, res, xi, 0.0, u1, u2);
    }

    rep.interior.pass = rep.interior.worst <= tol;
    rep.seams.pass = rep.seams.worst <= tol;
    rep.tangency.pass = rep.tangency.worst <= tol;
    rep.contact.pass = rep.contact.worst <= tol;
    rep.axis.pass = rep.axis.worst <= tol;
    rep.cone.pass = rep.cone.min >= -kSlack;
    rep.length.pass = rep.length.min >= -kSlack;
    rep.pass = rep.interior.pass && rep.seams.pass && rep.cone.pass &&
               rep.tangency.pass && rep.contact.pass && rep.length.pass &&
               rep.axis.pass;
    return rep;
}

void write_margin_csv(const VerificationReport& rep, std::ostream& out) {
    out << "xi,eta,cone,length\n";
    out.precision(12);
    const size_t ne = rep.eta_axis.size();
    for (size_t i = 0; i < rep.xi_axis.size(); ++i) {
        for (size_t j = 0; j < ne; ++j) {
            out << rep.xi_axis[i] << ',' << rep.eta_axis[j] << ','
                << rep.cone_grid[i * ne + j] << ',' << rep.length_grid[i * ne + j]
                << '\n';
        }
    }
}

namespace {

double rich1(const std::array<double, 5>& v, double h) {
    return (4.0 * (v[3] - v[1]) / h - (v[4] - v[0]) / (2.0 * h)) / 3.0;
}

double rich2(const std::array<double, 5>& v, double h) {
    const double fine = (v[3] - 2.0 * v[2] + v[1]) / (0.25 * h * h);
    const double coarse = (v[4] - 2.0 * v[2] + v[0]) / (h * h);
    return (4.0 * fine - coarse) / 3.0;
}

void push_row(std::vector<IdentityReport::Row>& rows, double& worst, double xi,
              double value, double target) {
    rows.push_back({xi, value, target, value - target});
    worst = std::max(worst, std::abs(value - target));
}

}  // namespace

IdentityReport derivative_identities(const FieldLike& field, int n_xi, double tol) {
    IdentityReport rep;
    rep.tol = tol;
    const Candidate& cand = field.candidate();
    const BuildParams& p = field.params();
    const double hw = p.halfwidth;
    const double l = cand.half_length();
    const double span = cand.xi_hi() - cand.xi_lo();
    const double h1 = 1e-3 * hw;
    const double h2 = 0.2 * hw;

    for (double xi :
         linspace(cand.xi_lo() + 0.05 * span, cand.xi_hi() - 0.05 * span, n_xi)) {
        const double kap = cand.curv.real_at(xi);

        auto metric = [&](double eta) {
            const double ga = cand.chart.gamma(xi, eta);
            return 1.0 / (ga * ga);
        };
        std::array<double, 5> m;
        for (int s = 0; s < 5; ++s) m[s] = metric((s - 2) * 0.5 * h1);
        push_row(rep.metric_d1, rep.worst_metric_d1, xi, rich1(m, h1), -2.0 * kap);
        push_row(rep.metric_d2, rep.worst_metric_d2, xi, rich2(m, h1),
                 4.0 * kap * kap);

        // jump-integral length with the stiff block-cap part split off
        auto smooth_rho = [&](double eta) {
            const ZProfile pr = field.profile(xi, eta);
            const Vec2 I = vertical_quadrature(pr, cand.u[0].value(xi, eta),
                                               cand.u[1].value(xi, eta));
            return std::hypot(I.x, I.y) - block_caps(p, eta);
        };
        std::array<double, 5> r1, r2;
        for (int s = 0; s < 5; ++s) {
            const double t = (s - 2) * 0.5;
            if (s != 2) r1[s] = smooth_rho(t * h1);
            r2[s] = smooth_rho(t * h2) - cand.chart.gamma(xi, t * h2);
        }
        r1[2] = 0.0;  // rich1 never reads the center
        push_row(rep.rho_d1, rep.worst_rho_d1, xi, rich1(r1, h1), kap);
        push_row(rep.gap_d2, rep.worst_gap_d2, xi, rich2(r2, h2) + block_caps_d2(p),
                 -M_PI * M_PI / (16.0 * l * l));
    }

    rep.pass = rep.worst_metric_d1 <= tol && rep.worst_metric_d2 <= tol &&
               rep.worst_rho_d1 <= tol && rep.worst_gap_d2 <= tol;
    return rep;
}

}  // namespace calibra
