#include "calibra/calibration_verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "calibra/curve_geometry.hpp"
#include "doctest.h"

using namespace calibra;

namespace {

CurveChart straight_chart(double l) {
    return build_chart(recentered(make_line({0.0, 0.0}, 0.0, 2.0 * l)), 0.15);
}

Candidate jump_cand() {
    return make_candidate(straight_chart(1.0), AnalyticFn::constant(0.0),
                          AnalyticFn::constant(2.0));
}

Candidate sloped_cand() {
    return make_candidate(straight_chart(1.0), AnalyticFn::poly({1.0, 0.4, 0.1}),
                          AnalyticFn::poly({3.0, -0.3}));
}

Candidate circle_cand() {
    CurveChart chart =
        build_chart(recentered(make_circle_arc(2.0, 0.3, 2.0, true)), 0.15);
    return make_candidate(chart, AnalyticFn::constant(1.0),
                          AnalyticFn::poly({4.0, -1.0 / std::sqrt(2.0)}));
}

const CalibrationField& jump_field() {
    static CalibrationField f = assemble_field(jump_cand(), Variant::Dirichlet);
    return f;
}

const CalibrationField& circle_field() {
    static CalibrationField f = assemble_field(circle_cand(), Variant::Dirichlet);
    return f;
}

// opposite slopes keep the squared-slope balance on a straight axis
Candidate balanced_cand() {
    return make_candidate(straight_chart(1.0), AnalyticFn::poly({1.0, 0.3}),
                          AnalyticFn::poly({3.0, -0.3}));
}

const CalibrationField& graph_field() {
    static CalibrationField f = assemble_field(
        make_candidate(straight_chart(1.0), AnalyticFn::poly({1.0, 0.1}),
                       AnalyticFn::poly({3.0, -0.1})),
        Variant::Graph);
    return f;
}

VerifyGrid quick_grid() { return {17, 8, 32}; }

// decorators for negative tests: same candidate and parameters, profile bent
// on purpose

struct SlabWeightTamper : FieldLike {
    const FieldLike& base;
    double factor;
    SlabWeightTamper(const FieldLike& b, double f) : base(b), factor(f) {}
    ZProfile profile(double xi, double eta) const override {
        ZProfile p = base.profile(xi, eta);
        for (auto& s : p.segs)
            if (s.kind == SegmentKind::Flow) s.z0 *= factor;
        return p;
    }
    const Candidate& candidate() const override { return base.candidate(); }
    const BuildParams& params() const override { return base.params(); }
};

struct LocalPadTamper : FieldLike {
    const FieldLike& base;
    double center, width;
    LocalPadTamper(const FieldLike& b, double c, double w)
        : base(b), center(c), width(w) {}
    ZProfile profile(double xi, double eta) const override {
        ZProfile p = base.profile(xi, eta);
        if (std::abs(xi - center) < width)
            for (auto& s : p.segs)
                if (s.kind == SegmentKind::Vertical) s.z0 = -s.z0;
        return p;
    }
    const Candidate& candidate() const override { return base.candidate(); }
    const BuildParams& params() const override { return base.params(); }
};

}  // namespace

TEST_CASE("pure jump verifies with room on every condition") {
    const CalibrationField& f = jump_field();
    const VerificationReport rep = verify_field(f, quick_grid());
    CHECK(rep.pass);
    CHECK(rep.interior.pass);
    CHECK(rep.seams.pass);
    CHECK(rep.cone.min > 0.0);
    CHECK(rep.length.min > 0.0);
    CHECK(rep.tangency.worst <= 1e-10);
    CHECK(rep.contact.worst <= 1e-9);
    CHECK(rep.axis.worst <= 1e-8);

    // the length bound is tightest at the trace pair itself
    const BuildParams& p = f.params();
    const double u1 = f.candidate().trace[0].real_at(rep.length.where.xi);
    const double u2 = f.candidate().trace[1].real_at(rep.length.where.xi);
    CHECK(std::abs(rep.length.where.z - u1) < 2.5 * p.eps);
    CHECK(std::abs(rep.length.where.t - u2) < 2.5 * p.eps);

    // jump-integral angle stays under the slope budget
    CHECK(rep.theta_slope_max < p.consts.N);
    CHECK(rep.rho_max <= 1.0 + 1e-6);
    CHECK(rep.rho_min > 0.9);
}

TEST_CASE("balanced sloped traces verify end to end") {
    CalibrationField f = assemble_field(balanced_cand(), Variant::Dirichlet);
    const VerificationReport rep = verify_field(f, quick_grid());
    CHECK(rep.pass);
    CHECK(rep.cone.min > 0.0);
    CHECK(rep.length.min > 0.0);
}

TEST_CASE("unbalanced traces fail the length bound off the axis") {
    // slopes whose squares do not balance: the jump integral outgrows gamma
    // linearly in eta, every other condition still holds
    CalibrationField f = assemble_field(sloped_cand(), Variant::Dirichlet);
    const VerificationReport rep = verify_field(f, quick_grid());
    CHECK_FALSE(rep.pass);
    CHECK_FALSE(rep.length.pass);
    CHECK(rep.length.min < 0.0);
    CHECK(rep.interior.pass);
    CHECK(rep.seams.pass);
    CHECK(rep.cone.pass);
    CHECK(rep.axis.pass);

    // the defect grows toward the strip edge
    CHECK(std::abs(rep.length.where.eta) > 0.8 * f.params().halfwidth);
}

TEST_CASE("balanced circle arc verifies end to end") {
    const VerificationReport rep = verify_field(circle_field(), quick_grid());
    CHECK(rep.pass);
    CHECK(rep.cone.min > 0.0);
    CHECK(rep.length.min > 0.0);
    CHECK(rep.axis.worst <= 1e-8);
}

TEST_CASE("graph variant verifies end to end") {
    const VerificationReport rep = verify_field(graph_field(), quick_grid());
    CHECK(rep.pass);
    CHECK(rep.cone.min > 0.0);
    CHECK(rep.length.min > 0.0);
}

TEST_CASE("halved slab weight fails the cone bound inside the slab") {
    const CalibrationField& f = jump_field();
    const SlabWeightTamper bad(f, 0.5);
    const VerificationReport rep = verify_field(bad, quick_grid());
    CHECK_FALSE(rep.pass);
    CHECK_FALSE(rep.cone.pass);
    CHECK(rep.cone.min < 0.0);

    // witness sits strictly between the gradient blocks
    const Candidate& c = f.candidate();
    const double u1 = c.trace[0].real_at(rep.cone.where.xi);
    const double u2 = c.trace[1].real_at(rep.cone.where.xi);
    CHECK(rep.cone.where.z > u1 + f.params().eps);
    CHECK(rep.cone.where.z < u2 - f.params().eps);

    // the mangled slab also breaks the seam balance, but not the interiors
    CHECK_FALSE(rep.seams.pass);
    CHECK(rep.interior.pass);
}

TEST_CASE("grid refinement catches a defect the coarse grid misses") {
    const CalibrationField& f = jump_field();
    const Candidate& c = f.candidate();
    const double span = c.xi_hi() - c.xi_lo();
    const double center = c.xi_lo() + 3.5 * span / 8.0;
    const LocalPadTamper bad(f, center, span / 64.0);

    VerifyGrid coarse = quick_grid();
    coarse.n_xi = 9;
    const VerificationReport ok = verify_field(bad, coarse);
    CHECK(ok.pass);

    VerifyGrid fine = quick_grid();
    fine.n_xi = 129;
    const VerificationReport caught = verify_field(bad, fine);
    CHECK_FALSE(caught.pass);
    CHECK_FALSE(caught.cone.pass);
    CHECK(std::abs(caught.cone.where.xi - center) < span / 64.0);
}

TEST_CASE("jump integral is additive and saturates past the caps") {
    const CalibrationField& f = jump_field();
    const ZProfile pr = f.profile(0.2, 0.3 * f.params().halfwidth);
    const double s = pr.z_lo() + 0.1, m = 0.5 * (pr.z_lo() + pr.z_hi()),
                 t = pr.z_hi() - 0.2;
    const Vec2 a = vertical_quadrature(pr, s, m), b = vertical_quadrature(pr, m, t),
               w = vertical_quadrature(pr, s, t);
    CHECK(a.x + b.x == doctest::Approx(w.x).epsilon(1e-12));
    CHECK(a.y + b.y == doctest::Approx(w.y).epsilon(1e-12));

    // nothing accumulates beyond the span
    const Vec2 low = vertical_quadrature(pr, pr.z_lo() - 5.0, t);
    const Vec2 clip = vertical_quadrature(pr, pr.z_lo(), t);
    CHECK(low.x == clip.x);
    CHECK(low.y == clip.y);

    // a pair collapsed to one height is trivially inside the bound
    const Vec2 zero = vertical_quadrature(pr, m, m);
    CHECK(zero.x == 0.0);
    CHECK(zero.y == 0.0);

    // the graph field has no tails to saturate
    const ZProfile gp = graph_field().profile(0.2, 0.0);
    CHECK_FALSE(gp.saturated_tails);
    CHECK_THROWS_AS((void)vertical_quadrature(gp, gp.z_lo() - 1.0, gp.z_hi()),
                    const Error&);
}

TEST_CASE("axis equality pins the length bound without failing it") {
    VerifyGrid grid = quick_grid();
    grid.n_eta = 9;  // odd: the axis joins the grid and the bound is tight there
    const VerificationReport rep = verify_field(jump_field(), grid);
    CHECK(rep.length.pass);
    CHECK(rep.length.min >= -1e-9);
    CHECK(rep.length.min <= 1e-8);
}

TEST_CASE("block caps match their closed-form second derivative") {
    for (Variant variant : {Variant::Dirichlet, Variant::Graph}) {
        const Candidate c = sloped_cand();
        const BuildParams p =
            select_parameters(c, variant, variant == Variant::Graph ? 0.005 : 0.04);
        const double h = 1e-3;
        const double fd =
            (4.0 * (block_caps(p, h / 2) - 2.0 * block_caps(p, 0.0) +
                    block_caps(p, -h / 2)) /
                 (0.25 * h * h) -
             (block_caps(p, h) - 2.0 * block_caps(p, 0.0) + block_caps(p, -h)) /
                 (h * h)) /
            3.0;
        CHECK(fd == doctest::Approx(block_caps_d2(p)).epsilon(1e-4));
        if (variant == Variant::Dirichlet) {
            CHECK(block_caps_d2(p) ==
                  doctest::Approx(4.0 * std::pow(p.M, 3) / p.eps).epsilon(1e-12));
        } else {
            const double s = 2.0 * p.eps * p.M + p.Mp;
            CHECK(block_caps_d2(p) ==
                  doctest::Approx(p.Mp * s * s / (2.0 * p.eps)).epsilon(1e-12));
        }
    }
}

TEST_CASE("derivative identities on the straight chart") {
    const IdentityReport rep = derivative_identities(jump_field());
    CHECK(rep.pass);
    CHECK(rep.worst_metric_d1 <= 1e-10);
    CHECK(rep.worst_metric_d2 <= 1e-8);
    CHECK(rep.worst_rho_d1 <= 1e-5);
    CHECK(rep.worst_gap_d2 <= 1e-4);
    REQUIRE(!rep.gap_d2.empty());
    const double pi = 3.14159265358979323846;
    CHECK(rep.gap_d2.front().target == doctest::Approx(-pi * pi / 16.0));
}

TEST_CASE("derivative identities on the balanced circle") {
    const IdentityReport rep = derivative_identities(circle_field(), 7, 1e-3);
    CHECK(rep.pass);
    CHECK(rep.worst_metric_d1 <= 1e-6);
    CHECK(rep.worst_rho_d1 <= 1e-4);
    CHECK(rep.worst_gap_d2 <= 1e-3);
    REQUIRE(!rep.rho_d1.empty());
    CHECK(rep.rho_d1.front().target == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("margin dump lists every base point") {
    const VerificationReport rep = verify_field(jump_field(), {5, 4, 16});
    std::ostringstream out;
    write_margin_csv(rep, out);
    const std::string text = out.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 21);  // header + 5*4
    CHECK(text.rfind("xi,eta,cone,length\n", 0) == 0);
}
