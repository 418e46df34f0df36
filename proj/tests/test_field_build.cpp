#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "calibra/calibration_builder.hpp"
#include "doctest.h"

using namespace calibra;

namespace {

CurveChart straight_chart(double l) {
    return build_chart(recentered(make_line({0, 0}, 0.0, 2.0 * l)), 0.15);
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
    // clockwise arc, curvature +1/2; slopes 0 and -1/sqrt(2) satisfy the
    // squared-slope jump condition exactly
    const auto chart =
        build_chart(recentered(make_circle_arc(2.0, 0.3, 2.0, true)), 0.15);
    return make_candidate(chart, AnalyticFn::constant(1.0),
                          AnalyticFn::poly({4.0, -1.0 / std::sqrt(2.0)}));
}

const CalibrationField& jump_field() {
    static const CalibrationField f = assemble_field(jump_cand(), Variant::Dirichlet);
    return f;
}

const CalibrationField& sloped_field() {
    static const CalibrationField f = assemble_field(sloped_cand(), Variant::Dirichlet);
    return f;
}

Vec2 jump_integral(const CalibrationField& f, const CalibrationField::Column& c) {
    return vertical_quadrature(f.profile_of(c), c.u[0], c.u[1]);
}

// block caps of the vertical component, closed form (Dirichlet layout)
double stubs_at(const BuildParams& p, double eta) {
    const double e2M = p.M * p.eps * p.eps;
    return e2M / (p.eps + p.M * eta) + e2M / (p.eps - p.M * eta);
}

std::array<Vec2, 5> probe(const CalibrationField& f, double xi, double h) {
    const double etas[5] = {-h, -0.5 * h, 0.0, 0.5 * h, h};
    std::array<Vec2, 5> I;
    double hint = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < 5; ++i) {
        const auto col = f.column(xi, etas[i], hint);
        hint = col.foot;
        I[i] = jump_integral(f, col);
    }
    return I;
}

double rich1(const std::array<double, 5>& v, double h) {
    const double full = (v[4] - v[0]) / (2.0 * h);
    const double half = (v[3] - v[1]) / h;
    return (4.0 * half - full) / 3.0;
}

double rich2(const std::array<double, 5>& v, double h) {
    const double full = (v[4] - 2.0 * v[2] + v[0]) / (h * h);
    const double half = (v[3] - 2.0 * v[2] + v[1]) / (0.25 * h * h);
    return (4.0 * half - full) / 3.0;
}

Vec3 seg_eval(const ZSegment& s, double z) {
    return {s.flat.x + s.slope.x * z, s.flat.y + s.slope.y * z,
            s.z0 + z * (s.z1 + z * s.z2)};
}

}  // namespace

TEST_CASE("pure jump assembles at the first thickness") {
    const auto& f = jump_field();
    const auto& p = f.params();
    CHECK(p.eps == doctest::Approx(0.2));
    CHECK(p.M == doctest::Approx(1.0));
    CHECK(p.lambda == doctest::Approx(10.0));
    CHECK(p.halfwidth == doctest::Approx(0.01));
    for (double xi : linspace(-1.0, 1.0, 9)) {
        const auto col = f.column(xi, 0.0);
        CHECK(col.band[0] == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(col.band[1] == doctest::Approx(2.0).epsilon(1e-12));
        const Vec2 I = jump_integral(f, col);
        CHECK(std::abs(I.x) <= 1e-9);
        CHECK(std::abs(I.y - 1.0) <= 1e-9);
        const auto levels = f.interfaces(col);
        for (size_t k = 1; k < levels.size(); ++k) CHECK(levels[k] > levels[k - 1]);
    }
    CHECK(f.profile(0.0, 0.0).saturated_tails);
}

TEST_CASE("transport frame: trace identities, footpoints, divergence") {
    const auto& f = sloped_field();
    const auto& p = f.params();
    const auto& cand = f.candidate();
    const double e1 = p.slab_share();
    CHECK(f.frame().n.real_at(0.0) == doctest::Approx(1.0).epsilon(1e-10));
    for (double xi : {-0.7, 0.0, 0.4}) {
        const auto col = f.column(xi, 0.0);
        CHECK(col.foot == doctest::Approx(xi).epsilon(1e-10));
        const double A = cand.slope[0].real_at(xi) + cand.slope[1].real_at(xi);
        CHECK(col.sw.x == doctest::Approx(-2.0 * p.eps * A).epsilon(1e-8));
        CHECK(col.sw.y == doctest::Approx(e1).epsilon(1e-10));
    }
    // sigma rides along the characteristics, so the slab drift stays
    // divergence-free; honest finite differences of sigma grad w
    const double d = 1e-4;
    for (auto [xi, eta] : {std::pair{0.2, 0.3 * p.halfwidth},
                           std::pair{-0.4, -0.5 * p.halfwidth}}) {
        const double hint = f.column(xi, eta).foot;
        const auto xp = f.column(xi + d, eta, hint), xm = f.column(xi - d, eta, hint);
        const auto yp = f.column(xi, eta + d, hint), ym = f.column(xi, eta - d, hint);
        const double div =
            (xp.sw.x - xm.sw.x) / (2.0 * d) + (yp.sw.y - ym.sw.y) / (2.0 * d);
        CHECK(std::abs(div) <= 1e-6);
    }
}

TEST_CASE("band separation carries the squared-slope mismatch") {
    const auto& f = sloped_field();
    const auto& p = f.params();
    const auto& cand = f.candidate();
    const double h = 0.2 * p.halfwidth;
    for (double xi : {-0.5, 0.3}) {
        std::array<double, 5> gap{};
        const double etas[5] = {-h, -0.5 * h, 0.0, 0.5 * h, h};
        double hint = std::numeric_limits<double>::quiet_NaN();
        for (int i = 0; i < 5; ++i) {
            const auto col = f.column(xi, etas[i], hint);
            hint = col.foot;
            gap[i] = col.band[1] - col.band[0];
        }
        const double s1 = cand.slope[0].real_at(xi), s2 = cand.slope[1].real_at(xi);
        const double expected = s2 * s2 - s1 * s1;
        CHECK(p.lambda * p.slab_share() * rich1(gap, h) ==
              doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("axis jump identities hold exactly at finite thickness") {
    // unbalanced traces and an injected oscillatory weight: the derivative
    // identities of the jump integral must close for any analytic n > 0
    const Candidate cand = sloped_cand();
    const auto tau_fn = [](double x) { return 0.8 * std::cos(x); };
    const AnalyticFn n = AnalyticFn::closed(
        {[](cplx z) { return std::exp(0.8 * std::sin(z)); },
         [](cplx z) { return 0.8 * std::cos(z) * std::exp(0.8 * std::sin(z)); },
         [](cplx z) {
             const cplx t = 0.8 * std::cos(z);
             return (-0.8 * std::sin(z) + t * t) * std::exp(0.8 * std::sin(z));
         },
         [](cplx z) {
             const cplx t = 0.8 * std::cos(z), tp = -0.8 * std::sin(z);
             return (-0.8 * std::cos(z) + 3.0 * t * tp + t * t * t) *
                    std::exp(0.8 * std::sin(z));
         }},
        10.0);

    BuildParams p;
    p.variant = Variant::Dirichlet;
    p.eps = 0.05;
    p.M = 0.8;
    p.lambda = 10.0;
    p.mu = 23.3;
    p.halfwidth = 0.008;
    p.n = n;
    const CalibrationField f(cand, p, build_w_sigma(cand, n, p));

    const double e1 = p.slab_share(), e2 = 2.0 * p.eps / e1;
    const double h = 3e-3;
    for (double xi : {-0.5, 0.1, 0.6}) {
        const auto I = probe(f, xi, h);
        CHECK(std::abs(I[2].x) <= 1e-9);
        CHECK(std::abs(I[2].y - 1.0) <= 1e-9);

        const double s1 = cand.slope[0].real_at(xi), s2 = cand.slope[1].real_at(xi);
        const double s1p = cand.slope[0].d1(cplx(xi, 0.0)).real();
        const double A = s1 + s2, Ap = s1p;
        const double E = s2 * s2 - s1 * s1, Ep = -2.0 * s1 * s1p;
        const double t = tau_fn(xi), tp = -0.8 * std::sin(xi);
        const double a = e1 * (1.0 + e2 * e2 * A * A);
        const double P = a * t - e2 * A * E;

        const std::array<double, 5> Ix{I[0].x, I[1].x, I[2].x, I[3].x, I[4].x};
        CHECK(std::abs(rich1(Ix, h) - P) <= 1e-6);

        std::array<double, 5> smooth{};
        const double etas[5] = {-h, -0.5 * h, 0.0, 0.5 * h, h};
        for (int i = 0; i < 5; ++i) smooth[i] = I[i].y - stubs_at(p, etas[i]);
        CHECK(std::abs(rich1(smooth, h) - E) <= 1e-6);

        // d2/deta2 of the y-component: the block caps blow up like 4 M^3/eps
        // and the band growth cancels them, leaving the closure terms
        const double caps = 4.0 * std::pow(p.M, 3) / p.eps;
        const double expected2 =
            e2 * (Ap * E + A * Ep) - a * tp - 2.0 * e1 * e2 * e2 * A * Ap * t - caps;
        CHECK(std::abs(rich2(smooth, h) - expected2) <= 5e-4);
    }
}

TEST_CASE("balanced circle: curvature comes out of the jump derivatives") {
    const Candidate cand = circle_cand();
    const CalibrationField f = assemble_field(cand, Variant::Dirichlet);
    const auto& p = f.params();
    const double kappa = 0.5;
    const double e1 = p.slab_share(), e2 = 2.0 * p.eps / e1;
    const double A = -1.0 / std::sqrt(2.0);
    const double h = 0.25 * p.halfwidth;
    for (double xi : {-0.4, 0.25}) {
        const auto I = probe(f, xi, h);
        std::array<double, 5> rho{}, sm{};
        const double etas[5] = {-h, -0.5 * h, 0.0, 0.5 * h, h};
        for (int i = 0; i < 5; ++i) {
            rho[i] = std::hypot(I[i].x, I[i].y);
            sm[i] = rho[i] - stubs_at(p, etas[i]);
        }
        // first derivative of the jump length equals the curvature exactly
        CHECK(std::abs(rich1(rho, h) - kappa) <= 1e-6);

        // second derivative sits on the shifted-metric target because the
        // axis weight solved the thickness-exact closure
        const double caps = 4.0 * std::pow(p.M, 3) / p.eps;
        const double rho2 = rich2(sm, h) + caps;
        CHECK(std::abs(rho2 - kappa * kappa + kPi * kPi / 16.0) <= 1e-4);

        const double t = f.frame().n.d1(cplx(xi, 0.0)).real() / f.frame().n.real_at(xi);
        const double a = e1 * (1.0 + e2 * e2 * A * A);
        const std::array<double, 5> Ix{I[0].x, I[1].x, I[2].x, I[3].x, I[4].x};
        CHECK(std::abs(rich1(Ix, h) - (a * t - e2 * A * kappa)) <= 1e-6);
    }
}

TEST_CASE("interface normal traces are continuous") {
    const auto& f = sloped_field();
    const auto& p = f.params();
    for (auto [xi, eta] : {std::pair{0.3, 0.4 * p.halfwidth},
                           std::pair{-0.6, -0.7 * p.halfwidth}}) {
        const auto col = f.column(xi, eta);
        const auto pr = f.profile_of(col);
        const auto levels = f.interfaces(col);
        REQUIRE(pr.segs.size() == 7);

        // interface slopes: graphs of u_i for the block boundaries, finite
        // differences of the transported bands for the slab
        const double d = 1e-4;
        const auto xp = f.column(xi + d, eta, col.foot), xm = f.column(xi - d, eta, col.foot);
        const auto yp = f.column(xi, eta + d, col.foot), ym = f.column(xi, eta - d, col.foot);
        Vec2 gband[2];
        for (int i = 0; i < 2; ++i)
            gband[i] = {(xp.band[i] - xm.band[i]) / (2.0 * d),
                        (yp.band[i] - ym.band[i]) / (2.0 * d)};
        const Vec2 grads[6] = {col.du[0], col.du[0], gband[0],
                               gband[1], col.du[1], col.du[1]};
        const double tol[6] = {1e-9, 1e-9, 2e-5, 2e-5, 1e-9, 1e-9};

        for (int k = 0; k < 6; ++k) {
            const double S = levels[k];
            CHECK(pr.segs[k].hi == doctest::Approx(S).epsilon(1e-14));
            const Vec3 below = seg_eval(pr.segs[k], S);
            const Vec3 above = seg_eval(pr.segs[k + 1], S);
            const double mismatch = (above.z - below.z) -
                                    (grads[k].x * (above.x - below.x) +
                                     grads[k].y * (above.y - below.y));
            CHECK(std::abs(mismatch) <= tol[k]);
        }
    }
}

TEST_CASE("graph variant assembles and keeps its seams tight") {
    const auto cand = make_candidate(straight_chart(1.0), AnalyticFn::poly({1.0, 0.1}),
                                     AnalyticFn::poly({3.0, -0.05}));
    const CalibrationField f = assemble_field(cand, Variant::Graph);
    const auto& p = f.params();
    CHECK(p.Mp > 0.0);
    for (double xi : linspace(-1.0, 1.0, 7)) {
        const auto col = f.column(xi, 0.0);
        const Vec2 I = jump_integral(f, col);
        CHECK(std::abs(I.x) <= 1e-8);
        CHECK(std::abs(I.y - 1.0) <= 1e-8);
    }
    const auto col = f.column(0.2, 0.3 * p.halfwidth);
    const auto pr = f.profile_of(col);
    CHECK(!pr.saturated_tails);
    CHECK(pr.z_lo() == doctest::Approx(col.u[0] - p.eps * col.v[0]));
    CHECK(pr.z_hi() == doctest::Approx(col.u[1] + p.eps * col.v[1]));

    // inner/outer block seam: both sides share the pivot gradient exactly
    const auto levels = f.interfaces(col);
    const Vec3 b0 = seg_eval(pr.segs[0], levels[0]);
    const Vec3 a0 = seg_eval(pr.segs[1], levels[0]);
    CHECK(std::abs(a0.x - b0.x) <= 1e-12);
    CHECK(std::abs(a0.y - b0.y) <= 1e-12);
    CHECK(std::abs(a0.z - b0.z) <= 1e-12);

    // outer block against the vertical pad: continuity of the normal trace
    // is what fixes the pad level, with the crossed width factors
    const Vec3 b1 = seg_eval(pr.segs[1], levels[1]);
    const Vec3 a1 = seg_eval(pr.segs[2], levels[1]);
    const double mism = (a1.z - b1.z) - (col.du[0].x * (a1.x - b1.x) +
                                         col.du[0].y * (a1.y - b1.y));
    CHECK(std::abs(mism) <= 1e-9);
}

TEST_CASE("assembly shrinks the blocks until the gate accepts") {
    int calls = 0;
    AssembleOptions opts;
    opts.gate = [&calls](const CalibrationField& f) {
        ++calls;
        return f.params().eps < 0.15;
    };
    const auto f = assemble_field(jump_cand(), Variant::Dirichlet, opts);
    CHECK(f.params().eps == doctest::Approx(0.1));
    CHECK(calls >= 2);
}

TEST_CASE("assembly failure names the blocking condition") {
    AssembleOptions opts;
    opts.eps_floor = 0.11;
    opts.gate = [](const CalibrationField&) { return false; };
    try {
        assemble_field(jump_cand(), Variant::Dirichlet, opts);
        FAIL("assembly should not succeed");
    } catch (const Error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("worst condition") != std::string::npos);
        CHECK(msg.find("external gate") != std::string::npos);
    }
}
