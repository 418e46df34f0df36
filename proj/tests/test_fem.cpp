#include "calibra/fem.hpp"

#include <algorithm>
#include <cmath>

#include "calibra/curve_geometry.hpp"
#include "doctest.h"

using namespace calibra;

namespace {

CurveChart straight_chart() {
    return build_chart(recentered(make_line({0.0, 0.0}, 0.0, 1.0)), 0.15);
}

int count_fixed(const TriMesh& m) {
    int n = 0;
    for (auto f : m.fixed) n += f != 0;
    return n;
}

}  // namespace

TEST_CASE("tensor mesh marks the trace window and clamps the rest") {
    const TriMesh m =
        tensor_mesh(linspace(0.0, 2.0, 5), linspace(0.0, 1.0, 3), 0.5, 1.5);
    CHECK(m.node.size() == 15);
    CHECK(m.tri.size() == 16);
    CHECK(m.trace.size() == 2);
    CHECK(count_fixed(m) == 11);
    for (const auto& e : m.trace) {
        CHECK(m.node[e[0]].y == 0.0);
        CHECK(m.node[e[0]].x >= 0.5);
        CHECK(m.node[e[1]].x <= 1.5);
    }
    CHECK(m.h == doctest::Approx(std::hypot(0.5, 0.5)));

    // empty window: no trace edges, whole bottom clamped
    const TriMesh closed =
        tensor_mesh(linspace(0.0, 2.0, 5), linspace(0.0, 1.0, 3), 1.0, 0.5);
    CHECK(closed.trace.empty());
    CHECK(count_fixed(closed) == 12);
}

TEST_CASE("midpoint refinement splits triangles and trace edges in place") {
    const TriMesh coarse = rect_mesh(1.0, 1.0, 4, 4);
    CHECK(coarse.tri.size() == 32);
    CHECK(coarse.trace.size() == 4);
    const TriMesh fine = refined(coarse);
    CHECK(fine.node.size() == 81);
    CHECK(fine.tri.size() == 128);
    CHECK(fine.trace.size() == 8);
    CHECK(fine.h == doctest::Approx(0.5 * coarse.h));
    // the clamp travels to boundary midpoints only where both ends carry it:
    // perimeter of the split lattice minus the open bottom window
    CHECK(count_fixed(coarse) == 13);
    CHECK(count_fixed(fine) == 25);
    for (const auto& e : fine.trace) {
        CHECK(fine.node[e[0]].y == 0.0);
        CHECK(fine.node[e[1]].y == 0.0);
    }
}

TEST_CASE("assembly is identical for any thread split") {
    const TriMesh m = rect_mesh(2.0, 1.0, 24, 12);
    const FemSystem one = assemble(m, 1);
    const FemSystem three = assemble(m, 3);
    CHECK(one.stiffness.nonZeros() == three.stiffness.nonZeros());
    CHECK((one.stiffness - three.stiffness).norm() == 0.0);
    CHECK((one.trace_mass - three.trace_mass).norm() == 0.0);
    const FemSystem serial = assemble(m, Assembly::Serial);
    CHECK((one.stiffness - serial.stiffness).norm() == 0.0);
}

TEST_CASE("matrix-free energy matches the assembled quadratic form") {
    const TriMesh m = rect_mesh(1.0, 1.0, 12, 12);
    const int n = int(m.node.size());
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = std::sin(3.0 * i) + 0.2;
    const FemSystem sys = assemble(m);
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w[i] = v[i];
    const double quad = w.dot(sys.stiffness * w);
    CHECK(element_energy(m, v) == doctest::Approx(quad).epsilon(1e-12));

    // trace mass against its matrix too
    const double tm = w.dot(sys.trace_mass * w);
    CHECK(trace_mass_norm(m, v) == doctest::Approx(tm).epsilon(1e-12));
}

TEST_CASE("strip meshes follow the chart and respect its limits") {
    const CurveChart chart = straight_chart();
    const TriMesh up = strip_mesh(chart, 1, 0.1, 10, 4);
    CHECK(up.node.size() == 55);
    CHECK(up.trace.size() == 10);
    double ymin = 1.0, ymax = -1.0;
    for (const auto& p : up.node) {
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    CHECK(ymin >= -1e-14);
    CHECK(ymax == doctest::Approx(0.1));

    const TriMesh down = strip_mesh(chart, -1, 0.1, 10, 4);
    double dmax = -1.0;
    for (const auto& p : down.node) dmax = std::max(dmax, p.y);
    CHECK(dmax <= 1e-14);

    CHECK_THROWS_AS(strip_mesh(chart, 1, 0.0, 10, 4), const Error&);
    CHECK_THROWS_AS(strip_mesh(chart, 1, 0.2, 10, 4), const Error&);
    CHECK_THROWS_AS(strip_mesh(chart, 1, 0.1, 10, 4, chart.overhang()),
                    const Error&);
}

TEST_CASE("harmonic fill reproduces linear fields and honors the window") {
    // window outside the span, so every boundary node is pinned
    const TriMesh full =
        tensor_mesh(linspace(0.0, 1.0, 7), linspace(0.0, 1.0, 5), 2.0, 1.0);
    CHECK(full.trace.empty());
    std::vector<double> g(full.node.size());
    for (size_t i = 0; i < g.size(); ++i)
        g[i] = 2.0 * full.node[i].x + 3.0 * full.node[i].y - 1.0;
    const std::vector<double> u = harmonic_fill(full, g);
    for (size_t i = 0; i < g.size(); ++i)
        CHECK(u[i] == doctest::Approx(g[i]).epsilon(1e-12));

    // u = x has zero flux through the bottom, so the free window keeps it
    const TriMesh open =
        tensor_mesh(linspace(0.0, 1.0, 9), linspace(0.0, 1.0, 5), 0.25, 0.75);
    std::vector<double> gx(open.node.size(), 0.0);
    for (size_t i = 0; i < gx.size(); ++i)
        if (open.fixed[i]) gx[i] = open.node[i].x;
    const std::vector<double> ux = harmonic_fill(open, gx);
    for (size_t i = 0; i < ux.size(); ++i)
        CHECK(ux[i] == doctest::Approx(open.node[i].x).epsilon(1e-12));

    CHECK_THROWS_AS(harmonic_fill(open, std::vector<double>(3, 0.0)),
                    const Error&);
}

TEST_CASE("collapsed elements are refused") {
    TriMesh m;
    m.node = {{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}};
    m.tri = {{0, 1, 2}};
    m.fixed = {1, 0, 1};
    m.h = 2.0;
    CHECK_THROWS_AS(assemble(m, Assembly::Serial), const Error&);
    CHECK_THROWS_AS(assemble(m, Assembly::Parallel), const Error&);
}
