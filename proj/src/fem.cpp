#include "calibra/fem.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <utility>

#include <Eigen/SparseCholesky>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "calibra/parallel.hpp"

namespace calibra {
namespace {

double longest_edge(const TriMesh& m) {
    double h = 0.0;
    for (const auto& t : m.tri)
        for (int e = 0; e < 3; ++e) {
            const Vec2 d = m.node[t[(e + 1) % 3]] - m.node[t[e]];
            h = std::max(h, std::hypot(d.x, d.y));
        }
    return h;
}

// nodes laid out row-major, bottom row first
TriMesh lattice(const std::vector<Vec2>& nodes, int nx, int ny, bool flip) {
    TriMesh m;
    m.node = nodes;
    m.fixed.assign(nodes.size(), 0);
    m.tri.reserve(2 * size_t(nx) * ny);
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            std::array<int, 3> a{id(i, j), id(i + 1, j), id(i + 1, j + 1)};
            std::array<int, 3> b{id(i, j), id(i + 1, j + 1), id(i, j + 1)};
            if (flip) {
                std::swap(a[1], a[2]);
                std::swap(b[1], b[2]);
            }
            m.tri.push_back(a);
            m.tri.push_back(b);
        }
    }
    return m;
}

}  // namespace

TriMesh tensor_mesh(const std::vector<double>& xs, const std::vector<double>& ys,
                    double trace_lo, double trace_hi) {
    if (xs.size() < 2 || ys.size() < 2) throw Error("tensor mesh needs a 2d grid");
    const int nx = int(xs.size()) - 1, ny = int(ys.size()) - 1;
    std::vector<Vec2> nodes;
    nodes.reserve(xs.size() * ys.size());
    for (double y : ys)
        for (double x : xs) nodes.push_back({x, y});
    TriMesh m = lattice(nodes, nx, ny, false);

    const double tol = 1e-9 * (xs.back() - xs.front() + ys.back() - ys.front());
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int i = 0; i <= nx; ++i) {
        m.fixed[id(i, ny)] = 1;
        const double x = xs[i];
        const bool inside = x > trace_lo + tol && x < trace_hi - tol;
        if (!inside) m.fixed[id(i, 0)] = 1;
        if (i < nx && xs[i] >= trace_lo - tol && xs[i + 1] <= trace_hi + tol)
            m.trace.push_back({id(i, 0), id(i + 1, 0)});
    }
    for (int j = 0; j <= ny; ++j) {
        m.fixed[id(0, j)] = 1;
        m.fixed[id(nx, j)] = 1;
    }
    m.h = longest_edge(m);
    return m;
}

TriMesh rect_mesh(double a, double b, int nx, int ny) {
    std::vector<double> xs(nx + 1), ys(ny + 1);
    for (int i = 0; i <= nx; ++i) xs[i] = a * i / nx;
    for (int j = 0; j <= ny; ++j) ys[j] = b * j / ny;
    return tensor_mesh(xs, ys, 0.0, a);
}

TriMesh strip_mesh(const CurveChart& chart, int side, double height, int nx,
                   int ny, double pad) {
    if (height <= 0.0) throw Error("strip height must be positive");
    if (height > chart.halfwidth() * (1.0 + 1e-12))
        throw Error("strip height exceeds the collar halfwidth");
    if (pad < 0.0 || pad > 0.95 * chart.overhang())
        throw Error("strip pad leaves the chart's continuation margin");
    const double lo = chart.xi_lo() - pad, hi = chart.xi_hi() + pad;
    const double s = side < 0 ? -1.0 : 1.0;
    std::vector<Vec2> nodes;
    nodes.reserve(size_t(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            nodes.push_back(
                chart.map(lo + (hi - lo) * i / nx, s * height * j / ny));
    TriMesh m = lattice(nodes, nx, ny, side < 0);

    const double tol = 1e-9 * (hi - lo);
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int i = 0; i <= nx; ++i) {
        m.fixed[id(i, ny)] = 1;
        const double xi = lo + (hi - lo) * i / nx;
        const bool inside = xi > chart.xi_lo() + tol && xi < chart.xi_hi() - tol;
        if (!inside) m.fixed[id(i, 0)] = 1;
        const double xn = lo + (hi - lo) * (i + 1) / nx;
        if (i < nx && xi >= chart.xi_lo() - tol && xn <= chart.xi_hi() + tol)
            m.trace.push_back({id(i, 0), id(i + 1, 0)});
    }
    for (int j = 0; j <= ny; ++j) {
        m.fixed[id(0, j)] = 1;
        m.fixed[id(nx, j)] = 1;
    }
    m.h = longest_edge(m);
    return m;
}

TriMesh refined(const TriMesh& mesh) {
    TriMesh out;
    out.node = mesh.node;
    out.fixed = mesh.fixed;

    std::map<std::pair<int, int>, int> mid;       // edge -> midpoint id
    std::map<std::pair<int, int>, int> edge_use;  // edge -> triangle count
    auto key = [](int a, int b) {
        return std::pair<int, int>(std::min(a, b), std::max(a, b));
    };
    for (const auto& t : mesh.tri)
        for (int e = 0; e < 3; ++e) ++edge_use[key(t[e], t[(e + 1) % 3])];

    auto midpoint = [&](int a, int b) {
        const auto k = key(a, b);
        auto it = mid.find(k);
        if (it != mid.end()) return it->second;
        const int id = int(out.node.size());
        out.node.push_back((mesh.node[a] + mesh.node[b]) * 0.5);
        const bool boundary = edge_use[k] == 1;
        out.fixed.push_back(boundary && mesh.fixed[a] && mesh.fixed[b] ? 1 : 0);
        mid.emplace(k, id);
        return id;
    };

    out.tri.reserve(4 * mesh.tri.size());
    for (const auto& t : mesh.tri) {
        const int m01 = midpoint(t[0], t[1]);
        const int m12 = midpoint(t[1], t[2]);
        const int m20 = midpoint(t[2], t[0]);
        out.tri.push_back({t[0], m01, m20});
        out.tri.push_back({t[1], m12, m01});
        out.tri.push_back({t[2], m20, m12});
        out.tri.push_back({m01, m12, m20});
    }
    out.trace.reserve(2 * mesh.trace.size());
    for (const auto& e : mesh.trace) {
        const int m = midpoint(e[0], e[1]);
        out.trace.push_back({e[0], m});
        out.trace.push_back({m, e[1]});
    }
    out.h = longest_edge(out);
    return out;
}

namespace {

struct ElementKernel {
    // gradients of the three hat functions and the area
    std::array<Vec2, 3> g;
    double area;
};

ElementKernel element_kernel(const TriMesh& mesh, const std::array<int, 3>& t) {
    const Vec2 p0 = mesh.node[t[0]], p1 = mesh.node[t[1]], p2 = mesh.node[t[2]];
    const double det =
        (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    if (!(std::abs(det) > 1e-14 * (1.0 + mesh.h * mesh.h)))
        throw Error("degenerate element in mesh");
    ElementKernel k;
    k.area = 0.5 * std::abs(det);
    k.g[0] = {(p1.y - p2.y) / det, (p2.x - p1.x) / det};
    k.g[1] = {(p2.y - p0.y) / det, (p0.x - p2.x) / det};
    k.g[2] = {(p0.y - p1.y) / det, (p1.x - p0.x) / det};
    return k;
}

}  // namespace

FemSystem assemble(const TriMesh& mesh, Assembly mode) {
    return assemble(mesh, mode == Assembly::Parallel ? thread_count() : 1);
}

FemSystem assemble(const TriMesh& mesh, int threads) {
    const int n = int(mesh.node.size());
    const int ne = int(mesh.tri.size());
    int nt = std::max(1, threads);
#ifndef _OPENMP
    nt = 1;
#endif

    std::vector<std::vector<Eigen::Triplet<double>>> buf(nt);
    std::atomic<bool> degenerate{false};
#pragma omp parallel num_threads(nt) if (nt > 1)
    {
#ifdef _OPENMP
        const int tid = omp_get_thread_num();
#else
        const int tid = 0;
#endif
        auto& local = buf[tid];
        const int lo = int(long(ne) * tid / nt), hi = int(long(ne) * (tid + 1) / nt);
        local.reserve(9 * size_t(hi - lo));
        // exceptions cannot leave the parallel block, the flag carries them out
        try {
            for (int e = lo; e < hi; ++e) {
                const auto& t = mesh.tri[e];
                const ElementKernel k = element_kernel(mesh, t);
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        local.emplace_back(
                            t[a], t[b],
                            k.area * (k.g[a].x * k.g[b].x + k.g[a].y * k.g[b].y));
            }
        } catch (const Error&) {
            degenerate.store(true);
        }
    }
    if (degenerate.load()) throw Error("degenerate element in mesh");
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * size_t(ne));
    for (auto& local : buf) trip.insert(trip.end(), local.begin(), local.end());

    FemSystem sys;
    sys.stiffness.resize(n, n);
    sys.stiffness.setFromTriplets(trip.begin(), trip.end());

    std::vector<Eigen::Triplet<double>> mt;
    mt.reserve(4 * mesh.trace.size());
    for (const auto& e : mesh.trace) {
        const Vec2 d = mesh.node[e[1]] - mesh.node[e[0]];
        const double len = std::hypot(d.x, d.y);
        mt.emplace_back(e[0], e[0], len / 3.0);
        mt.emplace_back(e[1], e[1], len / 3.0);
        mt.emplace_back(e[0], e[1], len / 6.0);
        mt.emplace_back(e[1], e[0], len / 6.0);
    }
    sys.trace_mass.resize(n, n);
    sys.trace_mass.setFromTriplets(mt.begin(), mt.end());
    return sys;
}

Eigen::SparseMatrix<double> restricted(const Eigen::SparseMatrix<double>& m,
                                       const std::vector<int>& free_id,
                                       int n_free) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(m.nonZeros());
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
            const int r = free_id[it.row()], c = free_id[it.col()];
            if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
        }
    Eigen::SparseMatrix<double> out(n_free, n_free);
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

std::vector<double> harmonic_fill(const TriMesh& mesh,
                                  const std::vector<double>& boundary,
                                  Assembly mode) {
    const int n = static_cast<int>(mesh.node.size());
    if (static_cast<int>(boundary.size()) != n)
        throw Error("boundary data does not match the mesh");
    std::vector<int> free_id(n, -1);
    int nf = 0;
    for (int i = 0; i < n; ++i)
        if (!mesh.fixed[i]) free_id[i] = nf++;
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i)
        if (mesh.fixed[i]) out[i] = boundary[i];
    if (nf == 0) return out;

    const FemSystem sys = assemble(mesh, mode);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
        if (mesh.fixed[i]) g[i] = boundary[i];
    const Eigen::VectorXd carried = sys.stiffness * g;
    Eigen::VectorXd rhs(nf);
    for (int i = 0; i < n; ++i)
        if (free_id[i] >= 0) rhs[free_id[i]] = -carried[i];

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(restricted(sys.stiffness, free_id, nf));
    if (solver.info() != Eigen::Success)
        throw Error("stiffness factorization failed");
    const Eigen::VectorXd u = solver.solve(rhs);
    for (int i = 0; i < n; ++i)
        if (free_id[i] >= 0) out[i] = u[free_id[i]];
    return out;
}

double element_energy(const TriMesh& mesh, const std::vector<double>& v) {
    double acc = 0.0;
    for (const auto& t : mesh.tri) {
        const ElementKernel k = element_kernel(mesh, t);
        Vec2 grad{0.0, 0.0};
        for (int a = 0; a < 3; ++a) grad = grad + k.g[a] * v[t[a]];
        acc += k.area * (grad.x * grad.x + grad.y * grad.y);
    }
    return acc;
}

double trace_mass_norm(const TriMesh& mesh, const std::vector<double>& v) {
    double acc = 0.0;
    for (const auto& e : mesh.trace) {
        const Vec2 d = mesh.node[e[1]] - mesh.node[e[0]];
        const double len = std::hypot(d.x, d.y);
        const double a = v[e[0]], b = v[e[1]];
        acc += len * (a * a + a * b + b * b) / 3.0;
    }
    return acc;
}

}  // namespace calibra
