#include "calibra/steklov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include <Eigen/SparseCholesky>

namespace calibra {
namespace {

struct ModeSolve {
    double K = 0.0;
    std::vector<double> v;
    int iterations = 0;
    bool converged = false;
    double eigen_residual = 0.0;
};

ModeSolve smallest_trace_mode(const TriMesh& mesh, Assembly mode) {
    const int n = int(mesh.node.size());
    if (mesh.trace.empty()) throw Error("trace is empty or fully clamped");
    bool any_fixed = false;
    std::vector<int> free_id(n, -1);
    int nf = 0;
    for (int i = 0; i < n; ++i) {
        if (mesh.fixed[i])
            any_fixed = true;
        else
            free_id[i] = nf++;
    }
    if (nf == 0) throw Error("mesh is fully clamped");
    if (!any_fixed) throw Error("trace eigenvalue needs a clamped boundary part");
    bool live = false;
    for (const auto& e : mesh.trace)
        if (free_id[e[0]] >= 0 || free_id[e[1]] >= 0) {
            live = true;
            break;
        }
    if (!live) throw Error("trace is empty or fully clamped");

    const FemSystem sys = assemble(mesh, mode);
    const Eigen::SparseMatrix<double> A = restricted(sys.stiffness, free_id, nf);
    const Eigen::SparseMatrix<double> B = restricted(sys.trace_mass, free_id, nf);

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success)
        throw Error("stiffness factorization failed");

    Eigen::VectorXd x = Eigen::VectorXd::Ones(nf);
    const double x0 = x.dot(B * x);
    if (!(x0 > 0.0)) throw Error("trace is empty or fully clamped");
    x /= std::sqrt(x0);

    ModeSolve out;
    double lam = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 500 && !out.converged; ++it) {
        const Eigen::VectorXd bx = B * x;
        const Eigen::VectorXd y = solver.solve(bx);
        const double beta = y.dot(B * y);
        if (!(beta > 0.0))
            throw Error("trace eigenvalue iteration left the trace space");
        const double next = y.dot(bx) / beta;  // Rayleigh quotient, A y = B x
        x = y / std::sqrt(beta);
        out.converged =
            std::abs(next - lam) <= 1e-10 * std::max(1.0, std::abs(next));
        lam = next;
        out.iterations = it + 1;
    }

    out.K = lam;
    const Eigen::VectorXd ax = A * x;
    out.eigen_residual = (ax - lam * (B * x)).norm() / ax.norm();
    out.v.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
        if (free_id[i] >= 0) out.v[i] = x[free_id[i]];
    double ti = 0.0;
    for (const auto& e : mesh.trace) {
        const Vec2 d = mesh.node[e[1]] - mesh.node[e[0]];
        ti += std::hypot(d.x, d.y) * 0.5 * (out.v[e[0]] + out.v[e[1]]);
    }
    if (ti < 0.0)
        for (double& vi : out.v) vi = -vi;
    return out;
}

}  // namespace

SteklovResult compute_K(const TriMesh& mesh, Assembly mode, bool refine_pair) {
    SteklovResult r;
    ModeSolve base = smallest_trace_mode(mesh, mode);
    r.K = base.K;
    r.v = std::move(base.v);
    r.h = mesh.h;
    r.nodes = int(mesh.node.size());
    r.iterations = base.iterations;
    r.converged = base.converged;
    r.eigen_residual = base.eigen_residual;
    r.rayleigh_residual = std::abs(element_energy(mesh, r.v) - r.K);
    if (refine_pair) {
        const ModeSolve fine = smallest_trace_mode(refined(mesh), mode);
        r.K_refined = fine.K;
        r.K_extrapolated = (4.0 * fine.K - r.K) / 3.0;
        r.converged = r.converged && fine.converged;
    } else {
        r.K_refined = r.K;
        r.K_extrapolated = r.K;
    }
    return r;
}

double rectangle_K(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw Error("rectangle sides must be positive");
    return kPi / (a * std::tanh(kPi * b / a));
}

SufficientReport sufficient_condition(const Candidate& cand, double height,
                                      int nx, int ny, Assembly mode) {
    if (nx < 2 || ny < 2)
        throw Error("capacity test needs at least two cells each way");
    SufficientReport rep;
    for (int s = 0; s < 2; ++s) {
        const TriMesh m = strip_mesh(cand.chart, s == 0 ? 1 : -1, height, nx, ny);
        rep.K_side[s] = compute_K(m, mode).K_extrapolated;
    }
    rep.K_min = std::min(rep.K_side[0], rep.K_side[1]);
    const double l = cand.half_length();
    const double k = cand.sup_curvature();
    rep.c = capacity_constant();
    rep.lhs = rep.K_min / (1.0 + l * l + l * l * k * k);
    rep.rhs =
        rep.c * (cand.c1_norm[0] * cand.c1_norm[0] + cand.c1_norm[1] * cand.c1_norm[1]);
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs
                              : std::numeric_limits<double>::infinity();
    rep.holds = rep.lhs > rep.rhs;
    return rep;
}

double thin_domain_h(double sup_gprime, double M, double l, double curv) {
    if (!(sup_gprime >= 0.0) || !(curv >= 0.0))
        throw Error("slope and curvature bounds must be nonnegative");
    if (!(M > 0.0) || !(l > 0.0)) throw Error("M and l must be positive");
    const double gain = std::pow(1.0 + sup_gprime, -1.5);
    return gain * kPi /
           (2.0 * capacity_constant() * M * M *
            (1.0 + l * l + l * l * curv * curv));
}

namespace {

double blowup_cells(const CurveChart& chart, double delta, int n_across,
                    double pad) {
    const double span = chart.xi_hi() - chart.xi_lo() + 2.0 * pad;
    return std::ceil(span * n_across / delta);
}

}  // namespace

TriMesh neighbourhood_mesh(const CurveChart& chart, double delta, int n_across,
                           double pad) {
    const int nx = std::max(n_across, int(blowup_cells(chart, delta, n_across, pad)));
    return strip_mesh(chart, 1, delta, nx, n_across, pad);
}

BlowupTable blowup_study(const CurveChart& chart, std::vector<double> deltas,
                         int n_across, long node_cap, Assembly mode) {
    if (deltas.empty()) throw Error("blow-up table needs at least one thickness");
    if (n_across < 2) throw Error("blow-up table needs at least two cells across");
    if (!(chart.overhang() > 0.0))
        throw Error("blow-up table needs a continuation margin for the clamped extension");
    std::sort(deltas.begin(), deltas.end(), std::greater<>());

    BlowupTable tab;
    tab.n_across = n_across;
    tab.pad = std::min(0.45 * chart.overhang(), 0.25 * chart.length());

    const AnalyticFn curv = curvature_profile(chart.curve());
    double k_sup = 0.0;
    for (double xi : linspace(chart.xi_lo(), chart.xi_hi(), 201))
        k_sup = std::max(k_sup, std::abs(curv.real_at(xi)));

    double prev = 0.0;
    bool have_prev = false;
    bool any = false;
    tab.monotone = true;
    double floor = std::numeric_limits<double>::infinity();
    for (double d : deltas) {
        BlowupRow row;
        row.delta = d;
        if (d > chart.halfwidth() * (1.0 + 1e-12)) {
            row.skipped = true;
            row.note = "thicker than the collar, skipped";
            tab.rows.push_back(row);
            continue;
        }
        const double predicted =
            (blowup_cells(chart, d, n_across, tab.pad) + 1.0) * (n_across + 1.0);
        if (predicted > double(node_cap)) {
            // one-sided column estimate with the metric distortion of the collar
            row.lower_bound = true;
            row.K = std::max(0.0, 1.0 - k_sup * d) / d;
            row.nodes = long(std::min(predicted, 9.0e18));
            row.note = "over the node cap, column bound only";
        } else {
            const TriMesh m = neighbourhood_mesh(chart, d, n_across, tab.pad);
            const SteklovResult r = compute_K(m, mode, false);
            row.K = r.K;
            row.nodes = r.nodes;
            if (have_prev && !(row.K > prev)) tab.monotone = false;
            prev = row.K;
            have_prev = true;
        }
        any = true;
        floor = std::min(floor, row.K * d);
        tab.rows.push_back(row);
    }
    tab.min_K_delta = any ? floor : 0.0;
    return tab;
}

}  // namespace calibra
