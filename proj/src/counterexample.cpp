#include "calibra/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "calibra/parallel.hpp"

namespace calibra {
namespace {

// cubic grading, fine end at b; cubic brings the corner error down to the
// O(h^2) of the smooth part, quadratic measurably does not
constexpr double kGrade = 3.0;

std::vector<double> graded_to(double a, double b, int m) {
    std::vector<double> out(m + 1);
    for (int i = 0; i <= m; ++i) {
        const double t = double(m - i) / m;
        out[i] = b + (a - b) * std::pow(t, kGrade);
    }
    out.front() = a;
    out.back() = b;
    return out;
}

std::vector<double> bottom_data(const TriMesh& mesh) {
    std::vector<double> g(mesh.node.size(), 0.0);
    for (size_t i = 0; i < mesh.node.size(); ++i) {
        const Vec2& p = mesh.node[i];
        if (mesh.fixed[i] && std::abs(p.y) < 1e-12 && p.x <= 2.0 + 1e-12)
            g[i] = p.x;
    }
    return g;
}

int cell_of(const std::vector<double>& axis, double v) {
    int i = int(std::upper_bound(axis.begin(), axis.end(), v) - axis.begin()) - 1;
    return std::clamp(i, 0, int(axis.size()) - 2);
}

void check_family(double l, double eps, double eta_amp) {
    if (!(l > 0.0)) throw Error("rectangle scale l must be positive");
    if (!(eps >= 0.0) || !std::isfinite(eps))
        throw Error("tent height eps must be nonnegative");
    if (eps >= l) throw Error("tent height eps must stay below l");
    if (!(eta_amp >= 0.0) || eta_amp >= 1.0)
        throw Error("amplitude eta_amp must lie in [0,1)");
}

}  // namespace

W0Solution solve_w0(int n, Assembly mode) {
    if (n < 4) throw Error("reference solve needs at least 4 cells per side");

    std::vector<double> xs = graded_to(0.0, 2.0, n);
    // both ends of (2,4) are corners, so grade toward each
    for (int j = 1; j <= n; ++j) {
        const double t = double(j) / n;
        const double s = (t < 0.5) ? 0.5 * std::pow(2.0 * t, kGrade)
                                   : 1.0 - 0.5 * std::pow(2.0 * (1.0 - t), kGrade);
        xs.push_back(2.0 + 2.0 * s);
    }
    xs.back() = 4.0;
    std::vector<double> ys(n + 1);
    for (int j = 0; j <= n; ++j) ys[j] = std::pow(double(j) / n, kGrade);
    ys.back() = 1.0;

    W0Solution out;
    out.mesh = tensor_mesh(xs, ys, 2.0, 4.0);
    out.xs = std::move(xs);
    out.ys = std::move(ys);
    out.w = harmonic_fill(out.mesh, bottom_data(out.mesh), mode);
    out.c_h = element_energy(out.mesh, out.w);

    const TriMesh fine = refined(out.mesh);
    const std::vector<double> wf = harmonic_fill(fine, bottom_data(fine), mode);
    out.c_h2 = element_energy(fine, wf);

    out.c = (4.0 * out.c_h2 - out.c_h) / 3.0;
    out.h = out.mesh.h;
    out.nodes = int(out.mesh.node.size());
    return out;
}

double w0_value(const W0Solution& w0, double x, double y) {
    const double yy = -y;  // the mesh lives on the reflection
    const double sx = w0.xs.back() - w0.xs.front();
    const double sy = w0.ys.back() - w0.ys.front();
    if (x < w0.xs.front() - 1e-9 * sx || x > w0.xs.back() + 1e-9 * sx ||
        yy < w0.ys.front() - 1e-9 * sy || yy > w0.ys.back() + 1e-9 * sy)
        throw Error("point outside the reference rectangle");

    const int i = cell_of(w0.xs, x);
    const int j = cell_of(w0.ys, yy);
    const double s = (x - w0.xs[i]) / (w0.xs[i + 1] - w0.xs[i]);
    const double t = (yy - w0.ys[j]) / (w0.ys[j + 1] - w0.ys[j]);
    const int nx = int(w0.xs.size());
    const double w00 = w0.w[j * nx + i];
    const double w10 = w0.w[j * nx + i + 1];
    const double w01 = w0.w[(j + 1) * nx + i];
    const double w11 = w0.w[(j + 1) * nx + i + 1];
    // the lattice diagonal runs from (i,j) to (i+1,j+1)
    if (t <= s) return w00 * (1.0 - s) + w10 * (s - t) + w11 * t;
    return w00 * (1.0 - t) + w01 * (t - s) + w11 * s;
}

EnergyReport perturbed_energy(double l, double eps, double eta_amp, double c) {
    check_family(l, eps, eta_amp);
    if (!(c > 0.0)) throw Error("reference energy c must be positive");

    EnergyReport rep;
    rep.l = l;
    rep.eps = eps;
    rep.eta_amp = eta_amp;
    rep.c = c;

    // 2l - 2 sqrt(l^2 + eps^2), written without the cancellation
    rep.term_length = -2.0 * eps * eps / (l + std::hypot(l, eps));

    // tent area from its corners; the gradient drops from 1 to (1-eta)^2
    const double area = 0.5 * std::abs((1.0) * (eps - 0.0) +
                                       (1.0 + l) * (0.0 - 0.0) +
                                       (1.0 + 2.0 * l) * (0.0 - eps));
    rep.term_triangle = area * (1.0 - (1.0 - eta_amp) * (1.0 - eta_amp));

    // the matching field costs eta^2 l^2 times the reference energy; its
    // cross term with the flat branch integrates to zero
    rep.term_R2 = -c * l * l * eta_amp * eta_amp;

    rep.delta_E = rep.term_length + rep.term_triangle + rep.term_R2;
    rep.decrease = rep.delta_E > 0.0;
    return rep;
}

EnergyReport perturbed_energy(double l, double eps, double eta_amp,
                              const W0Solution& w0) {
    return perturbed_energy(l, eps, eta_amp, w0.c);
}

double expansion_delta(double l, double eps, double eta_amp, double c) {
    return -eps * eps / l + 2.0 * l * eps * eta_amp - l * eps * eta_amp * eta_amp -
           c * l * l * eta_amp * eta_amp;
}

double perturbed_value(double l, double eps, double eta_amp,
                       const W0Solution& w0, double x, double y) {
    check_family(l, eps, eta_amp);
    if (x < 1.0 - 1e-12 || x > 1.0 + 4.0 * l + 1e-12 || y < -l - 1e-12 ||
        y > l + 1e-12)
        throw Error("point outside the competitor rectangle");
    if (y > 0.0) {
        const double tent =
            (x <= 1.0 + 2.0 * l) ? eps * (1.0 - std::abs(x - 1.0 - l) / l) : 0.0;
        if (y >= tent) return x;
        return -x + eta_amp * (x - 1.0);
    }
    return -x + eta_amp * l * w0_value(w0, (x - 1.0) / l, y / l);
}

DecreaseSearch find_energy_decrease(double l, double c, int n_eps,
                                    double eps_start) {
    if (!(l > 0.0)) throw Error("rectangle scale l must be positive");
    if (!(c > 0.0)) throw Error("reference energy c must be positive");
    if (n_eps < 2) throw Error("sweep needs at least two steps");
    if (!(eps_start > 0.0)) throw Error("sweep start must be positive");

    DecreaseSearch out;
    out.l = l;
    out.c = c;
    out.slope_limit = 1.0 / c - 1.0 / l;

    // keep eps below l and the coupled amplitude below one
    const double eps0 = std::min({eps_start, 0.5 * l, 0.5 * c * l});
    out.sweep.resize(n_eps);
    const int nt = thread_count();
#pragma omp parallel for num_threads(nt) schedule(static) if (nt > 1)
    for (int k = 0; k < n_eps; ++k) {
        const double eps = eps0 * std::pow(0.5, k);
        out.sweep[k] = perturbed_energy(l, eps, eps / (c * l), c);
    }

    for (const EnergyReport& rep : out.sweep) {
        if (rep.decrease) {
            out.found = true;
            out.eps = rep.eps;
            out.eta_amp = rep.eta_amp;
            out.delta_E = rep.delta_E;
            break;
        }
    }
    const EnergyReport& last = out.sweep.back();
    out.slope_measured = last.delta_E / (last.eps * last.eps);
    return out;
}

void write_sweep_csv(const DecreaseSearch& s, std::ostream& out) {
    out << "eps,delta_E\n";
    out.precision(12);
    for (const EnergyReport& rep : s.sweep)
        out << rep.eps << ',' << rep.delta_E << '\n';
}

}  // namespace calibra
