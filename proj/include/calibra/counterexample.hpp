#pragma once

#include <iosfwd>
#include <vector>

#include "calibra/fem.hpp"

namespace calibra {

// Competitor study on the rectangle R = (1, 1+4l) x (-l, l) carrying u = x
// above the segment y = 0 and u = -x below it.  The jump set is lifted onto
// the tent through (1,0), (1+l,eps), (1+2l,0); the field follows with
// amplitude eta_amp inside the tent and a matching correction below, rescaled
// from one reference solve.  All bookkeeping is closed-form once the
// reference constant c is known, so the sweep over eps costs nothing.

// Reference problem on R0 = (0,4) x (-1,0): harmonic, w = x on (0,2) x {0},
// w = 0 on the three far sides, natural condition on (2,4) x {0}.  c is the
// Dirichlet energy of w.  The data-to-natural corner at (2,0) carries a
// square-root singularity, so the lattice is graded toward it (and toward
// the milder corner at (4,0)).  Stored on the reflection (0,4) x (0,1);
// w0_value hides the flip.
struct W0Solution {
    TriMesh mesh;
    std::vector<double> w;
    std::vector<double> xs, ys;  // lattice lines of mesh, for interpolation
    double c = 0.0;    // Richardson value of the (h, h/2) energy pair
    double c_h = 0.0;  // energy of w on mesh
    double c_h2 = 0.0; // energy on the midpoint refinement
    double h = 0.0;
    int nodes = 0;
};

// n cells across each of (0,2), (2,4) and the height.
W0Solution solve_w0(int n = 48, Assembly mode = Assembly::Serial);

// w at a point of R0, piecewise linear on the solved triangulation.
double w0_value(const W0Solution& w0, double x, double y);

struct EnergyReport {
    double l = 0.0;
    double eps = 0.0;
    double eta_amp = 0.0;
    double c = 0.0;
    double term_length = 0.0;    // 2l - 2 sqrt(l^2 + eps^2), the longer crack
    double term_triangle = 0.0;  // bulk gain over the tent
    double term_R2 = 0.0;        // cost of the matching field below
    double delta_E = 0.0;        // sum of the three; positive means the
                                 // competitor beats u
    bool decrease = false;
};

// Energy of u minus energy of the competitor, split into its three terms.
EnergyReport perturbed_energy(double l, double eps, double eta_amp,
                              const W0Solution& w0);
EnergyReport perturbed_energy(double l, double eps, double eta_amp, double c);

// Leading part -eps^2/l + 2*l*eps*a - l*eps*a^2 - c*l^2*a^2 with a the
// amplitude; the exact report differs only by the quartic remainder of the
// length term.
double expansion_delta(double l, double eps, double eta_amp, double c);

// Pointwise competitor on R; on y <= 0 the lower branch is taken.
double perturbed_value(double l, double eps, double eta_amp,
                       const W0Solution& w0, double x, double y);

struct DecreaseSearch {
    double l = 0.0, c = 0.0;
    double slope_limit = 0.0;     // 1/c - 1/l
    double slope_measured = 0.0;  // delta_E / eps^2 at the smallest eps swept
    bool found = false;
    double eps = 0.0, eta_amp = 0.0, delta_E = 0.0;  // first strict decrease
    std::vector<EnergyReport> sweep;                 // whole grid, eps halving
};

// Couples eta_amp = eps/(c*l) and halves eps from eps_start (clamped so the
// geometry stays admissible).  No decrease along the family is a result, not
// an error.
DecreaseSearch find_energy_decrease(double l, double c, int n_eps = 12,
                                    double eps_start = 0.1);

// eps,delta_E rows for plotting.
void write_sweep_csv(const DecreaseSearch& s, std::ostream& out);

}  // namespace calibra
