#pragma once

// Trace capacity of a boundary piece: the first eigenvalue K of the mixed
// problem, harmonic inside, zero on the clamped boundary, du/dnu = K u on the
// trace edges with the trace integral of u^2 as normalization.  Equivalently
// the smallest Dirichlet energy among admissible fields with unit trace mass,
// so shrinking the domain or the trace can only push K up.

#include <string>
#include <vector>

#include "calibra/calibration_builder.hpp"
#include "calibra/curve_geometry.hpp"
#include "calibra/fem.hpp"

namespace calibra {

struct SteklovResult {
    double K = 0.0;
    double K_refined = 0.0;       // once-refined mesh, same trace window
    double K_extrapolated = 0.0;  // (4 K_refined - K) / 3, the pair is O(h^2)
    std::vector<double> v;        // eigenfunction on the input mesh, unit trace mass
    double h = 0.0;
    int nodes = 0;
    int iterations = 0;
    bool converged = false;          // Rayleigh increments fell below 1e-10
    double eigen_residual = 0.0;     // |A v - K B v| relative to |A v|
    double rayleigh_residual = 0.0;  // |matrix-free energy of v - K|
};

// Inverse power iteration on the trace pencil, tolerance 1e-10, at most 500
// steps.  The eigenfunction comes back with positive trace integral and zeros
// on the clamped nodes.  refine_pair = false skips the h/2 companion solve
// and copies K into the pair fields.
//
// Thin or long domains cluster the whole trace spectrum at 1/height with
// relative gaps of order height^2, so the increments may still sit above the
// tolerance at the iteration cap.  The value is then accurate to roughly the
// cluster width (the residual bounds the distance to the spectrum); the
// result reports converged = false instead of failing.
SteklovResult compute_K(const TriMesh& mesh, Assembly mode = Assembly::Parallel,
                        bool refine_pair = true);

// Rectangle a x b with the trace on the whole bottom side:
// pi / (a tanh(pi b / a)).  Tends to pi/a for tall boxes and 1/b for flat ones.
double rectangle_K(double a, double b);

struct SufficientReport {
    double K_side[2] = {0.0, 0.0};  // collar strip above / below the curve
    double K_min = 0.0;
    double lhs = 0.0;    // K_min / (1 + l^2 + l^2 k^2)
    double rhs = 0.0;    // c * (c1_norm[0]^2 + c1_norm[1]^2)
    double ratio = 0.0;  // lhs / rhs, infinite for a pure jump
    double c = 0.0;
    bool holds = false;  // strict: lhs > rhs
};

// Compares the smaller of the two one-sided trace capacities against the
// slope penalty of the candidate.  Strips of the given height on both sides
// of the curve; heights outside the collar are rejected.
SufficientReport sufficient_condition(const Candidate& cand, double height,
                                      int nx, int ny,
                                      Assembly mode = Assembly::Parallel);

// Largest lateral half-width h for which the half-strip eigenvalue estimate
// (1 + s)^(-3/2) pi / (2h), s = sup|g'| for a jump set graph of g, still
// dominates c M^2 (1 + l^2 + l^2 k^2).  Uniform in the domain height.  The
// attenuation uses 1 + s, not 1 + s^2; for steep graphs the two differ and
// the linear variant is the one kept here.
double thin_domain_h(double sup_gprime, double M, double l = 1.0,
                     double curv = 0.0);

struct BlowupRow {
    double delta = 0.0;
    double K = 0.0;
    long nodes = 0;
    bool skipped = false;      // the neighbourhood does not fit the collar
    bool lower_bound = false;  // over the node cap, column bound instead
    std::string note;
};

struct BlowupTable {
    std::vector<BlowupRow> rows;  // sorted by decreasing delta
    double pad = 0.0;             // clamped curve extension past both ends
    int n_across = 0;
    bool monotone = false;      // K strictly grows as delta shrinks
    double min_K_delta = 0.0;   // floor of K * delta over usable rows
};

// One-sided delta-neighbourhood kept at unit cell aspect: n_across cells over
// the thickness, matching resolution along the curve.
TriMesh neighbourhood_mesh(const CurveChart& chart, double delta, int n_across,
                           double pad);

// K over a shrinking one-sided neighbourhood of the curve, the trace on the
// curve itself and the extension of length pad clamped on both ends.  Rows
// thicker than the collar are skipped with a note; rows whose mesh would
// exceed node_cap report the analytic column bound (1 - k delta) / delta.
BlowupTable blowup_study(const CurveChart& chart, std::vector<double> deltas,
                         int n_across = 16, long node_cap = 1000000,
                         Assembly mode = Assembly::Parallel);

}  // namespace calibra
