#pragma once

// Candidate pair (u1, u2) on a collar chart and the Euler conditions a
// minimizer with a crack along the chart axis must satisfy: both branches
// harmonic, vanishing normal derivative on the axis, and the squared
// tangential slopes jumping by the curvature.

#include "calibra/analytic_kernel.hpp"
#include "calibra/curve_geometry.hpp"

namespace calibra {

struct Candidate {
    CurveChart chart;
    AnalyticFn curv;           // signed curvature along the axis
    HarmonicFunction u[2];     // branch 0 lives on eta<0, branch 1 on eta>0
    AnalyticFn trace[2];       // normalized axis traces, trace[0] < trace[1]
    AnalyticFn slope[2];       // d_xi of the traces
    AnalyticFn normal[2];      // prescribed normal data (zero unless testing)
    double shift = 0.0;        // constant added to both traces (min trace[0] = 1)
    double min_gap = 0.0;      // min over the axis of trace[1] - trace[0]
    double sup_slope = 0.0;    // max_i sup |slope_i|
    double c1_norm[2] = {0.0, 0.0};  // sup|slope_i| + sup|slope_i'|
    double c2_norm[2] = {0.0, 0.0};  // sup|slope_i'|

    double xi_lo() const { return chart.xi_lo(); }
    double xi_hi() const { return chart.xi_hi(); }
    double half_length() const { return 0.5 * chart.length(); }
    double sup_curvature() const;
};

// Builds the candidate from axis traces, normalizing both branches by one
// shared constant so that min trace[0] = 1 (the construction downstream needs
// positive traces; nothing else depends on the shift).  Rejects traces that
// touch or cross.  Optional normal data makes deliberately broken candidates
// expressible; Euler candidates leave it zero.
Candidate make_candidate(const CurveChart& chart, const AnalyticFn& lower_trace,
                         const AnalyticFn& upper_trace,
                         const AnalyticFn& lower_normal = AnalyticFn(),
                         const AnalyticFn& upper_normal = AnalyticFn());

struct EulerReport {
    double tol = 0.0;
    // (i) harmonicity: worst Richardson-extrapolated FD Laplacian over the
    // strip, both branches.
    double max_interior = 0.0;
    double worst_interior_xi = 0.0, worst_interior_eta = 0.0;
    int worst_interior_branch = 0;
    // (ii) natural boundary condition: worst |d_eta u_i| on the axis.
    double max_normal = 0.0;
    // (iii) slope-jump condition: worst |slope2^2 - slope1^2 - curv|.
    double max_jump = 0.0;
    std::vector<double> xi;              // axis grid the profiles live on
    std::vector<double> normal_residual[2];
    std::vector<double> jump_residual;
    bool pass = false;
};

// Default tol 1e-8 suits closed-form candidates; fitted/grid-backed data
// should pass 1e-5 instead.
EulerReport check_euler(const Candidate& c, double tol = 1e-8, int n_grid = 257);

}  // namespace calibra
