#pragma once

// Quantified checks on an assembled field.  Everything the construction is
// supposed to satisfy is re-measured here from the outside: flat divergence
// inside each z-region, normal-trace continuity across the region seams, the
// cone bound 4 phi^z >= |phi^(xi,eta)|^2, contact with the trace gradients,
// the jump-integral length bound against gamma, and the unit axis integral.
// Failures never throw; they come back as signed margins or residuals with
// the sample that attains the worst value.

#include <iosfwd>
#include <vector>

#include "calibra/calibration_builder.hpp"

namespace calibra {

struct VerifyGrid {
    int n_xi = 33;
    int n_eta = 16;  // even count keeps the axis eta = 0 off the grid
    int n_st = 64;   // z-lattice size for the pairwise length bound
};

// Sample attaining the reported extremum.  For pairwise checks z and t are
// the two heights; for seam checks z is the interface level.
struct Witness {
    double xi = 0.0, eta = 0.0, z = 0.0, t = 0.0;
    double value = 0.0;
};

// Equality condition: worst absolute residual, pass when it stays below the
// report tolerance.
struct ResidualCheck {
    double worst = 0.0;
    Witness where;
    bool pass = false;
};

// One-sided condition: smallest signed margin.  Closed inequality, so a
// margin pinched to zero (the jump integral at the trace pair on the axis)
// still passes; only a genuinely negative value fails.
struct MarginCheck {
    double min = 0.0;
    Witness where;
    bool pass = false;
};

struct VerificationReport {
    ResidualCheck interior;  // divergence inside each region, flat chart form
    ResidualCheck seams;     // normal-trace continuity across region seams
    MarginCheck cone;        // 4 phi^z - |phi^(xi,eta)|^2 on pads and slab
    ResidualCheck tangency;  // same quantity on the gradient blocks, equality
    ResidualCheck contact;   // field against the trace data at z = u_i
    MarginCheck length;      // gamma^2 - |I(s,t)|^2 over the z-pair lattice
    ResidualCheck axis;      // jump integral at eta = 0 against (0,1)

    // Polar diagnostics of the full jump integral I(xi,eta,u1,u2).
    double rho_min = 0.0, rho_max = 0.0;
    double theta_abs_max = 0.0;
    double theta_slope_max = 0.0;  // max |theta| / |eta| off the axis

    // Per base point minima, row-major with xi the slow index.
    std::vector<double> xi_axis, eta_axis;
    std::vector<double> cone_grid, length_grid;

    VerifyGrid grid;
    double tol = 0.0;
    bool pass = false;
};

VerificationReport verify_field(const FieldLike& field, const VerifyGrid& grid = {},
                                double tol = 1e-4);

// xi,eta,cone,length rows for plotting the margin landscape.
void write_margin_csv(const VerificationReport& report, std::ostream& out);

// Axis derivative identities tying the assembled field to the chart: the
// first two are properties of the collar metric alone, the last two compare
// the jump-integral length rho(xi,eta) = |I(xi,eta,u1,u2)| with gamma.
//   d/deta (1/gamma^2)      = -2 curv
//   d2/deta2 (1/gamma^2)    =  4 curv^2
//   d/deta rho              =  curv
//   d2/deta2 (rho - gamma)  = -pi^2 / (16 l^2)
// Central differences, Richardson-extrapolated.  The metric rows and the
// first rho row use the step 1e-3 * halfwidth; the second rho derivative
// uses 0.2 * halfwidth with the stiff block-cap part of rho split off and
// differentiated in closed form, since quadrature noise divided by the
// square of the small step would drown the target.
struct IdentityReport {
    struct Row {
        double xi = 0.0;
        double value = 0.0, target = 0.0, err = 0.0;
    };
    std::vector<Row> metric_d1, metric_d2, rho_d1, gap_d2;
    double worst_metric_d1 = 0.0, worst_metric_d2 = 0.0;
    double worst_rho_d1 = 0.0, worst_gap_d2 = 0.0;
    double tol = 0.0;
    bool pass = false;
};

IdentityReport derivative_identities(const FieldLike& field, int n_xi = 9,
                                     double tol = 1e-4);

// eta-only part of the jump integral contributed by the block caps, and its
// exact second derivative at eta = 0.  Split off by the rho differences
// above; exposed for the tests that probe the splitting.
double block_caps(const BuildParams& params, double eta);
double block_caps_d2(const BuildParams& params);

}  // namespace calibra
