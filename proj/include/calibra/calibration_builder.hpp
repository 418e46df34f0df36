#pragma once

// Assembly of the piecewise divergence-free field that certifies a candidate
// as a minimizer on a collar around the crack.  The field lives on
// strip x R, split along z into vertical pads, affine gradient blocks around
// each branch, and a transport slab carrying the weighted gradient of an
// auxiliary harmonic function w.  The z-ordering at eta = 0 is
//   u1 - eps < u1 + eps < band < band + 1/lambda < u2 - eps < u2 + eps.

#include <functional>
#include <memory>
#include <optional>

#include "calibra/analytic_kernel.hpp"
#include "calibra/euler_check.hpp"

namespace calibra {

enum class Variant { Dirichlet, Graph };

struct BuildConstants {
    double N = 0.0;       // bound on the tangent-angle slope n'/n
    double d = 0.0;       // clearance constant, 0 < d < 1
    double h = 0.0;       // curvature-of-rho budget entering the slope target
    double c_tilde = 0.0;
    double c = 0.0;       // constant of the sufficient condition
};

BuildConstants compute_constants(double l, double k, const Candidate& cand,
                                 Variant variant);

// Constant multiplying the squared C^1 trace norms in the capacity test,
// max(c_tilde, 64 / pi^2); shared with the thin-strip height bound.
double capacity_constant();

struct BuildParams {
    Variant variant = Variant::Dirichlet;
    double eps = 0.0;      // half-thickness of the gradient blocks
    double lambda = 0.0;   // inverse thickness of the transport slab
    double M = 0.0;        // slope of the block half-widths in eta
    double mu = 0.0;       // z-component inside the transport slab
    double Mp = 0.0;       // outer-block slope (graph variant only)
    double delta = 0.0;    // extension-tube thickness (graph variant only)
    double halfwidth = 0.0;  // strip halfwidth the field is valid on
    BuildConstants consts;
    AnalyticFn n;          // axis weight; exp of the tangent-angle integral

    // 1 - 2 eps M (resp. 1 - eps Mp - 6 eps^2 M): the slab's share of the
    // unit jump integral, also the sigma numerator.
    double slab_share() const {
        return variant == Variant::Dirichlet ? 1.0 - 2.0 * eps * M
                                             : 1.0 - eps * Mp - 6.0 * eps * eps * M;
    }
};

// Policy values for everything the construction leaves as "suitable": block
// slope M from the trace slopes (floored for pure jumps), slab thickness
// from the trace gap, slab weight mu just above its admissibility bound.
// K_min (smallest trace capacity among the two sides) gates the graph
// variant: its M must fit a window that closes on large domains.
BuildParams select_parameters(const Candidate& cand, Variant variant, double eps,
                              double K_min = std::numeric_limits<double>::infinity());

struct RiccatiClosures {
    std::function<double(double)> a;          // a(xi)
    std::function<double(double, double)> h;  // h(xi, tau)
};

struct RiccatiSolution {
    AnalyticFn tau;   // tangent-angle slope profile
    AnalyticFn n;     // exp of its antiderivative, n(0) = 1
    double sup_tau = 0.0;
};

// Integrates  -a(xi) tau' + h(xi,tau) - tau^2 - curv^2 = -pi^2/(16 l^2),
// tau(0) = 0, over [lo, hi] (0 must be inside).  Default closures are the
// thin-block limit a = 1, h = 2 tau^2; the assembly passes exact
// finite-thickness closures instead so the jump diagnostics close exactly.
// Throws DomainShrink when tau escapes [-N, N] or blows up before the ends.
RiccatiSolution solve_riccati_n(const AnalyticFn& curvature, double l, double lo,
                                double hi, double N,
                                const RiccatiClosures* closures = nullptr);

// Exact closures for block half-thickness eps and slope M: keep the second
// eta-derivative of the jump integral's length equal to its limit target at
// finite eps rather than up to O(eps).
RiccatiClosures finite_width_closures(const Candidate& cand, double eps, double M);

struct WFrame {
    // behind a stable pointer: the flow map refers to w by address, and the
    // frame gets moved into the assembled field
    std::shared_ptr<const HarmonicFunction> w;
    FlowMap flow;
    AnalyticFn n;
    double pref_sigma = 0.0;  // sigma = pref_sigma / n(footpoint)
};

WFrame build_w_sigma(const Candidate& cand, const AnalyticFn& n,
                     const BuildParams& params);

// Read-only view the verifier works against; decorators wrap it to produce
// deliberately broken fields for negative tests.
struct FieldLike {
    virtual ~FieldLike() = default;
    virtual ZProfile profile(double xi, double eta) const = 0;
    virtual const Candidate& candidate() const = 0;
    virtual const BuildParams& params() const = 0;
};

class CalibrationField : public FieldLike {
public:
    CalibrationField(Candidate cand, BuildParams params, WFrame frame);

    // Everything the z-column at (xi, eta) is made of.
    struct Column {
        double xi = 0.0, eta = 0.0;
        double u[2] = {0.0, 0.0};
        Vec2 du[2];
        double v[2] = {0.0, 0.0};       // block half-width factors at eta
        double vt[2] = {0.0, 0.0};      // outer factors (graph variant)
        double omega[2] = {0.0, 0.0};   // vertical pad z-components
        double band[2] = {0.0, 0.0};    // slab boundaries (band[0], band[1]+1/lambda)
        double foot = 0.0;              // characteristic footpoint
        double sigma = 0.0;
        Vec2 sw;                        // sigma * grad w
    };
    // foot_hint: footpoint of a nearby column, tightens the inverse-flow
    // bracket (column sweeps pass the previous row's foot).
    Column column(double xi, double eta,
                  double foot_hint = std::numeric_limits<double>::quiet_NaN()) const;
    ZProfile profile_of(const Column& col) const;
    ZProfile profile(double xi, double eta) const override;

    const Candidate& candidate() const override { return cand_; }
    const BuildParams& params() const override { return params_; }
    const WFrame& frame() const { return frame_; }

    // z-levels of the region interfaces at this column, inner to outer.
    std::vector<double> interfaces(const Column& col) const;

private:
    Candidate cand_;
    BuildParams params_;
    WFrame frame_;
    double mid_at(double xi) const;
};

struct AssembleOptions {
    double K_min = std::numeric_limits<double>::infinity();
    double eps_floor = 1e-4;
    // External gate (typically the full verifier); the loop shrinks eps and
    // the strip until it returns true.  Internal consistency checks run
    // either way.
    std::function<bool(const CalibrationField&)> gate;
};

// eps-shrink loop: start at 0.1 * trace gap, halve (narrowing the strip and
// re-solving the axis weight) until the checks pass; floor 1e-4, then fail
// naming the worst condition.
CalibrationField assemble_field(const Candidate& cand, Variant variant,
                                const AssembleOptions& opts = {});

}  // namespace calibra
