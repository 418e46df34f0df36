#include "calibra/analytic_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace calibra {

HarmonicFunction HarmonicFunction::from_cauchy(const AnalyticFn& f, const AnalyticFn& g,
                                               double a, double b, double halfwidth) {
    const double r = std::min(f.radius(), g.radius());
    if (r < halfwidth) {
        std::ostringstream msg;
        msg << "Cauchy data continues only to distance " << r
            << " off the axis but the strip needs " << halfwidth
            << "; refine the data or shrink the strip";
        throw Error(msg.str());
    }
    AnalyticFn G = g.antiderivative_on(a, b, a);
    (void)G.radius();
    return HarmonicFunction(f, std::move(G));
}

namespace {

// Characteristic slope dx/deta of the gradient flow.  The flow is transverse
// to the axis only while d_eta w stays away from zero.
double flow_slope(const HarmonicFunction& w, double x, double eta) {
    const Vec2 g = w.grad(x, eta);
    if (std::abs(g.y) < 1e-10 * (1.0 + std::abs(g.x)))
        throw DomainShrink("gradient flow becomes tangent to the axis; shrink the strip");
    return g.x / g.y;
}

const OdeOptions& char_opts() {
    static const OdeOptions opt{1e-12, 1e-14, 200000};
    return opt;
}

}  // namespace

FlowMap::FlowMap(const HarmonicFunction& w, const StripSpec& strip)
    : w_(&w), strip_(strip) {
    levels_ = linspace(-strip.halfwidth, strip.halfwidth, strip.n_levels);
    const double lo = strip.xi_lo - strip.overhang;
    const double hi = strip.xi_hi + strip.overhang;
    const std::vector<double> feet = linspace(lo, hi, strip.n_char);

    const int mid = strip.n_levels / 2;  // levels_[mid] == 0 for odd counts
    if (levels_[mid] != 0.0)
        throw Error("strip level grid must contain the axis; use an odd level count");

    auto rhs = [this](double eta, double x) { return flow_slope(*w_, x, eta); };

    bundle_.resize(feet.size());
    for (std::size_t i = 0; i < feet.size(); ++i) {
        Characteristic& c = bundle_[i];
        c.foot = feet[i];
        c.x.assign(levels_.size(), 0.0);
        c.x[mid] = feet[i];
        std::vector<double> up(levels_.begin() + mid, levels_.end());
        std::vector<double> down(levels_.rbegin() + mid, levels_.rend());
        double x0 = feet[i];
        int j = mid;
        ode_integrate_path(rhs, x0, up, [&](double, double x) { c.x[j++] = x; }, char_opts());
        x0 = feet[i];
        j = mid;
        ode_integrate_path(rhs, x0, down, [&](double, double x) { c.x[j--] = x; }, char_opts());
    }

    for (std::size_t j = 0; j < levels_.size(); ++j)
        for (std::size_t i = 0; i + 1 < bundle_.size(); ++i)
            if (!(bundle_[i + 1].x[j] - bundle_[i].x[j] > 1e-14))
                throw DomainShrink("gradient-flow characteristics cross inside the strip; "
                                   "shrink the halfwidth");
}

double FlowMap::p(double foot, double eta) const {
    if (eta == 0.0) return foot;
    auto rhs = [this](double e, double x) { return flow_slope(*w_, x, e); };
    return ode_integrate(rhs, foot, 0.0, eta, char_opts());
}

double FlowMap::q_sensitivity(double foot, double eta) const {
    using State = std::array<double, 2>;
    auto rhs = [this](double e, const State& s) -> State {
        const Vec2 g = w_->grad(s[0], e);
        if (std::abs(g.y) < 1e-10 * (1.0 + std::abs(g.x)))
            throw DomainShrink("gradient flow becomes tangent to the axis; shrink the strip");
        const double wxx = w_->dxx(s[0], e);
        const double wxy = w_->dxy(s[0], e);
        const double dslope = (wxx * g.y - g.x * wxy) / (g.y * g.y);
        return {g.x / g.y, dslope * s[1]};
    };
    const State s = ode_integrate(rhs, State{foot, 1.0}, 0.0, eta, char_opts());
    return s[1];
}

double FlowMap::seed_foot(double xi, double eta) const {
    // Interpolate the stored bundle: blend the two nearest eta levels, then
    // invert foot -> x with a local cubic (Neville) through four columns.
    const double hw = strip_.halfwidth;
    const std::size_t nl = levels_.size();
    double t = (eta + hw) / (2.0 * hw) * double(nl - 1);
    t = std::clamp(t, 0.0, double(nl - 1));
    std::size_t j = std::min(std::size_t(t), nl - 2);
    const double b = t - double(j);

    const std::size_t nc = bundle_.size();
    std::vector<double> x(nc);
    for (std::size_t i = 0; i < nc; ++i)
        x[i] = (1.0 - b) * bundle_[i].x[j] + b * bundle_[i].x[j + 1];

    auto it = std::lower_bound(x.begin(), x.end(), xi);
    std::size_t k = std::size_t(std::distance(x.begin(), it));
    if (k == 0 || k >= nc) {
        // off the stored range; clamp to the nearest column
        return k == 0 ? bundle_.front().foot : bundle_.back().foot;
    }
    std::size_t i0 = (k >= 2) ? k - 2 : 0;
    i0 = std::min(i0, nc - 4);
    // inverse interpolation foot(x) through 4 points
    double foot = 0.0;
    for (int a = 0; a < 4; ++a) {
        double term = bundle_[i0 + a].foot;
        for (int m = 0; m < 4; ++m) {
            if (m == a) continue;
            term *= (xi - x[i0 + m]) / (x[i0 + a] - x[i0 + m]);
        }
        foot += term;
    }
    return foot;
}

double FlowMap::q(double xi, double eta, double hint) const {
    if (eta == 0.0) return xi;
    const double span = (strip_.xi_hi - strip_.xi_lo) + 2.0 * strip_.overhang;
    const double foot_lo = strip_.xi_lo - strip_.overhang;
    const double foot_hi = strip_.xi_hi + strip_.overhang;

    double center = std::isfinite(hint) ? hint : seed_foot(xi, eta);
    double rad = std::isfinite(hint) ? 1e-9 * (1.0 + std::abs(hint)) : 1e-6 * span;

    // Establish a monotone bracket around the seed, widening as needed.
    double lo = center - rad, hi = center + rad;
    double plo = 0.0, phi = 0.0;
    bool ok = false;
    for (int round = 0; round < 60; ++round) {
        lo = std::max(lo, foot_lo);
        hi = std::min(hi, foot_hi);
        plo = p(lo, eta);
        phi = p(hi, eta);
        if (plo <= xi && xi <= phi) { ok = true; break; }
        if (lo == foot_lo && hi == foot_hi) break;
        rad *= 4.0;
        lo = center - rad;
        hi = center + rad;
    }
    if (!ok)
        throw DomainShrink("point has no flow footpoint inside the strip; shrink the halfwidth");

    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (p(mid, eta) < xi) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

TransportSolution::TransportSolution(Field2 drift, Field1 source, TraceFn init, StripSpec strip)
    : drift_(std::move(drift)), source_(std::move(source)),
      init_(std::move(init)), strip_(std::move(strip)) {}

std::array<double, 2> TransportSolution::trace_back(double xi, double eta) const {
    using State = std::array<double, 2>;  // {position, accumulated source}
    if (eta == 0.0) return {xi, 0.0};
    auto rhs = [this](double e, const State& s) -> State {
        const Vec2 d = drift_(s[0], e);
        if (std::abs(d.y) < 1e-12 * (1.0 + std::abs(d.x)))
            throw DomainShrink("transport drift runs parallel to the axis; shrink the strip");
        return {d.x / d.y, source_(s[0], e) / d.y};
    };
    const double lo = strip_.xi_lo - strip_.overhang;
    const double hi = strip_.xi_hi + strip_.overhang;
    State out{xi, 0.0};
    const auto stops = linspace(eta, 0.0, 9);
    ode_integrate_path(rhs, out, stops, [&](double, const State& st) {
        if (st[0] < lo || st[0] > hi)
            throw DomainShrink("transport characteristic leaves the strip; shrink the halfwidth");
        out = st;
    });
    return out;
}

double TransportSolution::value(double xi, double eta) const {
    const auto s = trace_back(xi, eta);
    return init_(s[0]) - s[1];
}

double TransportSolution::footpoint(double xi, double eta) const {
    return trace_back(xi, eta)[0];
}

TransportSolution solve_transport(TransportSolution::Field2 drift,
                                  TransportSolution::Field1 source,
                                  TransportSolution::TraceFn init,
                                  const StripSpec& strip) {
    return TransportSolution(std::move(drift), std::move(source), std::move(init), strip);
}

Vec2 vertical_quadrature(const ZProfile& profile, double s, double t) {
    if (s > t) return vertical_quadrature(profile, t, s) * -1.0;
    if (!profile.saturated_tails &&
        (s < profile.z_lo() - 1e-12 || t > profile.z_hi() + 1e-12))
        throw Error("vertical quadrature limits fall outside the field's z-span");
    Vec2 acc{0.0, 0.0};
    for (const ZSegment& seg : profile.segs) {
        const double a = std::max(seg.lo, s);
        const double b = std::min(seg.hi, t);
        if (b <= a) continue;
        acc = acc + seg.flat * (b - a) + seg.slope * (0.5 * (b * b - a * a));
    }
    return acc;
}

Vec3 profile_value(const ZProfile& profile, double z) {
    double zc = z;
    if (zc < profile.z_lo() || zc > profile.z_hi()) {
        if (!profile.saturated_tails)
            throw Error("field queried outside its z-span");
        zc = std::clamp(zc, profile.z_lo(), profile.z_hi());
    }
    // segments are contiguous; pick the one containing zc
    std::size_t k = 0;
    while (k + 1 < profile.segs.size() && zc > profile.segs[k].hi) ++k;
    const ZSegment& seg = profile.segs[k];
    const Vec2 xy = seg.flat + seg.slope * zc;
    return {xy.x, xy.y, seg.z0 + zc * (seg.z1 + zc * seg.z2)};
}

}  // namespace calibra
