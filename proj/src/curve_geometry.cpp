#include "calibra/curve_geometry.hpp"

#include <algorithm>
#include <map>

namespace calibra {

double AnalyticCurve::length() const {
    if (unit_speed) return t1 - t0;
    const AnalyticFn& W = position;
    Cheb v = Cheb::fit([&W](double t) { return cplx(std::abs(W.d1(cplx(t, 0))), 0); },
                       t0, t1);
    return v.antiderivative()(cplx(t1, 0)).real();
}

void AnalyticCurve::validate() const {
    const int n = 1 << 12;
    const double span = t1 - t0;
    double vmax = 0.0;
    std::vector<Vec2> pts(static_cast<size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        const double t = t0 + span * double(i) / n;
        pts[static_cast<size_t>(i)] = point(t);
        vmax = std::max(vmax, speed(t));
    }
    for (int i = 0; i <= n; ++i) {
        const double t = t0 + span * double(i) / n;
        if (speed(t) <= 1e-9 * vmax)
            throw Error("curve is irregular: velocity vanishes near t=" +
                        std::to_string(t));
    }
    // self-intersection scan: hash points on a grid sized by the max step
    double step = 0.0;
    for (int i = 0; i < n; ++i)
        step = std::max(step, (pts[size_t(i) + 1] - pts[size_t(i)]).norm());
    const double cell = std::max(step, 1e-12);
    std::map<std::pair<long, long>, std::vector<int>> grid;
    for (int i = 0; i <= n; ++i) {
        const auto key = std::make_pair(long(std::floor(pts[size_t(i)].x / cell)),
                                        long(std::floor(pts[size_t(i)].y / cell)));
        grid[key].push_back(i);
    }
    for (int i = 0; i <= n; ++i) {
        const Vec2 p = pts[static_cast<size_t>(i)];
        const long cx = long(std::floor(p.x / cell)), cy = long(std::floor(p.y / cell));
        for (long dx = -1; dx <= 1; ++dx)
            for (long dy = -1; dy <= 1; ++dy) {
                auto it = grid.find({cx + dx, cy + dy});
                if (it == grid.end()) continue;
                for (int j : it->second) {
                    if (j <= i + 8) continue;
                    if ((pts[static_cast<size_t>(j)] - p).norm() < 0.45 * cell)
                        throw Error("curve is not simple: parameters " +
                                    std::to_string(t0 + span * i / n) + " and " +
                                    std::to_string(t0 + span * j / n) +
                                    " map to nearly the same point");
                }
            }
    }
}

AnalyticCurve reversed(const AnalyticCurve& c) {
    const AnalyticFn W = c.position;
    const double s = c.t0 + c.t1;
    std::vector<AnalyticFn::Closure> levels = {
        [W, s](cplx z) { return W(s - z); },
        [W, s](cplx z) { return -W.d1(s - z); },
        [W, s](cplx z) { return W.d2(s - z); },
        [W, s](cplx z) { return -W.d3(s - z); },
    };
    AnalyticCurve out;
    out.position = AnalyticFn::closed(std::move(levels), W.radius());
    out.t0 = c.t0;
    out.t1 = c.t1;
    out.unit_speed = c.unit_speed;
    return out;
}

AnalyticCurve arc_length_reparameterize(const AnalyticCurve& c, double tol) {
    c.validate();
    const AnalyticFn& W = c.position;
    Cheb vfit = Cheb::fit(
        [&W](double t) { return cplx(std::abs(W.d1(cplx(t, 0))), 0); }, c.t0, c.t1);

    // constant speed: substitute the parameter, keep the closed form
    double vmin = 1e300, vmax = 0.0;
    for (int i = 0; i <= 256; ++i) {
        const double v = std::abs(vfit(cplx(c.t0 + (c.t1 - c.t0) * i / 256.0, 0)));
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    AnalyticCurve out;
    if (vmax - vmin <= 1e-12 * vmax) {
        const double v = 0.5 * (vmin + vmax), t0 = c.t0;
        std::vector<AnalyticFn::Closure> levels = {
            [W, v, t0](cplx z) { return W(t0 + z / v); },
            [W, v, t0](cplx z) { return W.d1(t0 + z / v) / v; },
            [W, v, t0](cplx z) { return W.d2(t0 + z / v) / (v * v); },
            [W, v, t0](cplx z) { return W.d3(t0 + z / v) / (v * v * v); },
        };
        out.position = AnalyticFn::closed(std::move(levels), W.radius() * v);
        out.t1 = (c.t1 - c.t0) * v;
    } else {
        Cheb arclen = vfit.antiderivative();
        const double total = arclen(cplx(c.t1, 0)).real();
        // invert s = arclen(t) at Chebyshev nodes of [0, total], refit W
        auto param_at = [&](double s) {
            double lo = c.t0, hi = c.t1;
            double t = c.t0 + (c.t1 - c.t0) * s / total;
            for (int it = 0; it < 100; ++it) {
                const double fs = arclen(cplx(t, 0)).real() - s;
                if (fs > 0) hi = t; else lo = t;
                const double dv = std::abs(vfit(cplx(t, 0)));
                double tn = t - fs / dv;
                if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
                if (std::abs(tn - t) < 1e-15 * (1.0 + std::abs(t))) { t = tn; break; }
                t = tn;
            }
            return t;
        };
        Cheb refit = Cheb::fit([&](double s) { return W(cplx(param_at(s), 0)); },
                               0.0, total);
        out.position = AnalyticFn::from_cheb(refit);
        out.t1 = total;
    }
    out.t0 = 0.0;
    out.unit_speed = true;
    for (int i = 0; i <= 1000; ++i) {
        const double s = out.t1 * double(i) / 1000.0;
        if (std::abs(out.speed(s) - 1.0) > tol)
            throw Error("arc_length_reparameterize: residual speed error " +
                        std::to_string(out.speed(s) - 1.0) + " at s=" +
                        std::to_string(s) + " exceeds tol");
    }
    return out;
}

AnalyticFn curvature_profile(const AnalyticCurve& c) {
    if (!c.unit_speed) throw Error("curvature_profile needs a unit-speed curve");
    const AnalyticFn W = c.position;
    // real-analytic combinations of x(t), y(t) continue holomorphically via
    // the reflection Wbar(z) = conj(W(conj z))
    auto curv = [W](cplx z) {
        const cplx zb = std::conj(z);
        const cplx xp = 0.5 * (W.d1(z) + std::conj(W.d1(zb)));
        const cplx yp = (W.d1(z) - std::conj(W.d1(zb))) / cplx(0, 2);
        const cplx xpp = 0.5 * (W.d2(z) + std::conj(W.d2(zb)));
        const cplx ypp = (W.d2(z) - std::conj(W.d2(zb))) / cplx(0, 2);
        return xpp * yp - ypp * xp;
    };
    auto dcurv = [W](cplx z) {
        const cplx zb = std::conj(z);
        const cplx xp = 0.5 * (W.d1(z) + std::conj(W.d1(zb)));
        const cplx yp = (W.d1(z) - std::conj(W.d1(zb))) / cplx(0, 2);
        const cplx xppp = 0.5 * (W.d3(z) + std::conj(W.d3(zb)));
        const cplx yppp = (W.d3(z) - std::conj(W.d3(zb))) / cplx(0, 2);
        return xppp * yp - yppp * xp;  // the mixed 2nd-order terms cancel
    };
    return AnalyticFn::closed({curv, dcurv}, W.radius());
}

CurveChart::CurveChart(AnalyticCurve curve, double halfwidth, double overhang)
    : curve_(std::move(curve)), halfwidth_(halfwidth), overhang_(overhang) {
    for (int i = 0; i <= 64; ++i)
        for (int j = -4; j <= 4; ++j) {
            const cplx z(curve_.t0 + (curve_.t1 - curve_.t0) * i / 64.0,
                         halfwidth_ * j / 4.0);
            seeds_.emplace_back(z, curve_.position(z));
        }
}

Vec2 CurveChart::map(double xi, double eta) const {
    const cplx w = curve_.position(cplx(xi, eta));
    return {w.real(), w.imag()};
}

double CurveChart::gamma(double xi, double eta) const {
    return std::abs(curve_.position.d1(cplx(xi, eta)));
}

Vec2 CurveChart::tau_xi(double xi, double eta) const {
    const cplx wp = curve_.position.d1(cplx(xi, eta));
    return {wp.real(), wp.imag()};
}

Vec2 CurveChart::tau_eta(double xi, double eta) const {
    const cplx wp = curve_.position.d1(cplx(xi, eta));
    return {-wp.imag(), wp.real()};
}

Vec2 CurveChart::invert(Vec2 p) const {
    const cplx target(p.x, p.y);
    cplx z = seeds_.front().first;
    double best = 1e300;
    for (const auto& [seed, w] : seeds_) {
        const double d = std::abs(w - target);
        if (d < best) { best = d; z = seed; }
    }
    for (int it = 0; it < 60; ++it) {
        const cplx f = curve_.position(z) - target;
        if (std::abs(f) < 1e-14 * (1.0 + std::abs(target))) break;
        z -= f / curve_.position.d1(z);
    }
    if (std::abs(curve_.position(z) - target) > 1e-10 * (1.0 + std::abs(target)))
        throw Error("chart inversion failed: point (" + std::to_string(p.x) + "," +
                    std::to_string(p.y) + ") is not in the collar");
    if (z.real() < xi_lo() - overhang_ - 1e-9 || z.real() > xi_hi() + overhang_ + 1e-9 ||
        std::abs(z.imag()) > halfwidth_ + 1e-9)
        throw Error("chart inversion: point lands outside the collar at xi=" +
                    std::to_string(z.real()) + " eta=" + std::to_string(z.imag()));
    return {z.real(), z.imag()};
}

CurveChart build_chart(const AnalyticCurve& curve, double halfwidth) {
    if (!curve.unit_speed)
        throw Error("build_chart requires a unit-speed curve");
    const double len = curve.t1 - curve.t0;
    for (int i = 0; i <= 1000; ++i) {
        const double s = curve.t0 + len * i / 1000.0;
        if (std::abs(curve.speed(s) - 1.0) > 1e-10)
            throw Error("build_chart: curve speed deviates from 1 at s=" +
                        std::to_string(s));
    }
    const double radius = curve.position.radius();
    if (halfwidth <= 0.0) halfwidth = std::min(0.25 * radius, 0.1 * len);
    if (halfwidth > radius)
        throw Error("build_chart: halfwidth " + std::to_string(halfwidth) +
                    " exceeds the continuation radius " + std::to_string(radius));
    const double overhang = std::min(0.02 * len, 0.5 * (radius - halfwidth) + 1e-30);

    CurveChart chart(curve, halfwidth, overhang);

    // the map must stay orientation-preserving and injective on the collar
    const int nx = 64, ny = 16;
    std::vector<Vec2> img;
    img.reserve(size_t(nx + 1) * size_t(2 * ny + 1));
    for (int i = 0; i <= nx; ++i)
        for (int j = -ny; j <= ny; ++j) {
            const double xi = curve.t0 + len * i / nx;
            const double eta = halfwidth * j / ny;
            if (chart.gamma(xi, eta) <= 0.0)
                throw Error("build_chart: degenerate metric at xi=" + std::to_string(xi) +
                            " eta=" + std::to_string(eta));
            img.push_back(chart.map(xi, eta));
        }
    const double dxi = len / nx, deta = halfwidth / ny;
    const double sep = 0.4 * std::min(dxi, deta);  // gamma ~ 1 on the collar
    std::map<std::pair<long, long>, std::vector<size_t>> grid;
    const double cell = std::max(std::min(dxi, deta), 1e-12);
    for (size_t k = 0; k < img.size(); ++k)
        grid[{long(std::floor(img[k].x / cell)), long(std::floor(img[k].y / cell))}]
            .push_back(k);
    for (size_t k = 0; k < img.size(); ++k) {
        const long cx = long(std::floor(img[k].x / cell)),
                   cy = long(std::floor(img[k].y / cell));
        const long ik = long(k) / (2 * ny + 1), jk = long(k) % (2 * ny + 1);
        for (long dx = -1; dx <= 1; ++dx)
            for (long dy = -1; dy <= 1; ++dy) {
                auto it = grid.find({cx + dx, cy + dy});
                if (it == grid.end()) continue;
                for (size_t m : it->second) {
                    if (m <= k) continue;
                    const long im = long(m) / (2 * ny + 1), jm = long(m) % (2 * ny + 1);
                    if (std::abs(im - ik) <= 2 && std::abs(jm - jk) <= 2) continue;
                    if ((img[m] - img[k]).norm() < sep)
                        throw Error(
                            "build_chart: collar overlaps itself; chart points (" +
                            std::to_string(curve.t0 + dxi * ik) + "," +
                            std::to_string(deta * (jk - ny)) + ") and (" +
                            std::to_string(curve.t0 + dxi * im) + "," +
                            std::to_string(deta * (jm - ny)) +
                            ") map to nearly the same spot; shrink the halfwidth");
                }
            }
    }
    return chart;
}

Vec3 chart_to_cartesian(const CurveChart& chart, double xi, double eta, const Vec3& v) {
    const double g2 = std::pow(chart.gamma(xi, eta), 2);
    const Vec2 txi = chart.tau_xi(xi, eta), teta = chart.tau_eta(xi, eta);
    const Vec2 xy = (v.x * txi + v.y * teta) * (1.0 / g2);
    return {xy.x, xy.y, v.z / g2};
}

AnalyticCurve recentered(const AnalyticCurve& c) {
    const double delta = 0.5 * (c.t0 + c.t1);
    if (delta == 0.0) return c;
    const AnalyticFn pos = c.position;
    AnalyticCurve out = c;
    out.position = AnalyticFn::closed(
        {[pos, delta](cplx z) { return pos(z + delta); },
         [pos, delta](cplx z) { return pos.d1(z + delta); },
         [pos, delta](cplx z) { return pos.d2(z + delta); },
         [pos, delta](cplx z) { return pos.d3(z + delta); }},
        pos.radius());
    out.t0 = c.t0 - delta;
    out.t1 = c.t1 - delta;
    return out;
}

AnalyticCurve make_line(Vec2 start, double angle, double len) {
    const cplx p0(start.x, start.y);
    const cplx dir(std::cos(angle), std::sin(angle));
    AnalyticCurve c;
    c.position = AnalyticFn::closed(
        {[p0, dir](cplx z) { return p0 + dir * z; },
         [dir](cplx) { return dir; },
         [](cplx) { return cplx(0.0); },
         [](cplx) { return cplx(0.0); }},
        1e30);
    c.t0 = 0.0;
    c.t1 = len;
    c.unit_speed = true;
    return c;
}

AnalyticCurve make_circle_arc(double radius, double phi0, double arc_len, bool clockwise) {
    const double sgn = clockwise ? -1.0 : 1.0;
    const double R = radius;
    AnalyticCurve c;
    // W(s) = R exp(i(phi0 + sgn s / R)); clockwise gives curvature +1/R
    auto at = [R, phi0, sgn](cplx z, int order) {
        const cplx u = cplx(0, 1) * (phi0 + sgn * z / R);
        cplx val = R * std::exp(u);
        for (int k = 0; k < order; ++k) val *= cplx(0, 1) * sgn / R;
        return val;
    };
    c.position = AnalyticFn::closed(
        {[at](cplx z) { return at(z, 0); }, [at](cplx z) { return at(z, 1); },
         [at](cplx z) { return at(z, 2); }, [at](cplx z) { return at(z, 3); }},
        1e30);
    c.t0 = 0.0;
    c.t1 = arc_len;
    c.unit_speed = true;
    return c;
}

AnalyticCurve make_sine(double amplitude, double wavenumber, double x_span) {
    const double a = amplitude, b = wavenumber;
    AnalyticCurve c;
    c.position = AnalyticFn::closed(
        {[a, b](cplx z) { return z + cplx(0, 1) * a * std::sin(b * z); },
         [a, b](cplx z) { return 1.0 + cplx(0, 1) * a * b * std::cos(b * z); },
         [a, b](cplx z) { return -cplx(0, 1) * a * b * b * std::sin(b * z); },
         [a, b](cplx z) { return -cplx(0, 1) * a * b * b * b * std::cos(b * z); }},
        1e30);
    c.t0 = 0.0;
    c.t1 = x_span;
    c.unit_speed = false;
    return c;
}

AnalyticCurve make_ellipse_arc(double ax, double ay, double t0, double t1) {
    AnalyticCurve c;
    c.position = AnalyticFn::closed(
        {[ax, ay](cplx z) { return ax * std::cos(z) + cplx(0, 1) * ay * std::sin(z); },
         [ax, ay](cplx z) { return -ax * std::sin(z) + cplx(0, 1) * ay * std::cos(z); },
         [ax, ay](cplx z) { return -ax * std::cos(z) - cplx(0, 1) * ay * std::sin(z); },
         [ax, ay](cplx z) { return ax * std::sin(z) - cplx(0, 1) * ay * std::cos(z); }},
        1e30);
    c.t0 = t0;
    c.t1 = t1;
    c.unit_speed = false;
    return c;
}

}  // namespace calibra
