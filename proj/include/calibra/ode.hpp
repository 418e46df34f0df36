#pragma once

// Embedded Dormand-Prince 5(4) with adaptive steps.  States are doubles,
// complex doubles, or std::array of either; the same template serves the
// real characteristic systems and the complex continuation paths.

#include <array>
#include <cstddef>

#include "calibra/common.hpp"

namespace calibra {

inline double ode_norm(double v) { return std::abs(v); }
inline double ode_norm(const cplx& v) { return std::abs(v); }
template <class T, std::size_t N>
double ode_norm(const std::array<T, N>& a) {
    double m = 0.0;
    for (const T& v : a) m = std::max(m, ode_norm(v));
    return m;
}

inline double ode_axpy(double y, double h, double k) { return y + h * k; }
inline cplx ode_axpy(const cplx& y, double h, const cplx& k) { return y + h * k; }
template <class T, std::size_t N>
std::array<T, N> ode_axpy(const std::array<T, N>& y, double h, const std::array<T, N>& k) {
    std::array<T, N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h * k[i];
    return out;
}

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    long max_steps = 2000000;
};

// Integrates y' = f(t, y) from t0 to t1 (either direction).  f must be
// callable as State(double t, const State& y).  Throws Error when the step
// size underflows, which in practice means the solution blows up.
template <class State, class F>
State ode_integrate(F&& f, State y, double t0, double t1, const OdeOptions& opt = {}) {
    if (t1 == t0) return y;
    const double dir = (t1 > t0) ? 1.0 : -1.0;
    double t = t0;
    double h = dir * std::max(1e-8, std::abs(t1 - t0) / 64.0);
    long steps = 0;
    State k1 = f(t, y);
    while (dir * (t1 - t) > 0.0) {
        // accumulated t can land within rounding of t1; the clamped final
        // step would then sit below floating resolution
        if (dir * (t1 - t) <= 1e-15 * (1.0 + std::abs(t1))) break;
        if (++steps > opt.max_steps)
            throw Error("ode_integrate: step limit exceeded at t=" + std::to_string(t));
        if (dir * (t + h) > dir * t1) h = t1 - t;

        State k2 = f(t + h * 0.2, ode_axpy(y, h * 0.2, k1));
        State y3 = ode_axpy(ode_axpy(y, h * (3.0 / 40.0), k1), h * (9.0 / 40.0), k2);
        State k3 = f(t + h * 0.3, y3);
        State y4 = ode_axpy(ode_axpy(ode_axpy(y, h * (44.0 / 45.0), k1),
                                     h * (-56.0 / 15.0), k2),
                            h * (32.0 / 9.0), k3);
        State k4 = f(t + h * 0.8, y4);
        State y5 = ode_axpy(
            ode_axpy(ode_axpy(ode_axpy(y, h * (19372.0 / 6561.0), k1),
                              h * (-25360.0 / 2187.0), k2),
                     h * (64448.0 / 6561.0), k3),
            h * (-212.0 / 729.0), k4);
        State k5 = f(t + h * (8.0 / 9.0), y5);
        State y6 = ode_axpy(
            ode_axpy(ode_axpy(ode_axpy(ode_axpy(y, h * (9017.0 / 3168.0), k1),
                                       h * (-355.0 / 33.0), k2),
                              h * (46732.0 / 5247.0), k3),
                     h * (49.0 / 176.0), k4),
            h * (-5103.0 / 18656.0), k5);
        State k6 = f(t + h, y6);
        State ynew = ode_axpy(
            ode_axpy(ode_axpy(ode_axpy(ode_axpy(y, h * (35.0 / 384.0), k1),
                                       h * (500.0 / 1113.0), k3),
                              h * (125.0 / 192.0), k4),
                     h * (-2187.0 / 6784.0), k5),
            h * (11.0 / 84.0), k6);
        State k7 = f(t + h, ynew);

        // y5th - y4th embedded difference
        State err = ode_axpy(
            ode_axpy(
                ode_axpy(ode_axpy(ode_axpy(ode_axpy(y, h * (35.0 / 384.0 - 5179.0 / 57600.0), k1),
                                           h * (500.0 / 1113.0 - 7571.0 / 16695.0), k3),
                                  h * (125.0 / 192.0 - 393.0 / 640.0), k4),
                         h * (-2187.0 / 6784.0 + 92097.0 / 339200.0), k5),
                h * (11.0 / 84.0 - 187.0 / 2100.0), k6),
            h * (-1.0 / 40.0), k7);
        // err currently holds y + (difference); subtract y componentwise
        double enorm = ode_norm(ode_axpy(err, -1.0, y));
        const double scale = opt.atol + opt.rtol * std::max(ode_norm(y), ode_norm(ynew));
        const double ratio = enorm / scale;
        if (ratio <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;
        }
        double fac = (ratio > 0.0) ? 0.9 * std::pow(ratio, -0.2) : 5.0;
        fac = std::min(5.0, std::max(0.2, fac));
        h *= fac;
        if (std::abs(h) < 1e-15 * (1.0 + std::abs(t)))
            throw Error("ode_integrate: step underflow at t=" + std::to_string(t) +
                        " (solution blows up)");
    }
    return y;
}

// Integrates through a monotone sequence of times, invoking cb(t_i, y_i) at
// every entry (including times[0] with the initial state).
template <class State, class F, class CB>
void ode_integrate_path(F&& f, State y, const std::vector<double>& times, CB&& cb,
                        const OdeOptions& opt = {}) {
    if (times.empty()) return;
    cb(times[0], y);
    for (size_t i = 1; i < times.size(); ++i) {
        y = ode_integrate(f, y, times[i - 1], times[i], opt);
        cb(times[i], y);
    }
}

}  // namespace calibra
