#include "calibra/cheb.hpp"

#include <algorithm>

namespace calibra {

Cheb::Cheb(std::vector<cplx> coeffs, double a, double b)
    : coef_(std::move(coeffs)), a_(a), b_(b) {
    if (coef_.empty()) coef_.push_back(0.0);
    if (!(b_ > a_)) throw Error("Cheb: empty interval");
}

namespace {

// Coefficients of the degree-n interpolant through Chebyshev-Lobatto samples.
// Direct O(n^2) transform; fits here run once per object, not in inner loops.
std::vector<cplx> lobatto_coeffs(const std::vector<cplx>& v) {
    const int n = static_cast<int>(v.size()) - 1;
    std::vector<cplx> c(v.size());
    for (int k = 0; k <= n; ++k) {
        cplx acc = 0.5 * (v[0] + (k % 2 == 0 ? v[n] : -v[n]));
        for (int j = 1; j < n; ++j)
            acc += v[static_cast<size_t>(j)] * std::cos(kPi * j * k / n);
        c[static_cast<size_t>(k)] = acc * (2.0 / n);
    }
    c[0] *= 0.5;
    c[static_cast<size_t>(n)] *= 0.5;
    return c;
}

}  // namespace

Cheb Cheb::fit(const std::function<cplx(double)>& f, double a, double b,
               double rtol, int max_n) {
    if (!(b > a)) throw Error("Cheb::fit: empty interval");
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    std::vector<cplx> vals;
    double tail = 0.0, scale = 0.0;
    for (int n = 16; n <= max_n; n *= 2) {
        vals.resize(static_cast<size_t>(n) + 1);
        for (int j = 0; j <= n; ++j)
            vals[static_cast<size_t>(j)] = f(mid + half * std::cos(kPi * j / n));
        std::vector<cplx> c = lobatto_coeffs(vals);
        scale = 0.0;
        for (const cplx& ck : c) scale = std::max(scale, std::abs(ck));
        if (scale == 0.0) return Cheb({cplx(0.0)}, a, b);
        tail = 0.0;
        for (size_t k = c.size() - 3; k < c.size(); ++k)
            tail = std::max(tail, std::abs(c[k]));
        if (tail <= rtol * scale) {
            // trim negligible high modes
            size_t last = c.size() - 1;
            while (last > 0 && std::abs(c[last]) <= 0.5 * rtol * scale) --last;
            c.resize(last + 1);
            return Cheb(std::move(c), a, b);
        }
    }
    throw Error("Cheb::fit: no convergence at max degree (tail " +
                std::to_string(tail / scale) + " vs rtol " + std::to_string(rtol) +
                "); function may be non-analytic on [" + std::to_string(a) + "," +
                std::to_string(b) + "]");
}

cplx Cheb::operator()(cplx z) const {
    const cplx s = (2.0 * z - (a_ + b_)) / (b_ - a_);
    cplx b1 = 0.0, b2 = 0.0;
    for (size_t k = coef_.size() - 1; k >= 1; --k) {
        cplx bk = coef_[k] + 2.0 * s * b1 - b2;
        b2 = b1;
        b1 = bk;
    }
    return coef_[0] + s * b1 - b2;
}

Cheb Cheb::derivative() const {
    const int n = degree();
    if (n == 0) return Cheb({cplx(0.0)}, a_, b_);
    std::vector<cplx> d(static_cast<size_t>(n) + 1, 0.0);
    d[static_cast<size_t>(n - 1)] = 2.0 * double(n) * coef_[static_cast<size_t>(n)];
    for (int k = n - 1; k >= 1; --k)
        d[static_cast<size_t>(k - 1)] =
            d[static_cast<size_t>(k + 1)] + 2.0 * double(k) * coef_[static_cast<size_t>(k)];
    d[0] *= 0.5;
    d.resize(static_cast<size_t>(n));
    const double scale = 2.0 / (b_ - a_);
    for (cplx& v : d) v *= scale;
    return Cheb(std::move(d), a_, b_);
}

Cheb Cheb::antiderivative() const {
    const int n = degree();
    std::vector<cplx> A(static_cast<size_t>(n) + 2, 0.0);
    A[1] += coef_[0];
    if (n >= 1) A[2] += coef_[1] * 0.25;
    for (int k = 2; k <= n; ++k) {
        A[static_cast<size_t>(k + 1)] += coef_[static_cast<size_t>(k)] / (2.0 * (k + 1));
        A[static_cast<size_t>(k - 1)] -= coef_[static_cast<size_t>(k)] / (2.0 * (k - 1));
    }
    const double half = 0.5 * (b_ - a_);
    for (cplx& v : A) v *= half;
    cplx at_left = 0.0;  // value at s=-1 with A[0]=0
    for (size_t k = 1; k < A.size(); ++k)
        at_left += (k % 2 == 0 ? A[k] : -A[k]);
    A[0] = -at_left;
    return Cheb(std::move(A), a_, b_);
}

double Cheb::analyticity_halfwidth() const {
    double scale = 0.0;
    for (const cplx& c : coef_) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) return 1e30;
    const double floor = 1e-13 * scale;
    size_t kfloor = coef_.size();
    for (size_t k = 0; k < coef_.size(); ++k) {
        if (std::abs(coef_[k]) > floor) kfloor = k + 1;
    }
    if (kfloor <= 4) return 1e30;  // effectively a low-degree polynomial
    const double rho = std::pow(1e13, 1.0 / double(kfloor));
    return 0.25 * (b_ - a_) * (rho - 1.0 / rho);
}

}  // namespace calibra
