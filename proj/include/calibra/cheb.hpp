#pragma once

// Chebyshev interpolants with complex coefficients.  These double as the
// analytic-continuation workhorse: a series fitted to f on [a,b] evaluates
// off the real axis via Clenshaw with a complex argument, and converges in
// the Bernstein ellipse of the underlying function.  Derivatives and
// antiderivatives are coefficient operations, so continuation composes.

#include <functional>

#include "calibra/common.hpp"

namespace calibra {

class Cheb {
public:
    Cheb() = default;
    Cheb(std::vector<cplx> coeffs, double a, double b);

    // Adaptive fit: doubles the node count until the coefficient tail drops
    // below rtol (relative to the largest coefficient).  Throws Error when
    // max_n is not enough, naming the achieved tail.
    static Cheb fit(const std::function<cplx(double)>& f, double a, double b,
                    double rtol = 1e-13, int max_n = 4096);

    cplx operator()(cplx z) const;
    double real_at(double x) const { return (*this)(cplx(x, 0.0)).real(); }

    Cheb derivative() const;
    // Antiderivative vanishing at the left endpoint a.
    Cheb antiderivative() const;

    double a() const { return a_; }
    double b() const { return b_; }
    int degree() const { return static_cast<int>(coef_.size()) - 1; }
    const std::vector<cplx>& coeffs() const { return coef_; }

    // Half-height of the Bernstein ellipse estimated from coefficient decay
    // (Cauchy-Hadamard on the tail).  A lower bound on the distance from
    // [a,b] within which evaluation off the axis can be trusted.
    double analyticity_halfwidth() const;

private:
    std::vector<cplx> coef_;  // full convention: f = sum c_k T_k
    double a_ = -1.0, b_ = 1.0;
};

}  // namespace calibra
