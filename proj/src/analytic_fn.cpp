#include "calibra/analytic_fn.hpp"

namespace calibra {

AnalyticFn AnalyticFn::closed(std::vector<Closure> derivatives, double radius) {
    if (derivatives.empty()) throw Error("AnalyticFn: no closures given");
    AnalyticFn fn;
    fn.levels_ = std::make_shared<std::vector<Closure>>(std::move(derivatives));
    fn.radius_ = radius;
    return fn;
}

AnalyticFn AnalyticFn::constant(double value) {
    return poly({value});
}

AnalyticFn AnalyticFn::poly(const std::vector<double>& coeffs) {
    std::vector<std::vector<double>> tiers;
    tiers.push_back(coeffs.empty() ? std::vector<double>{0.0} : coeffs);
    for (int k = 0; k < 4; ++k) {
        const std::vector<double>& prev = tiers.back();
        std::vector<double> der;
        for (size_t i = 1; i < prev.size(); ++i) der.push_back(double(i) * prev[i]);
        if (der.empty()) der.push_back(0.0);
        tiers.push_back(std::move(der));
    }
    std::vector<Closure> levels;
    for (const auto& c : tiers)
        levels.push_back([c](cplx z) {
            cplx acc = 0.0;
            for (size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
            return acc;
        });
    return closed(std::move(levels), 1e30);
}

AnalyticFn AnalyticFn::from_cheb(const Cheb& series, int extra_derivatives) {
    std::vector<Closure> levels;
    Cheb cur = series;
    const double radius = series.analyticity_halfwidth();
    for (int k = 0; k <= extra_derivatives; ++k) {
        Cheb snapshot = cur;
        levels.push_back([snapshot](cplx z) { return snapshot(z); });
        cur = cur.derivative();
    }
    return closed(std::move(levels), radius);
}

AnalyticFn AnalyticFn::fit(const std::function<cplx(double)>& f, double a, double b,
                           int extra_derivatives) {
    return from_cheb(Cheb::fit(f, a, b), extra_derivatives);
}

cplx AnalyticFn::deriv_at(size_t k, cplx z) const {
    const size_t idx = shift_ + k;
    if (!levels_ || idx >= levels_->size())
        throw Error("AnalyticFn: derivative order " + std::to_string(k) +
                    " not available");
    return (*levels_)[idx](z);
}

AnalyticFn AnalyticFn::derivative() const {
    if (!levels_ || shift_ + 1 >= levels_->size())
        throw Error("AnalyticFn::derivative: no more derivative closures");
    AnalyticFn fn = *this;
    fn.shift_ += 1;
    return fn;
}

AnalyticFn AnalyticFn::antiderivative_on(double a, double b, double base) const {
    const AnalyticFn self = *this;
    Cheb series = Cheb::fit([&self](double x) { return self(cplx(x, 0)); }, a, b);
    Cheb anti = series.antiderivative();
    const cplx offset = anti(cplx(base, 0));
    // keep the original radius: the fit interval does not shrink analyticity
    std::vector<Closure> levels;
    levels.push_back([anti, offset](cplx z) { return anti(z) - offset; });
    Cheb cur = series;
    for (int k = 0; k < 3; ++k) {
        Cheb snapshot = cur;
        levels.push_back([snapshot](cplx z) { return snapshot(z); });
        if (k < 2) cur = cur.derivative();
    }
    AnalyticFn fn = closed(std::move(levels), 0.0);
    fn.radius_ = std::min(radius_, anti.analyticity_halfwidth());
    return fn;
}

}  // namespace calibra
