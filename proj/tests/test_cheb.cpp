#include <cmath>
#include <complex>

#include "calibra/cheb.hpp"
#include "calibra/analytic_fn.hpp"
#include "doctest.h"

using namespace calibra;

TEST_CASE("fit reproduces smooth functions to near machine precision") {
    auto series = Cheb::fit([](double x) { return std::sin(3.0 * x) * std::exp(x); },
                            -1.0, 2.0);
    for (double x = -1.0; x <= 2.0; x += 0.037) {
        CHECK(series.real_at(x) ==
              doctest::Approx(std::sin(3.0 * x) * std::exp(x)).epsilon(1e-12));
    }
}

TEST_CASE("complex evaluation continues the fit holomorphically") {
    // exp continues itself; compare against std::exp off the axis
    auto series = Cheb::fit([](double x) { return std::exp(x); }, 0.0, 1.0);
    const cplx z(0.4, 0.2);
    CHECK(std::abs(series(z) - std::exp(z)) < 1e-11);
}

TEST_CASE("derivative and antiderivative invert each other") {
    auto series = Cheb::fit([](double x) { return std::cos(2.0 * x) + x * x; }, -0.5, 1.5);
    auto back = series.derivative().antiderivative();
    for (double x = -0.5; x <= 1.5; x += 0.1) {
        CHECK(back.real_at(x) - back.real_at(-0.5) ==
              doctest::Approx(series.real_at(x) - series.real_at(-0.5)).epsilon(1e-11));
    }
}

TEST_CASE("derivative matches the analytic derivative") {
    auto series = Cheb::fit([](double x) { return std::sin(x); }, -1.0, 1.0);
    auto d = series.derivative();
    for (double x = -1.0; x <= 1.0; x += 0.09)
        CHECK(d.real_at(x) == doctest::Approx(std::cos(x)).epsilon(1e-11));
}

TEST_CASE("fit rejects functions it cannot resolve") {
    // |x - pi/8| has a kink; the coefficient tail never decays
    CHECK_THROWS_AS(Cheb::fit([](double x) { return std::abs(x - 0.392699); }, -1.0, 1.0),
                    Error);
}

TEST_CASE("analyticity halfwidth reflects the nearest singularity") {
    // 1/(1+25x^2) has poles at +-i/5
    auto series = Cheb::fit([](double x) { return 1.0 / (1.0 + 25.0 * x * x); }, -1.0, 1.0);
    const double hw = series.analyticity_halfwidth();
    CHECK(hw > 0.02);
    CHECK(hw < 0.2);
}

TEST_CASE("polynomial closures evaluate exactly") {
    auto f = AnalyticFn::poly({1.0, -2.0, 0.5});  // 1 - 2x + x^2/2
    CHECK(f.real_at(3.0) == doctest::Approx(1.0 - 6.0 + 4.5));
    CHECK(f.d1(cplx(2.0, 0.0)).real() == doctest::Approx(-2.0 + 2.0));
    CHECK(f.d2(cplx(0.0, 0.0)).real() == doctest::Approx(1.0));
}

TEST_CASE("AnalyticFn::fit exposes derivatives of the continuation") {
    auto f = AnalyticFn::fit([](double x) { return std::exp(2.0 * x); }, 0.0, 1.0);
    const cplx z(0.5, 0.05);
    CHECK(std::abs(f(z) - std::exp(2.0 * z)) < 1e-10);
    CHECK(std::abs(f.d1(z) - 2.0 * std::exp(2.0 * z)) < 1e-8);
    CHECK(std::abs(f.d2(z) - 4.0 * std::exp(2.0 * z)) < 1e-6);
}

TEST_CASE("antiderivative_on anchors the base point") {
    auto f = AnalyticFn::fit([](double x) { return 3.0 * x * x; }, -1.0, 2.0);
    auto F = f.antiderivative_on(-1.0, 2.0, 0.0);
    CHECK(F.real_at(0.0) == doctest::Approx(0.0));
    CHECK(F.real_at(1.5) == doctest::Approx(1.5 * 1.5 * 1.5).epsilon(1e-11));
}

TEST_CASE("derivative() result evaluates as the derivative, not the parent") {
    // plain operator() must honor the derivative shift, same as d1/d2
    const auto f = AnalyticFn::poly({5.0, 1.0, 2.0});
    const auto fp = f.derivative();
    CHECK(fp.real_at(0.5) == doctest::Approx(1.0 + 4.0 * 0.5));
    CHECK(fp.real_at(0.5) == doctest::Approx(f.d1(cplx(0.5, 0)).real()));
    CHECK(fp.derivative().real_at(-0.3) == doctest::Approx(4.0));
    const auto g = AnalyticFn::closed(
        {[](cplx z) { return std::exp(z); }, [](cplx z) { return std::exp(z); },
         [](cplx z) { return std::exp(z); }, [](cplx z) { return std::exp(z); }},
        10.0);
    CHECK(g.derivative()(cplx(0.2, 0.1)).real() ==
          doctest::Approx(std::exp(cplx(0.2, 0.1)).real()));
}
