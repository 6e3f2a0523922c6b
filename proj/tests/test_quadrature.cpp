#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "radonseis/quadrature.hpp"

using namespace radonseis;

namespace {

// adaptive Simpson, test-side oracle machinery only
double simpson(const std::function<double(double)>& f, double a, double b, double fa,
               double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b, double fa, double fm,
             double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_integral(const std::function<double(double)>& f, double a, double b,
                         double tol = 1e-12) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return adapt(f, a, b, fa, fm, fb, simpson(f, a, b, fa, fm, fb), tol, 40);
}

// pv oracle: symmetric excision with Richardson extrapolation in the
// excision radius (the excised piece is 2 g'(y0) eps + O(eps^3))
double pv_oracle(const std::function<double(double)>& g, double a, double b, double y0) {
    auto part = [&](double eps) {
        auto h = [&](double u) { return g(u) / (y0 - u); };
        return adaptive_integral(h, a, y0 - eps) + adaptive_integral(h, y0 + eps, b);
    };
    const double eps = 1e-4 * (b - a);
    const double e1 = part(eps), e2 = part(0.5 * eps);
    return 2.0 * e2 - e1;
}

} // namespace

TEST_CASE("gaussian integrals") {
    auto g1 = [](std::span<const double> x) { return std::exp(-x[0] * x[0]); };
    QuadratureRule r1 = QuadratureRule::trapezoid({10.0}, {2001});
    CHECK(integrate_nd(g1, r1) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-10));

    auto g2 = [](std::span<const double> x) {
        return std::exp(-x[0] * x[0] - x[1] * x[1]);
    };
    QuadratureRule r2 = QuadratureRule::trapezoid({8.0, 8.0}, {801, 801});
    CHECK(integrate_nd(g2, r2) == doctest::Approx(M_PI).epsilon(1e-8));

    auto odd = [](std::span<const double> x) { return x[0] * std::exp(-x[0] * x[0]); };
    CHECK(std::abs(integrate_nd(odd, r1)) < 1e-12);
}

TEST_CASE("gauss-legendre panels match the trapezoid value") {
    auto g = [](std::span<const double> x) { return std::exp(-x[0] * x[0]); };
    QuadratureRule r;
    r.scheme = QuadScheme::gauss_legendre_panels;
    r.radius = {10.0};
    r.nodes = {160};
    CHECK(integrate_nd(g, r) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("linearity of integrate_nd") {
    auto g = [](std::span<const double> x) { return std::exp(-x[0] * x[0]); };
    auto h = [](std::span<const double> x) { return std::cos(x[0]) * std::exp(-x[0] * x[0]); };
    auto combo = [&](std::span<const double> x) { return 2.5 * g(x) - 1.25 * h(x); };
    QuadratureRule r = QuadratureRule::trapezoid({9.0}, {1501});
    const double lhs = integrate_nd(combo, r);
    const double rhs = 2.5 * integrate_nd(g, r) - 1.25 * integrate_nd(h, r);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + 1.0));
}

TEST_CASE("separable fast path agrees with the generic path") {
    struct Sep {
        double s = 0.7;
        double axis_factor(std::size_t a, double t) const {
            return a == 0 ? t * t * std::exp(-t * t) : std::exp(-0.5 * t * t);
        }
        double coupled_factor(double t) const { return std::exp(-t * t); }
        double coupling_term(std::size_t a, double t) const {
            return (a == 0 ? s : -0.3) * t;
        }
        double coupling_offset() const { return 0.4; }
    };
    static_assert(SeparableIntegrand<Sep>);
    Sep sep;
    auto generic = [&](std::span<const double> x) {
        const double arg = sep.coupling_offset() + sep.coupling_term(0, x[0]) +
                           sep.coupling_term(1, x[1]);
        return sep.axis_factor(0, x[0]) * sep.axis_factor(1, x[1]) * sep.coupled_factor(arg);
    };
    QuadratureRule r = QuadratureRule::trapezoid({7.0, 7.0}, {401, 401});
    const double a = integrate_nd(sep, r);
    const double b = integrate_nd(generic, r);
    CHECK(a == doctest::Approx(b).epsilon(1e-13));
}

TEST_CASE("non-finite samples are reported") {
    auto bad = [](std::span<const double> x) {
        return x[0] == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    };
    QuadratureRule r = QuadratureRule::trapezoid({1.0}, {9});
    CHECK_THROWS_AS(integrate_nd(bad, r), error);
}

TEST_CASE("rule validation") {
    CHECK_THROWS_AS(integrate_nd([](std::span<const double>) { return 0.0; },
                                 QuadratureRule::trapezoid({-1.0}, {100})),
                    config_error);
    CHECK_THROWS_AS(integrate_nd([](std::span<const double>) { return 0.0; },
                                 QuadratureRule::trapezoid({1.0}, {4})),
                    config_error);
}

static std::vector<double> sample_grid(const Grid1D& g,
                                       const std::function<double(double)>& f) {
    std::vector<double> v(g.count);
    for (std::size_t i = 0; i < g.count; ++i) v[i] = f(g.node(i));
    return v;
}

TEST_CASE("pv: odd-kernel cancellation for constants and even functions") {
    Grid1D ug{-3.0, 5.0, 4001}; // grid symmetric about the pole y0 = 1
    auto ones = sample_grid(ug, [](double) { return 1.0; });
    CHECK(std::abs(pv_integral(ones, ug, 1.0)) < 1e-12);

    auto even = sample_grid(ug, [](double u) { return std::exp(-(u - 1.0) * (u - 1.0)); });
    CHECK(std::abs(pv_integral(even, ug, 1.0)) < 1e-10);
}

TEST_CASE("pv: exact for affine data") {
    Grid1D ug{-4.0, 10.0, 57};
    auto aff = sample_grid(ug, [](double u) { return 2.0 - 0.75 * u; });
    const double y0 = 3.17;
    const double want =
        (2.0 - 0.75 * y0) * std::log((y0 - ug.min) / (ug.max - y0)) + 0.75 * (ug.max - ug.min);
    CHECK(pv_integral(aff, ug, y0) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("pv: analytic rational case and refinement ratio") {
    auto f = [](double u) { return u / (1.0 + u * u); };
    Grid1D fine{-200.0, 200.0, 40001};
    const double truncated = -2.0 * std::atan(200.0); // exact over the span
    const double got = pv_integral(sample_grid(fine, f), fine, 0.0);
    CHECK(got == doctest::Approx(-M_PI).epsilon(1e-2));

    // halving the step must cut the truncated-span error at least 3x
    Grid1D coarse{-200.0, 200.0, 1251};
    Grid1D half{-200.0, 200.0, 2501};
    const double e1 = std::abs(pv_integral(sample_grid(coarse, f), coarse, 0.0) - truncated);
    const double e2 = std::abs(pv_integral(sample_grid(half, f), half, 0.0) - truncated);
    CHECK(e1 >= 3.0 * e2);
}

TEST_CASE("pv: gaussian case against the excision oracle") {
    auto f = [](double u) { return std::exp(-u * u); };
    Grid1D ug{-12.0, 12.0, 4801};
    const double got = pv_integral(sample_grid(ug, f), ug, 0.5);
    const double want = pv_oracle(f, -12.0, 12.0, 0.5);
    CHECK(got == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("pv: translation covariance") {
    auto f = [](double u) { return std::exp(-0.5 * u * u) * (1.0 + 0.3 * u); };
    const double delta = 2.3;
    Grid1D g1{-10.0, 10.0, 2001};
    Grid1D g2{-10.0 + delta, 10.0 + delta, 2001};
    auto shifted = sample_grid(g2, [&](double u) { return f(u - delta); });
    const double a = pv_integral(sample_grid(g1, f), g1, 0.7);
    const double b = pv_integral(shifted, g2, 0.7 + delta);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("pv: pole on a node uses the centered pair") {
    auto f = [](double u) { return std::exp(-u * u); };
    Grid1D ug{-8.0, 8.0, 1601}; // 0 is a node
    CHECK(std::abs(pv_integral(sample_grid(ug, f), ug, 0.0)) < 1e-10);
}

TEST_CASE("pv: margin errors") {
    Grid1D ug{0.0, 1.0, 101};
    std::vector<double> g(101, 1.0);
    CHECK_THROWS_AS(pv_integral(g, ug, -0.5), error);
    CHECK_THROWS_AS(pv_integral(g, ug, 1.5), error);
    CHECK_THROWS_AS(pv_integral(g, ug, 0.001), error); // within half a step of the end
    CHECK_THROWS_AS(pv_integral(std::vector<double>(100, 1.0), ug, 0.5), error);
}
