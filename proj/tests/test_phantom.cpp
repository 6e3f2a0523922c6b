#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "radonseis/phantom.hpp"

using namespace radonseis;

TEST_CASE("poly-gaussian evaluation and closed-form derivative") {
    PolyGauss g;
    g.coef = {1.0, -0.5, 2.0}; // 1 - t/2 + 2t^2
    g.width = 0.8;

    auto ref = [&](double t) {
        return (1.0 - 0.5 * t + 2.0 * t * t) * std::exp(-(t / 0.8) * (t / 0.8));
    };
    for (double t : {-1.7, -0.3, 0.0, 0.42, 2.1})
        CHECK(g.eval(t) == doctest::Approx(ref(t)).epsilon(1e-15));

    PolyGauss d = g.derivative();
    for (double t : {-1.1, 0.15, 0.9}) {
        const double h = 1e-5;
        const double fd = (g.eval(t + h) - g.eval(t - h)) / (2.0 * h);
        CHECK(d.eval(t) == doctest::Approx(fd).epsilon(1e-8));
    }

    PolyGauss d3 = g.derivative(3);
    CHECK(d3.eval(0.37) == doctest::Approx(g.derivative().derivative().derivative().eval(0.37))
                               .epsilon(1e-15));
}

TEST_CASE("support radius bounds the tail") {
    PolyGauss g = PolyGauss::monomial(8, 1.3);
    const double r = g.support_radius(1e-16);
    double peak = 0.0;
    for (double t = 0.0; t < r; t += 0.01) peak = std::max(peak, std::abs(g.eval(t)));
    CHECK(std::abs(g.eval(r)) <= 1e-12 * peak);
    CHECK(std::abs(g.eval(1.2 * r)) <= 1e-12 * peak);
}

TEST_CASE("make_phantom picks minimal exponents with the right parity") {
    TransformParams p{2, {2.0, 3.0}, std::nullopt, {0.5, -1.0}};
    VanishingOrders m{{0, 2}};

    SUBCASE("free parity for the signed-power space") {
        Phantom ph = make_phantom(p, m, PhantomSpace::S_cm, std::vector<double>{1.0, 1.0}, 1.0);
        CHECK(ph.axis_profiles[0].exponent == 1);
        CHECK(ph.axis_profiles[1].exponent == 3);
        CHECK(ph.y_profile.exponent == 0);
    }
    SUBCASE("even exponents for the absolute-power space") {
        Phantom ph = make_phantom(p, m, PhantomSpace::S_cm_P, std::vector<double>{1.0, 1.0}, 1.0);
        CHECK(ph.axis_profiles[0].exponent == 2);
        CHECK(ph.axis_profiles[1].exponent == 4);
        CHECK(ph.y_profile.exponent == 0);
    }
    SUBCASE("vanishing even y factor for the root-weighted space") {
        p.beta = 2.0;
        Phantom ph = make_phantom(p, m, PhantomSpace::S_cm_R, std::vector<double>{1.0, 1.0}, 1.0);
        CHECK(ph.axis_profiles[0].exponent == 2);
        CHECK(ph.axis_profiles[1].exponent == 4);
        CHECK(ph.y_profile.exponent == 2);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(
            make_phantom(p, m, PhantomSpace::S_cm_R, std::vector<double>{1.0, 1.0}, 1.0),
            config_error); // beta missing
        CHECK_THROWS_AS(make_phantom(p, m, PhantomSpace::S_cm, std::vector<double>{1.0}, 1.0),
                        config_error); // width count
        VanishingOrders bad{{0, 0}}; // alpha = 3 needs m >= 1
        CHECK_THROWS_AS(
            make_phantom(p, bad, PhantomSpace::S_cm, std::vector<double>{1.0, 1.0}, 1.0),
            config_error);
    }
}

TEST_CASE("generated phantoms certify in their own space") {
    TransformParams p{2, {2.0, 3.0}, 2.0, {0.5, -1.0}};
    VanishingOrders m{{1, 2}};
    for (PhantomSpace space : {PhantomSpace::S_cm, PhantomSpace::S_cm_P, PhantomSpace::S_cm_R}) {
        Phantom ph = make_phantom(p, m, space, std::vector<double>{0.9, 1.1}, 0.8);
        auto rep = certify_membership(ph, 7);
        for (const auto& fail : rep.failures) INFO(fail);
        CHECK(rep.ok);
    }
}

TEST_CASE("certification detects violations") {
    TransformParams p{1, {2.0}, 2.0, {0.0}};
    VanishingOrders m{{1}};

    SUBCASE("asymmetric function fails the even space") {
        auto f = [](std::span<const double> x, double y) {
            return (x[0] * x[0] + 0.2 * x[0] * x[0] * x[0]) * std::exp(-x[0] * x[0] - y * y);
        };
        auto rep = certify_membership_fn(f, p, m, PhantomSpace::S_cm_P);
        CHECK(!rep.ok);
        // the same function is fine in the parity-free space
        CHECK(certify_membership_fn(f, p, m, PhantomSpace::S_cm).ok);
    }
    SUBCASE("nonzero value on y = 0 fails the root-weighted space") {
        auto f = [](std::span<const double> x, double y) {
            return x[0] * x[0] * std::exp(-x[0] * x[0] - y * y);
        };
        auto rep = certify_membership_fn(f, p, m, PhantomSpace::S_cm_R);
        CHECK(!rep.ok);
    }
    SUBCASE("odd y part fails the root-weighted space") {
        auto f = [](std::span<const double> x, double y) {
            return x[0] * x[0] * y * std::exp(-x[0] * x[0] - y * y);
        };
        auto rep = certify_membership_fn(f, p, m, PhantomSpace::S_cm_R);
        CHECK(!rep.ok);
    }
    SUBCASE("exponent equal to the order fails the derivative check") {
        auto f = [](std::span<const double> x, double y) {
            return x[0] * std::exp(-x[0] * x[0] - y * y); // d/dx at 0 is nonzero
        };
        auto rep = certify_membership_fn(f, p, m, PhantomSpace::S_cm);
        CHECK(!rep.ok);
    }
    SUBCASE("off-center symmetry is what counts") {
        TransformParams pc{1, {2.0}, std::nullopt, {1.5}};
        auto f = [](std::span<const double> x, double y) {
            const double d = x[0] - 1.5;
            return d * d * d * d * std::exp(-d * d - y * y);
        };
        CHECK(certify_membership_fn(f, pc, m, PhantomSpace::S_cm_P).ok);
    }
}

TEST_CASE("phantom_dy gives the exact y derivative") {
    TransformParams p{1, {2.0}, std::nullopt, {0.3}};
    VanishingOrders m{{1}};
    Phantom ph = make_phantom(p, m, PhantomSpace::S_cm_P, std::vector<double>{1.0}, 0.7);
    SeparableFunction d1 = phantom_dy(ph, 1);
    SeparableFunction d2 = phantom_dy(ph, 2);

    std::vector<double> x{0.9};
    for (double y : {-1.3, -0.2, 0.6}) {
        const double h = 1e-5;
        auto at = [&](double yy) { return ph.eval(x, yy); };
        const double fd1 = (at(y + h) - at(y - h)) / (2.0 * h);
        const double fd2 = (at(y + h) - 2.0 * at(y) + at(y - h)) / (h * h);
        CHECK(d1.eval(x, y) == doctest::Approx(fd1).epsilon(1e-7));
        CHECK(d2.eval(x, y) == doctest::Approx(fd2).epsilon(1e-5));
    }
}
