#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "radonseis/chart.hpp"
#include "radonseis/quadrature.hpp"

using namespace radonseis;

TEST_CASE("chart at the pole") {
    std::vector<double> s{0.0};
    auto im = chart_to_sphere(s);
    CHECK(im.omega[0] == 0.0);
    CHECK(im.omega[1] == 1.0);
    CHECK(im.jacobian == 1.0);
}

TEST_CASE("one-dimensional chart point") {
    auto p = make_chart_point({1.0}, 3.0);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(p.omega[0] == doctest::Approx(-r).epsilon(1e-15));
    CHECK(p.omega[1] == doctest::Approx(r).epsilon(1e-15));
    CHECK(p.t == doctest::Approx(3.0 * r).epsilon(1e-15));
}

TEST_CASE("two-dimensional jacobian value") {
    std::vector<double> s{3.0, 4.0};
    auto im = chart_to_sphere(s);
    CHECK(im.jacobian == doctest::Approx(std::pow(26.0, -1.5)).epsilon(1e-15));
    auto imt = chart_to_sphere_t(s, 1.0);
    CHECK(imt.jacobian == doctest::Approx(std::pow(26.0, -2.0)).epsilon(1e-15));
}

TEST_CASE("image lies on the upper hemisphere") {
    std::vector<std::vector<double>> pts{{0.3}, {-5.0}, {0.1, -0.2}, {7.0, 3.0}, {1.0, 2.0, -3.0}};
    for (const auto& s : pts) {
        auto im = chart_to_sphere(s);
        double norm = 0.0;
        for (double w : im.omega) norm += w * w;
        CHECK(std::abs(norm - 1.0) < 1e-14);
        CHECK(im.omega.back() > 0.0);
    }
    CHECK_THROWS_AS(chart_to_sphere(std::vector<double>{}), config_error);
}

TEST_CASE("joint jacobian factors through the omega jacobian") {
    std::vector<double> s{0.7, -1.9};
    auto im = chart_to_sphere(s);
    auto imt = chart_to_sphere_t(s, 2.5);
    const double r = 1.0 / std::sqrt(1.0 + chart_norm_sq(s));
    CHECK(imt.jacobian == doctest::Approx(im.jacobian * r).epsilon(1e-15));
    CHECK(imt.t == doctest::Approx(2.5 * r).epsilon(1e-15));
}

TEST_CASE("jacobian matches finite differences of omega") {
    std::vector<double> s{0.4, -0.8};
    const double h = 1e-5;
    // columns of d omega / d s_j, restricted to the tangent plane; the
    // jacobian is sqrt(det(J^T J))
    std::vector<std::vector<double>> J(2);
    for (std::size_t j = 0; j < 2; ++j) {
        auto sp = s, sm = s;
        sp[j] += h;
        sm[j] -= h;
        auto a = chart_to_sphere(sp), b = chart_to_sphere(sm);
        for (std::size_t i = 0; i < 3; ++i) J[j].push_back((a.omega[i] - b.omega[i]) / (2.0 * h));
    }
    double g00 = 0.0, g01 = 0.0, g11 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        g00 += J[0][i] * J[0][i];
        g01 += J[0][i] * J[1][i];
        g11 += J[1][i] * J[1][i];
    }
    const double fd = std::sqrt(g00 * g11 - g01 * g01);
    CHECK(chart_to_sphere(s).jacobian == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("hemisphere measure from the chart") {
    // int over R of (1+s^2)^{-1} ds equals the half-circle measure pi
    auto f = [](std::span<const double> s) {
        return chart_to_sphere(s).jacobian; // n = 1: (1+s^2)^{-1}
    };
    QuadratureRule r = QuadratureRule::trapezoid({1000.0}, {200001});
    const double got = integrate_nd(f, r);
    CHECK(got == doctest::Approx(2.0 * std::atan(1000.0)).epsilon(1e-9));
    CHECK(got == doctest::Approx(M_PI).epsilon(2.0 / 1000.0 / M_PI + 1e-6));
}
