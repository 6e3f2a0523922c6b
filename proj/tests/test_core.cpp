#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "radonseis/grid.hpp"
#include "radonseis/kahan.hpp"
#include "radonseis/parallel.hpp"
#include "radonseis/types.hpp"

using namespace radonseis;

TEST_CASE("grid nodes and step") {
    Grid1D g{-2.0, 2.0, 41};
    CHECK(g.step() == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(g.node(0) == -2.0);
    CHECK(g.node(40) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(g.nearest(0.04) == 20);
    CHECK(g.nearest(0.06) == 21);
    CHECK(g.contains(2.0));
    CHECK(!g.contains(2.0001));
    CHECK_NOTHROW(g.validate("g"));
    CHECK_THROWS_AS((Grid1D{1.0, -1.0, 5}).validate("bad"), config_error);
    CHECK_THROWS_AS((Grid1D{0.0, 1.0, 1}).validate("bad"), config_error);
}

TEST_CASE("flatten and unflatten are inverse") {
    std::vector<std::size_t> ext{3, 4, 5};
    for (std::size_t k = 0; k < 60; ++k) {
        auto idx = unflatten(k, ext);
        CHECK(flatten(idx, ext) == k);
    }
    CHECK(flatten({2, 3, 4}, ext) == 59);
}

TEST_CASE("compensated summation beats naive accumulation") {
    KahanSum acc;
    acc.add(1.0);
    double naive = 1.0;
    for (int i = 0; i < 100000; ++i) {
        acc.add(1e-17);
        naive += 1e-17;
    }
    CHECK(naive == 1.0); // the point of compensation
    CHECK(acc.value() == doctest::Approx(1.0 + 1e-12).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
    TransformParams p{2, {2.0, 3.0}, 2.0, {0.0, 1.0}};
    VanishingOrders m{{0, 1}};
    CHECK(validate_params(p, m).ok);

    SUBCASE("alpha must exceed 1") {
        p.alpha[0] = 1.0;
        CHECK(!validate_params(p, m).ok);
    }
    SUBCASE("beta must exceed 1") {
        p.beta = 0.5;
        CHECK(!validate_params(p, m).ok);
    }
    SUBCASE("orders must respect m_i >= alpha_i - 2") {
        m.m[1] = 0; // alpha = 3 needs m >= 1
        CHECK(!validate_params(p, m).ok);
    }
    SUBCASE("sizes must match n") {
        p.c.pop_back();
        CHECK(!validate_params(p, m).ok);
    }
    SUBCASE("negative order rejected") {
        m.m[0] = -1;
        CHECK(!validate_params(p, m).ok);
    }
}

TEST_CASE("sinogram rows and finiteness") {
    Sinogram s;
    s.grid.s_axes = {Grid1D{-1.0, 1.0, 3}};
    s.grid.u_axis = Grid1D{0.0, 1.0, 4};
    s.values.assign(12, 1.5);
    CHECK(s.s_cell_count() == 3);
    CHECK(s.u_row(2) == s.values.data() + 8);
    CHECK_NOTHROW(s.check_finite());
    s.values[7] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(s.check_finite(), error);
}

TEST_CASE("parallel_for is identical across thread counts and propagates errors") {
    std::vector<double> a(1000), b(1000);
    auto fill = [](std::vector<double>& v) {
        return [&v](std::size_t i) { v[i] = std::sin(static_cast<double>(i)); };
    };
    parallel_for(0, a.size(), 1, fill(a));
    parallel_for(0, b.size(), 7, fill(b));
    CHECK(a == b);

    CHECK_THROWS_AS(parallel_for(0, 100, 4,
                                 [](std::size_t i) {
                                     if (i == 57) throw error("boom");
                                 }),
                    error);
}
