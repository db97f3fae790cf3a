#include "uwroute/qcore.hpp"
#include "uwroute/world.hpp"

#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace uwroute;
using namespace uwroute::qcore;

TEST_CASE("energy cost")
{
    CHECK(energy_cost(100.0, 100.0) == 0.0);
    CHECK(energy_cost(0.0, 100.0) == 1.0);
    CHECK(energy_cost(50.0, 100.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(energy_cost(101.0, 100.0), std::domain_error);
    CHECK_THROWS_AS(energy_cost(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(energy_cost(-1.0, 10.0), std::domain_error);
}

TEST_CASE("depth cost")
{
    CHECK(depth_cost(200.0, 50.0, 150.0) == doctest::Approx(0.0));
    CHECK(depth_cost(100.0, 100.0, 150.0) == doctest::Approx(0.5));
    CHECK(depth_cost(50.0, 200.0, 150.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(depth_cost(0.0, 151.0, 150.0), std::domain_error);
    CHECK_THROWS_AS(depth_cost(0.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("reward")
{
    NodeState s;
    s.initial_energy_J = 100.0;
    s.residual_energy_J = 100.0;
    s.depth_m = 200.0;
    CHECK(reward(s, {0.0, 50.0, 100.0}, 150.0) == doctest::Approx(0.0));

    s.residual_energy_J = 0.0;
    s.depth_m = 50.0;
    CHECK(reward(s, {0.0, 200.0, 0.0}, 150.0) == doctest::Approx(-3.0));

    s.residual_energy_J = 50.0;
    s.depth_m = 100.0;
    CHECK(reward(s, {0.0, 100.0, 100.0}, 150.0) == doctest::Approx(-1.0));
}

TEST_CASE("q update")
{
    CHECK(q_update(-5.0, -1.0, -3.0, {0.0, 1.0}) == doctest::Approx(-1.0));
    CHECK(q_update(-2.0, -1.0, -1.0, {0.8, 0.5}) == doctest::Approx(-1.9));
    for (double a : {0.1, 0.5, 1.0})
    {
        const double fixed = -1.0 + 0.8 * -2.0;
        CHECK(q_update(fixed, -1.0, -2.0, {0.8, a}) == doctest::Approx(fixed));
    }
}

TEST_CASE("q update is monotone and stays in its bound")
{
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const QParams p{0.8, 0.5};
    const double lo = q_lower_bound(p);
    CHECK(lo == doctest::Approx(-15.0));
    double q = 0.0;
    for (int i = 0; i < 10000; ++i)
    {
        const double r = -3.0 * unit(gen);
        const double v = lo * unit(gen);
        const double base = q_update(q, r, v, p);
        CHECK(q_update(q + 0.1, r, v, p) >= base);
        CHECK(q_update(q, std::min(0.0, r + 0.1), v, p) >= base);
        CHECK(q_update(q, r, std::min(0.0, v + 0.1), p) >= base);
        q = base;
        REQUIRE(q <= 0.0);
        REQUIRE(q >= lo - 1e-12);
    }
}

TEST_CASE("v value")
{
    CHECK(v_value({{1, -1.0}, {2, -2.0}}) == -1.0);
    CHECK(v_value({}) == 0.0);
    CHECK(v_value({{7, -0.3}}) == -0.3);
}

TEST_CASE("parameter ranges")
{
    CHECK_THROWS((QParams{1.5, 0.5}.validate()));
    CHECK_THROWS((QParams{0.8, 0.0}.validate()));
    CHECK_NOTHROW((QParams{1.0, 1.0}.validate()));
    CHECK(std::isinf(q_lower_bound({1.0, 0.5})));
}
