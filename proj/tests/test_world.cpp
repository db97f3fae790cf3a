#include "uwroute/world.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

using namespace uwroute;

TEST_CASE("deployment respects counts, roles and layers")
{
    Rng rng(7, 0);
    DeploymentSpec spec{{500.0, 500.0, 500.0}, 100, 5, 5, 100.0};
    const auto nodes = deploy(spec, rng);
    REQUIRE(nodes.size() == 105);
    int sources = 0;
    int sinks = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
    {
        const auto& n = nodes[i];
        CHECK(n.id == i);
        CHECK(spec.region.contains(n.position));
        CHECK(n.depth_m == doctest::Approx(500.0 - n.position.z));
        CHECK(n.residual_energy_J == 100.0);
        if (n.kind == NodeKind::Source)
        {
            ++sources;
            CHECK(n.position.z == 0.0);
            CHECK(n.depth_m == 500.0);
        }
        if (n.kind == NodeKind::Sink)
        {
            ++sinks;
            CHECK(n.depth_m == 0.0);
            CHECK(n.id >= 100);
        }
    }
    CHECK(sources == 5);
    CHECK(sinks == 5);
}

TEST_CASE("minimal deployment and determinism")
{
    Rng a(3, 0);
    const auto two = deploy({{100.0, 100.0, 100.0}, 1, 1, 1, 10.0}, a);
    REQUIRE(two.size() == 2);
    CHECK(two[0].kind == NodeKind::Source);
    CHECK(two[0].depth_m == 100.0);
    CHECK(two[1].kind == NodeKind::Sink);
    CHECK(two[1].depth_m == 0.0);

    Rng r1(11, 0);
    Rng r2(11, 0);
    const auto x = deploy({}, r1);
    const auto y = deploy({}, r2);
    REQUIRE(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        CHECK(x[i].position == y[i].position);
    }
}

TEST_CASE("deployment rejects bad specs")
{
    Rng rng(1, 0);
    CHECK_THROWS_AS(deploy({{0.0, 10.0, 10.0}, 5, 1, 1, 1.0}, rng), std::invalid_argument);
    CHECK_THROWS_AS(deploy({{10.0, 10.0, 10.0}, 0, 1, 1, 1.0}, rng), std::invalid_argument);
    CHECK_THROWS_AS(deploy({{10.0, 10.0, 10.0}, 2, 3, 1, 1.0}, rng), std::invalid_argument);
}

TEST_CASE("random walk step length and reflection")
{
    const Region box{100.0, 100.0, 100.0};
    Rng rng(5, 0);
    Vec3 heading = random_direction(rng);
    CHECK(std::hypot(heading.x, heading.y, heading.z) == doctest::Approx(1.0));

    Vec3 p{50.0, 50.0, 50.0};
    CHECK(random_walk_step(p, heading, 0.0, 1.0, box) == p);

    Vec3 h = heading;
    const Vec3 q = random_walk_step(p, h, 3.0, 1.0, box);
    CHECK(distance(p, q) == doctest::Approx(3.0));

    // 2 m from the +x wall, moving 5 m towards it: lands 3 m back inside
    Vec3 toward{1.0, 0.0, 0.0};
    const Vec3 r = random_walk_step({98.0, 10.0, 10.0}, toward, 5.0, 1.0, box);
    CHECK(r.x == doctest::Approx(97.0));
    CHECK(r.y == 10.0);
    CHECK(toward.x == -1.0);

    Vec3 down{0.0, 0.0, -1.0};
    const Vec3 s = random_walk_step({1.0, 1.0, 1.0}, down, 4.0, 1.0, box);
    CHECK(s.z == doctest::Approx(3.0));
    CHECK(down.z == 1.0);

    NodeState n;
    n.position = {50.0, 50.0, 50.0};
    for (int i = 0; i < 2000; ++i)
    {
        n.position = random_walk_step(n, 5.0, 7.0, box, rng);
        REQUIRE(box.contains(n.position));
    }
}

TEST_CASE("neighbors in range agree with brute force")
{
    Rng rng(21, 0);
    const auto nodes = deploy({{300.0, 300.0, 300.0}, 45, 5, 5, 1.0}, rng);
    for (std::size_t i = 0; i < nodes.size(); ++i)
    {
        const auto got = neighbors_in_range(nodes, i, 150.0);
        std::vector<NodeId> expect;
        for (std::size_t j = 0; j < nodes.size(); ++j)
        {
            const double dx = nodes[i].position.x - nodes[j].position.x;
            const double dy = nodes[i].position.y - nodes[j].position.y;
            const double dz = nodes[i].position.z - nodes[j].position.z;
            if (j != i && dx * dx + dy * dy + dz * dz <= 150.0 * 150.0)
            {
                expect.push_back(static_cast<NodeId>(j));
            }
        }
        CHECK(got == expect);
        for (NodeId j : got)
        {
            const auto back = neighbors_in_range(nodes, j, 150.0);
            CHECK(std::find(back.begin(), back.end(), nodes[i].id) != back.end());
        }
    }

    std::vector<NodeState> pair(2);
    pair[1].id = 1;
    pair[1].position = {151.0, 0.0, 0.0};
    CHECK(neighbors_in_range(pair, 0, 150.0).empty());
    pair[1].position = {150.0, 0.0, 0.0};
    CHECK(neighbors_in_range(pair, 0, 150.0).size() == 1);
}

TEST_CASE("neighbor knowledge table")
{
    NodeState n;
    n.id = 4;
    update_neighbor_knowledge(n, 9, {-0.5, 30.0, 80.0}, 1.0);
    REQUIRE(n.neighbors.count(9) == 1);
    update_neighbor_knowledge(n, 9, {-0.7, 32.0, 79.0}, 5.0);
    CHECK(n.neighbors.size() == 1);
    CHECK(n.neighbors.at(9).knowledge.v_value == -0.7);
    CHECK(n.neighbors.at(9).last_heard == 5.0);
    update_neighbor_knowledge(n, 2, {0.0, 0.0, 1.0}, 2.0);
    evict_stale_neighbors(n, 23.0, 20.0);
    CHECK(n.neighbors.count(2) == 0);
    CHECK(n.neighbors.count(9) == 1);
    CHECK_THROWS_AS(update_neighbor_knowledge(n, 4, {}, 0.0), std::invalid_argument);
}

TEST_CASE("bounded recent-key cache")
{
    RecentKeys keys(3);
    CHECK(keys.insert({1, 1}));
    CHECK_FALSE(keys.insert({1, 1}));
    keys.insert({1, 2});
    keys.insert({1, 3});
    keys.insert({1, 4});
    CHECK(keys.size() == 3);
    CHECK_FALSE(keys.contains({1, 1}));
    CHECK(keys.contains({1, 4}));
    CHECK(RecentKeys{}.capacity() == 1024);
}

TEST_CASE("csv dumps")
{
    Rng rng(2, 0);
    auto nodes = deploy({{100.0, 100.0, 100.0}, 3, 1, 1, 5.0}, rng);
    nodes[1].q_table[2] = -0.25;
    std::ostringstream a;
    write_deployment_csv(a, nodes);
    const std::string dep = a.str();
    CHECK(dep.rfind("id,kind,x,y,z,depth,energy\n", 0) == 0);
    CHECK(std::count(dep.begin(), dep.end(), '\n') == 5);
    std::ostringstream b;
    write_qtable_csv(b, nodes);
    CHECK(b.str() == "node,neighbor,q\n1,2,-0.25\n");
}
