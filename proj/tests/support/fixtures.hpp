// Small hand-built topologies and an independent Monte-Carlo forwarding
// oracle for checking the analytical model.

#ifndef UWTEST_FIXTURES_HPP
#define UWTEST_FIXTURES_HPP

#include "uwroute/analysis.hpp"
#include "uwroute/config.hpp"
#include "uwroute/world.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace uwtest
{

using uwroute::NodeId;
using uwroute::Vec3;
using uwroute::analysis::StaticTopology;
using uwroute::analysis::TopoNode;

inline TopoNode
topo_node(NodeId id, Vec3 pos, double surface_z, bool sink = false, double rate = 0.0)
{
    TopoNode n;
    n.id = id;
    n.position = pos;
    n.depth_m = surface_z - pos.z;
    n.sink = sink;
    n.rate = rate;
    return n;
}

/// source -> relay -> sink, 100 m hops, p = 0.9 on both.
inline StaticTopology
chain3()
{
    StaticTopology t;
    t.holding_k = 0.05;
    t.nodes = {topo_node(0, {0, 0, 0}, 200, false, 10.0), topo_node(1, {0, 0, 100}, 200),
               topo_node(2, {0, 0, 200}, 200, true)};
    t.nodes[0].candidates = {1};
    t.nodes[0].link_probs = {0.9};
    t.nodes[1].candidates = {2};
    t.nodes[1].link_probs = {0.9};
    return t;
}

/// source with two relays of different priority feeding one sink.
inline StaticTopology
diamond4()
{
    StaticTopology t;
    t.holding_k = 0.05;
    t.nodes = {topo_node(0, {50, 50, 0}, 200, false, 10.0), topo_node(1, {0, 50, 100}, 200),
               topo_node(2, {110, 50, 90}, 200), topo_node(3, {50, 50, 200}, 200, true)};
    t.nodes[0].candidates = {1, 2};
    t.nodes[0].link_probs = {0.6, 0.7};
    t.nodes[1].candidates = {3};
    t.nodes[1].link_probs = {0.8};
    t.nodes[2].candidates = {3};
    t.nodes[2].link_probs = {0.9};
    return t;
}

/// Ten nodes in a 200 m column: two sinks on top, one source at the bottom,
/// every sensor listing up to three shallower in-range nodes.
inline StaticTopology
random_dag(unsigned seed = 7)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    StaticTopology t;
    t.holding_k = 0.04;
    const double h = 250.0;
    t.nodes.push_back(topo_node(0, {60, 60, 0}, h, false, 5.0));
    for (NodeId i = 1; i <= 7; ++i)
    {
        t.nodes.push_back(topo_node(i, {120 * u(gen), 120 * u(gen), 30 + 190 * u(gen)}, h));
    }
    t.nodes.push_back(topo_node(8, {30, 30, h}, h, true));
    t.nodes.push_back(topo_node(9, {100, 90, h}, h, true));
    for (auto& n : t.nodes)
    {
        if (n.sink)
        {
            continue;
        }
        std::vector<std::pair<double, NodeId>> up;
        for (const auto& m : t.nodes)
        {
            const double d = distance(n.position, m.position);
            if (m.depth_m < n.depth_m && d <= t.range)
            {
                up.emplace_back(m.depth_m, m.id);
            }
        }
        std::sort(up.begin(), up.end());
        for (std::size_t s = 0; s < up.size() && s < 3; ++s)
        {
            n.candidates.push_back(up[s].second);
            n.link_probs.push_back(0.3 + 0.65 * u(gen));
        }
    }
    return t;
}

struct MonteCarlo
{
    double pdr = 0.0;
    double mean_delay = 0.0; ///< over delivered trials
    long delivered = 0;
    long trials = 0;
};

/// Follows one packet at a time: each candidate decodes independently and
/// the first in list order that does carries on after its holding time.
inline MonteCarlo
monte_carlo(const StaticTopology& t, NodeId source, long trials, unsigned seed)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MonteCarlo mc;
    mc.trials = trials;
    double delay_sum = 0.0;
    for (long i = 0; i < trials; ++i)
    {
        NodeId at = source;
        double t_acc = 0.0;
        bool lost = false;
        while (!t.nodes[at].sink)
        {
            const TopoNode& n = t.nodes[at];
            bool moved = false;
            for (std::size_t s = 0; s < n.candidates.size(); ++s)
            {
                if (u(gen) < n.link_probs[s])
                {
                    const NodeId c = n.candidates[s];
                    const double hold = t.nodes[c].sink ? 0.0 : t.holding_k * static_cast<double>(s);
                    t_acc += hold + distance(n.position, t.nodes[c].position) / t.sound_speed;
                    at = c;
                    moved = true;
                    break;
                }
            }
            if (!moved)
            {
                lost = true;
                break;
            }
        }
        if (!lost)
        {
            ++mc.delivered;
            delay_sum += t_acc;
        }
    }
    mc.pdr = static_cast<double>(mc.delivered) / static_cast<double>(trials);
    mc.mean_delay = mc.delivered ? delay_sum / static_cast<double>(mc.delivered) : std::nan("");
    return mc;
}

/// Scenario with a fixed-probability channel and no mobility, for engine tests
/// on hand-placed nodes.
inline uwroute::ScenarioConfig
static_config(int sensors, double height)
{
    uwroute::ScenarioConfig cfg;
    cfg.region = {300.0, 300.0, height};
    cfg.sensors = sensors;
    cfg.sources = 1;
    cfg.sinks = 1;
    cfg.node_speed = 0.0;
    cfg.forced_delivery_prob = 1.0;
    cfg.packets_per_source = 5;
    cfg.max_sim_time = 200.0;
    return cfg;
}

inline uwroute::NodeState
placed(NodeId id, uwroute::NodeKind kind, Vec3 p, const uwroute::Region& r, double energy = 100.0)
{
    uwroute::NodeState n;
    n.id = id;
    n.kind = kind;
    n.place(p, r);
    n.initial_energy_J = n.residual_energy_J = energy;
    return n;
}

} // namespace uwtest

#endif
