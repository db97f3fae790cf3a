#include "uwroute/world.hpp"

#include "uwroute/format.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace uwroute
{

double
distance(const Vec3& a, const Vec3& b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

bool
Region::contains(const Vec3& p) const
{
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= length && p.z >= 0.0 && p.z <= height;
}

std::string_view
to_string(NodeKind kind)
{
    switch (kind)
    {
    case NodeKind::Sensor:
        return "sensor";
    case NodeKind::Source:
        return "source";
    case NodeKind::Sink:
        return "sink";
    }
    return "?";
}

RecentKeys::RecentKeys(std::size_t capacity)
    : m_capacity(capacity)
{
    if (capacity == 0)
    {
        throw std::invalid_argument("RecentKeys capacity must be positive");
    }
}

bool
RecentKeys::insert(const PacketKey& key)
{
    if (auto it = m_index.find(key); it != m_index.end())
    {
        m_order.splice(m_order.begin(), m_order, it->second);
        return false;
    }
    m_order.push_front(key);
    m_index.emplace(key, m_order.begin());
    if (m_index.size() > m_capacity)
    {
        m_index.erase(m_order.back());
        m_order.pop_back();
    }
    return true;
}

bool
RecentKeys::contains(const PacketKey& key) const
{
    return m_index.contains(key);
}

void
NodeState::place(const Vec3& p, const Region& region)
{
    position = p;
    depth_m = region.depth_at(p);
}

std::vector<NodeState>
deploy(const DeploymentSpec& spec, Rng& rng)
{
    const Region& r = spec.region;
    if (!(r.width > 0.0 && r.length > 0.0 && r.height > 0.0))
    {
        throw std::invalid_argument("deployment region must have positive volume");
    }
    if (spec.sensors < 1 || spec.sinks < 1 || spec.sources < 1)
    {
        throw std::invalid_argument("deployment needs at least one sensor, source and sink");
    }
    if (spec.sources > spec.sensors)
    {
        throw std::invalid_argument("more sources than sensor nodes");
    }

    std::vector<NodeState> nodes;
    nodes.reserve(static_cast<std::size_t>(spec.sensors + spec.sinks));
    auto make = [&](NodeKind kind, const Vec3& p) {
        NodeState n;
        n.id = static_cast<NodeId>(nodes.size());
        n.kind = kind;
        n.place(p, r);
        n.initial_energy_J = spec.initial_energy_J;
        n.residual_energy_J = spec.initial_energy_J;
        n.heading = random_direction(rng);
        nodes.push_back(std::move(n));
    };

    for (int i = 0; i < spec.sensors; ++i)
    {
        const double x = rng.uniform(0.0, r.width);
        const double y = rng.uniform(0.0, r.length);
        if (i < spec.sources)
        {
            make(NodeKind::Source, {x, y, 0.0});
        }
        else
        {
            make(NodeKind::Sensor, {x, y, rng.uniform(0.0, r.height)});
        }
    }
    for (int i = 0; i < spec.sinks; ++i)
    {
        const double x = rng.uniform(0.0, r.width);
        const double y = rng.uniform(0.0, r.length);
        make(NodeKind::Sink, {x, y, r.height});
    }
    return nodes;
}

Vec3
random_direction(Rng& rng)
{
    const double z = rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
}

namespace
{

double
reflect_axis(double value, double upper, double& heading)
{
    // fold back into [0, upper]; loops only when one step spans the box
    while (value < 0.0 || value > upper)
    {
        if (value < 0.0)
        {
            value = -value;
        }
        else
        {
            value = 2.0 * upper - value;
        }
        heading = -heading;
    }
    return value;
}

} // namespace

Vec3
random_walk_step(const Vec3& position, Vec3& heading, double speed, double dt, const Region& region)
{
    const double step = speed * dt;
    Vec3 next{position.x + heading.x * step, position.y + heading.y * step, position.z + heading.z * step};
    next.x = reflect_axis(next.x, region.width, heading.x);
    next.y = reflect_axis(next.y, region.length, heading.y);
    next.z = reflect_axis(next.z, region.height, heading.z);
    return next;
}

Vec3
random_walk_step(NodeState& node, double speed, double dt, const Region& region, Rng& rng)
{
    node.heading = random_direction(rng);
    return random_walk_step(node.position, node.heading, speed, dt, region);
}

std::vector<NodeId>
neighbors_in_range(std::span<const NodeState> nodes, std::size_t self, double range)
{
    if (!(range > 0.0))
    {
        throw std::domain_error("transmission range must be positive");
    }
    std::vector<NodeId> out;
    const Vec3& p = nodes[self].position;
    for (std::size_t i = 0; i < nodes.size(); ++i)
    {
        if (i != self && distance(p, nodes[i].position) <= range)
        {
            out.push_back(nodes[i].id);
        }
    }
    return out;
}

void
update_neighbor_knowledge(NodeState& node, NodeId sender, const RoutingKnowledge& knowledge, double now)
{
    if (sender == node.id)
    {
        throw std::invalid_argument("node cannot be its own neighbor");
    }
    node.neighbors[sender] = NeighborEntry{knowledge, now};
}

void
evict_stale_neighbors(NodeState& node, double now, double staleness)
{
    std::erase_if(node.neighbors, [&](const auto& kv) { return now - kv.second.last_heard > staleness; });
}

void
write_deployment_csv(std::ostream& os, std::span<const NodeState> nodes)
{
    os << "id,kind,x,y,z,depth,energy\n";
    for (const auto& n : nodes)
    {
        os << n.id << ',' << to_string(n.kind) << ',' << format_number(n.position.x) << ','
           << format_number(n.position.y) << ',' << format_number(n.position.z) << ',' << format_number(n.depth_m)
           << ',' << format_number(n.residual_energy_J) << '\n';
    }
}

void
write_qtable_csv(std::ostream& os, std::span<const NodeState> nodes)
{
    os << "node,neighbor,q\n";
    for (const auto& n : nodes)
    {
        for (const auto& [nbr, q] : n.q_table)
        {
            os << n.id << ',' << nbr << ',' << format_number(q) << '\n';
        }
    }
}

} // namespace uwroute
