// Deployment, mobility, geometry and per-node routing state.

#ifndef UWROUTE_WORLD_HPP
#define UWROUTE_WORLD_HPP

#include "uwroute/random.hpp"
#include "uwroute/types.hpp"

#include <cstddef>
#include <iosfwd>
#include <list>
#include <map>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace uwroute
{

struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Vec3&) const = default;
};

double distance(const Vec3& a, const Vec3& b);

/// Axis-aligned deployment box [0,width] x [0,length] x [0,height].
/// z grows upwards; the water surface is z = height.
struct Region
{
    double width = 500.0;
    double length = 500.0;
    double height = 500.0;

    double depth_at(const Vec3& p) const { return height - p.z; }
    bool contains(const Vec3& p) const;
};

enum class NodeKind
{
    Sensor,
    Source,
    Sink,
};

std::string_view to_string(NodeKind kind);

/// The tuple a node advertises in every header it sends.
struct RoutingKnowledge
{
    double v_value = 0.0;
    double depth_m = 0.0;
    double residual_energy_J = 0.0;
};

struct NeighborEntry
{
    RoutingKnowledge knowledge;
    double last_heard = 0.0;
};

/// Bounded set that forgets its least recently inserted key once full.
class RecentKeys
{
  public:
    explicit RecentKeys(std::size_t capacity = 1024);

    /// Returns false if the key was already present (it is refreshed).
    bool insert(const PacketKey& key);
    bool contains(const PacketKey& key) const;
    std::size_t size() const { return m_index.size(); }
    std::size_t capacity() const { return m_capacity; }

  private:
    std::size_t m_capacity;
    std::list<PacketKey> m_order;
    std::unordered_map<PacketKey, std::list<PacketKey>::iterator, PacketKeyHash> m_index;
};

struct NodeState
{
    NodeId id = 0;
    NodeKind kind = NodeKind::Sensor;
    Vec3 position;
    double depth_m = 0.0;
    Vec3 heading{1.0, 0.0, 0.0};
    double initial_energy_J = 0.0;
    double residual_energy_J = 0.0;
    bool alive = true;

    double v_value = 0.0;
    std::map<NodeId, double> q_table;
    std::map<NodeId, NeighborEntry> neighbors;
    RecentKeys seen;
    RecentKeys forwarded;
    /// Pending holding timers, keyed by packet; the value is the timer token.
    std::map<PacketKey, std::uint64_t> pending;

    bool is_sink() const { return kind == NodeKind::Sink; }
    void place(const Vec3& p, const Region& region);
    RoutingKnowledge knowledge() const { return {v_value, depth_m, residual_energy_J}; }
};

struct DeploymentSpec
{
    Region region;
    int sensors = 100; ///< includes the sources
    int sources = 5;
    int sinks = 5;
    double initial_energy_J = 100.0;
};

/// Sensors uniform in the box, sources on the bottom plane, sinks on the
/// surface. Ids run 0..sensors-1 (sources first), then the sinks.
std::vector<NodeState> deploy(const DeploymentSpec& spec, Rng& rng);

/// Uniformly distributed unit vector.
Vec3 random_direction(Rng& rng);

/// Moves `speed * dt` along `heading`, reflecting specularly off the box
/// walls. `heading` is flipped component-wise on every reflection.
Vec3 random_walk_step(const Vec3& position, Vec3& heading, double speed, double dt, const Region& region);

/// Draws a fresh heading and takes one step.
Vec3 random_walk_step(NodeState& node, double speed, double dt, const Region& region, Rng& rng);

/// Ids of nodes within `range` of `nodes[self]` (inclusive), excluding self.
std::vector<NodeId> neighbors_in_range(std::span<const NodeState> nodes, std::size_t self, double range);

void update_neighbor_knowledge(NodeState& node, NodeId sender, const RoutingKnowledge& knowledge, double now);

/// Drops neighbor entries last heard more than `staleness` seconds ago.
void evict_stale_neighbors(NodeState& node, double now, double staleness);

/// CSV: id,kind,x,y,z,depth,energy
void write_deployment_csv(std::ostream& os, std::span<const NodeState> nodes);

/// CSV: node,neighbor,q
void write_qtable_csv(std::ostream& os, std::span<const NodeState> nodes);

} // namespace uwroute

#endif
