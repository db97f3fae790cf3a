// Q-learning arithmetic for next-hop selection.
//
// A packet holder is the learning state and "hand the packet to neighbor j"
// is the action. Rewards are non-positive costs built from residual energy
// and depth progress, so all Q- and V-values live in [-3/(1-gamma), 0].

#ifndef UWROUTE_QCORE_HPP
#define UWROUTE_QCORE_HPP

#include "uwroute/types.hpp"

#include <map>

namespace uwroute
{

struct NodeState;
struct RoutingKnowledge;

namespace qcore
{

struct QParams
{
    double gamma = 0.8; ///< discount factor, [0, 1]
    double alpha = 0.5; ///< learning rate, (0, 1]

    void validate() const;
};

/// 1 - e_res / e_ini.
double energy_cost(double residual_J, double initial_J);

/// 0.5 * (1 - (depth_sender - depth_neighbor) / d_max).
double depth_cost(double depth_sender, double depth_neighbor, double d_max);

/// Immediate reward for handing a packet from `sender` to a neighbor that
/// advertised `neighbor`. Both nodes are assumed to share the sender's
/// initial energy.
double reward(const NodeState& sender, const RoutingKnowledge& neighbor, double d_max);

/// alpha * (r + gamma * v_next) + (1 - alpha) * q_old.
double q_update(double q_old, double r, double v_next, const QParams& params);

/// max over the table, 0 when empty.
double v_value(const std::map<NodeId, double>& q_table);

/// Lower end of the admissible Q range, -3 / (1 - gamma); -inf for gamma = 1.
double q_lower_bound(const QParams& params);

} // namespace qcore
} // namespace uwroute

#endif
