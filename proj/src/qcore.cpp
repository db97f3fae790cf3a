#include "uwroute/qcore.hpp"

#include "uwroute/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace uwroute::qcore
{

void
QParams::validate() const
{
    if (!(gamma >= 0.0 && gamma <= 1.0))
    {
        throw std::invalid_argument("gamma must lie in [0, 1], got " + std::to_string(gamma));
    }
    if (!(alpha > 0.0 && alpha <= 1.0))
    {
        throw std::invalid_argument("alpha must lie in (0, 1], got " + std::to_string(alpha));
    }
}

double
energy_cost(double residual_J, double initial_J)
{
    if (!(initial_J > 0.0))
    {
        throw std::domain_error("initial energy must be positive");
    }
    if (!(residual_J >= 0.0 && residual_J <= initial_J))
    {
        throw std::domain_error("residual energy outside [0, initial]");
    }
    return 1.0 - residual_J / initial_J;
}

double
depth_cost(double depth_sender, double depth_neighbor, double d_max)
{
    if (!(d_max > 0.0))
    {
        throw std::domain_error("d_max must be positive");
    }
    const double d = depth_sender - depth_neighbor;
    if (std::abs(d) > d_max)
    {
        throw std::domain_error("depth difference exceeds d_max");
    }
    return 0.5 * (1.0 - d / d_max);
}

double
reward(const NodeState& sender, const RoutingKnowledge& neighbor, double d_max)
{
    return -energy_cost(sender.residual_energy_J, sender.initial_energy_J) -
           energy_cost(neighbor.residual_energy_J, sender.initial_energy_J) -
           depth_cost(sender.depth_m, neighbor.depth_m, d_max);
}

double
q_update(double q_old, double r, double v_next, const QParams& params)
{
    return params.alpha * (r + params.gamma * v_next) + (1.0 - params.alpha) * q_old;
}

double
v_value(const std::map<NodeId, double>& q_table)
{
    if (q_table.empty())
    {
        return 0.0;
    }
    return std::max_element(q_table.begin(), q_table.end(), [](const auto& a, const auto& b) {
               return a.second < b.second;
           })->second;
}

double
q_lower_bound(const QParams& params)
{
    if (params.gamma >= 1.0)
    {
        return -std::numeric_limits<double>::infinity();
    }
    return -3.0 / (1.0 - params.gamma);
}

} // namespace uwroute::qcore
