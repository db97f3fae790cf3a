#include "uwroute/dbr.hpp"

#include <algorithm>
#include <stdexcept>

namespace uwroute::dbr
{

double
holding_time(double depth_advance, NodeId node, const DbrParams& params)
{
    const double shortfall = std::clamp(params.range - depth_advance, 0.0, params.range);
    return 2.0 * params.t_max / params.range * shortfall + params.id_jitter * node;
}

DbrRouter::DbrRouter(DbrParams params)
    : m_params(params)
{
    if (!(m_params.range > 0.0) || !(m_params.t_max > 0.0) || m_params.id_jitter < 0.0)
    {
        throw std::invalid_argument("invalid DBR parameters");
    }
}

ReceiveAction
DbrRouter::on_receive(NodeState& node, const PacketHeader& packet, double /*now*/)
{
    try
    {
        validate(packet);
    }
    catch (const MalformedHeader&)
    {
        return {ReceiveAction::Kind::Corrupt};
    }
    if (packet.kind == PacketKind::Hello || packet.sender_id == node.id)
    {
        return {ReceiveAction::Kind::Ignore};
    }
    const PacketKey key = packet.key();
    if (node.is_sink())
    {
        return {node.seen.insert(key) ? ReceiveAction::Kind::Deliver : ReceiveAction::Kind::Ignore};
    }

    ReceiveAction action;
    action.kind = ReceiveAction::Kind::Drop;
    if (!node.seen.insert(key))
    {
        // a second copy means somebody else already carried it on
        action.cancelled_pending = on_overhear_during_hold(node, key);
        return action;
    }
    if (node.forwarded.contains(key))
    {
        return action;
    }
    const double advance = packet.depth_m - node.depth_m;
    if (!(advance > 0.0))
    {
        return action;
    }
    action.kind = ReceiveAction::Kind::Schedule;
    action.hold = holding_time(advance, node.id, m_params);
    return action;
}

ForwardResult
DbrRouter::prepare_transmit(NodeState& node, const PacketHeader& packet, double /*now*/)
{
    ForwardResult result;
    const PacketKey key = packet.key();
    if (node.forwarded.contains(key))
    {
        result.outcome = ForwardResult::Outcome::Duplicate;
        return result;
    }
    result.outcome = ForwardResult::Outcome::Send;
    result.header = packet;
    result.header.kind = PacketKind::Data;
    result.header.sender_id = node.id;
    result.header.v_value = 0.0;
    result.header.depth_m = node.depth_m;
    result.header.residual_energy_J = node.residual_energy_J;
    result.header.list_length = 0;
    result.header.priority_list.clear();
    node.forwarded.insert(key);
    node.seen.insert(key);
    return result;
}

} // namespace uwroute::dbr
