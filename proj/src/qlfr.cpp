#include "uwroute/qlfr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace uwroute
{

bool
on_overhear_during_hold(NodeState& node, const PacketKey& key)
{
    return node.pending.erase(key) > 0;
}

namespace qlfr
{

HoldingParams
HoldingParams::from_h(unsigned h, double t_max)
{
    if (h == 0)
    {
        throw std::domain_error("h must be a positive integer");
    }
    HoldingParams p{t_max, 2.0 * t_max / h};
    p.validate();
    return p;
}

HoldingParams
HoldingParams::from_k(double k, double t_max)
{
    HoldingParams p{t_max, k};
    p.validate();
    return p;
}

void
HoldingParams::validate() const
{
    if (!(t_max > 0.0))
    {
        throw std::invalid_argument("t_max must be positive");
    }
    if (!(k > 0.0 && k <= 2.0 * t_max * (1.0 + 1e-12)))
    {
        throw std::invalid_argument("holding k must lie in (0, 2 t_max]");
    }
}

double
holding_time(unsigned n, const HoldingParams& params)
{
    if (n < 1)
    {
        throw std::domain_error("priority index starts at 1");
    }
    return params.k * static_cast<double>(n - 1);
}

unsigned
suppression_adjust(SuppressionState& state, std::uint64_t delivered, std::uint64_t total_generated)
{
    if (total_generated == 0)
    {
        throw std::domain_error("delivery ratio undefined without generated packets");
    }
    state.observed_pdr = static_cast<double>(delivered) / static_cast<double>(total_generated);
    if (state.observed_pdr > state.pdr_threshold)
    {
        state.current_list_length = std::max(1u, state.current_list_length - 1);
    }
    else if (state.observed_pdr < state.pdr_threshold)
    {
        state.current_list_length = std::min(state.max_list_length, state.current_list_length + 1);
    }
    return state.current_list_length;
}

double
candidate_score(const NodeState& sender, const RoutingKnowledge& neighbor, const QlfrParams& params)
{
    // advertised values can be a little stale; keep them inside the cost domains
    RoutingKnowledge k = neighbor;
    k.depth_m = std::clamp(k.depth_m, sender.depth_m - params.d_max, sender.depth_m + params.d_max);
    k.residual_energy_J = std::clamp(k.residual_energy_J, 0.0, sender.initial_energy_J);
    return qcore::reward(sender, k, params.d_max) + params.q.gamma * k.v_value;
}

std::vector<NodeId>
build_priority_list(const NodeState& sender, const QlfrParams& params, double now, unsigned list_length)
{
    std::vector<std::pair<double, NodeId>> ranked;
    for (const auto& [id, entry] : sender.neighbors)
    {
        if (now - entry.last_heard > params.staleness)
        {
            continue;
        }
        if (!(entry.knowledge.depth_m < sender.depth_m))
        {
            continue;
        }
        ranked.emplace_back(candidate_score(sender, entry.knowledge, params), id);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first)
        {
            return a.first > b.first;
        }
        return a.second < b.second;
    });
    if (ranked.size() > list_length)
    {
        ranked.resize(list_length);
    }
    std::vector<NodeId> out;
    out.reserve(ranked.size());
    for (const auto& r : ranked)
    {
        out.push_back(r.second);
    }
    return out;
}

QlfrRouter::QlfrRouter(QlfrParams params)
    : m_params(params)
{
    m_params.q.validate();
    m_params.holding.validate();
    if (!(m_params.d_max > 0.0) || !(m_params.staleness > 0.0))
    {
        throw std::invalid_argument("d_max and staleness must be positive");
    }
}

ReceiveAction
QlfrRouter::on_receive(NodeState& node, const PacketHeader& packet, double now)
{
    try
    {
        validate(packet);
    }
    catch (const MalformedHeader&)
    {
        return {ReceiveAction::Kind::Corrupt};
    }
    if (packet.sender_id == node.id)
    {
        return {ReceiveAction::Kind::Ignore};
    }

    // every reception refreshes the neighbor table, listed or not
    update_neighbor_knowledge(node, packet.sender_id, packet.sender_knowledge(), now);
    evict_stale_neighbors(node, now, m_params.staleness);

    if (packet.kind == PacketKind::Hello)
    {
        return {ReceiveAction::Kind::Ignore};
    }
    const PacketKey key = packet.key();
    if (node.is_sink())
    {
        return {node.seen.insert(key) ? ReceiveAction::Kind::Deliver : ReceiveAction::Kind::Ignore};
    }

    ReceiveAction action;
    action.cancelled_pending = on_overhear_during_hold(node, key);
    node.seen.insert(key);

    const auto position = priority_of(packet, node.id);
    if (!position || node.forwarded.contains(key))
    {
        action.kind = ReceiveAction::Kind::Drop;
        return action;
    }
    action.kind = ReceiveAction::Kind::Schedule;
    action.hold = holding_time(*position, m_params.holding);
    return action;
}

ForwardResult
QlfrRouter::prepare_transmit(NodeState& node, const PacketHeader& packet, double now)
{
    ForwardResult result;
    const PacketKey key = packet.key();
    if (node.forwarded.contains(key))
    {
        result.outcome = ForwardResult::Outcome::Duplicate;
        return result;
    }

    const unsigned length = std::max(1u, packet.list_length);
    auto list = build_priority_list(node, m_params, now, length);
    if (list.empty())
    {
        result.outcome = ForwardResult::Outcome::Void;
        return result;
    }

    const NodeId head = list.front();
    const RoutingKnowledge& head_knowledge = node.neighbors.at(head).knowledge;
    RoutingKnowledge clamped = head_knowledge;
    clamped.depth_m = std::clamp(clamped.depth_m, node.depth_m - m_params.d_max, node.depth_m + m_params.d_max);
    clamped.residual_energy_J = std::clamp(clamped.residual_energy_J, 0.0, node.initial_energy_J);
    const double r = qcore::reward(node, clamped, m_params.d_max);
    double& q = node.q_table[head];
    q = qcore::q_update(q, r, clamped.v_value, m_params.q);
    if (q < qcore::q_lower_bound(m_params.q) - 1e-9 || q > 0.0)
    {
        throw std::logic_error("Q-value escaped its admissible range");
    }
    node.v_value = qcore::v_value(node.q_table);

    result.outcome = ForwardResult::Outcome::Send;
    result.header = packet;
    result.header.kind = PacketKind::Data;
    result.header.sender_id = node.id;
    result.header.v_value = node.v_value;
    result.header.depth_m = node.depth_m;
    result.header.residual_energy_J = node.residual_energy_J;
    result.header.list_length = length;
    result.header.priority_list = std::move(list);
    node.forwarded.insert(key);
    node.seen.insert(key);
    return result;
}

PacketHeader
QlfrRouter::make_hello(const NodeState& node) const
{
    PacketHeader h;
    h.kind = PacketKind::Hello;
    h.source_id = node.id;
    h.sender_id = node.id;
    h.v_value = node.v_value;
    h.depth_m = node.depth_m;
    h.residual_energy_J = node.residual_energy_J;
    h.list_length = 0;
    return h;
}

} // namespace qlfr
} // namespace uwroute
