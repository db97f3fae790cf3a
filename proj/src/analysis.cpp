#include "uwroute/analysis.hpp"

#include "uwroute/channel.hpp"
#include "uwroute/format.hpp"
#include "uwroute/qlfr.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

namespace uwroute::analysis
{

void
StaticTopology::validate() const
{
    if (!(range > 0.0) || !(sound_speed > 0.0) || !(holding_k >= 0.0) || !(packet_duration >= 0.0) ||
        !(run_time > 0.0) || !(initial_energy > 0.0) || tx_power < 0.0 || rx_power < 0.0)
    {
        throw TopologyError("topology has a non-physical global parameter");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
    {
        const TopoNode& n = nodes[i];
        if (n.id != i)
        {
            throw TopologyError("node " + std::to_string(i) + " has id " + std::to_string(n.id));
        }
        if (n.candidates.size() != n.link_probs.size())
        {
            throw TopologyError("node " + std::to_string(i) + ": candidate and probability lists differ in length");
        }
        if (!(n.rate >= 0.0))
        {
            throw TopologyError("node " + std::to_string(i) + ": negative generation rate");
        }
        for (std::size_t s = 0; s < n.candidates.size(); ++s)
        {
            if (n.candidates[s] >= nodes.size() || n.candidates[s] == n.id)
            {
                throw TopologyError("node " + std::to_string(i) + ": invalid candidate id");
            }
            if (!(n.link_probs[s] >= 0.0 && n.link_probs[s] <= 1.0))
            {
                throw TopologyError("node " + std::to_string(i) + ": link probability outside [0, 1]");
            }
        }
    }
}

double
StaticTopology::hop_delay(NodeId from, NodeId to) const
{
    return distance(nodes[from].position, nodes[to].position) / sound_speed;
}

double
StaticTopology::holding(NodeId candidate, std::size_t slot) const
{
    return nodes[candidate].sink ? 0.0 : holding_k * static_cast<double>(slot);
}

double
candidate_forward_prob(std::span<const double> probs, std::size_t j)
{
    if (j < 1 || j > probs.size())
    {
        throw std::out_of_range("candidate index out of range");
    }
    double missed = 1.0;
    for (std::size_t k = 0; k + 1 < j; ++k)
    {
        missed *= 1.0 - probs[k];
    }
    return probs[j - 1] * missed;
}

namespace
{

// Per-slot exclusive forwarding probabilities for every node.
std::vector<std::vector<double>>
exclusive_probs(const StaticTopology& topo)
{
    std::vector<std::vector<double>> out(topo.nodes.size());
    for (const auto& n : topo.nodes)
    {
        auto& v = out[n.id];
        v.reserve(n.link_probs.size());
        double missed = 1.0;
        for (double p : n.link_probs)
        {
            v.push_back(p * missed);
            missed *= 1.0 - p;
        }
    }
    return out;
}

} // namespace

std::vector<NodeId>
topological_order(const StaticTopology& topo)
{
    topo.validate();
    const std::size_t n = topo.nodes.size();
    std::vector<int> indegree(n, 0);
    for (const auto& node : topo.nodes)
    {
        if (node.sink)
        {
            continue; // sinks absorb; their lists are never used
        }
        for (NodeId c : node.candidates)
        {
            ++indegree[c];
        }
    }
    std::vector<NodeId> order;
    order.reserve(n);
    for (NodeId i = 0; i < n; ++i)
    {
        if (indegree[i] == 0)
        {
            order.push_back(i);
        }
    }
    for (std::size_t head = 0; head < order.size(); ++head)
    {
        const TopoNode& node = topo.nodes[order[head]];
        if (node.sink)
        {
            continue;
        }
        for (NodeId c : node.candidates)
        {
            if (--indegree[c] == 0)
            {
                order.push_back(c);
            }
        }
    }
    if (order.size() != n)
    {
        throw TopologyError("candidate graph contains a cycle");
    }
    return order;
}

std::vector<double>
delivery_prob_to_sink(const StaticTopology& topo)
{
    const auto order = topological_order(topo);
    const auto excl = exclusive_probs(topo);
    std::vector<double> p(topo.nodes.size(), 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it)
    {
        const TopoNode& node = topo.nodes[*it];
        if (node.sink)
        {
            p[node.id] = 1.0;
            continue;
        }
        double sum = 0.0;
        for (std::size_t s = 0; s < node.candidates.size(); ++s)
        {
            sum += excl[node.id][s] * p[node.candidates[s]];
        }
        p[node.id] = sum;
    }
    return p;
}

double
delivery_prob_to_sink(const StaticTopology& topo, NodeId node)
{
    return delivery_prob_to_sink(topo).at(node);
}

std::vector<double>
outgoing_traffic(const StaticTopology& topo)
{
    const auto order = topological_order(topo);
    const auto excl = exclusive_probs(topo);
    std::vector<double> lambda(topo.nodes.size(), 0.0);
    for (const auto& n : topo.nodes)
    {
        lambda[n.id] = n.rate;
    }
    for (NodeId id : order)
    {
        const TopoNode& node = topo.nodes[id];
        if (node.sink)
        {
            continue;
        }
        for (std::size_t s = 0; s < node.candidates.size(); ++s)
        {
            lambda[node.candidates[s]] += excl[id][s] * lambda[id];
        }
    }
    return lambda;
}

std::vector<double>
expected_holding_time(const StaticTopology& topo)
{
    const auto lambda = outgoing_traffic(topo);
    const auto excl = exclusive_probs(topo);
    const std::size_t n = topo.nodes.size();
    std::vector<double> inbound(n, 0.0);
    std::vector<double> weighted(n, 0.0);
    for (const auto& node : topo.nodes)
    {
        if (node.sink)
        {
            continue;
        }
        for (std::size_t s = 0; s < node.candidates.size(); ++s)
        {
            const NodeId c = node.candidates[s];
            const double share = lambda[node.id] * excl[node.id][s];
            inbound[c] += share;
            weighted[c] += share * topo.holding(c, s) * excl[node.id][s];
        }
    }
    std::vector<double> tau(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
    {
        if (inbound[i] > 0.0)
        {
            tau[i] = weighted[i] / inbound[i];
        }
    }
    return tau;
}

double
expected_holding_time(const StaticTopology& topo, NodeId node)
{
    return expected_holding_time(topo).at(node);
}

std::vector<DelayEstimate>
expected_delay_to_sink(const StaticTopology& topo)
{
    const auto order = topological_order(topo);
    const auto excl = exclusive_probs(topo);
    const auto p = delivery_prob_to_sink(topo);
    const auto tau = expected_holding_time(topo);
    std::vector<DelayEstimate> out(topo.nodes.size());
    for (auto it = order.rbegin(); it != order.rend(); ++it)
    {
        const TopoNode& node = topo.nodes[*it];
        if (node.sink)
        {
            continue;
        }
        DelayEstimate& d = out[node.id];
        double conditional = 0.0;
        for (std::size_t s = 0; s < node.candidates.size(); ++s)
        {
            const NodeId c = node.candidates[s];
            const double hop = topo.hop_delay(node.id, c);
            d.raw += (tau[c] + hop + out[c].raw) * excl[node.id][s];
            // exact per-edge holding, weighted by delivery through this candidate
            conditional += excl[node.id][s] * p[c] * (topo.holding(c, s) + hop + out[c].conditional);
        }
        if (p[node.id] > 0.0)
        {
            d.ratio = d.raw / p[node.id];
            d.conditional = conditional / p[node.id];
        }
        else
        {
            d.ratio = d.conditional = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

DelayEstimate
expected_delay_to_sink(const StaticTopology& topo, NodeId node)
{
    return expected_delay_to_sink(topo).at(node);
}

std::vector<double>
node_energy(const StaticTopology& topo, std::span<const double> traffic)
{
    if (traffic.size() != topo.nodes.size())
    {
        throw std::invalid_argument("traffic vector does not match the topology");
    }
    const double tx = topo.packet_duration * topo.tx_power;
    const double rx = topo.packet_duration * topo.rx_power;
    std::vector<double> energy(topo.nodes.size(), 0.0);
    for (const auto& node : topo.nodes)
    {
        if (node.sink)
        {
            continue;
        }
        double e = traffic[node.id] * tx;
        for (const auto& other : topo.nodes)
        {
            if (other.id == node.id || other.sink)
            {
                continue;
            }
            if (distance(node.position, other.position) <= topo.range)
            {
                e += traffic[other.id] * rx;
            }
        }
        energy[node.id] = e;
    }
    return energy;
}

double
network_lifetime(const StaticTopology& topo, std::span<const double> energy)
{
    if (energy.size() != topo.nodes.size())
    {
        throw std::invalid_argument("energy vector does not match the topology");
    }
    double lifetime = std::numeric_limits<double>::infinity();
    for (const auto& node : topo.nodes)
    {
        if (!node.sink && energy[node.id] > 0.0)
        {
            lifetime = std::min(lifetime, topo.initial_energy / (energy[node.id] / topo.run_time));
        }
    }
    return lifetime;
}

NetworkSummary
summarize(const StaticTopology& topo)
{
    const auto p = delivery_prob_to_sink(topo);
    const auto delay = expected_delay_to_sink(topo);
    const auto lambda = outgoing_traffic(topo);
    const auto energy = node_energy(topo, lambda);

    NetworkSummary s;
    double generated = 0.0;
    double delivered = 0.0;
    double delay_sum = 0.0;
    for (const auto& n : topo.nodes)
    {
        if (n.rate > 0.0 && !n.sink)
        {
            generated += n.rate;
            delivered += n.rate * p[n.id];
            if (p[n.id] > 0.0)
            {
                delay_sum += n.rate * p[n.id] * delay[n.id].conditional;
            }
        }
        s.total_energy += energy[n.id];
    }
    s.pdr = generated > 0.0 ? delivered / generated : std::numeric_limits<double>::quiet_NaN();
    s.delay_conditional = delivered > 0.0 ? delay_sum / delivered : std::numeric_limits<double>::quiet_NaN();
    s.lifetime = network_lifetime(topo, energy);
    return s;
}

void
write_report_csv(std::ostream& os, const StaticTopology& topo)
{
    const auto p = delivery_prob_to_sink(topo);
    const auto delay = expected_delay_to_sink(topo);
    const auto tau = expected_holding_time(topo);
    const auto lambda = outgoing_traffic(topo);
    const auto energy = node_energy(topo, lambda);
    os << "id,kind,p_to_sink,delay_raw_s,delay_ratio_s,delay_conditional_s,holding_s,traffic,energy_J,lifetime_s\n";
    for (const auto& n : topo.nodes)
    {
        const double life = n.sink || energy[n.id] <= 0.0 ? std::numeric_limits<double>::infinity()
                                                           : topo.initial_energy * topo.run_time / energy[n.id];
        os << n.id << ',' << (n.sink ? "sink" : (n.rate > 0.0 ? "source" : "sensor")) << ','
           << format_number(p[n.id]) << ',' << format_number(delay[n.id].raw) << ','
           << format_number(delay[n.id].ratio) << ',' << format_number(delay[n.id].conditional) << ','
           << format_number(tau[n.id]) << ',' << format_number(lambda[n.id]) << ',' << format_number(energy[n.id])
           << ',' << format_number(life) << '\n';
    }
}

void
save_topology(std::ostream& os, const StaticTopology& topo)
{
    nlohmann::ordered_json j;
    j["range"] = topo.range;
    j["sound_speed"] = topo.sound_speed;
    j["holding_k"] = topo.holding_k;
    j["packet_duration"] = topo.packet_duration;
    j["tx_power"] = topo.tx_power;
    j["rx_power"] = topo.rx_power;
    j["initial_energy"] = topo.initial_energy;
    j["run_time"] = topo.run_time;
    auto& arr = j["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : topo.nodes)
    {
        nlohmann::ordered_json e;
        e["id"] = n.id;
        e["position"] = {n.position.x, n.position.y, n.position.z};
        e["depth"] = n.depth_m;
        e["sink"] = n.sink;
        e["rate"] = n.rate;
        e["candidates"] = n.candidates;
        e["link_probs"] = n.link_probs;
        arr.push_back(std::move(e));
    }
    os << j.dump(2) << '\n';
}

StaticTopology
load_topology(std::istream& is)
{
    StaticTopology topo;
    try
    {
        const auto j = nlohmann::json::parse(is);
        topo.range = j.at("range").get<double>();
        topo.sound_speed = j.at("sound_speed").get<double>();
        topo.holding_k = j.at("holding_k").get<double>();
        topo.packet_duration = j.at("packet_duration").get<double>();
        topo.tx_power = j.at("tx_power").get<double>();
        topo.rx_power = j.at("rx_power").get<double>();
        topo.initial_energy = j.at("initial_energy").get<double>();
        topo.run_time = j.at("run_time").get<double>();
        for (const auto& e : j.at("nodes"))
        {
            TopoNode n;
            n.id = e.at("id").get<NodeId>();
            const auto& pos = e.at("position");
            n.position = {pos.at(0).get<double>(), pos.at(1).get<double>(), pos.at(2).get<double>()};
            n.depth_m = e.at("depth").get<double>();
            n.sink = e.at("sink").get<bool>();
            n.rate = e.value("rate", 0.0);
            n.candidates = e.at("candidates").get<std::vector<NodeId>>();
            n.link_probs = e.at("link_probs").get<std::vector<double>>();
            topo.nodes.push_back(std::move(n));
        }
    }
    catch (const nlohmann::json::exception& e)
    {
        throw TopologyError(std::string("malformed topology file: ") + e.what());
    }
    topo.validate();
    return topo;
}

StaticTopology
load_topology_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw std::runtime_error("cannot open topology file '" + path.string() + "'");
    }
    return load_topology(in);
}

StaticTopology
freeze(std::span<const NodeState> nodes, const ScenarioConfig& cfg, const channel::ChannelParams& channel,
       std::span<const double> rates, double run_time, double now)
{
    if (rates.size() != nodes.size())
    {
        throw std::invalid_argument("rate vector does not match the node set");
    }
    StaticTopology topo;
    topo.range = cfg.range;
    topo.sound_speed = cfg.sound_speed;
    topo.holding_k = cfg.protocol == Protocol::Qlfr ? cfg.effective_k() : 0.0;
    topo.packet_duration = channel.packet_duration();
    topo.tx_power = cfg.tx_power;
    topo.rx_power = cfg.rx_power;
    topo.initial_energy = cfg.initial_energy;
    topo.run_time = run_time;

    qlfr::QlfrParams qp;
    qp.q = cfg.q;
    qp.d_max = cfg.range;
    qp.staleness = cfg.staleness();

    auto link = [&](double d) {
        return cfg.forced_delivery_prob ? *cfg.forced_delivery_prob
                                        : channel::packet_delivery_prob(std::max(d, 1e-3), channel);
    };

    for (const auto& n : nodes)
    {
        TopoNode t;
        t.id = n.id;
        t.position = n.position;
        t.depth_m = n.depth_m;
        t.sink = n.is_sink();
        t.rate = rates[n.id];
        if (!t.sink && n.alive)
        {
            auto usable = [&](NodeId c) {
                const NodeState& o = nodes[c];
                return o.alive && o.depth_m < n.depth_m && distance(o.position, n.position) <= cfg.range;
            };
            std::vector<NodeId> list;
            if (cfg.protocol == Protocol::Qlfr)
            {
                list = qlfr::build_priority_list(n, qp, now, std::max(1u, cfg.initial_list_length));
            }
            else
            {
                for (const auto& o : nodes)
                {
                    if (o.id != n.id)
                    {
                        list.push_back(o.id);
                    }
                }
                // shallowest first, the order in which depth-based holding fires
                std::stable_sort(list.begin(), list.end(),
                                 [&](NodeId a, NodeId b) { return nodes[a].depth_m < nodes[b].depth_m; });
            }
            for (NodeId c : list)
            {
                if (usable(c))
                {
                    t.candidates.push_back(c);
                    t.link_probs.push_back(link(distance(nodes[c].position, n.position)));
                }
            }
        }
        topo.nodes.push_back(std::move(t));
    }
    topo.validate();
    return topo;
}

} // namespace uwroute::analysis
