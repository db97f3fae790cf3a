#include "uwroute/engine.hpp"

#include "uwroute/dbr.hpp"
#include "uwroute/format.hpp"

#include "json.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace uwroute::engine
{

namespace
{

enum class DrawKind : std::uint64_t
{
    Data = 1,
    Hello = 2,
};

// Independent RNG streams so one consumer cannot shift another's draws.
enum Stream : std::uint64_t
{
    kDeployStream = 0,
    kTrafficStream = 1,
    kMobilityStream = 2,
};

} // namespace

void
EventQueue::push(double time, Payload payload)
{
    if (!(time >= m_now))
    {
        throw std::logic_error("event scheduled in the past");
    }
    m_heap.push(Event{time, m_next_seq++, std::move(payload)});
}

Event
EventQueue::pop()
{
    if (m_heap.empty())
    {
        throw std::logic_error("pop from an empty event queue");
    }
    Event ev = m_heap.top();
    m_heap.pop();
    m_now = ev.time;
    return ev;
}

EnergyLedger::EnergyLedger(double tx_power, double rx_power)
    : m_tx_power(tx_power)
    , m_rx_power(rx_power)
{
}

void
EnergyLedger::charge_tx(NodeId node, double seconds)
{
    m_tx_seconds += seconds;
    m_per_node[node] += m_tx_power * seconds;
}

void
EnergyLedger::charge_rx(NodeId node, double seconds)
{
    m_rx_seconds += seconds;
    m_per_node[node] += m_rx_power * seconds;
}

double
EnergyLedger::consumed(NodeId node) const
{
    auto it = m_per_node.find(node);
    return it == m_per_node.end() ? 0.0 : it->second;
}

double
EnergyLedger::total() const
{
    double sum = 0.0;
    for (const auto& [_, e] : m_per_node)
    {
        sum += e;
    }
    return sum;
}

std::string
MetricsRecord::csv_header()
{
    return "seed,protocol,nodes,k,speed,generated,delivered,pdr,mean_delay_s,total_energy_J,lifetime_s,"
           "lifetime_extrapolated,suppressed_forwards,void_drops,transmissions,receptions,channel_losses,"
           "corrupt,tx_seconds,rx_seconds,sim_time_s";
}

std::string
MetricsRecord::csv_row() const
{
    std::ostringstream os;
    os << seed << ',' << protocol << ',' << nodes << ',' << format_number(k) << ',' << format_number(speed) << ','
       << generated << ',' << delivered << ',' << format_number(pdr) << ',' << format_number(mean_e2e_delay_s)
       << ',' << format_number(total_energy_J) << ',' << format_number(network_lifetime_s) << ','
       << (lifetime_extrapolated ? 1 : 0) << ',' << suppressed_forwards << ',' << void_drops << ','
       << transmissions << ',' << receptions << ',' << channel_losses << ',' << corrupt << ','
       << format_number(tx_seconds) << ',' << format_number(rx_seconds) << ',' << format_number(sim_time_s);
    return os.str();
}

namespace
{

std::vector<NodeState>
deploy_from(const ScenarioConfig& cfg)
{
    Rng rng(cfg.seed, kDeployStream);
    DeploymentSpec spec{cfg.region, cfg.sensors, cfg.sources, cfg.sinks, cfg.initial_energy};
    return deploy(spec, rng);
}

} // namespace

Simulation::Simulation(const ScenarioConfig& cfg)
    : Simulation(cfg, [&] {
        cfg.validate();
        return deploy_from(cfg);
    }())
{
}

Simulation::Simulation(const ScenarioConfig& cfg, std::vector<NodeState> nodes)
    : m_cfg(cfg)
    , m_channel(cfg.channel)
    , m_nodes(std::move(nodes))
    , m_ledger(cfg.tx_power, cfg.rx_power)
    , m_mobility_rng(cfg.seed, kMobilityStream)
{
    m_cfg.validate();
    for (std::size_t i = 0; i < m_nodes.size(); ++i)
    {
        if (m_nodes[i].id != i)
        {
            throw std::invalid_argument("node ids must equal their index");
        }
    }
    if (m_cfg.calibrate_channel && !m_cfg.forced_delivery_prob)
    {
        m_channel = channel::calibrate(m_channel, m_cfg.calibration_distance, m_cfg.calibration_target);
    }

    if (m_cfg.protocol == Protocol::Qlfr)
    {
        qlfr::QlfrParams p;
        p.q = m_cfg.q;
        p.holding = qlfr::HoldingParams::from_k(m_cfg.effective_k(), m_cfg.t_max());
        p.d_max = m_cfg.range;
        p.staleness = m_cfg.staleness();
        auto router = std::make_unique<qlfr::QlfrRouter>(p);
        m_qlfr = router.get();
        m_router = std::move(router);
    }
    else
    {
        m_router = std::make_unique<dbr::DbrRouter>(dbr::DbrParams{m_cfg.range, m_cfg.t_max(), 1e-6});
    }

    for (const auto& n : m_nodes)
    {
        if (!n.is_sink())
        {
            m_ledger.register_node(n.id);
        }
        if (n.kind == NodeKind::Source)
        {
            SourceInfo info;
            info.suppression.current_list_length = m_cfg.initial_list_length;
            info.suppression.max_list_length = m_cfg.max_list_length;
            info.suppression.pdr_threshold = m_cfg.pdr_threshold;
            m_sources.emplace(n.id, info);
        }
    }
    if (m_sources.empty())
    {
        throw std::invalid_argument("scenario has no source node");
    }
    m_active_sources = static_cast<int>(m_sources.size());
    m_end_time = m_cfg.max_sim_time;
}

Simulation::~Simulation() = default;

double
Simulation::link_probability(double distance_m) const
{
    if (m_cfg.forced_delivery_prob)
    {
        return *m_cfg.forced_delivery_prob;
    }
    return channel::packet_delivery_prob(std::max(distance_m, 1e-3), m_channel);
}

std::vector<double>
Simulation::origin_counts() const
{
    std::vector<double> out(m_nodes.size(), 0.0);
    for (const auto& [id, s] : m_sources)
    {
        out[id] = s.generated;
    }
    return out;
}

void
Simulation::schedule_initial()
{
    Rng rng(m_cfg.seed, kTrafficStream);
    // Phases are drawn for every node regardless of protocol so that source
    // timing is identical across protocol variants.
    std::vector<double> hello_phase(m_nodes.size());
    for (auto& ph : hello_phase)
    {
        ph = rng.uniform(0.0, m_cfg.hello_period);
    }
    if (m_router->uses_hello())
    {
        for (const auto& n : m_nodes)
        {
            m_queue.push(hello_phase[n.id], HelloTick{n.id});
        }
    }
    for (const auto& [id, _] : m_sources)
    {
        m_queue.push(m_cfg.warmup + rng.uniform(0.0, m_cfg.generation_interval), SourceGen{id});
    }
    if (m_cfg.node_speed > 0.0)
    {
        m_queue.push(m_cfg.mobility_tick, MobilityTick{});
    }
}

MetricsRecord
Simulation::run()
{
    m_metrics = MetricsRecord{};
    schedule_initial();
    while (!m_queue.empty() && m_queue.next_time() <= m_end_time)
    {
        dispatch(m_queue.pop());
    }

    MetricsRecord& m = m_metrics;
    m.seed = m_cfg.seed;
    m.protocol = std::string(m_router->name());
    m.nodes = m_cfg.sensors;
    m.k = m_cfg.protocol == Protocol::Qlfr ? m_cfg.effective_k() : 0.0;
    m.speed = m_cfg.node_speed;
    for (const auto& [_, s] : m_sources)
    {
        m.generated += s.generated;
    }
    if (m.generated == 0)
    {
        throw std::runtime_error("no packets were generated; delivery ratio is undefined");
    }
    m.sim_time_s = m_end_time;
    m.pdr = static_cast<double>(m.delivered) / static_cast<double>(m.generated);
    m.mean_e2e_delay_s =
        m.delivered ? m_delay_sum / static_cast<double>(m.delivered) : std::numeric_limits<double>::quiet_NaN();
    m.per_node_energy_J = m_ledger.per_node();
    m.total_energy_J = m_ledger.total();
    m.tx_seconds = m_ledger.tx_seconds();
    m.rx_seconds = m_ledger.rx_seconds();

    if (m_first_death)
    {
        m.network_lifetime_s = *m_first_death;
    }
    else
    {
        // nobody died: extrapolate each sensor's drain rate over the run
        double lifetime = std::numeric_limits<double>::infinity();
        for (const auto& [id, used] : m_ledger.per_node())
        {
            if (used > 0.0)
            {
                lifetime = std::min(lifetime, m_nodes[id].initial_energy_J / (used / m.sim_time_s));
            }
        }
        m.network_lifetime_s = lifetime;
        m.lifetime_extrapolated = true;
    }
    return m;
}

void
Simulation::dispatch(const Event& ev)
{
    const double now = ev.time;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Arrival>)
            {
                on_arrival(p, now);
            }
            else if constexpr (std::is_same_v<T, HoldExpiry>)
            {
                on_hold_expiry(p, now);
            }
            else if constexpr (std::is_same_v<T, MobilityTick>)
            {
                on_mobility(now);
            }
            else if constexpr (std::is_same_v<T, HelloTick>)
            {
                on_hello(p.node, now);
            }
            else if constexpr (std::is_same_v<T, SourceGen>)
            {
                on_source_gen(p.source, now);
            }
            else
            {
                on_review(p.source, now);
            }
        },
        ev.payload);
}

bool
Simulation::pay(NodeState& node, double power, double seconds, bool transmit, double now)
{
    if (node.is_sink())
    {
        return true;
    }
    const double cost = power * seconds;
    if (node.residual_energy_J < cost)
    {
        kill(node, now);
        return false;
    }
    node.residual_energy_J -= cost;
    if (transmit)
    {
        m_ledger.charge_tx(node.id, seconds);
    }
    else
    {
        m_ledger.charge_rx(node.id, seconds);
    }
    return true;
}

void
Simulation::kill(NodeState& node, double now)
{
    if (!node.alive)
    {
        return;
    }
    node.alive = false;
    node.pending.clear();
    if (!m_first_death)
    {
        m_first_death = now;
    }
    trace(now, "death", node, nullptr);
    auto it = m_sources.find(node.id);
    if (it != m_sources.end() && !it->second.exhausted)
    {
        it->second.exhausted = true;
        source_exhausted(now);
    }
}

void
Simulation::source_exhausted(double now)
{
    if (--m_active_sources == 0)
    {
        m_end_time = std::min(m_end_time, now + m_cfg.drain_time);
    }
}

void
Simulation::transmit(NodeState& sender, const PacketHeader& header, double now)
{
    const double duration = m_channel.packet_duration();
    const bool is_hello = header.kind == PacketKind::Hello;
    if (!is_hello || m_cfg.charge_hello)
    {
        if (!pay(sender, m_cfg.tx_power, duration, true, now))
        {
            return;
        }
    }
    if (!is_hello)
    {
        ++m_metrics.transmissions;
        trace(now, "tx", sender, &header);
    }
    const double serialization = m_cfg.serialization_delay ? duration : 0.0;
    const auto kind = static_cast<std::uint64_t>(is_hello ? DrawKind::Hello : DrawKind::Data);
    for (const auto& other : m_nodes)
    {
        if (other.id == sender.id || !other.alive)
        {
            continue;
        }
        const double d = distance(sender.position, other.position);
        if (d > m_cfg.range)
        {
            continue;
        }
        const double u = keyed_uniform({m_cfg.seed, kind, sender.id, other.id, header.source_id, header.seq});
        Arrival a{other.id, header, u < link_probability(d)};
        m_queue.push(now + d / m_cfg.sound_speed + serialization, std::move(a));
    }
}

void
Simulation::on_arrival(const Arrival& a, double now)
{
    NodeState& node = m_nodes[a.receiver];
    if (!node.alive)
    {
        return;
    }
    const bool is_hello = a.header.kind == PacketKind::Hello;
    if (!is_hello || m_cfg.charge_hello)
    {
        // the receiver is busy for the whole packet whether or not it decodes
        if (!pay(node, m_cfg.rx_power, m_channel.packet_duration(), false, now))
        {
            return;
        }
    }
    if (!is_hello)
    {
        ++m_metrics.receptions;
    }
    if (!a.intact)
    {
        if (!is_hello)
        {
            ++m_metrics.channel_losses;
        }
        return;
    }

    const ReceiveAction action = m_router->on_receive(node, a.header, now);
    if (action.cancelled_pending)
    {
        ++m_metrics.suppressed_forwards;
        trace(now, "suppress", node, &a.header);
    }
    switch (action.kind)
    {
    case ReceiveAction::Kind::Deliver: {
        const PacketKey key = a.header.key();
        auto& src = m_sources.at(a.header.source_id);
        src.latest_total = std::max(src.latest_total, a.header.total_generated);
        if (m_delivered.insert(key).second)
        {
            ++m_metrics.delivered;
            ++src.delivered;
            m_delay_sum += now - m_generated_at.at(key);
            trace(now, "deliver", node, &a.header);
            if (m_qlfr)
            {
                // sinks share deliveries over radio; the verdict reaches the source at once
                m_queue.push(now, SuppressionReview{a.header.source_id});
            }
        }
        break;
    }
    case ReceiveAction::Kind::Schedule: {
        const std::uint64_t token = ++m_hold_token;
        node.pending[a.header.key()] = token;
        m_queue.push(now + action.hold, HoldExpiry{node.id, token, a.header});
        break;
    }
    case ReceiveAction::Kind::Corrupt:
        ++m_metrics.corrupt;
        break;
    case ReceiveAction::Kind::Drop:
    case ReceiveAction::Kind::Ignore:
        break;
    }
}

void
Simulation::on_hold_expiry(const HoldExpiry& h, double now)
{
    NodeState& node = m_nodes[h.node];
    const PacketKey key = h.header.key();
    auto it = node.pending.find(key);
    if (!node.alive || it == node.pending.end() || it->second != h.token)
    {
        return;
    }
    node.pending.erase(it);
    ForwardResult fwd = m_router->prepare_transmit(node, h.header, now);
    if (fwd.outcome == ForwardResult::Outcome::Send)
    {
        transmit(node, fwd.header, now);
    }
    else if (fwd.outcome == ForwardResult::Outcome::Void)
    {
        ++m_metrics.void_drops;
        trace(now, "void", node, &h.header);
    }
}

void
Simulation::on_mobility(double now)
{
    const double tick = m_cfg.mobility_tick;
    const auto steps_per_heading = static_cast<std::uint64_t>(std::max(1.0, std::round(m_cfg.heading_period / tick)));
    const bool new_heading = m_tick % steps_per_heading == 0;
    ++m_tick;
    for (auto& n : m_nodes)
    {
        if (n.is_sink() || (n.kind == NodeKind::Source && !m_cfg.sources_mobile))
        {
            continue;
        }
        // draw for dead nodes too so the stream does not depend on deaths
        if (new_heading)
        {
            n.heading = random_direction(m_mobility_rng);
        }
        if (n.alive)
        {
            n.place(random_walk_step(n.position, n.heading, m_cfg.node_speed, tick, m_cfg.region), m_cfg.region);
        }
    }
    m_queue.push(now + tick, MobilityTick{});
}

void
Simulation::on_hello(NodeId id, double now)
{
    NodeState& node = m_nodes[id];
    if (!node.alive)
    {
        return;
    }
    PacketHeader hello = m_qlfr->make_hello(node);
    hello.seq = static_cast<std::uint32_t>(++m_hello_seq);
    transmit(node, hello, now);
    m_queue.push(now + m_cfg.hello_period, HelloTick{id});
}

void
Simulation::on_source_gen(NodeId id, double now)
{
    NodeState& node = m_nodes[id];
    SourceInfo& src = m_sources.at(id);
    if (src.exhausted)
    {
        return;
    }
    if (!node.alive)
    {
        return;
    }

    PacketHeader pkt;
    pkt.kind = PacketKind::Data;
    pkt.source_id = id;
    pkt.seq = src.generated;
    pkt.sender_id = id;
    pkt.total_generated = ++src.generated;
    if (src.feedback)
    {
        // one list-length step per generated packet, carried in its header
        const unsigned before = src.suppression.current_list_length;
        const unsigned after = qlfr::suppression_adjust(src.suppression, src.feedback->first, src.feedback->second);
        pkt.suppression_directive = static_cast<int>(after) - static_cast<int>(before);
        src.feedback.reset();
    }
    pkt.list_length = src.suppression.current_list_length;
    m_generated_at[pkt.key()] = now;
    node.seen.insert(pkt.key());
    trace(now, "gen", node, &pkt);

    ForwardResult fwd = m_router->prepare_transmit(node, pkt, now);
    if (fwd.outcome == ForwardResult::Outcome::Send)
    {
        transmit(node, fwd.header, now);
    }
    else if (fwd.outcome == ForwardResult::Outcome::Void)
    {
        ++m_metrics.void_drops;
        trace(now, "void", node, &pkt);
    }

    if (m_cfg.packets_per_source > 0 && src.generated >= m_cfg.packets_per_source)
    {
        src.exhausted = true;
        source_exhausted(now);
        return;
    }
    if (node.alive)
    {
        m_queue.push(now + m_cfg.generation_interval, SourceGen{id});
    }
}

void
Simulation::on_review(NodeId id, double /*now*/)
{
    SourceInfo& src = m_sources.at(id);
    if (!src.exhausted && src.latest_total > 0)
    {
        src.feedback = std::make_pair(src.delivered, static_cast<std::uint64_t>(src.latest_total));
    }
}

void
Simulation::trace(double now, std::string_view what, const NodeState& node, const PacketHeader* header,
                  std::string_view extra)
{
    if (!m_trace)
    {
        return;
    }
    std::ostream& os = *m_trace.out;
    os << "{\"t\":" << format_number(now) << ",\"ev\":\"" << what << "\",\"node\":" << node.id;
    if (header)
    {
        os << ",\"src\":" << header->source_id << ",\"seq\":" << header->seq << ",\"from\":" << header->sender_id
           << ",\"list\":[";
        for (std::size_t i = 0; i < header->priority_list.size(); ++i)
        {
            os << (i ? "," : "") << header->priority_list[i];
        }
        os << ']';
    }
    if (!extra.empty())
    {
        os << ',' << extra;
    }
    os << "}\n";
}

std::string
to_json(const MetricsRecord& m)
{
    auto number = [](double x) { return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(); };
    nlohmann::ordered_json j;
    j["seed"] = m.seed;
    j["protocol"] = m.protocol;
    j["nodes"] = m.nodes;
    j["k"] = m.k;
    j["speed"] = m.speed;
    j["generated"] = m.generated;
    j["delivered"] = m.delivered;
    j["pdr"] = number(m.pdr);
    j["mean_delay_s"] = number(m.mean_e2e_delay_s);
    j["total_energy_J"] = m.total_energy_J;
    j["lifetime_s"] = number(m.network_lifetime_s);
    j["lifetime_extrapolated"] = m.lifetime_extrapolated;
    j["suppressed_forwards"] = m.suppressed_forwards;
    j["void_drops"] = m.void_drops;
    j["transmissions"] = m.transmissions;
    j["receptions"] = m.receptions;
    j["channel_losses"] = m.channel_losses;
    j["corrupt"] = m.corrupt;
    j["tx_seconds"] = m.tx_seconds;
    j["rx_seconds"] = m.rx_seconds;
    j["sim_time_s"] = m.sim_time_s;
    auto& per = j["per_node_energy_J"] = nlohmann::ordered_json::object();
    for (const auto& [id, e] : m.per_node_energy_J)
    {
        per[std::to_string(id)] = e;
    }
    return j.dump(2);
}

MetricsRecord
run(const ScenarioConfig& cfg, std::ostream* trace)
{
    Simulation sim(cfg);
    sim.set_trace(trace);
    return sim.run();
}

} // namespace uwroute::engine
