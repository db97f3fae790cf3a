// Discrete-event simulation of an underwater sensor network.
//
// One Simulation is strictly single-threaded; independent instances share
// nothing and may run concurrently.

#ifndef UWROUTE_ENGINE_HPP
#define UWROUTE_ENGINE_HPP

#include "uwroute/config.hpp"
#include "uwroute/packet.hpp"
#include "uwroute/qlfr.hpp"
#include "uwroute/routing.hpp"
#include "uwroute/world.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <queue>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace uwroute::engine
{

struct Arrival
{
    NodeId receiver = 0;
    PacketHeader header;
    bool intact = true; ///< outcome of the channel draw
};

struct HoldExpiry
{
    NodeId node = 0;
    std::uint64_t token = 0;
    PacketHeader header; ///< copy as received; the outgoing list is rebuilt on expiry
};

struct MobilityTick
{
};

struct HelloTick
{
    NodeId node = 0;
};

struct SourceGen
{
    NodeId source = 0;
};

struct SuppressionReview
{
    NodeId source = 0;
};

using Payload = std::variant<Arrival, HoldExpiry, MobilityTick, HelloTick, SourceGen, SuppressionReview>;

struct Event
{
    double time = 0.0;
    std::uint64_t seq = 0;
    Payload payload;
};

/// Min-queue on (time, insertion order).
class EventQueue
{
  public:
    /// Throws std::logic_error when `time` lies before the last popped event.
    void push(double time, Payload payload);
    Event pop();
    bool empty() const { return m_heap.empty(); }
    std::size_t size() const { return m_heap.size(); }
    double now() const { return m_now; }
    double next_time() const { return m_heap.top().time; }

  private:
    struct Later
    {
        bool operator()(const Event& a, const Event& b) const
        {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Later> m_heap;
    std::uint64_t m_next_seq = 0;
    double m_now = 0.0;
};

/// Energy bookkeeping for sensor nodes. Sinks are mains-powered and never
/// appear here.
class EnergyLedger
{
  public:
    EnergyLedger(double tx_power, double rx_power);

    void charge_tx(NodeId node, double seconds);
    void charge_rx(NodeId node, double seconds);

    double tx_seconds() const { return m_tx_seconds; }
    double rx_seconds() const { return m_rx_seconds; }
    double consumed(NodeId node) const;
    const std::map<NodeId, double>& per_node() const { return m_per_node; }
    double total() const;
    /// Psi_t * tx seconds + Psi_r * rx seconds.
    double expected_total() const { return m_tx_power * m_tx_seconds + m_rx_power * m_rx_seconds; }
    void register_node(NodeId node) { m_per_node.try_emplace(node, 0.0); }

  private:
    double m_tx_power;
    double m_rx_power;
    double m_tx_seconds = 0.0;
    double m_rx_seconds = 0.0;
    std::map<NodeId, double> m_per_node;
};

struct MetricsRecord
{
    std::uint64_t seed = 0;
    std::string protocol;
    int nodes = 0;
    double k = 0.0;
    double speed = 0.0;

    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    double pdr = 0.0;
    double mean_e2e_delay_s = 0.0; ///< NaN when nothing was delivered
    double total_energy_J = 0.0;
    double network_lifetime_s = 0.0;
    bool lifetime_extrapolated = false;
    std::map<NodeId, double> per_node_energy_J;

    std::uint64_t suppressed_forwards = 0;
    std::uint64_t void_drops = 0;
    std::uint64_t transmissions = 0;
    std::uint64_t receptions = 0;
    std::uint64_t channel_losses = 0;
    std::uint64_t corrupt = 0;
    double tx_seconds = 0.0;
    double rx_seconds = 0.0;
    double sim_time_s = 0.0;

    static std::string csv_header();
    std::string csv_row() const;
};

/// Per-packet trace, one JSON object per line.
struct TraceSink
{
    std::ostream* out = nullptr;
    explicit operator bool() const { return out != nullptr; }
};

class Simulation
{
  public:
    /// Deploys nodes from the configuration's seed.
    explicit Simulation(const ScenarioConfig& cfg);
    /// Uses the given nodes as-is (ids must equal their index).
    Simulation(const ScenarioConfig& cfg, std::vector<NodeState> nodes);
    ~Simulation();

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    void set_trace(std::ostream* out) { m_trace.out = out; }

    /// Runs to completion. Throws std::runtime_error if no packet was generated.
    MetricsRecord run();

    const std::vector<NodeState>& nodes() const { return m_nodes; }
    const EnergyLedger& ledger() const { return m_ledger; }
    const ScenarioConfig& config() const { return m_cfg; }
    const channel::ChannelParams& channel() const { return m_channel; }
    /// Packets originated per node so far (zero for non-sources).
    std::vector<double> origin_counts() const;
    /// Link delivery probability used for a hop of `distance_m`.
    double link_probability(double distance_m) const;

  private:
    void schedule_initial();
    void dispatch(const Event& ev);
    void on_arrival(const Arrival& a, double now);
    void on_hold_expiry(const HoldExpiry& h, double now);
    void on_mobility(double now);
    void on_hello(NodeId node, double now);
    void on_source_gen(NodeId source, double now);
    void on_review(NodeId source, double now);

    void transmit(NodeState& sender, const PacketHeader& header, double now);
    /// Charges `seconds` at `power`; kills the node instead if it cannot pay.
    bool pay(NodeState& node, double power, double seconds, bool transmit, double now);
    void kill(NodeState& node, double now);
    void source_exhausted(double now);
    void trace(double now, std::string_view what, const NodeState& node, const PacketHeader* header,
               std::string_view extra = {});

    ScenarioConfig m_cfg;
    channel::ChannelParams m_channel;
    std::vector<NodeState> m_nodes;
    std::unique_ptr<Router> m_router;
    qlfr::QlfrRouter* m_qlfr = nullptr;
    EventQueue m_queue;
    EnergyLedger m_ledger;
    Rng m_mobility_rng;
    TraceSink m_trace;

    struct SourceInfo
    {
        std::uint32_t generated = 0;
        std::uint64_t delivered = 0;
        std::uint32_t latest_total = 0; ///< highest total_generated seen by any sink
        qlfr::SuppressionState suppression;
        /// Latest (delivered, total generated) reported by the sinks, not yet acted on.
        std::optional<std::pair<std::uint64_t, std::uint64_t>> feedback;
        bool exhausted = false;
    };
    std::map<NodeId, SourceInfo> m_sources;
    std::map<PacketKey, double> m_generated_at;
    std::set<PacketKey> m_delivered;
    std::uint64_t m_hello_seq = 0;
    std::uint64_t m_hold_token = 0;
    std::uint64_t m_tick = 0;
    int m_active_sources = 0;
    double m_end_time = 0.0;
    std::optional<double> m_first_death;

    MetricsRecord m_metrics;
    double m_delay_sum = 0.0;
};

/// Convenience: build and run one scenario.
MetricsRecord run(const ScenarioConfig& cfg, std::ostream* trace = nullptr);

/// JSON object with every scalar metric and the per-node energy map.
std::string to_json(const MetricsRecord& m);

} // namespace uwroute::engine

#endif
