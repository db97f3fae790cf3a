// Closed-form performance model of anypath forwarding on a frozen topology:
// delivery probability, delay, traffic, energy and lifetime.
//
// Every node keeps an ordered candidate list with one link delivery
// probability per entry. A transmission is carried on by the first candidate
// in list order that decodes it.

#ifndef UWROUTE_ANALYSIS_HPP
#define UWROUTE_ANALYSIS_HPP

#include "uwroute/config.hpp"
#include "uwroute/world.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace uwroute::analysis
{

class TopologyError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct TopoNode
{
    NodeId id = 0;
    Vec3 position;
    double depth_m = 0.0;
    bool sink = false;
    double rate = 0.0; ///< packets originated here over the observation window
    std::vector<NodeId> candidates;
    std::vector<double> link_probs; ///< same length as candidates
};

struct StaticTopology
{
    std::vector<TopoNode> nodes; ///< nodes[i].id == i
    double range = 150.0;
    double sound_speed = 1500.0;
    double holding_k = 0.05;
    double packet_duration = 0.0512;
    double tx_power = 2.0;
    double rx_power = 0.5;
    double initial_energy = 100.0;
    double run_time = 1.0;

    /// Throws TopologyError on dangling ids, bad probabilities or mismatched lists.
    void validate() const;
    double hop_delay(NodeId from, NodeId to) const;
    /// Holding time of the candidate at 0-based list index `slot`; sinks never hold.
    double holding(NodeId candidate, std::size_t slot) const;
};

/// p_j * prod_{k<j} (1 - p_k), j 1-based.
double candidate_forward_prob(std::span<const double> probs, std::size_t j);

/// Senders before receivers. Throws TopologyError on a cycle.
std::vector<NodeId> topological_order(const StaticTopology& topo);

/// Probability that a packet held by each node reaches any sink (1 at sinks).
std::vector<double> delivery_prob_to_sink(const StaticTopology& topo);
double delivery_prob_to_sink(const StaticTopology& topo, NodeId node);

/// Expected transmissions per node: own rate plus forwarded inbound traffic.
std::vector<double> outgoing_traffic(const StaticTopology& topo);

/// Holding time a node spends on an inbound packet, summed over its senders
/// with each sender weighted by its share of the inbound traffic.
std::vector<double> expected_holding_time(const StaticTopology& topo);
double expected_holding_time(const StaticTopology& topo, NodeId node);

struct DelayEstimate
{
    double raw = 0.0;         ///< delivery-weighted recursion, sum_j (tau_j + D/v + T_j) * P_j
    double ratio = 0.0;       ///< raw / delivery probability
    double conditional = 0.0; ///< mean delay of delivered packets
};

std::vector<DelayEstimate> expected_delay_to_sink(const StaticTopology& topo);
DelayEstimate expected_delay_to_sink(const StaticTopology& topo, NodeId node);

/// Transmit energy for own traffic plus reception of every in-range
/// non-sink neighbor's traffic.
std::vector<double> node_energy(const StaticTopology& topo, std::span<const double> traffic);

/// Minimum over sensors of e_ini / (E / T_run); +inf if nobody spends energy.
double network_lifetime(const StaticTopology& topo, std::span<const double> energy);

struct NetworkSummary
{
    double pdr = 0.0;
    double delay_conditional = 0.0;
    double total_energy = 0.0;
    double lifetime = 0.0;
};

NetworkSummary summarize(const StaticTopology& topo);

/// Per-node CSV: id,kind,p_to_sink,delay_raw_s,delay_ratio_s,delay_conditional_s,holding_s,traffic,energy_J,lifetime_s
void write_report_csv(std::ostream& os, const StaticTopology& topo);

void save_topology(std::ostream& os, const StaticTopology& topo);
StaticTopology load_topology(std::istream& is);
StaticTopology load_topology_file(const std::filesystem::path& path);

/// Freezes the current state of a simulation. Candidate lists are rebuilt
/// from each node's neighbor table (QLFR) or by depth advance (DBR), then
/// restricted to live neighbors that really are shallower and in range.
/// `rates` gives the packets originated per node over `run_time`.
StaticTopology freeze(std::span<const NodeState> nodes, const ScenarioConfig& cfg,
                      const channel::ChannelParams& channel, std::span<const double> rates, double run_time,
                      double now);

} // namespace uwroute::analysis

#endif
