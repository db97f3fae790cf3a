// Interface between the event engine and a forwarding protocol.

#ifndef UWROUTE_ROUTING_HPP
#define UWROUTE_ROUTING_HPP

#include "uwroute/packet.hpp"
#include "uwroute/world.hpp"

#include <string_view>

namespace uwroute
{

struct ReceiveAction
{
    enum class Kind
    {
        Drop,     ///< not an eligible forwarder, or already forwarded
        Schedule, ///< hold for `hold` seconds, then forward
        Ignore,   ///< hello, duplicate at a sink, nothing to do
        Deliver,  ///< first copy of this packet at this sink
        Corrupt,  ///< header failed validation
    };

    Kind kind = Kind::Ignore;
    double hold = 0.0;
    /// A pending forward of the same packet was given up on hearing this copy.
    bool cancelled_pending = false;
};

struct ForwardResult
{
    enum class Outcome
    {
        Send,
        Void,      ///< no eligible next hop
        Duplicate, ///< node already forwarded this packet
    };

    Outcome outcome = Outcome::Void;
    PacketHeader header;
};

class Router
{
  public:
    virtual ~Router() = default;

    virtual std::string_view name() const = 0;

    /// Whether nodes need periodic Hello beacons for this protocol.
    virtual bool uses_hello() const = 0;

    /// Called for every packet a live node successfully receives.
    virtual ReceiveAction on_receive(NodeState& node, const PacketHeader& packet, double now) = 0;

    /// Builds the outgoing header when a source originates `packet` or a
    /// holding timer for it expires.
    virtual ForwardResult prepare_transmit(NodeState& node, const PacketHeader& packet, double now) = 0;
};

/// Cancels a pending forward of `key`; returns true if one existed.
bool on_overhear_during_hold(NodeState& node, const PacketKey& key);

} // namespace uwroute

#endif
