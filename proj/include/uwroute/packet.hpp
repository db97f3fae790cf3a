// Routing header carried by every data and Hello packet.
//
// Wire layout (little-endian, 44 + 4*count bytes):
//
//   u8   kind               0 = data, 1 = hello
//   u32  source id
//   u32  sequence number
//   f64  sender V-value
//   f64  sender depth (m)
//   f64  sender residual energy (J)
//   u32  sender id
//   u32  total packets generated by the source so far
//   i8   suppression directive (list-length delta; -128 = none)
//   u8   length of priority list
//   u8   number of ids that follow
//   u32  priority list entries, highest priority first

#ifndef UWROUTE_PACKET_HPP
#define UWROUTE_PACKET_HPP

#include "uwroute/types.hpp"
#include "uwroute/world.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace uwroute
{

enum class PacketKind : std::uint8_t
{
    Data = 0,
    Hello = 1,
};

struct PacketHeader
{
    PacketKind kind = PacketKind::Data;
    NodeId source_id = 0;
    std::uint32_t seq = 0;
    double v_value = 0.0;
    double depth_m = 0.0;
    double residual_energy_J = 0.0;
    NodeId sender_id = 0;
    std::uint32_t list_length = 0;
    std::vector<NodeId> priority_list;
    std::uint32_t total_generated = 0;
    std::optional<int> suppression_directive;

    PacketKey key() const { return {source_id, seq}; }
    RoutingKnowledge sender_knowledge() const { return {v_value, depth_m, residual_energy_J}; }

    bool operator==(const PacketHeader&) const = default;
};

class MalformedHeader : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Throws MalformedHeader if the header breaks a structural invariant.
void validate(const PacketHeader& header);

/// 1-based position of `node` in the priority list, or nullopt.
std::optional<std::uint32_t> priority_of(const PacketHeader& header, NodeId node);

std::vector<std::uint8_t> encode(const PacketHeader& header);
PacketHeader decode(std::span<const std::uint8_t> bytes);

} // namespace uwroute

#endif
