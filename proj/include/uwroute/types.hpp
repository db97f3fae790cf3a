#ifndef UWROUTE_TYPES_HPP
#define UWROUTE_TYPES_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace uwroute
{

using NodeId = std::uint32_t;

/// (source, sequence number) identifies a data packet network-wide.
struct PacketKey
{
    NodeId source = 0;
    std::uint32_t seq = 0;

    auto operator<=>(const PacketKey&) const = default;
};

struct PacketKeyHash
{
    std::size_t operator()(const PacketKey& k) const noexcept
    {
        return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(k.source) << 32) | k.seq);
    }
};

} // namespace uwroute

#endif
