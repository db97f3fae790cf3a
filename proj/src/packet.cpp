#include "uwroute/packet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <unordered_set>

namespace uwroute
{

void
validate(const PacketHeader& h)
{
    if (h.kind != PacketKind::Data && h.kind != PacketKind::Hello)
    {
        throw MalformedHeader("unknown packet kind");
    }
    if (!std::isfinite(h.v_value) || h.v_value > 0.0)
    {
        throw MalformedHeader("V-value must be finite and non-positive");
    }
    if (!std::isfinite(h.depth_m) || h.depth_m < 0.0)
    {
        throw MalformedHeader("depth must be finite and non-negative");
    }
    if (!std::isfinite(h.residual_energy_J) || h.residual_energy_J < 0.0)
    {
        throw MalformedHeader("residual energy must be finite and non-negative");
    }
    if (h.priority_list.size() > h.list_length)
    {
        throw MalformedHeader("priority list longer than its declared length");
    }
    if (h.list_length > 255)
    {
        throw MalformedHeader("list length does not fit the header");
    }
    std::unordered_set<NodeId> ids;
    for (NodeId id : h.priority_list)
    {
        if (id == h.sender_id)
        {
            throw MalformedHeader("sender listed as its own forwarder");
        }
        if (!ids.insert(id).second)
        {
            throw MalformedHeader("duplicate id in priority list");
        }
    }
    if (h.kind == PacketKind::Hello && !h.priority_list.empty())
    {
        throw MalformedHeader("hello packets carry no priority list");
    }
}

std::optional<std::uint32_t>
priority_of(const PacketHeader& header, NodeId node)
{
    auto it = std::find(header.priority_list.begin(), header.priority_list.end(), node);
    if (it == header.priority_list.end())
    {
        return std::nullopt;
    }
    return static_cast<std::uint32_t>(it - header.priority_list.begin()) + 1;
}

namespace
{

constexpr std::int8_t kNoDirective = -128;

class Writer
{
  public:
    explicit Writer(std::vector<std::uint8_t>& out)
        : m_out(out)
    {
    }

    template <typename T>
    void put(T value)
    {
        std::uint8_t raw[sizeof(T)];
        std::memcpy(raw, &value, sizeof(T));
        if constexpr (std::endian::native == std::endian::big)
        {
            std::reverse(raw, raw + sizeof(T));
        }
        m_out.insert(m_out.end(), raw, raw + sizeof(T));
    }

  private:
    std::vector<std::uint8_t>& m_out;
};

class Reader
{
  public:
    explicit Reader(std::span<const std::uint8_t> in)
        : m_in(in)
    {
    }

    template <typename T>
    T get()
    {
        if (m_pos + sizeof(T) > m_in.size())
        {
            throw MalformedHeader("truncated header");
        }
        std::uint8_t raw[sizeof(T)];
        std::memcpy(raw, m_in.data() + m_pos, sizeof(T));
        if constexpr (std::endian::native == std::endian::big)
        {
            std::reverse(raw, raw + sizeof(T));
        }
        m_pos += sizeof(T);
        T value;
        std::memcpy(&value, raw, sizeof(T));
        return value;
    }

    bool exhausted() const { return m_pos == m_in.size(); }

  private:
    std::span<const std::uint8_t> m_in;
    std::size_t m_pos = 0;
};

} // namespace

std::vector<std::uint8_t>
encode(const PacketHeader& h)
{
    validate(h);
    std::vector<std::uint8_t> out;
    out.reserve(44 + 4 * h.priority_list.size());
    Writer w(out);
    w.put(static_cast<std::uint8_t>(h.kind));
    w.put<std::uint32_t>(h.source_id);
    w.put<std::uint32_t>(h.seq);
    w.put(h.v_value);
    w.put(h.depth_m);
    w.put(h.residual_energy_J);
    w.put<std::uint32_t>(h.sender_id);
    w.put<std::uint32_t>(h.total_generated);
    std::int8_t directive = kNoDirective;
    if (h.suppression_directive)
    {
        directive = static_cast<std::int8_t>(std::clamp(*h.suppression_directive, -127, 127));
    }
    w.put(directive);
    w.put(static_cast<std::uint8_t>(h.list_length));
    w.put(static_cast<std::uint8_t>(h.priority_list.size()));
    for (NodeId id : h.priority_list)
    {
        w.put<std::uint32_t>(id);
    }
    return out;
}

PacketHeader
decode(std::span<const std::uint8_t> bytes)
{
    Reader r(bytes);
    PacketHeader h;
    const auto kind = r.get<std::uint8_t>();
    if (kind > 1)
    {
        throw MalformedHeader("unknown packet kind");
    }
    h.kind = static_cast<PacketKind>(kind);
    h.source_id = r.get<std::uint32_t>();
    h.seq = r.get<std::uint32_t>();
    h.v_value = r.get<double>();
    h.depth_m = r.get<double>();
    h.residual_energy_J = r.get<double>();
    h.sender_id = r.get<std::uint32_t>();
    h.total_generated = r.get<std::uint32_t>();
    const auto directive = r.get<std::int8_t>();
    if (directive != kNoDirective)
    {
        h.suppression_directive = directive;
    }
    h.list_length = r.get<std::uint8_t>();
    const auto count = r.get<std::uint8_t>();
    h.priority_list.reserve(count);
    for (unsigned i = 0; i < count; ++i)
    {
        h.priority_list.push_back(r.get<std::uint32_t>());
    }
    if (!r.exhausted())
    {
        throw MalformedHeader("trailing bytes after header");
    }
    validate(h);
    return h;
}

} // namespace uwroute
