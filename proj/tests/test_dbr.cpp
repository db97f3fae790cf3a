#include "uwroute/dbr.hpp"

#include "doctest.h"

#include <stdexcept>

using namespace uwroute;
using namespace uwroute::dbr;

namespace
{

PacketHeader
from(NodeId sender, double depth, std::uint32_t seq = 0)
{
    PacketHeader h;
    h.source_id = 0;
    h.seq = seq;
    h.sender_id = sender;
    h.depth_m = depth;
    h.residual_energy_J = 50.0;
    return h;
}

NodeState
at_depth(NodeId id, double depth)
{
    NodeState n;
    n.id = id;
    n.depth_m = depth;
    n.initial_energy_J = n.residual_energy_J = 100.0;
    return n;
}

} // namespace

TEST_CASE("holding time favours the largest advance")
{
    const DbrParams p{150.0, 0.1, 1e-6};
    CHECK(holding_time(150.0, 0, p) == doctest::Approx(0.0));
    CHECK(holding_time(0.0, 0, p) == doctest::Approx(0.2));
    CHECK(holding_time(75.0, 0, p) == doctest::Approx(0.1));
    CHECK(holding_time(75.0, 3, p) - holding_time(75.0, 1, p) == doctest::Approx(2e-6));
    CHECK(holding_time(100.0, 9, p) < holding_time(50.0, 1, p));
}

TEST_CASE("receive rules")
{
    DbrRouter router({150.0, 0.1, 1e-6});

    NodeState deeper = at_depth(1, 250.0);
    CHECK(router.on_receive(deeper, from(0, 200.0), 0.0).kind == ReceiveAction::Kind::Drop);

    NodeState level = at_depth(2, 200.0);
    CHECK(router.on_receive(level, from(0, 200.0), 0.0).kind == ReceiveAction::Kind::Drop);

    NodeState a = at_depth(3, 100.0);
    NodeState b = at_depth(4, 150.0);
    const auto ra = router.on_receive(a, from(0, 200.0), 0.0);
    const auto rb = router.on_receive(b, from(0, 200.0), 0.0);
    REQUIRE(ra.kind == ReceiveAction::Kind::Schedule);
    REQUIRE(rb.kind == ReceiveAction::Kind::Schedule);
    CHECK(ra.hold < rb.hold);

    // b hears a's forward while holding: gives up
    b.pending[{0, 0}] = 1;
    const auto dup = router.on_receive(b, from(3, 100.0), 0.05);
    CHECK(dup.kind == ReceiveAction::Kind::Drop);
    CHECK(dup.cancelled_pending);
    CHECK(b.pending.empty());

    NodeState twin1 = at_depth(5, 120.0);
    NodeState twin2 = at_depth(6, 120.0);
    const double h1 = router.on_receive(twin1, from(0, 200.0), 0.0).hold;
    const double h2 = router.on_receive(twin2, from(0, 200.0), 0.0).hold;
    CHECK(h1 < h2);
    CHECK(h2 - h1 == doctest::Approx(1e-6));
}

TEST_CASE("forwarding stamps own depth and never repeats")
{
    DbrRouter router({150.0, 0.1, 1e-6});
    NodeState me = at_depth(3, 100.0);
    me.residual_energy_J = 42.0;
    const auto out = router.prepare_transmit(me, from(0, 200.0, 7), 1.0);
    REQUIRE(out.outcome == ForwardResult::Outcome::Send);
    CHECK(out.header.depth_m == 100.0);
    CHECK(out.header.residual_energy_J == 42.0);
    CHECK(out.header.sender_id == 3);
    CHECK(out.header.priority_list.empty());
    CHECK(router.prepare_transmit(me, from(0, 200.0, 7), 1.0).outcome == ForwardResult::Outcome::Duplicate);
    CHECK(router.on_receive(me, from(0, 200.0, 7), 2.0).kind == ReceiveAction::Kind::Drop);

    NodeState sink = at_depth(9, 0.0);
    sink.kind = NodeKind::Sink;
    CHECK(router.on_receive(sink, from(3, 100.0, 7), 1.1).kind == ReceiveAction::Kind::Deliver);
    CHECK(router.on_receive(sink, from(4, 90.0, 7), 1.2).kind == ReceiveAction::Kind::Ignore);
}
