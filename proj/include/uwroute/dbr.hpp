// Depth-based routing baseline: every receiver shallower than the sender is a
// candidate, and the one with the largest depth advance fires first.

#ifndef UWROUTE_DBR_HPP
#define UWROUTE_DBR_HPP

#include "uwroute/routing.hpp"

namespace uwroute::dbr
{

struct DbrParams
{
    double range = 150.0;
    double t_max = 0.1;
    double id_jitter = 1e-6; ///< seconds per node id, breaks exact ties
};

/// (2 t_max / R) * (R - advance) + jitter * id.
double holding_time(double depth_advance, NodeId node, const DbrParams& params);

class DbrRouter : public Router
{
  public:
    explicit DbrRouter(DbrParams params);

    std::string_view name() const override { return "dbr"; }
    bool uses_hello() const override { return false; }

    ReceiveAction on_receive(NodeState& node, const PacketHeader& packet, double now) override;
    ForwardResult prepare_transmit(NodeState& node, const PacketHeader& packet, double now) override;

  private:
    DbrParams m_params;
};

} // namespace uwroute::dbr

#endif
