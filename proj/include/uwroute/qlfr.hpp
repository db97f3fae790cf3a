// Q-learning anypath forwarding.
//
// A sender ranks its shallower neighbors by the one-step Q target
// r(s, j) + gamma * V(j), embeds the top `list_length` of them in the header,
// and each listed receiver waits tau(n) = k * (n - 1) before forwarding. A
// holder that overhears another copy of the same packet gives up.

#ifndef UWROUTE_QLFR_HPP
#define UWROUTE_QLFR_HPP

#include "uwroute/qcore.hpp"
#include "uwroute/routing.hpp"

#include <vector>

namespace uwroute::qlfr
{

/// Linear holding-time schedule; k is the gap between adjacent priorities.
struct HoldingParams
{
    double t_max = 0.1; ///< one-hop worst-case propagation delay, R / v0
    double k = 0.05;

    /// k = 2 t_max / h.
    static HoldingParams from_h(unsigned h, double t_max);
    static HoldingParams from_k(double k, double t_max);

    /// Priority gap that guarantees suppression, 2 t_max / k (may be fractional).
    double h() const { return 2.0 * t_max / k; }
    double offset() const { return -k; }

    void validate() const;
};

/// tau(n) = k * (n - 1); n is the 1-based priority.
double holding_time(unsigned n, const HoldingParams& params);

struct SuppressionState
{
    unsigned current_list_length = 2;
    unsigned max_list_length = 4;
    double pdr_threshold = 0.9;
    double observed_pdr = 0.0;
};

/// Sink-side feedback step: shorten the list when the delivery ratio beats the
/// threshold, lengthen it when it falls short, keep it on a tie.
unsigned suppression_adjust(SuppressionState& state, std::uint64_t delivered, std::uint64_t total_generated);

struct QlfrParams
{
    qcore::QParams q;
    HoldingParams holding;
    double d_max = 150.0;     ///< normaliser of the depth cost; the transmission range
    double staleness = 20.0;  ///< neighbor entries older than this are ignored
};

/// Score used to order candidates: reward to `neighbor` plus its discounted V.
double candidate_score(const NodeState& sender, const RoutingKnowledge& neighbor, const QlfrParams& params);

/// Fresh neighbors strictly shallower than `sender`, best score first, ties to
/// the lower id, truncated to `list_length`. Empty means a void.
std::vector<NodeId> build_priority_list(const NodeState& sender, const QlfrParams& params, double now,
                                        unsigned list_length);

class QlfrRouter : public Router
{
  public:
    explicit QlfrRouter(QlfrParams params);

    std::string_view name() const override { return "qlfr"; }
    bool uses_hello() const override { return true; }

    ReceiveAction on_receive(NodeState& node, const PacketHeader& packet, double now) override;

    /// Rebuilds the priority list, learns Q toward the chosen head and stamps
    /// the node's own routing knowledge into the header.
    ForwardResult prepare_transmit(NodeState& node, const PacketHeader& packet, double now) override;

    PacketHeader make_hello(const NodeState& node) const;

    const QlfrParams& params() const { return m_params; }

  private:
    QlfrParams m_params;
};

} // namespace uwroute::qlfr

#endif
