// Scenario configuration.
//
// Files are flat `section.key = value` lines; `#` starts a comment. Every key
// has a default, so an empty file is a valid scenario.

#ifndef UWROUTE_CONFIG_HPP
#define UWROUTE_CONFIG_HPP

#include "uwroute/channel.hpp"
#include "uwroute/qcore.hpp"
#include "uwroute/world.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uwroute
{

enum class Protocol
{
    Qlfr,
    Dbr,
};

std::string_view to_string(Protocol p);

struct ScenarioConfig
{
    Region region{500.0, 500.0, 500.0};
    int sensors = 100;
    int sources = 5;
    int sinks = 5;

    double range = 150.0;
    double sound_speed = 1500.0;

    double node_speed = 3.0;
    double mobility_tick = 1.0;
    double heading_period = 10.0;
    bool sources_mobile = false;

    Protocol protocol = Protocol::Qlfr;
    qcore::QParams q{0.8, 0.5};
    double holding_k = 0.05;
    std::optional<unsigned> holding_h; ///< when set, overrides holding_k

    unsigned initial_list_length = 2;
    unsigned max_list_length = 4;
    double pdr_threshold = 0.9;

    channel::ChannelParams channel;
    bool calibrate_channel = true;
    double calibration_distance = 100.0;
    double calibration_target = 0.9;
    std::optional<double> forced_delivery_prob;
    bool serialization_delay = true;

    double initial_energy = 100.0;
    double tx_power = 2.0;
    double rx_power = 0.5;
    bool charge_hello = false;

    double hello_period = 10.0;
    double generation_interval = 10.0;
    unsigned packets_per_source = 0; ///< 0 = unlimited
    double warmup = 10.0;
    double drain_time = 10.0;

    double max_sim_time = 1000.0;
    std::uint64_t seed = 1;
    unsigned replicates = 10;

    double t_max() const { return range / sound_speed; }
    double effective_k() const;
    double staleness() const { return 2.0 * hello_period; }

    /// Throws ConfigError on the first out-of-range value.
    void validate() const;
};

class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Sets one dotted key from its textual value. Throws ConfigError.
void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Current value of a key in the same textual form the parser accepts.
std::string get_setting(const ScenarioConfig& cfg, std::string_view key);

const std::vector<std::string>& setting_keys();

ScenarioConfig parse_config(std::istream& in, std::string_view origin = "<input>");
ScenarioConfig parse_config_file(const std::filesystem::path& path);

/// Writes every key with its effective value; parse_config reads it back.
void write_config(std::ostream& os, const ScenarioConfig& cfg);

} // namespace uwroute

#endif
