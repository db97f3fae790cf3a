#include "uwroute/config.hpp"

#include "uwroute/format.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>

namespace uwroute
{

std::string_view
to_string(Protocol p)
{
    return p == Protocol::Qlfr ? "qlfr" : "dbr";
}

namespace
{

std::string_view
trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
    {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double
to_double(std::string_view key, std::string_view text)
{
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
    {
        throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
    }
    return value;
}

long long
to_integer(std::string_view key, std::string_view text)
{
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
    {
        throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(text) + "'");
    }
    return value;
}

bool
to_bool(std::string_view key, std::string_view text)
{
    if (text == "true" || text == "1" || text == "yes")
    {
        return true;
    }
    if (text == "false" || text == "0" || text == "no")
    {
        return false;
    }
    throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(text) + "'");
}

[[noreturn]] void
out_of_range(std::string_view key, std::string_view text, std::string_view bound)
{
    throw ConfigError(std::string(key) + ": value " + std::string(text) + " outside " + std::string(bound));
}

struct Setting
{
    std::function<void(ScenarioConfig&, std::string_view key, std::string_view text)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

// Field binders. Each checks the single-value range so parse errors carry the line.
Setting
positive(double ScenarioConfig::*field)
{
    return {[field](ScenarioConfig& c, std::string_view k, std::string_view t) {
                const double v = to_double(k, t);
                if (!(v > 0.0))
                {
                    out_of_range(k, t, "(0, inf)");
                }
                c.*field = v;
            },
            [field](const ScenarioConfig& c) { return format_number(c.*field); }};
}

Setting
non_negative(double ScenarioConfig::*field)
{
    return {[field](ScenarioConfig& c, std::string_view k, std::string_view t) {
                const double v = to_double(k, t);
                if (!(v >= 0.0))
                {
                    out_of_range(k, t, "[0, inf)");
                }
                c.*field = v;
            },
            [field](const ScenarioConfig& c) { return format_number(c.*field); }};
}

template <typename Int>
Setting
integer(Int ScenarioConfig::*field, long long lo, long long hi)
{
    return {[field, lo, hi](ScenarioConfig& c, std::string_view k, std::string_view t) {
                const long long v = to_integer(k, t);
                if (v < lo || v > hi)
                {
                    out_of_range(k, t, "[" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
                }
                c.*field = static_cast<Int>(v);
            },
            [field](const ScenarioConfig& c) { return std::to_string(c.*field); }};
}

Setting
boolean(bool ScenarioConfig::*field)
{
    return {[field](ScenarioConfig& c, std::string_view k, std::string_view t) { c.*field = to_bool(k, t); },
            [field](const ScenarioConfig& c) { return std::string(c.*field ? "true" : "false"); }};
}

template <typename Get, typename Put>
Setting
nested_double(Get get, Put put, double lo, double hi, bool lo_open, std::string bound)
{
    return {[=](ScenarioConfig& c, std::string_view k, std::string_view t) {
                const double v = to_double(k, t);
                const bool low_ok = lo_open ? v > lo : v >= lo;
                if (!low_ok || v > hi)
                {
                    out_of_range(k, t, bound);
                }
                put(c, v);
            },
            [=](const ScenarioConfig& c) { return format_number(get(c)); }};
}

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::map<std::string, Setting, std::less<>>&
registry()
{
    static const std::map<std::string, Setting, std::less<>> table = [] {
        std::map<std::string, Setting, std::less<>> t;
        auto region = [](double Region::*f) {
            return nested_double([f](const ScenarioConfig& c) { return c.region.*f; },
                                 [f](ScenarioConfig& c, double v) { c.region.*f = v; }, 0.0, kInf, true, "(0, inf)");
        };
        t["region.width"] = region(&Region::width);
        t["region.length"] = region(&Region::length);
        t["region.height"] = region(&Region::height);

        t["nodes.sensors"] = integer(&ScenarioConfig::sensors, 1, 100000);
        t["nodes.sources"] = integer(&ScenarioConfig::sources, 1, 100000);
        t["nodes.sinks"] = integer(&ScenarioConfig::sinks, 1, 100000);

        t["network.range"] = positive(&ScenarioConfig::range);
        t["network.sound_speed"] = positive(&ScenarioConfig::sound_speed);

        t["mobility.speed"] = non_negative(&ScenarioConfig::node_speed);
        t["mobility.tick"] = positive(&ScenarioConfig::mobility_tick);
        t["mobility.heading_period"] = positive(&ScenarioConfig::heading_period);
        t["mobility.sources_mobile"] = boolean(&ScenarioConfig::sources_mobile);

        t["protocol.name"] = Setting{[](ScenarioConfig& c, std::string_view k, std::string_view v) {
                                         if (v == "qlfr")
                                         {
                                             c.protocol = Protocol::Qlfr;
                                         }
                                         else if (v == "dbr")
                                         {
                                             c.protocol = Protocol::Dbr;
                                         }
                                         else
                                         {
                                             throw ConfigError(std::string(k) + ": unknown protocol '" +
                                                               std::string(v) + "' (expected qlfr or dbr)");
                                         }
                                     },
                                     [](const ScenarioConfig& c) { return std::string(to_string(c.protocol)); }};

        t["qlearning.gamma"] = nested_double([](const ScenarioConfig& c) { return c.q.gamma; },
                                             [](ScenarioConfig& c, double v) { c.q.gamma = v; }, 0.0, 1.0, false,
                                             "[0, 1]");
        t["qlearning.alpha"] = nested_double([](const ScenarioConfig& c) { return c.q.alpha; },
                                             [](ScenarioConfig& c, double v) { c.q.alpha = v; }, 0.0, 1.0, true,
                                             "(0, 1]");

        t["holding.k"] = Setting{[](ScenarioConfig& c, std::string_view k, std::string_view v) {
                                     const double value = to_double(k, v);
                                     if (!(value > 0.0))
                                     {
                                         out_of_range(k, v, "(0, 2 t_max]");
                                     }
                                     c.holding_k = value;
                                     c.holding_h.reset();
                                 },
                                 [](const ScenarioConfig& c) { return format_number(c.holding_k); }};
        t["holding.h"] = Setting{[](ScenarioConfig& c, std::string_view k, std::string_view v) {
                                     if (v == "off")
                                     {
                                         c.holding_h.reset();
                                         return;
                                     }
                                     const long long h = to_integer(k, v);
                                     if (h < 1 || h > 1000000)
                                     {
                                         out_of_range(k, v, "[1, 1000000]");
                                     }
                                     c.holding_h = static_cast<unsigned>(h);
                                 },
                                 [](const ScenarioConfig& c) {
                                     return c.holding_h ? std::to_string(*c.holding_h) : std::string("off");
                                 }};

        t["suppression.initial_length"] = integer(&ScenarioConfig::initial_list_length, 1, 255);
        t["suppression.max_length"] = integer(&ScenarioConfig::max_list_length, 1, 255);
        t["suppression.pdr_threshold"] = nested_double([](const ScenarioConfig& c) { return c.pdr_threshold; },
                                                       [](ScenarioConfig& c, double v) { c.pdr_threshold = v; }, 0.0,
                                                       1.0, true, "(0, 1)");

        auto chan = [](double channel::ChannelParams::*f, double lo, double hi, bool open, std::string bound) {
            return nested_double([f](const ScenarioConfig& c) { return c.channel.*f; },
                                 [f](ScenarioConfig& c, double v) { c.channel.*f = v; }, lo, hi, open, bound);
        };
        t["channel.frequency_khz"] = chan(&channel::ChannelParams::frequency_khz, 0.0, kInf, true, "(0, inf)");
        t["channel.spreading"] = chan(&channel::ChannelParams::spreading_kappa, 1.0, 2.0, false, "[1, 2]");
        t["channel.atten_const"] = chan(&channel::ChannelParams::atten_const, 0.0, kInf, true, "(0, inf)");
        t["channel.noise_density"] = chan(&channel::ChannelParams::noise_density, 0.0, kInf, true, "(0, inf)");
        t["channel.bit_rate"] = chan(&channel::ChannelParams::bit_rate, 0.0, kInf, true, "(0, inf)");
        t["channel.packet_bits"] = Setting{[](ScenarioConfig& c, std::string_view k, std::string_view v) {
                                               const long long bits = to_integer(k, v);
                                               if (bits < 1 || bits > 100000000)
                                               {
                                                   out_of_range(k, v, "[1, 1e8]");
                                               }
                                               c.channel.packet_bits = static_cast<unsigned>(bits);
                                           },
                                           [](const ScenarioConfig& c) {
                                               return std::to_string(c.channel.packet_bits);
                                           }};
        t["channel.energy_per_bit"] = Setting{[](ScenarioConfig& c, std::string_view k, std::string_view v) {
                                                  if (v == "auto")
                                                  {
                                                      c.calibrate_channel = true;
                                                      return;
                                                  }
                                                  const double eb = to_double(k, v);
                                                  if (!(eb > 0.0))
                                                  {
                                                      out_of_range(k, v, "(0, inf)");
                                                  }
                                                  c.channel.energy_per_bit = eb;
                                                  c.calibrate_channel = false;
                                              },
                                              [](const ScenarioConfig& c) {
                                                  return c.calibrate_channel
                                                             ? std::string("auto")
                                                             : format_number(c.channel.energy_per_bit);
                                              }};
        t["channel.calibration_distance"] = positive(&ScenarioConfig::calibration_distance);
        t["channel.calibration_target"] = nested_double(
            [](const ScenarioConfig& c) { return c.calibration_target; },
            [](ScenarioConfig& c, double v) { c.calibration_target = v; }, 0.0, 1.0, true, "(0, 1)");
        t["channel.forced_delivery_prob"] = Setting{
            [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                if (v == "off")
                {
                    c.forced_delivery_prob.reset();
                    return;
                }
                const double p = to_double(k, v);
                if (!(p >= 0.0 && p <= 1.0))
                {
                    out_of_range(k, v, "[0, 1]");
                }
                c.forced_delivery_prob = p;
            },
            [](const ScenarioConfig& c) {
                return c.forced_delivery_prob ? format_number(*c.forced_delivery_prob) : std::string("off");
            }};
        t["channel.serialization_delay"] = boolean(&ScenarioConfig::serialization_delay);

        t["energy.initial"] = positive(&ScenarioConfig::initial_energy);
        t["energy.tx_power"] = non_negative(&ScenarioConfig::tx_power);
        t["energy.rx_power"] = non_negative(&ScenarioConfig::rx_power);
        t["energy.charge_hello"] = boolean(&ScenarioConfig::charge_hello);

        t["hello.period"] = positive(&ScenarioConfig::hello_period);

        t["traffic.generation_interval"] = positive(&ScenarioConfig::generation_interval);
        t["traffic.packets_per_source"] = integer(&ScenarioConfig::packets_per_source, 0, 100000000);
        t["traffic.warmup"] = non_negative(&ScenarioConfig::warmup);
        t["traffic.drain_time"] = non_negative(&ScenarioConfig::drain_time);

        t["sim.max_time"] = positive(&ScenarioConfig::max_sim_time);
        t["sim.seed"] = Setting{[](ScenarioConfig& c, std::string_view k, std::string_view v) {
                                    const long long s = to_integer(k, v);
                                    if (s < 0)
                                    {
                                        out_of_range(k, v, "[0, 2^63)");
                                    }
                                    c.seed = static_cast<std::uint64_t>(s);
                                },
                                [](const ScenarioConfig& c) { return std::to_string(c.seed); }};
        t["sim.replicates"] = integer(&ScenarioConfig::replicates, 1, 100000);
        return t;
    }();
    return table;
}

} // namespace

double
ScenarioConfig::effective_k() const
{
    return holding_h ? 2.0 * t_max() / *holding_h : holding_k;
}

void
ScenarioConfig::validate() const
{
    if (sources > sensors)
    {
        throw ConfigError("nodes.sources: more sources than sensor nodes");
    }
    if (initial_list_length > max_list_length)
    {
        throw ConfigError("suppression.initial_length exceeds suppression.max_length");
    }
    const double k = effective_k();
    if (!(k > 0.0 && k <= 2.0 * t_max() * (1.0 + 1e-12)))
    {
        throw ConfigError("holding.k: value " + format_number(k) + " outside (0, 2 R / v0]");
    }
    try
    {
        q.validate();
        channel.validate();
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(e.what());
    }
}

void
apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value)
{
    const auto& table = registry();
    auto it = table.find(key);
    if (it == table.end())
    {
        throw ConfigError("unknown key '" + std::string(key) + "'");
    }
    it->second.set(cfg, key, trim(value));
}

std::string
get_setting(const ScenarioConfig& cfg, std::string_view key)
{
    const auto& table = registry();
    auto it = table.find(key);
    if (it == table.end())
    {
        throw ConfigError("unknown key '" + std::string(key) + "'");
    }
    return it->second.get(cfg);
}

const std::vector<std::string>&
setting_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& [k, _] : registry())
        {
            out.push_back(k);
        }
        return out;
    }();
    return keys;
}

ScenarioConfig
parse_config(std::istream& in, std::string_view origin)
{
    ScenarioConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        std::string_view text = line;
        if (auto hash = text.find('#'); hash != std::string_view::npos)
        {
            text = text.substr(0, hash);
        }
        text = trim(text);
        if (text.empty())
        {
            continue;
        }
        const auto eq = text.find('=');
        const std::string where = std::string(origin) + ":" + std::to_string(lineno) + ": ";
        if (eq == std::string_view::npos)
        {
            throw ConfigError(where + "expected 'key = value'");
        }
        try
        {
            apply_setting(cfg, trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
        }
        catch (const ConfigError& e)
        {
            throw ConfigError(where + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig
parse_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw std::runtime_error("cannot open config file '" + path.string() + "'");
    }
    return parse_config(in, path.string());
}

void
write_config(std::ostream& os, const ScenarioConfig& cfg)
{
    for (const auto& key : setting_keys())
    {
        os << key << " = " << get_setting(cfg, key) << '\n';
    }
}

} // namespace uwroute
