// uwroute: command-line front end for single runs, sweeps, the analytical
// model and channel calibration.

#include "uwroute/analysis.hpp"
#include "uwroute/channel.hpp"
#include "uwroute/config.hpp"
#include "uwroute/engine.hpp"
#include "uwroute/experiment.hpp"
#include "uwroute/format.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace uwroute;

namespace
{

struct Common
{
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "csv";
};

void
add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config_path, "scenario file (key = value lines)")->check(CLI::ExistingFile);
    cmd->add_option("--set", c.overrides, "override a setting, key=value (repeatable)");
    cmd->add_option("--seed", c.seed, "base random seed");
    cmd->add_option("--out", c.out, "output directory (stdout when omitted)");
    cmd->add_option("--format", c.format, "result format")->check(CLI::IsMember({"csv", "json"}));
}

ScenarioConfig
load(const Common& c)
{
    ScenarioConfig cfg = c.config_path.empty() ? ScenarioConfig{} : parse_config_file(c.config_path);
    for (const auto& kv : c.overrides)
    {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
        {
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        }
        apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (c.seed)
    {
        cfg.seed = *c.seed;
    }
    cfg.validate();
    return cfg;
}

std::ofstream
open_out(const fs::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
    {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    return os;
}

fs::path
prepare_dir(const std::string& dir)
{
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec)
    {
        throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
    }
    return p;
}

int
cmd_run(const Common& c, const std::string& trace_path, const std::string& snapshot_path)
{
    const ScenarioConfig cfg = load(c);
    engine::Simulation sim(cfg);
    std::ofstream trace;
    if (!trace_path.empty())
    {
        trace = open_out(trace_path);
        sim.set_trace(&trace);
    }
    const engine::MetricsRecord m = sim.run();

    std::ostringstream body;
    if (c.format == "csv")
    {
        body << engine::MetricsRecord::csv_header() << '\n' << m.csv_row() << '\n';
    }
    else
    {
        body << engine::to_json(m) << '\n';
    }

    if (c.out.empty())
    {
        std::cout << body.str();
    }
    else
    {
        const fs::path dir = prepare_dir(c.out);
        open_out(dir / ("run." + c.format)) << body.str();
        auto cfg_out = open_out(dir / "config.txt");
        write_config(cfg_out, cfg);
        auto energy = open_out(dir / "node_energy.csv");
        energy << "node,energy_J\n";
        for (const auto& [id, e] : m.per_node_energy_J)
        {
            energy << id << ',' << format_number(e) << '\n';
        }
        auto qtab = open_out(dir / "qtable.csv");
        write_qtable_csv(qtab, sim.nodes());
        auto dep = open_out(dir / "deployment.csv");
        write_deployment_csv(dep, sim.nodes());
    }
    if (!snapshot_path.empty())
    {
        const auto topo =
            analysis::freeze(sim.nodes(), cfg, sim.channel(), sim.origin_counts(), m.sim_time_s, m.sim_time_s);
        auto os = open_out(snapshot_path);
        analysis::save_topology(os, topo);
    }
    return 0;
}

std::vector<std::string>
split_values(const std::string& list)
{
    std::vector<std::string> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        if (b != std::string::npos)
        {
            out.push_back(item.substr(b, e - b + 1));
        }
    }
    return out;
}

int
cmd_sweep(const Common& c, const std::string& param, const std::string& values, unsigned threads)
{
    const ScenarioConfig cfg = load(c);
    const experiment::SweepSpec spec{param, split_values(values)};
    const auto result = experiment::run_sweep(cfg, spec, threads);

    auto emit = [&](std::ostream& os, const std::string& format) {
        if (format == "csv")
        {
            experiment::emit_csv(os, result.table);
        }
        else
        {
            experiment::emit_json(os, result.key, result.table);
        }
    };
    if (c.out.empty())
    {
        emit(std::cout, c.format);
        return 0;
    }
    const fs::path dir = prepare_dir(c.out);
    {
        auto os = open_out(dir / "summary.csv");
        emit(os, "csv");
    }
    {
        auto os = open_out(dir / "summary.json");
        emit(os, "json");
    }
    auto runs = open_out(dir / "runs.csv");
    experiment::write_runs_csv(runs, result.runs);
    auto cfg_out = open_out(dir / "config.txt");
    write_config(cfg_out, cfg);
    cfg_out << "# sweep " << param << " over " << values << '\n';
    return 0;
}

int
cmd_analyze(const std::string& snapshot, const std::string& out)
{
    const auto topo = analysis::load_topology_file(snapshot);
    const auto summary = analysis::summarize(topo);
    std::ostringstream report;
    analysis::write_report_csv(report, topo);

    std::ostringstream agg;
    agg << "metric,value\n"
        << "pdr," << format_number(summary.pdr) << '\n'
        << "delay_conditional_s," << format_number(summary.delay_conditional) << '\n'
        << "total_energy_J," << format_number(summary.total_energy) << '\n'
        << "lifetime_s," << format_number(summary.lifetime) << '\n';
    if (out.empty())
    {
        std::cout << report.str() << '\n' << agg.str();
        return 0;
    }
    const fs::path dir = prepare_dir(out);
    open_out(dir / "nodes.csv") << report.str();
    open_out(dir / "network.csv") << agg.str();
    return 0;
}

int
cmd_calibrate(const Common& c)
{
    const ScenarioConfig cfg = load(c);
    const auto ch = channel::calibrate(cfg.channel, cfg.calibration_distance, cfg.calibration_target);
    std::cout << "energy_per_bit," << format_number(ch.energy_per_bit) << '\n'
              << "eb_over_n0," << format_number(ch.energy_per_bit / ch.noise_density) << '\n';
    std::cout << "distance_m,snr,bit_error,delivery\n";
    for (double d : {25.0, 50.0, 75.0, 100.0, 125.0, 150.0})
    {
        std::cout << format_number(d) << ',' << format_number(channel::mean_snr(d, ch)) << ','
                  << format_number(channel::bit_error_prob(d, ch)) << ','
                  << format_number(channel::packet_delivery_prob(d, ch)) << '\n';
    }
    return 0;
}

} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"Underwater sensor network routing simulator"};
    app.require_subcommand(1);

    Common common;
    std::string trace_path;
    std::string snapshot_path;
    auto* run = app.add_subcommand("run", "simulate one scenario");
    add_common(run, common);
    run->add_option("--trace", trace_path, "write a JSON-lines packet trace here");
    run->add_option("--snapshot", snapshot_path, "write the final topology for `analyze`");

    std::string param;
    std::string values;
    unsigned threads = 0;
    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep with replicates");
    add_common(sweep, common);
    sweep->add_option("--param", param, "config key to vary")->required();
    sweep->add_option("--values", values, "comma-separated values")->required();
    sweep->add_option("--threads", threads, "worker threads (0 = all cores)");

    std::string snapshot_in;
    std::string analyze_out;
    auto* analyze = app.add_subcommand("analyze", "evaluate the analytical model on a snapshot");
    analyze->add_option("snapshot", snapshot_in, "topology snapshot (JSON)")->required()->check(CLI::ExistingFile);
    analyze->add_option("--out", analyze_out, "output directory (stdout when omitted)");

    auto* calibrate = app.add_subcommand("calibrate", "fit e_b so a reference hop meets its delivery target");
    add_common(calibrate, common);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (run->parsed())
        {
            return cmd_run(common, trace_path, snapshot_path);
        }
        if (sweep->parsed())
        {
            return cmd_sweep(common, param, values, threads);
        }
        if (analyze->parsed())
        {
            return cmd_analyze(snapshot_in, analyze_out);
        }
        return cmd_calibrate(common);
    }
    catch (const std::exception& e)
    {
        std::cerr << "uwroute: " << e.what() << '\n';
        return 1;
    }
}
