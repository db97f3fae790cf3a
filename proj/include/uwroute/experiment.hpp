// Parameter sweeps: many independent runs, aggregated per sweep value.

#ifndef UWROUTE_EXPERIMENT_HPP
#define UWROUTE_EXPERIMENT_HPP

#include "uwroute/config.hpp"
#include "uwroute/engine.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace uwroute::experiment
{

struct SweepSpec
{
    std::string key;                 ///< any config key, e.g. "holding.k"
    std::vector<std::string> values; ///< textual values as a config file would hold them
};

struct RunResult
{
    std::string sweep_value;
    unsigned replicate = 0;
    engine::MetricsRecord metrics;
};

struct AggregateRow
{
    std::string sweep_value;
    std::string metric;
    double mean = 0.0;
    double stddev = 0.0; ///< sample standard deviation; 0 for a single run
    std::size_t n = 0;   ///< runs with a finite value of this metric
};

struct SweepResult
{
    std::string key;
    std::vector<RunResult> runs;
    std::vector<AggregateRow> table;
};

/// Metrics reported per sweep value, in output order.
const std::vector<std::string>& aggregated_metrics();
double metric_value(const engine::MetricsRecord& m, std::string_view metric);

/// One run per (value, replicate); replicate r uses seed base.seed + r.
/// `threads` = 0 picks the hardware concurrency.
SweepResult run_sweep(const ScenarioConfig& base, const SweepSpec& sweep, unsigned threads = 0);

/// Groups runs by sweep value (numeric order when every value is a number).
std::vector<AggregateRow> aggregate(const std::vector<RunResult>& runs);

/// Throw std::invalid_argument on an empty table.
void emit_csv(std::ostream& os, const std::vector<AggregateRow>& table);
void emit_json(std::ostream& os, const std::string& key, const std::vector<AggregateRow>& table);

/// Raw per-run rows: sweep_value,replicate followed by the metrics CSV columns.
void write_runs_csv(std::ostream& os, const std::vector<RunResult>& runs);

} // namespace uwroute::experiment

#endif
