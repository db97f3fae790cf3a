#include "uwroute/experiment.hpp"

#include "uwroute/format.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace uwroute::experiment
{

const std::vector<std::string>&
aggregated_metrics()
{
    static const std::vector<std::string> names{
        "pdr",         "mean_delay_s", "total_energy_J", "lifetime_s", "suppressed_forwards",
        "void_drops",  "transmissions", "generated",     "delivered",
    };
    return names;
}

double
metric_value(const engine::MetricsRecord& m, std::string_view metric)
{
    if (metric == "pdr") return m.pdr;
    if (metric == "mean_delay_s") return m.mean_e2e_delay_s;
    if (metric == "total_energy_J") return m.total_energy_J;
    if (metric == "lifetime_s") return m.network_lifetime_s;
    if (metric == "suppressed_forwards") return static_cast<double>(m.suppressed_forwards);
    if (metric == "void_drops") return static_cast<double>(m.void_drops);
    if (metric == "transmissions") return static_cast<double>(m.transmissions);
    if (metric == "generated") return static_cast<double>(m.generated);
    if (metric == "delivered") return static_cast<double>(m.delivered);
    throw std::invalid_argument("unknown metric '" + std::string(metric) + "'");
}

SweepResult
run_sweep(const ScenarioConfig& base, const SweepSpec& sweep, unsigned threads)
{
    if (sweep.values.empty())
    {
        throw std::invalid_argument("sweep has no values");
    }
    struct Job
    {
        ScenarioConfig cfg;
        std::string value;
        unsigned replicate;
    };
    std::vector<Job> jobs;
    for (const auto& value : sweep.values)
    {
        ScenarioConfig cfg = base;
        try
        {
            apply_setting(cfg, sweep.key, value);
            cfg.validate();
        }
        catch (const ConfigError& e)
        {
            throw ConfigError(std::string("invalid sweep: ") + e.what());
        }
        for (unsigned r = 0; r < base.replicates; ++r)
        {
            Job job{cfg, value, r};
            job.cfg.seed = base.seed + r;
            jobs.push_back(std::move(job));
        }
    }

    SweepResult result;
    result.key = sweep.key;
    result.runs.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++)
        {
            try
            {
                result.runs[i] = RunResult{jobs[i].value, jobs[i].replicate, engine::run(jobs[i].cfg)};
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                {
                    failure = std::current_exception();
                }
                next = jobs.size();
            }
        }
    };
    if (threads == 0)
    {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t)
        {
            pool.emplace_back(worker);
        }
        worker();
    }
    if (failure)
    {
        std::rethrow_exception(failure);
    }
    result.table = aggregate(result.runs);
    return result;
}

namespace
{

bool
as_number(const std::string& s, double& out)
{
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

} // namespace

std::vector<AggregateRow>
aggregate(const std::vector<RunResult>& runs)
{
    std::vector<std::string> values;
    std::map<std::string, std::vector<const engine::MetricsRecord*>> groups;
    for (const auto& r : runs)
    {
        auto [it, inserted] = groups.try_emplace(r.sweep_value);
        if (inserted)
        {
            values.push_back(r.sweep_value);
        }
        it->second.push_back(&r.metrics);
    }
    bool numeric = true;
    std::map<std::string, double> numbers;
    for (const auto& v : values)
    {
        double x = 0.0;
        numeric = numeric && as_number(v, x);
        numbers[v] = x;
    }
    if (numeric)
    {
        std::stable_sort(values.begin(), values.end(),
                         [&](const std::string& a, const std::string& b) { return numbers[a] < numbers[b]; });
    }
    else
    {
        std::sort(values.begin(), values.end());
    }

    std::vector<AggregateRow> table;
    for (const auto& v : values)
    {
        for (const auto& metric : aggregated_metrics())
        {
            std::vector<double> xs;
            for (const auto* m : groups[v])
            {
                const double x = metric_value(*m, metric);
                if (std::isfinite(x))
                {
                    xs.push_back(x);
                }
            }
            AggregateRow row{v, metric, std::nan(""), 0.0, xs.size()};
            if (!xs.empty())
            {
                double sum = 0.0;
                for (double x : xs)
                {
                    sum += x;
                }
                row.mean = sum / static_cast<double>(xs.size());
                if (xs.size() > 1)
                {
                    double ss = 0.0;
                    for (double x : xs)
                    {
                        ss += (x - row.mean) * (x - row.mean);
                    }
                    row.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
                }
            }
            table.push_back(std::move(row));
        }
    }
    return table;
}

void
emit_csv(std::ostream& os, const std::vector<AggregateRow>& table)
{
    if (table.empty())
    {
        throw std::invalid_argument("refusing to emit an empty result table");
    }
    os << "sweep_value,metric,mean,stddev,n\n";
    for (const auto& r : table)
    {
        os << r.sweep_value << ',' << r.metric << ',' << format_number(r.mean) << ',' << format_number(r.stddev)
           << ',' << r.n << '\n';
    }
}

void
emit_json(std::ostream& os, const std::string& key, const std::vector<AggregateRow>& table)
{
    if (table.empty())
    {
        throw std::invalid_argument("refusing to emit an empty result table");
    }
    auto number = [](double x) { return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(); };
    nlohmann::ordered_json j;
    j["sweep"] = key;
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : table)
    {
        rows.push_back({{"sweep_value", r.sweep_value},
                        {"metric", r.metric},
                        {"mean", number(r.mean)},
                        {"stddev", number(r.stddev)},
                        {"n", r.n}});
    }
    os << j.dump(2) << '\n';
}

void
write_runs_csv(std::ostream& os, const std::vector<RunResult>& runs)
{
    os << "sweep_value,replicate," << engine::MetricsRecord::csv_header() << '\n';
    for (const auto& r : runs)
    {
        os << r.sweep_value << ',' << r.replicate << ',' << r.metrics.csv_row() << '\n';
    }
}

} // namespace uwroute::experiment
