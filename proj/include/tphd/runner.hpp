#pragma once

#include "tphd/metrics.hpp"
#include "tphd/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tphd {

struct RunResult {
    int run_index = 0;
    std::optional<int> lscan;
    std::vector<double> cost;      // trajectory cost per scan, horizon entries
    std::vector<int> cardinality;  // estimated cardinality per scan
    double wall_seconds = 0.0;     // filter + metric time, excludes simulation
};

struct MonteCarloTable {
    std::vector<std::optional<int>> lscans;
    int horizon = 0;
    int runs = 0;
    std::vector<std::vector<double>> mean_cost;  // [lscan][scan]
    std::vector<double> mean_cardinality;        // [scan]; identical across L by construction
    std::vector<double> mean_true_cardinality;   // [scan]
    std::vector<double> time_averaged_cost;      // [lscan]
    std::vector<double> mean_runtime_seconds;    // [lscan]
    std::vector<RunResult> run_log;              // ordered by run index, then lscan
};

/// One simulated run: truth and scans from streams split off `seed`, then
/// the filter over the horizon, recording trajectory cost (OSPA on
/// positions, c = 10, p = 2) and estimated cardinality per scan.
RunResult run_single(const ScenarioConfig& config, std::optional<int> lscan, std::uint64_t seed,
                     TruthMode mode = TruthMode::fixed_at_birth_mean);

/// Monte Carlo campaign: `runs` independent runs, each with seed
/// derive_seed(base_seed, run, "run"). Within a run the same truth and
/// measurement streams are shared across every L (paired comparison). Runs
/// are distributed over `workers` threads; aggregation is a fixed-order
/// reduction over run indices, so results do not depend on the worker count.
MonteCarloTable run_monte_carlo(const ScenarioConfig& config,
                                const std::vector<std::optional<int>>& lscans, int runs,
                                std::uint64_t base_seed, int workers,
                                TruthMode mode = TruthMode::fixed_at_birth_mean);

/// Writes cost_vs_time.csv, cardinality_vs_time.csv and summary.csv into
/// out_dir (created if missing).
void emit_csv(const MonteCarloTable& table, const std::filesystem::path& out_dir);

/// "full" or the decimal window length; used for CSV headers and CLI output.
std::string lscan_label(std::optional<int> lscan);

/// Parses a comma-separated list of window lengths; "full" means no
/// truncation. Throws std::invalid_argument on non-positive values.
std::vector<std::optional<int>> parse_lscan_list(const std::string& text);

/// Applies a "param=value" override: sigma2 (sets R = value * I), lambda_c,
/// p_D or p_S. Throws std::invalid_argument on unknown parameters.
void apply_vary(ScenarioConfig& config, const std::string& spec);

}  // namespace tphd
