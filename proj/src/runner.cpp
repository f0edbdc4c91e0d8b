#include "tphd/runner.hpp"

#include "tphd/gm_tphd.hpp"
#include "tphd/rng.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace tphd {

std::string lscan_label(std::optional<int> lscan) {
    return lscan ? std::to_string(*lscan) : std::string("full");
}

std::vector<std::optional<int>> parse_lscan_list(const std::string& text) {
    std::vector<std::optional<int>> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string item =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (item == "full") {
            out.push_back(std::nullopt);
        } else {
            const int l = std::stoi(item);
            if (l < 1) throw std::invalid_argument("lscan values must be positive or \"full\"");
            out.push_back(l);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

void apply_vary(ScenarioConfig& config, const std::string& spec) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("vary expects param=value, got \"" + spec + "\"");
    const std::string key = spec.substr(0, eq);
    const double value = std::stod(spec.substr(eq + 1));
    if (key == "sigma2") {
        const int nz = config.meas_dim();
        config.measurement.noise_cov = value * Eigen::MatrixXd::Identity(nz, nz);
    } else if (key == "lambda_c") {
        config.clutter.rate = value;
    } else if (key == "p_D") {
        config.measurement.detection_prob = value;
    } else if (key == "p_S") {
        config.motion.survival_prob = value;
    } else {
        throw std::invalid_argument("vary: unknown parameter \"" + key +
                                    "\" (expected sigma2, lambda_c, p_D or p_S)");
    }
}

namespace {

struct RunData {
    std::vector<GroundTruthTrajectory> truth;
    std::vector<ScanMeasurements> scans;  // scans[k-1] holds scan k
};

RunData make_run_data(const ScenarioConfig& config, std::uint64_t run_seed, TruthMode mode) {
    RngStream truth_rng(derive_seed(run_seed, 0, "truth"));
    RngStream meas_rng(derive_seed(run_seed, 0, "meas"));
    RunData data;
    data.truth = generate_truth(config, truth_rng, mode);
    data.scans.reserve(config.horizon);
    for (int k = 1; k <= config.horizon; ++k)
        data.scans.push_back(generate_scan(data.truth, k, config.measurement, config.clutter,
                                           meas_rng));
    return data;
}

RunResult filter_run(const ScenarioConfig& config, std::optional<int> lscan, int run_index,
                     const RunData& data) {
    OspaParams params;
    params.cutoff = 10.0;
    params.order = 2.0;
    params.position_map = config.measurement.observation_matrix;

    RunResult result;
    result.run_index = run_index;
    result.lscan = lscan;
    result.cost.resize(config.horizon);
    result.cardinality.resize(config.horizon);

    const auto t0 = std::chrono::steady_clock::now();
    TphdState state = initial_state(lscan);
    for (int k = 1; k <= config.horizon; ++k) {
        auto [next, est] = step(state, data.scans[k - 1].points, config);
        state = std::move(next);
        result.cardinality[k - 1] = static_cast<int>(est.estimates.size());
        result.cost[k - 1] = trajectory_cost(alive_set(data.truth, k), est, k, params);
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace

RunResult run_single(const ScenarioConfig& config, std::optional<int> lscan, std::uint64_t seed,
                     TruthMode mode) {
    const RunData data = make_run_data(config, seed, mode);
    return filter_run(config, lscan, 0, data);
}

MonteCarloTable run_monte_carlo(const ScenarioConfig& config,
                                const std::vector<std::optional<int>>& lscans, int runs,
                                std::uint64_t base_seed, int workers, TruthMode mode) {
    if (runs < 1) throw std::invalid_argument("run_monte_carlo: runs must be at least 1");
    if (lscans.empty()) throw std::invalid_argument("run_monte_carlo: no L values given");

    std::vector<std::vector<RunResult>> per_run(runs);
    std::vector<std::string> failures(runs);
    std::atomic<int> next_run{0};

    auto work = [&]() {
        for (;;) {
            const int r = next_run.fetch_add(1);
            if (r >= runs) return;
            try {
                const RunData data = make_run_data(config, derive_seed(base_seed, r, "run"), mode);
                per_run[r].reserve(lscans.size());
                for (const auto& l : lscans) per_run[r].push_back(filter_run(config, l, r, data));
            } catch (const std::exception& e) {
                failures[r] = e.what();
            }
        }
    };

    const int pool = std::max(1, std::min(workers, runs));
    if (pool == 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(pool);
        for (int t = 0; t < pool; ++t) threads.emplace_back(work);
        for (auto& t : threads) t.join();
    }

    for (int r = 0; r < runs; ++r) {
        if (!failures[r].empty())
            throw std::runtime_error("run " + std::to_string(r) + " failed: " + failures[r]);
    }

    MonteCarloTable table;
    table.lscans = lscans;
    table.horizon = config.horizon;
    table.runs = runs;
    table.mean_cost.assign(lscans.size(), std::vector<double>(config.horizon, 0.0));
    table.mean_cardinality.assign(config.horizon, 0.0);
    table.mean_true_cardinality.assign(config.horizon, 0.0);
    table.time_averaged_cost.assign(lscans.size(), 0.0);
    table.mean_runtime_seconds.assign(lscans.size(), 0.0);

    // fixed-order reduction over run indices
    for (int r = 0; r < runs; ++r) {
        for (std::size_t li = 0; li < lscans.size(); ++li) {
            const RunResult& rr = per_run[r][li];
            double run_mean = 0.0;
            for (int k = 0; k < config.horizon; ++k) {
                table.mean_cost[li][k] += rr.cost[k];
                run_mean += rr.cost[k];
            }
            table.time_averaged_cost[li] += run_mean / config.horizon;
            table.mean_runtime_seconds[li] += rr.wall_seconds;
        }
        for (int k = 0; k < config.horizon; ++k)
            table.mean_cardinality[k] += per_run[r][0].cardinality[k];
    }
    for (std::size_t li = 0; li < lscans.size(); ++li) {
        for (int k = 0; k < config.horizon; ++k) table.mean_cost[li][k] /= runs;
        table.time_averaged_cost[li] /= runs;
        table.mean_runtime_seconds[li] /= runs;
    }
    for (int k = 0; k < config.horizon; ++k) table.mean_cardinality[k] /= runs;

    // true cardinality is fixed by the truth lifetimes
    for (int k = 1; k <= config.horizon; ++k) {
        int alive = 0;
        for (const auto& entry : config.ground_truth_spec)
            if (entry.birth <= k && k <= entry.death) ++alive;
        table.mean_true_cardinality[k - 1] = alive;
    }

    table.run_log.reserve(static_cast<std::size_t>(runs) * lscans.size());
    for (int r = 0; r < runs; ++r)
        for (auto& rr : per_run[r]) table.run_log.push_back(std::move(rr));
    return table;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

void emit_csv(const MonteCarloTable& table, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    {
        auto out = open_csv(out_dir / "cost_vs_time.csv");
        out << "scan";
        for (const auto& l : table.lscans) out << ",L=" << lscan_label(l);
        out << "\n";
        for (int k = 0; k < table.horizon; ++k) {
            out << (k + 1);
            for (std::size_t li = 0; li < table.lscans.size(); ++li)
                out << "," << format_double(table.mean_cost[li][k]);
            out << "\n";
        }
    }
    {
        auto out = open_csv(out_dir / "cardinality_vs_time.csv");
        out << "scan,mean_estimated,mean_true\n";
        for (int k = 0; k < table.horizon; ++k) {
            out << (k + 1) << "," << format_double(table.mean_cardinality[k]) << ","
                << format_double(table.mean_true_cardinality[k]) << "\n";
        }
    }
    {
        auto out = open_csv(out_dir / "summary.csv");
        out << "L,time_averaged_cost,mean_runtime_seconds\n";
        for (std::size_t li = 0; li < table.lscans.size(); ++li) {
            out << lscan_label(table.lscans[li]) << ","
                << format_double(table.time_averaged_cost[li]) << ","
                << format_double(table.mean_runtime_seconds[li]) << "\n";
        }
    }
}

}  // namespace tphd
