#include "tphd/runner.hpp"

#include "tphd/rng.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

using namespace tphd;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    return dir;
}

/// Single noise-free target: p_D = 1, no clutter, Q = 0, tiny R.
ScenarioConfig noiseless_config() {
    ScenarioConfig c;
    c.motion.transition_matrix.resize(2, 2);
    c.motion.transition_matrix << 1.0, 0.5,
                                   0.0, 1.0;
    c.motion.process_noise = Eigen::MatrixXd::Zero(2, 2);
    c.motion.survival_prob = 1.0;
    c.measurement.observation_matrix.resize(1, 2);
    c.measurement.observation_matrix << 1.0, 0.0;
    c.measurement.noise_cov = Eigen::MatrixXd::Constant(1, 1, 1e-6);
    c.measurement.detection_prob = 1.0;
    c.clutter.rate = 0.0;
    c.clutter.region.min = Eigen::VectorXd::Constant(1, -100.0);
    c.clutter.region.max = Eigen::VectorXd::Constant(1, 100.0);
    BirthComponent b;
    b.weight = 0.1;
    b.mean = Eigen::Vector2d(5.0, 1.0);
    b.cov.resize(2, 2);
    b.cov << 1.0, 0.0,
             0.0, 0.25;
    c.birth.components = {b};
    c.horizon = 30;
    c.lscan = std::nullopt;
    c.prune_threshold = 1e-4;
    c.absorb_threshold = 0.1;
    c.max_components = 30;
    c.ground_truth_spec = {TruthEntry{1, 30, 1, std::nullopt}};
    c.runs = 1;
    c.base_seed = 11;
    return c;
}

}  // namespace

TEST_CASE("a single run produces bounded per-scan costs over the horizon") {
    const ScenarioConfig config = validate(paper_scenario());
    const RunResult r = run_single(config, 10, 42);
    REQUIRE(r.cost.size() == 100);
    REQUIRE(r.cardinality.size() == 100);
    for (double c : r.cost) {
        CHECK(c >= 0.0);
        CHECK(c <= 10.0);
    }
    for (int n : r.cardinality) CHECK(n >= 0);
    CHECK(r.wall_seconds > 0.0);
}

TEST_CASE("identical configuration and seed reproduce a run exactly") {
    const ScenarioConfig config = validate(paper_scenario());
    const RunResult a = run_single(config, 5, 7);
    const RunResult b = run_single(config, 5, 7);
    REQUIRE(a.cost.size() == b.cost.size());
    for (std::size_t k = 0; k < a.cost.size(); ++k) {
        CHECK(a.cost[k] == b.cost[k]);
        CHECK(a.cardinality[k] == b.cardinality[k]);
    }
}

TEST_CASE("different seeds give different measurement realizations") {
    const ScenarioConfig config = validate(paper_scenario());
    const RunResult a = run_single(config, 5, 7);
    const RunResult b = run_single(config, 5, 8);
    bool any_diff = false;
    for (std::size_t k = 0; k < a.cost.size(); ++k) any_diff |= (a.cost[k] != b.cost[k]);
    CHECK(any_diff);
}

TEST_CASE("the noiseless limit drives the cost to zero") {
    const ScenarioConfig config = validate(noiseless_config());
    const RunResult r = run_single(config, std::nullopt, 3);
    REQUIRE(r.cost.size() == 30);
    for (std::size_t k = 0; k < r.cost.size(); ++k) {
        CHECK(r.cost[k] <= 0.05);
        CHECK(r.cardinality[k] == 1);
    }
    CHECK(r.cost.back() <= 0.01);
}

TEST_CASE("per-scan cardinality is identical for every window length") {
    const ScenarioConfig config = validate(paper_scenario());
    const std::vector<std::optional<int>> lscans = {1, 2, 5, 10, std::nullopt};
    const MonteCarloTable table = run_monte_carlo(config, lscans, 3, 123, 1);
    REQUIRE(table.run_log.size() == 3 * lscans.size());
    for (int r = 0; r < 3; ++r) {
        const RunResult& base = table.run_log[r * lscans.size()];
        for (std::size_t li = 1; li < lscans.size(); ++li) {
            const RunResult& other = table.run_log[r * lscans.size() + li];
            REQUIRE(other.cardinality.size() == base.cardinality.size());
            for (std::size_t k = 0; k < base.cardinality.size(); ++k)
                CHECK(other.cardinality[k] == base.cardinality[k]);
        }
    }
}

TEST_CASE("a one-run campaign aggregates to the single run") {
    const ScenarioConfig config = validate(paper_scenario());
    const std::uint64_t base_seed = 99;
    const MonteCarloTable table = run_monte_carlo(config, {5}, 1, base_seed, 1);
    const RunResult single = run_single(config, 5, derive_seed(base_seed, 0, "run"));

    REQUIRE(table.mean_cost.size() == 1);
    REQUIRE(table.mean_cost[0].size() == single.cost.size());
    for (std::size_t k = 0; k < single.cost.size(); ++k) {
        CHECK(table.mean_cost[0][k] == single.cost[k]);
        CHECK(table.mean_cardinality[k] == static_cast<double>(single.cardinality[k]));
    }
    const double mean =
        std::accumulate(single.cost.begin(), single.cost.end(), 0.0) / single.cost.size();
    CHECK(table.time_averaged_cost[0] == doctest::Approx(mean).epsilon(1e-15));
}

TEST_CASE("the true cardinality curve follows the configured lifetimes") {
    const ScenarioConfig config = validate(paper_scenario());
    const MonteCarloTable table = run_monte_carlo(config, {1}, 1, 5, 1);
    CHECK(table.mean_true_cardinality[0] == 1.0);    // scan 1
    CHECK(table.mean_true_cardinality[4] == 2.0);    // scan 5
    CHECK(table.mean_true_cardinality[9] == 3.0);    // scan 10
    CHECK(table.mean_true_cardinality[69] == 3.0);   // scan 70, deaths inclusive
    CHECK(table.mean_true_cardinality[70] == 2.0);   // scan 71
    CHECK(table.mean_true_cardinality[80] == 1.0);   // scan 81
    CHECK(table.mean_true_cardinality[95] == 0.0);   // scan 96
}

TEST_CASE("campaign results do not depend on the worker count") {
    ScenarioConfig config = validate(paper_scenario());
    config.horizon = 40;
    const std::vector<std::optional<int>> lscans = {2, 5};
    const MonteCarloTable a = run_monte_carlo(config, lscans, 4, 77, 1);
    const MonteCarloTable b = run_monte_carlo(config, lscans, 4, 77, 4);

    for (std::size_t li = 0; li < lscans.size(); ++li) {
        CHECK(a.time_averaged_cost[li] == b.time_averaged_cost[li]);
        for (int k = 0; k < config.horizon; ++k)
            CHECK(a.mean_cost[li][k] == b.mean_cost[li][k]);
    }
    for (int k = 0; k < config.horizon; ++k)
        CHECK(a.mean_cardinality[k] == b.mean_cardinality[k]);
}

TEST_CASE("campaigns validate their inputs") {
    const ScenarioConfig config = validate(paper_scenario());
    CHECK_THROWS_AS(run_monte_carlo(config, {1}, 0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(run_monte_carlo(config, {}, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("CSV output is deterministic apart from the runtime column") {
    ScenarioConfig config = validate(paper_scenario());
    config.horizon = 30;
    const std::vector<std::optional<int>> lscans = {1, std::nullopt};

    const fs::path dir_a = fresh_dir("tphd_csv_a");
    const fs::path dir_b = fresh_dir("tphd_csv_b");
    emit_csv(run_monte_carlo(config, lscans, 3, 2024, 1), dir_a);
    emit_csv(run_monte_carlo(config, lscans, 3, 2024, 3), dir_b);

    CHECK(slurp(dir_a / "cost_vs_time.csv") == slurp(dir_b / "cost_vs_time.csv"));
    CHECK(slurp(dir_a / "cardinality_vs_time.csv") == slurp(dir_b / "cardinality_vs_time.csv"));

    const auto sa = lines_of(slurp(dir_a / "summary.csv"));
    const auto sb = lines_of(slurp(dir_b / "summary.csv"));
    REQUIRE(sa.size() == sb.size());
    for (std::size_t i = 0; i < sa.size(); ++i) {
        // strip the runtime column (everything after the second comma)
        const auto cut = [](const std::string& s) {
            const auto second = s.find(',', s.find(',') + 1);
            return s.substr(0, second);
        };
        CHECK(cut(sa[i]) == cut(sb[i]));
    }

    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("CSV headers and shapes match the published format") {
    ScenarioConfig config = validate(paper_scenario());
    config.horizon = 20;
    const fs::path dir = fresh_dir("tphd_csv_shape");
    emit_csv(run_monte_carlo(config, {1, 2, std::nullopt}, 2, 5, 1), dir);

    const auto cost = lines_of(slurp(dir / "cost_vs_time.csv"));
    REQUIRE(cost.size() == 21);
    CHECK(cost[0] == "scan,L=1,L=2,L=full");
    CHECK(cost[1].substr(0, 2) == "1,");

    // every cost entry stays within the OSPA cutoff
    for (std::size_t i = 1; i < cost.size(); ++i) {
        std::istringstream row(cost[i]);
        std::string field;
        std::getline(row, field, ',');  // scan index
        while (std::getline(row, field, ',')) {
            const double v = std::stod(field);
            CHECK(v >= 0.0);
            CHECK(v <= 10.0);
        }
    }

    const auto card = lines_of(slurp(dir / "cardinality_vs_time.csv"));
    REQUIRE(card.size() == 21);
    CHECK(card[0] == "scan,mean_estimated,mean_true");

    const auto summary = lines_of(slurp(dir / "summary.csv"));
    REQUIRE(summary.size() == 4);
    CHECK(summary[0] == "L,time_averaged_cost,mean_runtime_seconds");
    CHECK(summary[1].substr(0, 2) == "1,");
    CHECK(summary[2].substr(0, 2) == "2,");
    CHECK(summary[3].substr(0, 5) == "full,");

    fs::remove_all(dir);
}

TEST_CASE("an empty table emits headers only") {
    const fs::path dir = fresh_dir("tphd_csv_empty");
    emit_csv(MonteCarloTable{}, dir);
    CHECK(slurp(dir / "cost_vs_time.csv") == "scan\n");
    CHECK(slurp(dir / "cardinality_vs_time.csv") == "scan,mean_estimated,mean_true\n");
    CHECK(slurp(dir / "summary.csv") == "L,time_averaged_cost,mean_runtime_seconds\n");
    fs::remove_all(dir);
}

TEST_CASE("lscan labels") {
    CHECK(lscan_label(std::nullopt) == "full");
    CHECK(lscan_label(10) == "10");
}

TEST_CASE("lscan lists parse numbers and the full keyword") {
    const auto a = parse_lscan_list("1,2,5,10");
    REQUIRE(a.size() == 4);
    CHECK(a[0] == 1);
    CHECK(a[3] == 10);

    const auto b = parse_lscan_list("full");
    REQUIRE(b.size() == 1);
    CHECK(!b[0].has_value());

    const auto c = parse_lscan_list("2,full");
    REQUIRE(c.size() == 2);
    CHECK(c[0] == 2);
    CHECK(!c[1].has_value());

    CHECK_THROWS_AS(parse_lscan_list("0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_lscan_list("abc"), std::invalid_argument);
}

TEST_CASE("parameter overrides rewrite the configuration") {
    ScenarioConfig config = paper_scenario();
    apply_vary(config, "sigma2=25");
    CHECK(config.measurement.noise_cov == 25.0 * Eigen::MatrixXd::Identity(2, 2));
    apply_vary(config, "lambda_c=70");
    CHECK(config.clutter.rate == 70.0);
    apply_vary(config, "p_D=0.99");
    CHECK(config.measurement.detection_prob == 0.99);
    apply_vary(config, "p_S=0.95");
    CHECK(config.motion.survival_prob == 0.95);
    CHECK_THROWS_AS(apply_vary(config, "bogus=1"), std::invalid_argument);
    CHECK_THROWS_AS(apply_vary(config, "sigma2"), std::invalid_argument);
}

#ifdef TPHD_BENCH_PATH
TEST_CASE("the benchmark binary runs end to end") {
    const fs::path dir = fresh_dir("tphd_cli_out");
    const std::string cmd = std::string(TPHD_BENCH_PATH) + " --runs 2 --seed 3 --lscan 1,full --out " +
                            dir.string() + " > /dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);

    const auto summary = lines_of(slurp(dir / "summary.csv"));
    REQUIRE(summary.size() == 3);
    CHECK(summary[0] == "L,time_averaged_cost,mean_runtime_seconds");
    CHECK(summary[1].substr(0, 2) == "1,");
    CHECK(summary[2].substr(0, 5) == "full,");

    const auto cost = lines_of(slurp(dir / "cost_vs_time.csv"));
    CHECK(cost[0] == "scan,L=1,L=full");
    CHECK(cost.size() == 101);
    fs::remove_all(dir);
}

TEST_CASE("the benchmark binary runs a scenario file with overrides") {
    const fs::path dir = fresh_dir("tphd_cli_scen");
    fs::create_directories(dir);
    const fs::path scen = dir / "scenario.json";
    ScenarioConfig config = paper_scenario();
    config.horizon = 20;
    config.ground_truth_spec = {TruthEntry{1, 20, 1, std::nullopt},
                                TruthEntry{5, 20, 2, std::nullopt},
                                TruthEntry{10, 20, 3, std::nullopt}};
    save_scenario(config, scen);

    const std::string cmd = std::string(TPHD_BENCH_PATH) + " --scenario " + scen.string() +
                            " --runs 1 --lscan 2 --vary p_D=0.99 --out " + dir.string() +
                            " > /dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    const auto cost = lines_of(slurp(dir / "cost_vs_time.csv"));
    CHECK(cost[0] == "scan,L=2");
    CHECK(cost.size() == 21);
    fs::remove_all(dir);
}

TEST_CASE("the benchmark binary fails loudly on invalid input") {
    const std::string bad_vary =
        std::string(TPHD_BENCH_PATH) + " --runs 1 --vary bogus=1 > /dev/null 2>&1";
    CHECK(std::system(bad_vary.c_str()) != 0);

    const std::string bad_prob =
        std::string(TPHD_BENCH_PATH) + " --runs 1 --vary p_D=1.5 > /dev/null 2>&1";
    CHECK(std::system(bad_prob.c_str()) != 0);

    const std::string bad_scenario =
        std::string(TPHD_BENCH_PATH) + " --scenario /nonexistent.json > /dev/null 2>&1";
    CHECK(std::system(bad_scenario.c_str()) != 0);
}
#endif
