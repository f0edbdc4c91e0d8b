#include "tphd/simulator.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace tphd {

std::vector<GroundTruthTrajectory> generate_truth(const ScenarioConfig& config, RngStream& rng,
                                                  TruthMode mode) {
    const auto& f = config.motion.transition_matrix;
    const auto& q = config.motion.process_noise;
    const int births = static_cast<int>(config.birth.components.size());

    std::vector<GroundTruthTrajectory> truth;
    truth.reserve(config.ground_truth_spec.size());
    for (const auto& entry : config.ground_truth_spec) {
        Eigen::VectorXd x;
        if (entry.initial_state) {
            x = *entry.initial_state;
        } else {
            if (entry.birth_component < 1 || entry.birth_component > births)
                throw std::invalid_argument("truth entry references nonexistent birth component");
            const auto& b = config.birth.components[entry.birth_component - 1];
            x = (mode == TruthMode::fixed_at_birth_mean) ? b.mean : sample_mvn(b.mean, b.cov, rng);
        }

        GroundTruthTrajectory t;
        t.birth = entry.birth;
        t.death = entry.death;
        t.states.reserve(entry.death - entry.birth + 1);
        t.states.push_back(x);
        for (int k = entry.birth + 1; k <= entry.death; ++k) {
            x = sample_mvn(f * x, q, rng);
            t.states.push_back(x);
        }
        truth.push_back(std::move(t));
    }
    return truth;
}

ScanMeasurements generate_scan(const std::vector<GroundTruthTrajectory>& truth, int k,
                               const MeasurementModel& meas, const ClutterModel& clutter,
                               RngStream& rng) {
    ScanMeasurements scan;
    scan.scan = k;

    for (const auto& t : truth) {
        if (k < t.birth || k > t.death) continue;
        if (!rng.bernoulli(meas.detection_prob)) continue;
        const Eigen::VectorXd& x = t.states[k - t.birth];
        scan.points.push_back(sample_mvn(meas.observation_matrix * x, meas.noise_cov, rng));
    }

    const long clutter_count = rng.poisson(clutter.rate);
    const auto& region = clutter.region;
    for (long c = 0; c < clutter_count; ++c) {
        Eigen::VectorXd z(region.min.size());
        for (Eigen::Index d = 0; d < z.size(); ++d) z[d] = rng.uniform(region.min[d], region.max[d]);
        scan.points.push_back(std::move(z));
    }

    std::shuffle(scan.points.begin(), scan.points.end(), rng.engine());
    return scan;
}

std::vector<GroundTruthTrajectory> alive_set(const std::vector<GroundTruthTrajectory>& truth,
                                             int k) {
    std::vector<GroundTruthTrajectory> alive;
    for (const auto& t : truth) {
        if (k < t.birth || k > t.death) continue;
        GroundTruthTrajectory cut;
        cut.birth = t.birth;
        cut.death = t.death;
        cut.states.assign(t.states.begin(), t.states.begin() + (k - t.birth + 1));
        alive.push_back(std::move(cut));
    }
    return alive;
}

// Truth files: {"trajectories": [{"birth", "death", "states": [[...], ...]}]}

void save_truth(const std::vector<GroundTruthTrajectory>& truth,
                const std::filesystem::path& path) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& t : truth) {
        nlohmann::json states = nlohmann::json::array();
        for (const auto& x : t.states) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index i = 0; i < x.size(); ++i) row.push_back(x[i]);
            states.push_back(row);
        }
        list.push_back({{"birth", t.birth}, {"death", t.death}, {"states", states}});
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write truth file: " + path.string());
    out << nlohmann::json{{"trajectories", list}}.dump(2) << "\n";
}

std::vector<GroundTruthTrajectory> load_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read truth file: " + path.string());
    const nlohmann::json j = nlohmann::json::parse(in);

    std::vector<GroundTruthTrajectory> truth;
    for (const auto& e : j.at("trajectories")) {
        GroundTruthTrajectory t;
        t.birth = e.at("birth").get<int>();
        t.death = e.at("death").get<int>();
        for (const auto& row : e.at("states")) {
            Eigen::VectorXd x(row.size());
            for (std::size_t i = 0; i < row.size(); ++i) x[i] = row[i].get<double>();
            t.states.push_back(std::move(x));
        }
        if (static_cast<int>(t.states.size()) != t.death - t.birth + 1)
            throw std::invalid_argument("truth file: states length does not match lifetime");
        truth.push_back(std::move(t));
    }
    return truth;
}

}  // namespace tphd
