#include "tphd/models.hpp"

#include "tphd/common.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>

namespace tphd {

double Box::volume() const {
    if (min.size() == 0 || min.size() != max.size()) return 0.0;
    return (max - min).prod();
}

bool Box::contains(const Eigen::VectorXd& z) const {
    if (z.size() != min.size()) return false;
    return (z.array() >= min.array()).all() && (z.array() <= max.array()).all();
}

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

void require_probability(double p, const std::string& name) {
    require(p >= 0.0 && p <= 1.0, name + ": probability out of range");
}

}  // namespace

ScenarioConfig validate(ScenarioConfig config) {
    const int nx = config.state_dim();
    const int nz = config.meas_dim();

    const auto& f = config.motion.transition_matrix;
    auto& q = config.motion.process_noise;
    require(f.rows() == f.cols() && f.rows() > 0, "transition_matrix: dimension mismatch");
    require(q.rows() == nx && q.cols() == nx, "process_noise: dimension mismatch");
    q = symmetrized(q);
    require(is_psd(q), "process_noise: non-PSD covariance");
    require_probability(config.motion.survival_prob, "survival_prob");

    const auto& h = config.measurement.observation_matrix;
    auto& r = config.measurement.noise_cov;
    require(h.rows() > 0 && h.cols() == nx, "observation_matrix: dimension mismatch");
    require(r.rows() == nz && r.cols() == nz, "noise_cov: dimension mismatch");
    r = symmetrized(r);
    require(is_pd(r), "noise_cov: non-PSD covariance (must be positive definite)");
    require_probability(config.measurement.detection_prob, "detection_prob");

    require(config.clutter.rate >= 0.0, "clutter rate must be nonnegative");
    const auto& region = config.clutter.region;
    require(region.min.size() == nz && region.max.size() == nz,
            "clutter region: dimension mismatch");
    require((region.max.array() > region.min.array()).all(),
            "clutter region volume must be positive");

    for (std::size_t j = 0; j < config.birth.components.size(); ++j) {
        auto& b = config.birth.components[j];
        const std::string tag = "birth component " + std::to_string(j + 1);
        require(b.weight >= 0.0, tag + ": negative weight");
        require(b.mean.size() == nx, tag + ": dimension mismatch");
        require(b.cov.rows() == nx && b.cov.cols() == nx, tag + ": dimension mismatch");
        b.cov = symmetrized(b.cov);
        require(is_psd(b.cov), tag + ": non-PSD covariance");
    }

    require(config.horizon >= 1, "horizon must be at least 1");
    require(!config.lscan || *config.lscan >= 1, "lscan must be a positive integer or full");
    require(config.prune_threshold >= 0.0, "prune_threshold must be nonnegative");
    require(config.absorb_threshold >= 0.0, "absorb_threshold must be nonnegative");
    require(config.max_components >= 1, "max_components must be at least 1");
    require(config.runs >= 1, "runs must be at least 1");

    const int births = static_cast<int>(config.birth.components.size());
    for (const auto& entry : config.ground_truth_spec) {
        require(entry.birth >= 1 && entry.birth <= entry.death && entry.death <= config.horizon,
                "truth entry outside horizon");
        if (entry.initial_state) {
            require(entry.initial_state->size() == nx, "truth entry: dimension mismatch");
        } else {
            require(entry.birth_component >= 1 && entry.birth_component <= births,
                    "truth entry references nonexistent birth component");
        }
    }

    return config;
}

ScenarioConfig paper_scenario() {
    const double tau = 0.5;
    const double q = 3.24;

    Eigen::Matrix2d f1;
    f1 << 1.0, tau,
          0.0, 1.0;
    Eigen::Matrix2d q1;
    q1 << tau * tau * tau / 3.0, tau * tau / 2.0,
          tau * tau / 2.0,       tau;
    q1 *= q;

    ScenarioConfig config;
    config.motion.transition_matrix = Eigen::MatrixXd::Zero(4, 4);
    config.motion.transition_matrix.block<2, 2>(0, 0) = f1;
    config.motion.transition_matrix.block<2, 2>(2, 2) = f1;
    config.motion.process_noise = Eigen::MatrixXd::Zero(4, 4);
    config.motion.process_noise.block<2, 2>(0, 0) = q1;
    config.motion.process_noise.block<2, 2>(2, 2) = q1;
    config.motion.survival_prob = 0.99;

    config.measurement.observation_matrix = Eigen::MatrixXd::Zero(2, 4);
    config.measurement.observation_matrix(0, 0) = 1.0;
    config.measurement.observation_matrix(1, 2) = 1.0;
    config.measurement.noise_cov = 16.0 * Eigen::MatrixXd::Identity(2, 2);
    config.measurement.detection_prob = 0.9;

    config.clutter.rate = 50.0;
    config.clutter.region.min = Eigen::Vector2d(0.0, 0.0);
    config.clutter.region.max = Eigen::Vector2d(2000.0, 2000.0);

    auto birth_at = [](double px, double py) {
        BirthComponent b;
        b.weight = 0.1;
        b.mean = Eigen::Vector4d(px, 0.0, py, 0.0);
        b.cov = 100.0 * Eigen::MatrixXd::Identity(4, 4);
        return b;
    };
    config.birth.components = {birth_at(85.0, 140.0), birth_at(-5.0, 220.0),
                               birth_at(7.0, 50.0)};

    config.horizon = 100;
    config.lscan = 10;
    config.prune_threshold = 1e-4;
    config.absorb_threshold = 0.1;
    config.max_components = 30;

    config.ground_truth_spec = {
        TruthEntry{1, 80, 1, std::nullopt},
        TruthEntry{5, 70, 2, std::nullopt},
        TruthEntry{10, 95, 3, std::nullopt},
    };

    config.runs = 500;
    config.base_seed = 1;
    return config;
}

double clutter_density(const Eigen::VectorXd& z, const ClutterModel& clutter) {
    if (!clutter.region.contains(z)) return 0.0;
    return 1.0 / clutter.region.volume();
}

// ---- JSON scenario files ----
//
// Field names mirror the struct fields; matrices are row-major nested
// arrays; "lscan" is a positive integer or the string "full"; each
// ground_truth_spec entry carries either "birth_component" (1-based) or
// "initial_state".

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw std::invalid_argument(std::string(what) + ": expected a nested array");
    const auto rows = j.size();
    const auto cols = j.front().size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j[i].size() != cols)
            throw std::invalid_argument(std::string(what) + ": ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

Eigen::VectorXd vector_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + ": expected an array");
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

}  // namespace

void save_scenario(const ScenarioConfig& config, const std::filesystem::path& path) {
    json j;
    j["motion"] = {{"transition_matrix", matrix_to_json(config.motion.transition_matrix)},
                   {"process_noise", matrix_to_json(config.motion.process_noise)},
                   {"survival_prob", config.motion.survival_prob}};
    j["measurement"] = {{"observation_matrix", matrix_to_json(config.measurement.observation_matrix)},
                        {"noise_cov", matrix_to_json(config.measurement.noise_cov)},
                        {"detection_prob", config.measurement.detection_prob}};
    j["clutter"] = {{"rate", config.clutter.rate},
                    {"region", {{"min", vector_to_json(config.clutter.region.min)},
                                {"max", vector_to_json(config.clutter.region.max)}}}};
    json births = json::array();
    for (const auto& b : config.birth.components) {
        births.push_back({{"weight", b.weight},
                          {"mean", vector_to_json(b.mean)},
                          {"cov", matrix_to_json(b.cov)}});
    }
    j["birth"] = {{"components", births}};
    j["horizon"] = config.horizon;
    if (config.lscan)
        j["lscan"] = *config.lscan;
    else
        j["lscan"] = "full";
    j["prune_threshold"] = config.prune_threshold;
    j["absorb_threshold"] = config.absorb_threshold;
    j["max_components"] = config.max_components;
    json truth = json::array();
    for (const auto& entry : config.ground_truth_spec) {
        json e = {{"birth", entry.birth}, {"death", entry.death}};
        if (entry.initial_state)
            e["initial_state"] = vector_to_json(*entry.initial_state);
        else
            e["birth_component"] = entry.birth_component;
        truth.push_back(e);
    }
    j["ground_truth_spec"] = truth;
    j["runs"] = config.runs;
    j["base_seed"] = config.base_seed;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario file: " + path.string());
    out << j.dump(2) << "\n";
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read scenario file: " + path.string());
    json j = json::parse(in);

    ScenarioConfig config;
    const json& motion = j.at("motion");
    config.motion.transition_matrix = matrix_from_json(motion.at("transition_matrix"), "transition_matrix");
    config.motion.process_noise = matrix_from_json(motion.at("process_noise"), "process_noise");
    config.motion.survival_prob = motion.at("survival_prob").get<double>();

    const json& meas = j.at("measurement");
    config.measurement.observation_matrix = matrix_from_json(meas.at("observation_matrix"), "observation_matrix");
    config.measurement.noise_cov = matrix_from_json(meas.at("noise_cov"), "noise_cov");
    config.measurement.detection_prob = meas.at("detection_prob").get<double>();

    const json& clutter = j.at("clutter");
    config.clutter.rate = clutter.at("rate").get<double>();
    config.clutter.region.min = vector_from_json(clutter.at("region").at("min"), "region.min");
    config.clutter.region.max = vector_from_json(clutter.at("region").at("max"), "region.max");

    for (const json& b : j.at("birth").at("components")) {
        BirthComponent bc;
        bc.weight = b.at("weight").get<double>();
        bc.mean = vector_from_json(b.at("mean"), "birth mean");
        bc.cov = matrix_from_json(b.at("cov"), "birth cov");
        config.birth.components.push_back(std::move(bc));
    }

    config.horizon = j.at("horizon").get<int>();
    const json& lscan = j.at("lscan");
    if (lscan.is_string()) {
        if (lscan.get<std::string>() != "full")
            throw std::invalid_argument("lscan: expected a positive integer or \"full\"");
        config.lscan = std::nullopt;
    } else {
        config.lscan = lscan.get<int>();
    }
    config.prune_threshold = j.at("prune_threshold").get<double>();
    config.absorb_threshold = j.at("absorb_threshold").get<double>();
    config.max_components = j.at("max_components").get<int>();

    for (const json& e : j.at("ground_truth_spec")) {
        TruthEntry entry;
        entry.birth = e.at("birth").get<int>();
        entry.death = e.at("death").get<int>();
        if (e.contains("initial_state"))
            entry.initial_state = vector_from_json(e.at("initial_state"), "initial_state");
        else
            entry.birth_component = e.at("birth_component").get<int>();
        config.ground_truth_spec.push_back(std::move(entry));
    }

    if (j.contains("runs")) config.runs = j.at("runs").get<int>();
    if (j.contains("base_seed")) config.base_seed = j.at("base_seed").get<std::uint64_t>();
    return config;
}

}  // namespace tphd
