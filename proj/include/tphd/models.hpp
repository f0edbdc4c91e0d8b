#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace tphd {

// ---- linear-Gaussian model set ----

struct MotionModel {
    Eigen::MatrixXd transition_matrix;  // F, n_x x n_x
    Eigen::MatrixXd process_noise;      // Q, n_x x n_x, symmetric PSD
    double survival_prob = 1.0;         // p_S
};

struct MeasurementModel {
    Eigen::MatrixXd observation_matrix;  // H, n_z x n_x
    Eigen::MatrixXd noise_cov;           // R, n_z x n_z, symmetric PD
    double detection_prob = 1.0;         // p_D
};

/// Axis-aligned box in measurement space; the surveillance region A.
struct Box {
    Eigen::VectorXd min;
    Eigen::VectorXd max;

    double volume() const;
    bool contains(const Eigen::VectorXd& z) const;
};

struct ClutterModel {
    double rate = 0.0;  // lambda_c, mean clutter points per scan
    Box region;         // A
};

struct BirthComponent {
    double weight = 0.0;     // w_beta
    Eigen::VectorXd mean;    // m_beta
    Eigen::MatrixXd cov;     // P_beta, symmetric PSD
};

struct BirthModel {
    std::vector<BirthComponent> components;
};

/// One requested ground-truth trajectory: lifetime [birth, death] plus
/// either the 1-based index of the birth component it starts from or an
/// explicit initial state.
struct TruthEntry {
    int birth = 1;
    int death = 1;
    int birth_component = 0;  // 1-based; 0 when initial_state is given
    std::optional<Eigen::VectorXd> initial_state;
};

struct ScenarioConfig {
    MotionModel motion;
    MeasurementModel measurement;
    ClutterModel clutter;
    BirthModel birth;
    int horizon = 1;
    std::optional<int> lscan;        // window length L; nullopt means full
    double prune_threshold = 0.0;    // Gamma_p
    double absorb_threshold = 0.0;   // Gamma_a
    int max_components = 1;          // J_max
    std::vector<TruthEntry> ground_truth_spec;
    int runs = 1;
    std::uint64_t base_seed = 0;

    int state_dim() const { return static_cast<int>(motion.transition_matrix.rows()); }
    int meas_dim() const { return static_cast<int>(measurement.observation_matrix.rows()); }
};

/// Checks all model invariants (dimensions, probabilities, PSD covariances,
/// truth entries inside the horizon). Covariances are symmetrized before the
/// PSD check and returned in symmetrized form, which makes validate
/// idempotent. Throws std::invalid_argument on the first violation.
ScenarioConfig validate(ScenarioConfig config);

/// The benchmark scenario: four-dimensional state [p_x, v_x, p_y, v_y],
/// nearly-constant-velocity motion with tau = 0.5 and q = 3.24, position
/// measurements with R = diag(16, 16), p_S = 0.99, p_D = 0.9, 50 uniform
/// clutter points per scan on [0,2000]^2, three weight-0.1 birth components,
/// horizon 100, and three truth trajectories born at scans (1, 5, 10) that
/// die at scans (80, 70, 95).
ScenarioConfig paper_scenario();

/// Clutter spatial density: 1/volume(A) inside the region, 0 outside.
double clutter_density(const Eigen::VectorXd& z, const ClutterModel& clutter);

ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioConfig& config, const std::filesystem::path& path);

}  // namespace tphd
