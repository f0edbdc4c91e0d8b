#pragma once

#include "tphd/models.hpp"
#include "tphd/rng.hpp"

#include <filesystem>
#include <vector>

namespace tphd {

struct GroundTruthTrajectory {
    int birth = 1;   // first scan, inclusive
    int death = 1;   // last scan, inclusive
    std::vector<Eigen::VectorXd> states;  // one per scan in [birth, death]
};

struct ScanMeasurements {
    int scan = 0;
    std::vector<Eigen::VectorXd> points;
};

enum class TruthMode {
    fixed_at_birth_mean,     // initial state is the attached birth component's mean
    sampled_from_birth,      // initial state drawn from the attached birth component
};

/// One trajectory per ground_truth_spec entry: the initial state comes from
/// the entry's explicit state or its birth component (per mode), later
/// states follow x' ~ N(Fx, Q) until the death scan.
std::vector<GroundTruthTrajectory> generate_truth(const ScenarioConfig& config, RngStream& rng,
                                                  TruthMode mode = TruthMode::fixed_at_birth_mean);

/// One scan: every target alive at k is detected with probability p_D and
/// contributes Hx + noise; a Poisson(rate) number of clutter points is drawn
/// uniformly on the region; the combined list is shuffled.
ScanMeasurements generate_scan(const std::vector<GroundTruthTrajectory>& truth, int k,
                               const MeasurementModel& meas, const ClutterModel& clutter,
                               RngStream& rng);

/// Trajectories alive at k (birth <= k <= death), truncated to scans <= k.
std::vector<GroundTruthTrajectory> alive_set(const std::vector<GroundTruthTrajectory>& truth,
                                             int k);

void save_truth(const std::vector<GroundTruthTrajectory>& truth,
                const std::filesystem::path& path);
std::vector<GroundTruthTrajectory> load_truth(const std::filesystem::path& path);

}  // namespace tphd
