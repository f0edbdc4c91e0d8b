#pragma once

#include "tphd/rng.hpp"
#include "tphd/trajectory.hpp"

#include <optional>
#include <vector>

namespace tphd {

// A Poisson trajectory RFS in Gaussian-mixture form: cardinality is
// Poisson(total mass) and elements are i.i.d. draws from the normalized
// mixture. Each component fixes a start scan and a length, so picking a
// component realizes the discrete (t, i) draw and the Gaussian draw at once.
struct GmTrajectoryPhd {
    std::vector<TrajectoryComponent> components;

    double total_mass() const;
};

struct TrajectorySample {
    int start = 1;
    std::vector<Eigen::VectorXd> states;  // length >= 1
};

/// Poisson(lambda) draw; throws std::invalid_argument for negative lambda.
long sample_cardinality(double lambda, RngStream& rng);

/// Samples a whole trajectory set: cardinality ~ Poisson(total mass), each
/// element from a component picked with probability w_j / total mass and
/// then from that component's Gaussian. Throws on non-finite or negative
/// weights.
std::vector<TrajectorySample> sample_set(const GmTrajectoryPhd& phd, RngStream& rng);

/// Marginal target PHD at scan k: one Gaussian per component whose lifetime
/// covers k (start <= k <= start+length-1), with the component's weight and
/// the mean/covariance block of the state at k.
std::vector<GmComponent> marginal_target_phd(const GmTrajectoryPhd& phd, int k);

/// Restriction window for expected_count: a set of start scans crossed with
/// a set of lengths.
struct TrajectoryWindow {
    std::vector<int> starts;
    std::vector<int> lengths;
};

/// Expected number of trajectories with (start, length) inside the window;
/// total mass when no window is given.
double expected_count(const GmTrajectoryPhd& phd,
                      const std::optional<TrajectoryWindow>& window = std::nullopt);

}  // namespace tphd
