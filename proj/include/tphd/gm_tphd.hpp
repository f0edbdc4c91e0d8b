#pragma once

#include "tphd/models.hpp"
#include "tphd/trajectory.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace tphd {

// Gaussian-mixture trajectory-PHD filter state. Only alive components are
// kept: for every component, start + length - 1 == time.
struct TphdState {
    int time = 0;              // scan index k; 0 before the first scan
    std::optional<int> lscan;  // window length L; nullopt means full
    std::vector<TrajectoryComponent> components;

    double total_weight() const;
};

struct TrajectoryEstimate {
    int start = 1;
    std::vector<Eigen::VectorXd> states;
};

struct TrajectoryEstimateSet {
    std::vector<TrajectoryEstimate> estimates;
};

/// Empty filter state at time 0 with the given window length.
TphdState initial_state(std::optional<int> lscan);

/// Prediction to time k+1. Output order is birth components first (one
/// length-1 component per birth component, start k+1), then survivors with
/// weight p_S * w, the mean extended by F acting on the last state block,
/// and the window extended by the matching cross and prior blocks.
/// Non-survival and dead branches are dropped.
TphdState predict(const TphdState& state, const MotionModel& motion, const BirthModel& birth);

/// L-scan form: the joint covariance over the last L scans is kept verbatim,
/// each earlier scan keeps its own n_x x n_x marginal block, and every other
/// cross block becomes zero. Weight, start and mean are untouched.
/// Idempotent for fixed L.
TrajectoryComponent lscan_truncate(const TrajectoryComponent& component, int l, int k);

/// Measurement update. Output order is the missed-detection copy of every
/// input component (weight (1-p_D) * w) followed by one block per
/// measurement holding the detected branch of every input component. Only
/// the window part of mean and covariance changes; past blocks have zero
/// cross-covariance with the current state, so their gain rows vanish.
TphdState update(const TphdState& state, const std::vector<Eigen::VectorXd>& measurements,
                 const MeasurementModel& meas, const ClutterModel& clutter);

/// Drops components with weight <= gamma_p, then greedily absorbs: the
/// heaviest remaining component takes the weight of every component whose
/// current-state mean lies within gamma_a squared Mahalanobis distance of
/// it (trajectory, mean and covariance of the absorber are kept). At most
/// j_max components survive, selected by weight.
TphdState prune_absorb(const TphdState& state, double gamma_p, double gamma_a, int j_max);

/// N-hat = round(total weight), half away from zero; returns the N-hat
/// highest-weight components (ties broken by lower index) decoded into
/// state sequences, or all components when N-hat exceeds the count.
TrajectoryEstimateSet estimate(const TphdState& state);

/// One filter recursion: predict -> lscan_truncate (no-op when lscan is
/// full) -> update -> estimate -> prune_absorb, in that order; the estimate
/// is taken before pruning. Returns the pruned state and the estimate.
std::pair<TphdState, TrajectoryEstimateSet> step(const TphdState& state,
                                                 const std::vector<Eigen::VectorXd>& measurements,
                                                 const ScenarioConfig& config);

/// Mean and covariance of the state at the current scan (last n_x block).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> current_state_marginal(
    const TrajectoryComponent& component);

// ---- GMPHD baseline ----
//
// A standard GMPHD recursion over target states only, built from the same
// weight formulas with trajectories of length 1. Serves as an equivalence
// oracle: per-scan weights and current-state marginals of the trajectory
// filter must match it for every L.

struct GmphdStepResult {
    std::vector<GmComponent> components;  // post-prune mixture
    int estimated_count = 0;              // round(pre-prune mass), capped at count
    double pre_prune_mass = 0.0;
};

GmphdStepResult gmphd_reference_step(const std::vector<GmComponent>& gm,
                                     const std::vector<Eigen::VectorXd>& measurements,
                                     const ScenarioConfig& config);

}  // namespace tphd
