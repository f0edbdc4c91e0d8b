#pragma once

#include "tphd/gm_tphd.hpp"
#include "tphd/simulator.hpp"

#include <utility>
#include <vector>

namespace tphd {

struct OspaParams {
    double cutoff = 10.0;  // c
    double order = 2.0;    // p
    // Base metric: Euclidean after mapping each vector through position_map
    // (typically the observation matrix, selecting positions). An empty map
    // means the vectors are used as they are.
    Eigen::MatrixXd position_map;
};

/// States at scan k of the trajectories covering k.
std::vector<Eigen::VectorXd> tau_at_time(const std::vector<GroundTruthTrajectory>& trajectories,
                                         int k);
std::vector<Eigen::VectorXd> tau_at_time(const TrajectoryEstimateSet& estimates, int k);

struct Assignment {
    std::vector<std::pair<int, int>> pairs;  // (row, col), min(n, m) of them
    double cost = 0.0;
};

/// Minimum-cost matching of min(n, m) row/column pairs, by the Hungarian
/// algorithm with potentials (O(n^2 m)). Exact: agrees with brute-force
/// enumeration.
Assignment optimal_assignment(const Eigen::MatrixXd& cost);

/// OSPA distance between two point sets: 0 when both are empty, else with
/// n = |X| <= m = |Y| (swapping as needed)
///   ( (min-cost matching of min(d, c)^p + c^p (m - n)) / m )^(1/p).
double ospa(const std::vector<Eigen::VectorXd>& x, const std::vector<Eigen::VectorXd>& y,
            const OspaParams& params);

/// Trajectory cost at scan k: the mean over j = 1..k of the OSPA distance
/// between the truth and estimate target sets at scan j.
double trajectory_cost(const std::vector<GroundTruthTrajectory>& truth_alive,
                       const TrajectoryEstimateSet& estimates, int k, const OspaParams& params);

}  // namespace tphd
