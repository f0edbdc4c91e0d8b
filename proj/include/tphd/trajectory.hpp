#pragma once

#include "tphd/common.hpp"

#include <memory>
#include <vector>

namespace tphd {

// One weighted trajectory Gaussian N(t, x^{1:i}; start, mean, cov).
//
// The stacked covariance is held in two parts. `window` is the joint
// covariance of the most recent window_scans() scans. `past` stores one
// n_x x n_x marginal block per scan that has left the window; every cross
// block between a past scan and any other scan is identically zero. This is
// exactly the L-scan form; a full-covariance component is simply one whose
// window spans the whole trajectory.
//
// `past` and `window` are shared immutable buffers. The update step fans a
// component out into one copy per measurement and all of those copies share
// the same posterior covariance, so copying a component copies no matrix
// data.
struct TrajectoryComponent {
    double weight = 0.0;
    int start = 1;      // scan index of x^1, 1-based
    int state_dim = 0;  // n_x
    Eigen::VectorXd mean;  // stacked x^1..x^i, i * n_x entries, chronological
    std::shared_ptr<const std::vector<Eigen::MatrixXd>> past;  // may be null (empty)
    std::shared_ptr<const Eigen::MatrixXd> window;             // never null

    int length() const { return static_cast<int>(mean.size()) / state_dim; }
    int end_scan() const { return start + length() - 1; }
    int past_scans() const { return past ? static_cast<int>(past->size()) : 0; }
    int window_scans() const { return length() - past_scans(); }

    Eigen::VectorXd current_mean() const { return mean.tail(state_dim); }
    Eigen::MatrixXd current_cov() const {
        return window->bottomRightCorner(state_dim, state_dim);
    }

    /// Marginal n_x x n_x covariance of the state at 0-based position idx.
    Eigen::MatrixXd cov_block(int idx) const;

    /// Dense i*n_x x i*n_x stacked covariance with zero cross blocks
    /// materialized.
    Eigen::MatrixXd full_cov() const;

    /// Mean decoded as a chronological state sequence.
    std::vector<Eigen::VectorXd> state_sequence() const;
};

/// Component over a dense covariance; the window spans the whole trajectory.
TrajectoryComponent make_component(double weight, int start, Eigen::VectorXd mean,
                                   Eigen::MatrixXd cov, int state_dim);

/// A target-state Gaussian component (GMPHD component, or the marginal of a
/// trajectory component at one scan).
struct GmComponent {
    double weight = 0.0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

}  // namespace tphd
