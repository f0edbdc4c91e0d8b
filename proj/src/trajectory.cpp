#include "tphd/trajectory.hpp"

#include <stdexcept>

namespace tphd {

Eigen::MatrixXd TrajectoryComponent::cov_block(int idx) const {
    const int nx = state_dim;
    const int np = past_scans();
    if (idx < 0 || idx >= length()) throw std::out_of_range("cov_block: index out of range");
    if (idx < np) return (*past)[idx];
    const int w = idx - np;
    return window->block(w * nx, w * nx, nx, nx);
}

Eigen::MatrixXd TrajectoryComponent::full_cov() const {
    const int nx = state_dim;
    const int n = length() * nx;
    const int np = past_scans();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < np; ++j) cov.block(j * nx, j * nx, nx, nx) = (*past)[j];
    cov.bottomRightCorner(window->rows(), window->cols()) = *window;
    return cov;
}

std::vector<Eigen::VectorXd> TrajectoryComponent::state_sequence() const {
    std::vector<Eigen::VectorXd> states;
    states.reserve(length());
    for (int j = 0; j < length(); ++j) states.push_back(mean.segment(j * state_dim, state_dim));
    return states;
}

TrajectoryComponent make_component(double weight, int start, Eigen::VectorXd mean,
                                   Eigen::MatrixXd cov, int state_dim) {
    if (state_dim <= 0) throw std::invalid_argument("make_component: state_dim must be positive");
    if (mean.size() == 0 || mean.size() % state_dim != 0)
        throw std::invalid_argument("make_component: mean size not a multiple of state_dim");
    if (cov.rows() != mean.size() || cov.cols() != mean.size())
        throw std::invalid_argument("make_component: covariance dimension mismatch");
    TrajectoryComponent c;
    c.weight = weight;
    c.start = start;
    c.state_dim = state_dim;
    c.mean = std::move(mean);
    c.past = nullptr;
    c.window = std::make_shared<const Eigen::MatrixXd>(std::move(cov));
    return c;
}

}  // namespace tphd
