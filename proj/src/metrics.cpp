#include "tphd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tphd {

std::vector<Eigen::VectorXd> tau_at_time(const std::vector<GroundTruthTrajectory>& trajectories,
                                         int k) {
    std::vector<Eigen::VectorXd> states;
    for (const auto& t : trajectories) {
        const int last = t.birth + static_cast<int>(t.states.size()) - 1;
        if (k >= t.birth && k <= last) states.push_back(t.states[k - t.birth]);
    }
    return states;
}

std::vector<Eigen::VectorXd> tau_at_time(const TrajectoryEstimateSet& estimates, int k) {
    std::vector<Eigen::VectorXd> states;
    for (const auto& e : estimates.estimates) {
        const int last = e.start + static_cast<int>(e.states.size()) - 1;
        if (k >= e.start && k <= last) states.push_back(e.states[k - e.start]);
    }
    return states;
}

// Hungarian algorithm with row/column potentials, shortest-augmenting-path
// formulation. Requires rows <= cols internally; the public entry point
// transposes when needed. Indices in `col_to_row` are 1-based with 0 as the
// virtual start column.
namespace {

std::vector<int> hungarian_rows_le_cols(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    const int m = static_cast<int>(a.cols());
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> col_to_row(m + 1, 0), way(m + 1, 0);

    for (int i = 1; i <= n; ++i) {
        col_to_row[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = col_to_row[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[col_to_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (col_to_row[j0] != 0);
        do {
            const int j1 = way[j0];
            col_to_row[j0] = col_to_row[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    return col_to_row;
}

}  // namespace

Assignment optimal_assignment(const Eigen::MatrixXd& cost) {
    Assignment result;
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    if (n == 0 || m == 0) return result;
    if (!cost.allFinite()) throw std::invalid_argument("optimal_assignment: non-finite cost entry");

    const bool transposed = n > m;
    const Eigen::MatrixXd a = transposed ? Eigen::MatrixXd(cost.transpose()) : cost;
    const std::vector<int> col_to_row = hungarian_rows_le_cols(a);

    for (int j = 1; j < static_cast<int>(col_to_row.size()); ++j) {
        if (col_to_row[j] == 0) continue;
        const int row = col_to_row[j] - 1;
        const int col = j - 1;
        if (transposed)
            result.pairs.emplace_back(col, row);
        else
            result.pairs.emplace_back(row, col);
    }
    std::sort(result.pairs.begin(), result.pairs.end());
    for (const auto& [r, c] : result.pairs) result.cost += cost(r, c);
    return result;
}

namespace {

Eigen::VectorXd mapped(const Eigen::VectorXd& x, const OspaParams& params) {
    if (params.position_map.size() == 0) return x;
    return params.position_map * x;
}

}  // namespace

double ospa(const std::vector<Eigen::VectorXd>& x, const std::vector<Eigen::VectorXd>& y,
            const OspaParams& params) {
    const auto* small = &x;
    const auto* big = &y;
    if (small->size() > big->size()) std::swap(small, big);
    const int n = static_cast<int>(small->size());
    const int m = static_cast<int>(big->size());
    if (m == 0) return 0.0;

    const double c = params.cutoff;
    const double p = params.order;

    double matched = 0.0;
    if (n > 0) {
        Eigen::MatrixXd cost(n, m);
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd xi = mapped((*small)[i], params);
            for (int j = 0; j < m; ++j) {
                const double d = (xi - mapped((*big)[j], params)).norm();
                cost(i, j) = std::pow(std::min(d, c), p);
            }
        }
        matched = optimal_assignment(cost).cost;
    }
    return std::pow((matched + std::pow(c, p) * (m - n)) / m, 1.0 / p);
}

double trajectory_cost(const std::vector<GroundTruthTrajectory>& truth_alive,
                       const TrajectoryEstimateSet& estimates, int k, const OspaParams& params) {
    if (k < 1) throw std::invalid_argument("trajectory_cost: k must be at least 1");
    double total = 0.0;
    for (int j = 1; j <= k; ++j)
        total += ospa(tau_at_time(truth_alive, j), tau_at_time(estimates, j), params);
    return total / k;
}

}  // namespace tphd
