#include "tphd/poisson_trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tphd {

double GmTrajectoryPhd::total_mass() const {
    double mass = 0.0;
    for (const auto& c : components) mass += c.weight;
    return mass;
}

long sample_cardinality(double lambda, RngStream& rng) {
    if (lambda < 0.0) throw std::invalid_argument("sample_cardinality: negative lambda");
    return rng.poisson(lambda);
}

std::vector<TrajectorySample> sample_set(const GmTrajectoryPhd& phd, RngStream& rng) {
    for (const auto& c : phd.components) {
        if (!std::isfinite(c.weight) || c.weight < 0.0)
            throw std::invalid_argument("sample_set: non-finite or negative weight");
    }
    const double mass = phd.total_mass();
    std::vector<TrajectorySample> samples;
    if (mass <= 0.0) return samples;

    const long n = sample_cardinality(mass, rng);
    samples.reserve(n);
    for (long draw = 0; draw < n; ++draw) {
        // component index by inverse CDF over the normalized weights
        const double u = rng.uniform01() * mass;
        double acc = 0.0;
        std::size_t pick = phd.components.size() - 1;
        for (std::size_t j = 0; j < phd.components.size(); ++j) {
            acc += phd.components[j].weight;
            if (u < acc) {
                pick = j;
                break;
            }
        }
        const auto& c = phd.components[pick];
        const Eigen::VectorXd x = sample_mvn(c.mean, c.full_cov(), rng);
        TrajectorySample s;
        s.start = c.start;
        s.states.reserve(c.length());
        for (int j = 0; j < c.length(); ++j)
            s.states.push_back(x.segment(j * c.state_dim, c.state_dim));
        samples.push_back(std::move(s));
    }
    return samples;
}

std::vector<GmComponent> marginal_target_phd(const GmTrajectoryPhd& phd, int k) {
    std::vector<GmComponent> out;
    for (const auto& c : phd.components) {
        if (k < c.start || k > c.end_scan()) continue;
        const int idx = k - c.start;
        out.push_back(GmComponent{c.weight, c.mean.segment(idx * c.state_dim, c.state_dim),
                                  c.cov_block(idx)});
    }
    return out;
}

double expected_count(const GmTrajectoryPhd& phd,
                      const std::optional<TrajectoryWindow>& window) {
    if (!window) return phd.total_mass();
    auto contains = [](const std::vector<int>& set, int v) {
        return std::find(set.begin(), set.end(), v) != set.end();
    };
    double mass = 0.0;
    for (const auto& c : phd.components) {
        if (contains(window->starts, c.start) && contains(window->lengths, c.length()))
            mass += c.weight;
    }
    return mass;
}

}  // namespace tphd
