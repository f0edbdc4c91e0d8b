#include "tphd/gm_tphd.hpp"

#include "tphd/common.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tphd {

double TphdState::total_weight() const {
    double mass = 0.0;
    for (const auto& c : components) mass += c.weight;
    return mass;
}

TphdState initial_state(std::optional<int> lscan) {
    TphdState state;
    state.time = 0;
    state.lscan = lscan;
    return state;
}

namespace {

constexpr double kAsymmetryTolerance = 1e-9;

// Detected-branch weights for one measurement:
//   w_j(z) = p_D w_j q_j(z) / (clutter_term + sum_l p_D w_l q_l(z)).
// Evaluated through logs so that a run of tiny likelihoods cannot underflow
// the normalizer when the clutter term is zero.
std::vector<double> detection_weights(double clutter_term, double log_pd,
                                      const std::vector<double>& log_w,
                                      const std::vector<double>& log_q) {
    const std::size_t n = log_w.size();
    std::vector<double> lw(n);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        lw[j] = log_pd + log_w[j] + log_q[j];
        peak = std::max(peak, lw[j]);
    }
    std::vector<double> out(n, 0.0);
    if (peak == -std::numeric_limits<double>::infinity()) return out;
    double scaled_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) scaled_sum += std::exp(lw[j] - peak);
    double log_denom;
    if (clutter_term > 0.0) {
        // exp(peak) * scaled_sum may underflow to 0; the clutter floor keeps
        // the denominator positive, which is the exact limit anyway.
        log_denom = std::log(clutter_term + std::exp(peak) * scaled_sum);
    } else {
        log_denom = peak + std::log(scaled_sum);
    }
    for (std::size_t j = 0; j < n; ++j) out[j] = std::exp(lw[j] - log_denom);
    return out;
}

int estimated_count(double mass, std::size_t component_count) {
    const long n = std::llround(mass);
    return static_cast<int>(std::min<long>(n, static_cast<long>(component_count)));
}

struct AbsorbGroup {
    int survivor = 0;
    double weight = 0.0;
};

// Greedy absorption: repeatedly take the heaviest remaining component
// (lowest index on ties) and fold in every remaining component whose
// current-state mean lies within gamma_a squared Mahalanobis distance.
template <class MeanAt, class CovAt>
std::vector<AbsorbGroup> absorb_groups(const std::vector<double>& weights, MeanAt mean_at,
                                       CovAt cov_at, double gamma_a) {
    std::vector<int> open(weights.size());
    std::iota(open.begin(), open.end(), 0);
    std::vector<AbsorbGroup> groups;
    while (!open.empty()) {
        int best = open.front();
        for (int i : open)
            if (weights[i] > weights[best]) best = i;
        Eigen::LLT<Eigen::MatrixXd> llt(cov_at(best));
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("singular current-state covariance in prune_absorb");
        const Eigen::VectorXd mj = mean_at(best);
        AbsorbGroup group{best, 0.0};
        std::vector<int> rest;
        for (int i : open) {
            const Eigen::VectorXd d = mean_at(i) - mj;
            if (i == best || d.dot(llt.solve(d)) < gamma_a)
                group.weight += weights[i];
            else
                rest.push_back(i);
        }
        groups.push_back(group);
        open.swap(rest);
    }
    return groups;
}

void sort_and_cap(std::vector<AbsorbGroup>& groups, int j_max) {
    std::sort(groups.begin(), groups.end(), [](const AbsorbGroup& a, const AbsorbGroup& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.survivor < b.survivor;
    });
    if (static_cast<int>(groups.size()) > j_max) groups.resize(j_max);
}

}  // namespace

TphdState predict(const TphdState& state, const MotionModel& motion, const BirthModel& birth) {
    const Eigen::MatrixXd& f = motion.transition_matrix;
    const Eigen::MatrixXd& q = motion.process_noise;
    const int nx = static_cast<int>(f.rows());

    TphdState out;
    out.time = state.time + 1;
    out.lscan = state.lscan;
    out.components.reserve(birth.components.size() + state.components.size());

    for (const auto& b : birth.components) {
        TrajectoryComponent c;
        c.weight = b.weight;
        c.start = out.time;
        c.state_dim = nx;
        c.mean = b.mean;
        c.window = std::make_shared<const Eigen::MatrixXd>(b.cov);
        out.components.push_back(std::move(c));
    }

    for (const auto& c : state.components) {
        if (c.state_dim != nx)
            throw std::invalid_argument("predict: dimension mismatch between component and models");
        const Eigen::MatrixXd& w = *c.window;
        const int wn = static_cast<int>(w.rows());

        TrajectoryComponent s;
        s.weight = motion.survival_prob * c.weight;
        s.start = c.start;
        s.state_dim = nx;
        s.past = c.past;
        s.mean.resize(c.mean.size() + nx);
        s.mean.head(c.mean.size()) = c.mean;
        s.mean.tail(nx) = f * c.mean.tail(nx);

        auto grown = std::make_shared<Eigen::MatrixXd>(wn + nx, wn + nx);
        const Eigen::MatrixXd cross = w.rightCols(nx) * f.transpose();
        grown->topLeftCorner(wn, wn) = w;
        grown->topRightCorner(wn, nx) = cross;
        grown->bottomLeftCorner(nx, wn) = cross.transpose();
        grown->bottomRightCorner(nx, nx) = f * w.bottomRightCorner(nx, nx) * f.transpose() + q;
        s.window = std::move(grown);
        out.components.push_back(std::move(s));
    }
    return out;
}

TrajectoryComponent lscan_truncate(const TrajectoryComponent& component, int l, int k) {
    if (l < 1) throw std::invalid_argument("lscan_truncate: window length must be positive");
    (void)k;  // alive components satisfy end_scan() == k by construction

    const int nx = component.state_dim;
    const int in_window = component.window_scans();
    if (in_window <= l) return component;

    const int drop = in_window - l;
    auto past = std::make_shared<std::vector<Eigen::MatrixXd>>();
    past->reserve(component.past_scans() + drop);
    if (component.past) *past = *component.past;
    for (int j = 0; j < drop; ++j)
        past->push_back(component.window->block(j * nx, j * nx, nx, nx));

    auto window =
        std::make_shared<const Eigen::MatrixXd>(component.window->bottomRightCorner(l * nx, l * nx));

    TrajectoryComponent out = component;
    out.past = std::move(past);
    out.window = std::move(window);
    return out;
}

TphdState update(const TphdState& state, const std::vector<Eigen::VectorXd>& measurements,
                 const MeasurementModel& meas, const ClutterModel& clutter) {
    const Eigen::MatrixXd& h = meas.observation_matrix;
    const int nx = static_cast<int>(h.cols());
    const int nz = static_cast<int>(h.rows());
    const double pd = meas.detection_prob;

    TphdState out;
    out.time = state.time;
    out.lscan = state.lscan;
    const std::size_t j_in = state.components.size();
    out.components.reserve(j_in * (1 + measurements.size()));

    for (const auto& c : state.components) {
        if (c.state_dim != nx)
            throw std::invalid_argument("update: dimension mismatch between component and models");
        TrajectoryComponent missed = c;
        missed.weight = (1.0 - pd) * c.weight;
        out.components.push_back(std::move(missed));
    }

    if (measurements.empty() || j_in == 0) return out;

    // Innovation statistics, gain and posterior window per input component;
    // none of these depend on the measurement value.
    struct Precomp {
        Eigen::VectorXd zbar;
        Eigen::LLT<Eigen::MatrixXd> llt;
        Eigen::MatrixXd gain;  // window rows x n_z
        std::shared_ptr<const Eigen::MatrixXd> posterior;
    };
    std::vector<Precomp> pre;
    pre.reserve(j_in);
    std::vector<double> log_w(j_in);
    for (std::size_t j = 0; j < j_in; ++j) {
        const auto& c = state.components[j];
        const Eigen::MatrixXd& w = *c.window;
        Precomp p;
        p.zbar = h * c.mean.tail(nx);
        const Eigen::MatrixXd s = h * w.bottomRightCorner(nx, nx) * h.transpose() + meas.noise_cov;
        p.llt.compute(s);
        if (p.llt.info() != Eigen::Success)
            throw std::runtime_error("singular innovation covariance at scan " +
                                     std::to_string(state.time));
        const Eigen::MatrixXd b = w.rightCols(nx) * h.transpose();
        p.gain = p.llt.solve(b.transpose()).transpose();
        Eigen::MatrixXd post = w - p.gain * b.transpose();
        const double asym = max_asymmetry(post);
        post = symmetrized(post);
        if (asym > kAsymmetryTolerance) {
            post = clip_to_psd(post);
            std::clog << "[tphd] PSD repair at scan " << state.time << " (asymmetry " << asym
                      << ")\n";
        }
        p.posterior = std::make_shared<const Eigen::MatrixXd>(std::move(post));
        pre.push_back(std::move(p));
        log_w[j] = std::log(state.components[j].weight);
    }

    const double log_pd = std::log(pd);
    std::vector<double> log_q(j_in);
    for (const auto& z : measurements) {
        if (z.size() != nz) throw std::invalid_argument("update: measurement dimension mismatch");
        const double clutter_term = clutter.rate * clutter_density(z, clutter);
        for (std::size_t j = 0; j < j_in; ++j)
            log_q[j] = log_gaussian(z, pre[j].zbar, pre[j].llt);
        const std::vector<double> wz = detection_weights(clutter_term, log_pd, log_w, log_q);

        for (std::size_t j = 0; j < j_in; ++j) {
            const auto& c = state.components[j];
            TrajectoryComponent d;
            d.weight = wz[j];
            d.start = c.start;
            d.state_dim = nx;
            d.mean = c.mean;
            d.mean.tail(pre[j].gain.rows()) += pre[j].gain * (z - pre[j].zbar);
            d.past = c.past;
            d.window = pre[j].posterior;
            out.components.push_back(std::move(d));
        }
    }
    return out;
}

TphdState prune_absorb(const TphdState& state, double gamma_p, double gamma_a, int j_max) {
    std::vector<int> kept;
    kept.reserve(state.components.size());
    for (std::size_t j = 0; j < state.components.size(); ++j)
        if (state.components[j].weight > gamma_p) kept.push_back(static_cast<int>(j));

    std::vector<double> weights(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) weights[i] = state.components[kept[i]].weight;

    auto groups = absorb_groups(
        weights, [&](int i) { return state.components[kept[i]].current_mean(); },
        [&](int i) { return state.components[kept[i]].current_cov(); }, gamma_a);
    sort_and_cap(groups, j_max);

    TphdState out;
    out.time = state.time;
    out.lscan = state.lscan;
    out.components.reserve(groups.size());
    for (const auto& g : groups) {
        TrajectoryComponent c = state.components[kept[g.survivor]];
        c.weight = g.weight;
        out.components.push_back(std::move(c));
    }
    return out;
}

TrajectoryEstimateSet estimate(const TphdState& state) {
    const double mass = state.total_weight();
    const int n = estimated_count(mass, state.components.size());

    std::vector<int> order(state.components.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double wa = state.components[a].weight;
        const double wb = state.components[b].weight;
        if (wa != wb) return wa > wb;
        return a < b;
    });

    TrajectoryEstimateSet out;
    out.estimates.reserve(n);
    for (int i = 0; i < n; ++i) {
        const auto& c = state.components[order[i]];
        out.estimates.push_back(TrajectoryEstimate{c.start, c.state_sequence()});
    }
    return out;
}

std::pair<TphdState, TrajectoryEstimateSet> step(const TphdState& state,
                                                 const std::vector<Eigen::VectorXd>& measurements,
                                                 const ScenarioConfig& config) {
    TphdState predicted = predict(state, config.motion, config.birth);
    if (predicted.lscan) {
        for (auto& c : predicted.components)
            c = lscan_truncate(c, *predicted.lscan, predicted.time);
    }
    TphdState posterior = update(predicted, measurements, config.measurement, config.clutter);
    TrajectoryEstimateSet est = estimate(posterior);
    TphdState pruned = prune_absorb(posterior, config.prune_threshold, config.absorb_threshold,
                                    config.max_components);
    return {std::move(pruned), std::move(est)};
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> current_state_marginal(
    const TrajectoryComponent& component) {
    return {component.current_mean(), component.current_cov()};
}

GmphdStepResult gmphd_reference_step(const std::vector<GmComponent>& gm,
                                     const std::vector<Eigen::VectorXd>& measurements,
                                     const ScenarioConfig& config) {
    const Eigen::MatrixXd& f = config.motion.transition_matrix;
    const Eigen::MatrixXd& q = config.motion.process_noise;
    const Eigen::MatrixXd& h = config.measurement.observation_matrix;
    const double ps = config.motion.survival_prob;
    const double pd = config.measurement.detection_prob;
    const int nz = config.meas_dim();

    // Prediction, ordered exactly like predict(): births, then survivors.
    std::vector<GmComponent> pred;
    pred.reserve(config.birth.components.size() + gm.size());
    for (const auto& b : config.birth.components)
        pred.push_back(GmComponent{b.weight, b.mean, b.cov});
    for (const auto& c : gm)
        pred.push_back(GmComponent{ps * c.weight, f * c.mean,
                                   f * c.cov * f.transpose() + q});

    // Update, ordered exactly like update(): missed copies, then one block
    // per measurement.
    std::vector<GmComponent> post;
    post.reserve(pred.size() * (1 + measurements.size()));
    for (const auto& c : pred) post.push_back(GmComponent{(1.0 - pd) * c.weight, c.mean, c.cov});

    if (!measurements.empty() && !pred.empty()) {
        struct Precomp {
            Eigen::VectorXd zbar;
            Eigen::LLT<Eigen::MatrixXd> llt;
            Eigen::MatrixXd gain;
            Eigen::MatrixXd posterior;
        };
        std::vector<Precomp> pre;
        pre.reserve(pred.size());
        std::vector<double> log_w(pred.size());
        for (std::size_t j = 0; j < pred.size(); ++j) {
            const auto& c = pred[j];
            Precomp p;
            p.zbar = h * c.mean;
            const Eigen::MatrixXd s = h * c.cov * h.transpose() + config.measurement.noise_cov;
            p.llt.compute(s);
            if (p.llt.info() != Eigen::Success)
                throw std::runtime_error("singular innovation covariance in gmphd_reference_step");
            const Eigen::MatrixXd b = c.cov * h.transpose();
            p.gain = p.llt.solve(b.transpose()).transpose();
            Eigen::MatrixXd postcov = c.cov - p.gain * b.transpose();
            const double asym = max_asymmetry(postcov);
            postcov = symmetrized(postcov);
            if (asym > kAsymmetryTolerance) postcov = clip_to_psd(postcov);
            p.posterior = std::move(postcov);
            pre.push_back(std::move(p));
            log_w[j] = std::log(c.weight);
        }

        const double log_pd = std::log(pd);
        std::vector<double> log_q(pred.size());
        for (const auto& z : measurements) {
            if (z.size() != nz)
                throw std::invalid_argument("gmphd_reference_step: measurement dimension mismatch");
            const double clutter_term = config.clutter.rate * clutter_density(z, config.clutter);
            for (std::size_t j = 0; j < pred.size(); ++j)
                log_q[j] = log_gaussian(z, pre[j].zbar, pre[j].llt);
            const std::vector<double> wz = detection_weights(clutter_term, log_pd, log_w, log_q);
            for (std::size_t j = 0; j < pred.size(); ++j) {
                post.push_back(GmComponent{wz[j], pred[j].mean + pre[j].gain * (z - pre[j].zbar),
                                           pre[j].posterior});
            }
        }
    }

    double mass = 0.0;
    for (const auto& c : post) mass += c.weight;
    const int count = estimated_count(mass, post.size());

    std::vector<int> kept;
    kept.reserve(post.size());
    for (std::size_t j = 0; j < post.size(); ++j)
        if (post[j].weight > config.prune_threshold) kept.push_back(static_cast<int>(j));
    std::vector<double> weights(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) weights[i] = post[kept[i]].weight;

    auto groups = absorb_groups(
        weights, [&](int i) -> Eigen::VectorXd { return post[kept[i]].mean; },
        [&](int i) -> Eigen::MatrixXd { return post[kept[i]].cov; }, config.absorb_threshold);
    sort_and_cap(groups, config.max_components);

    GmphdStepResult result;
    result.estimated_count = count;
    result.pre_prune_mass = mass;
    result.components.reserve(groups.size());
    for (const auto& g : groups) {
        GmComponent c = post[kept[g.survivor]];
        c.weight = g.weight;
        result.components.push_back(std::move(c));
    }
    return result;
}

}  // namespace tphd
