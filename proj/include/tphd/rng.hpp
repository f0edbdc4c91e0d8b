#pragma once

#include "tphd/common.hpp"

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>

namespace tphd {

// Counter-based seed derivation. A stream is identified by
// (base seed, counter, purpose tag); the tag is FNV-1a hashed and all three
// words are mixed through SplitMix64 rounds. Every consumer derives its own
// stream up front, so the draw sequence of one purpose never depends on how
// much randomness another purpose consumed, and per-run streams are
// identical no matter how runs are scheduled across workers.
//
// The runner uses:
//   run seed      = derive_seed(base_seed, run_index, "run")
//   truth stream  = derive_seed(run_seed, 0, "truth")
//   scans stream  = derive_seed(run_seed, 0, "meas")

constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t counter,
                                    std::string_view purpose) {
    std::uint64_t h = splitmix64(base);
    h = splitmix64(h ^ counter);
    h = splitmix64(h ^ fnv1a(purpose));
    return h;
}

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::mt19937_64& engine() { return engine_; }

    double uniform01() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
    }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    double standard_normal() {
        return std::normal_distribution<double>(0.0, 1.0)(engine_);
    }

    long poisson(double lambda) {
        if (lambda < 0.0) throw std::invalid_argument("negative lambda");
        if (lambda == 0.0) return 0;
        return std::poisson_distribution<long>(lambda)(engine_);
    }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return std::bernoulli_distribution(p)(engine_);
    }

private:
    std::mt19937_64 engine_;
};

/// Draw from N(mean, cov) through an LDLT square root, so PSD covariances
/// (including exactly singular ones, e.g. Q = 0) are handled.
inline Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                  RngStream& rng) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(symmetrized(cov));
    Eigen::VectorXd xi(mean.size());
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = rng.standard_normal();
    Eigen::MatrixXd l = ldlt.matrixL();
    Eigen::VectorXd sd = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
    return mean + ldlt.transpositionsP().transpose() * Eigen::VectorXd(l * sd.asDiagonal() * xi);
}

}  // namespace tphd
