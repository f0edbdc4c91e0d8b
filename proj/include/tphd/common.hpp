#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace tphd {

// ---- small linear-algebra helpers shared across the library ----

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
    return 0.5 * (m + m.transpose());
}

inline double max_asymmetry(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

/// PSD test by attempted Cholesky after adding `jitter` (scaled by the
/// diagonal magnitude) to the diagonal. Zero matrices count as PSD.
inline bool is_psd(const Eigen::MatrixXd& m, double jitter = 1e-10) {
    if (m.rows() != m.cols()) return false;
    if (m.size() == 0) return true;
    Eigen::MatrixXd probe = symmetrized(m);
    double scale = std::max(1.0, probe.diagonal().cwiseAbs().maxCoeff());
    probe.diagonal().array() += jitter * scale;
    return Eigen::LLT<Eigen::MatrixXd>(probe).info() == Eigen::Success;
}

inline bool is_pd(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.size() == 0) return false;
    return Eigen::LLT<Eigen::MatrixXd>(symmetrized(m)).info() == Eigen::Success;
}

/// Projects a nearly-PSD matrix back onto the PSD cone by clipping negative
/// eigenvalues at zero. Used only as a repair step, not in the normal path.
inline Eigen::MatrixXd clip_to_psd(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(m));
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

/// log N(x; mean, S) given a precomputed Cholesky factorization of S.
inline double log_gaussian(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                           const Eigen::LLT<Eigen::MatrixXd>& llt) {
    const Eigen::Index d = x.size();
    Eigen::VectorXd u = llt.matrixL().solve(x - mean);
    double half_logdet = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) half_logdet += std::log(llt.matrixLLT()(i, i));
    return -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + u.squaredNorm())
           - half_logdet;
}

}  // namespace tphd
