#include "gencal/ukf.hpp"

#include <cmath>
#include <string>

namespace gencal {
namespace {

void symmetrize(Matrix& m) { m = 0.5 * (m + m.transpose()).eval(); }

// Weighted mean taken relative to the central column. The weights sum to one,
// so this equals sum w_i y_i but avoids multiplying |y| by the large central
// weight of small-spread tunings.
Vector weighted_mean(const Matrix& points, const Vector& wm) {
    Vector mean = Vector::Zero(points.rows());
    for (Eigen::Index i = 1; i < points.cols(); ++i) {
        mean.noalias() += wm[i] * (points.col(i) - points.col(0));
    }
    return points.col(0) + mean;
}

}  // namespace

SigmaWeights weights(const UkfTuning& t) {
    if (!(t.gamma > 0.0)) throw InvalidParameter("UKF tuning: gamma must be positive");
    if (t.n < 1) throw InvalidParameter("UKF tuning: state dimension must be positive");
    SigmaWeights w;
    w.n = t.n;
    w.lambda = t.gamma * t.gamma * (t.n + t.kappa) - t.n;
    const double spread = t.n + w.lambda;
    if (!(spread > 0.0)) throw InvalidParameter("UKF tuning: n + lambda must be positive");
    const int count = 2 * t.n + 1;
    w.mean = Vector::Constant(count, 1.0 / (2.0 * spread));
    w.covariance = w.mean;
    w.mean[0] = w.lambda / spread;
    w.covariance[0] = w.lambda / spread + (1.0 - t.gamma * t.gamma + t.beta);
    return w;
}

bool is_valid_belief(const GaussianBelief& b) {
    const Matrix& p = b.covariance;
    if (p.rows() != b.mean.size() || p.cols() != b.mean.size()) return false;
    if (!p.allFinite() || !b.mean.allFinite()) return false;
    if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-12) return false;
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(p, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff() >= -1e-10;
}

Matrix sigma_points(const GaussianBelief& b, const SigmaWeights& w) {
    const Eigen::Index n = b.mean.size();
    if (n != w.n || b.covariance.rows() != n || b.covariance.cols() != n) {
        throw InvalidParameter("sigma points: belief dimension does not match the tuning");
    }
    Matrix scaled = w.spread() * b.covariance;
    Eigen::LLT<Matrix> llt(scaled);
    if (llt.info() != Eigen::Success) {
        const double jitter = 1e-12 * scaled.trace() / static_cast<double>(n);
        scaled.diagonal().array() += std::max(jitter, 0.0);
        llt.compute(scaled);
        if (llt.info() != Eigen::Success) {
            throw NonPsdCovariance("sigma points: covariance is not positive definite",
                                   b.covariance);
        }
    }
    const Matrix root = llt.matrixL();
    Matrix points(n, 2 * n + 1);
    points.col(0) = b.mean;
    for (Eigen::Index j = 0; j < n; ++j) {
        points.col(1 + j) = b.mean + root.col(j);
        points.col(1 + n + j) = b.mean - root.col(j);
    }
    return points;
}

GaussianBelief predict(const GaussianBelief& b, const TransitionFn& transition, const Matrix& q,
                       const SigmaWeights& w) {
    const Matrix points = sigma_points(b, w);
    const Eigen::Index n = b.mean.size();
    Matrix propagated(n, points.cols());
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        Vector y = transition(points.col(i));
        if (y.size() != n || !y.allFinite()) {
            throw PropagatedNaN("predict: transition returned a non-finite state",
                                static_cast<int>(i));
        }
        propagated.col(i) = std::move(y);
    }
    GaussianBelief out;
    out.mean = weighted_mean(propagated, w.mean);
    out.covariance = q;
    for (Eigen::Index i = 0; i < propagated.cols(); ++i) {
        const Vector d = propagated.col(i) - out.mean;
        out.covariance.noalias() += w.covariance[i] * d * d.transpose();
    }
    symmetrize(out.covariance);
    return out;
}

Correction update(const GaussianBelief& predicted, const MeasurementFn& measurement,
                  const Vector& z, const Matrix& r, const SigmaWeights& w) {
    const Matrix points = sigma_points(predicted, w);
    const Eigen::Index m = z.size();
    Matrix projected(m, points.cols());
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        Vector zi = measurement(points.col(i));
        if (zi.size() != m || !zi.allFinite()) {
            throw PropagatedNaN("update: measurement returned a non-finite value",
                                static_cast<int>(i));
        }
        projected.col(i) = std::move(zi);
    }

    Correction c;
    c.predicted_measurement = weighted_mean(projected, w.mean);
    Matrix s = r;
    Matrix cross = Matrix::Zero(predicted.mean.size(), m);
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        const Vector dz = projected.col(i) - c.predicted_measurement;
        const Vector dx = points.col(i) - predicted.mean;
        s.noalias() += w.covariance[i] * dz * dz.transpose();
        cross.noalias() += w.covariance[i] * dx * dz.transpose();
    }
    symmetrize(s);

    const Eigen::LDLT<Matrix> ldlt(s);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        !(ldlt.vectorD().minCoeff() > 0.0)) {
        throw NumericalError("update: innovation covariance is not positive definite");
    }
    const Matrix gain = ldlt.solve(cross.transpose()).transpose();

    c.innovation = z - c.predicted_measurement;
    c.belief.mean = predicted.mean + gain * c.innovation;
    c.belief.covariance = predicted.covariance - gain * s * gain.transpose();
    symmetrize(c.belief.covariance);
    c.innovation_covariance = std::move(s);
    return c;
}

Correction step(const GaussianBelief& b, const TransitionFn& transition,
                const MeasurementFn& measurement, const Vector& z, const NoiseMatrices& noise,
                const SigmaWeights& w) {
    return update(predict(b, transition, noise.q, w), measurement, z, noise.r, w);
}

UnscentedKalmanFilter::UnscentedKalmanFilter(GaussianBelief initial, const UkfTuning& tuning)
    : belief_(std::move(initial)), weights_(weights(tuning)) {
    if (belief_.mean.size() != tuning.n) {
        throw InvalidParameter("UKF: initial belief dimension does not match the tuning");
    }
}

void UnscentedKalmanFilter::predict(const TransitionFn& transition, const Matrix& q) {
    belief_ = gencal::predict(belief_, transition, q, weights_);
}

Vector UnscentedKalmanFilter::update(const MeasurementFn& measurement, const Vector& z,
                                     const Matrix& r) {
    Correction c = gencal::update(belief_, measurement, z, r, weights_);
    belief_ = std::move(c.belief);
    return std::move(c.innovation);
}

}  // namespace gencal
