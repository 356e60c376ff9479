#pragma once

#include "gencal/common.hpp"

#include <functional>

namespace gencal {

/// Scaling of the unscented transform. `n` is the state dimension.
struct UkfTuning {
    double gamma = 1e-3;
    double beta = 2.0;
    double kappa = 0.0;
    int n = 0;
};

struct SigmaWeights {
    int n = 0;
    double lambda = 0.0;
    Vector mean;        ///< w_m, 2n+1 entries
    Vector covariance;  ///< w_c, 2n+1 entries

    double spread() const noexcept { return n + lambda; }
};

/// lambda = gamma^2 (n + kappa) - n and the mean/covariance weights.
/// Throws InvalidParameter if gamma <= 0, n < 1 or n + lambda <= 0.
SigmaWeights weights(const UkfTuning& tuning);

struct GaussianBelief {
    Vector mean;
    Matrix covariance;
};

/// Symmetric to 1e-12 and eigenvalues >= -1e-10.
bool is_valid_belief(const GaussianBelief& b);

/// The 2n+1 sigma points as matrix columns: the mean, then mean +/- the
/// columns of the lower Cholesky factor of (n + lambda) P. A failed
/// factorization is retried once with 1e-12 trace(P)/n jitter on the
/// diagonal before NonPsdCovariance is thrown.
Matrix sigma_points(const GaussianBelief& b, const SigmaWeights& w);

using TransitionFn = std::function<Vector(const Vector&)>;
using MeasurementFn = std::function<Vector(const Vector&)>;

/// Unscented time update. Q is added to the propagated covariance, which is
/// then re-symmetrized. Throws PropagatedNaN naming the first bad sigma point.
GaussianBelief predict(const GaussianBelief& b, const TransitionFn& transition, const Matrix& q,
                       const SigmaWeights& w);

struct Correction {
    GaussianBelief belief;
    Vector predicted_measurement;
    Vector innovation;
    Matrix innovation_covariance;
};

/// Unscented measurement update in cross-covariance form:
/// S = sum w_c dz dz^T + R, C = sum w_c dx dz^T, K = C S^-1,
/// P+ = P- - K S K^T. S is factorized (LDLT), never inverted.
Correction update(const GaussianBelief& predicted, const MeasurementFn& measurement,
                  const Vector& z, const Matrix& r, const SigmaWeights& w);

struct NoiseMatrices {
    Matrix q;
    Matrix r;
};

/// predict followed by update.
Correction step(const GaussianBelief& b, const TransitionFn& transition,
                const MeasurementFn& measurement, const Vector& z, const NoiseMatrices& noise,
                const SigmaWeights& w);

/// One estimation session: owns its belief and is used from a single thread.
class UnscentedKalmanFilter {
public:
    UnscentedKalmanFilter(GaussianBelief initial, const UkfTuning& tuning);

    const GaussianBelief& belief() const noexcept { return belief_; }
    const SigmaWeights& sigma_weights() const noexcept { return weights_; }

    void predict(const TransitionFn& transition, const Matrix& q);
    /// Returns the innovation.
    Vector update(const MeasurementFn& measurement, const Vector& z, const Matrix& r);

private:
    GaussianBelief belief_;
    SigmaWeights weights_;
};

}  // namespace gencal
