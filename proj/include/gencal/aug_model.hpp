#pragma once

#include "gencal/gen_model.hpp"

#include <span>
#include <vector>

namespace gencal {

/// Layout of the augmented state: the conventional electrical states with
/// rotor acceleration and mechanical power rate in place of P_m.
namespace aug {
enum Index : Eigen::Index {
    kDelta = 0,
    kOmega,
    kOmegaDot,  ///< rotor acceleration [p.u./s]
    kEdp,
    kEqp,
    kPsid,
    kPsiq,
    kEfd,
    kVtr,
    kPmDot,  ///< mechanical power rate [p.u./s]
    kH,
    kKa,
    kSize
};
}  // namespace aug

using AugmentedState = Eigen::Matrix<double, aug::kSize, 1>;
using Measurement4 = Eigen::Vector4d;  ///< (V_re, V_im, f [p.u.], ROCOF [p.u./s])

/// PMU stream as consumed by the augmented model.
struct AugmentedInput {
    Complex v;
    Complex i;
    Complex v_dot;
    Complex i_dot;
};

struct PolarRates {
    double amplitude_rate = 0.0;
    double phase_rate = 0.0;  ///< rad/s
};

/// Amplitude and phase rates of a phasor from its complex derivative.
/// Throws InvalidFrame for a zero-magnitude phasor.
PolarRates phasor_log_derivative(Complex phasor, Complex phasor_dot);

/// Re{V conj(I)}.
double active_power(Complex v, Complex i);

/// Product rule on V I cos(theta - phi).
double active_power_rate(double v, double i, double theta, double phi, double v_dot, double i_dot,
                         double theta_dot, double phi_dot);

/// dq current rates for a frame rotating at `frame_rate` rad/s.
///
/// The chain rule on dq_currents yields this rate equal to d(delta)/dt, i.e.
/// omega_s (omega - omega_0) in the rotor model; see frame_rate().
DqCurrents current_dq_rates(double delta, double frame_rate, double i_re, double i_im,
                            double i_re_dot, double i_im_dot);

/// Rotation rate of the dq frame for a rotor speed in p.u.
double frame_rate(double omega, const GeneratorParams& p);

/// dT_e/dt with the frame-dependent armature-loss terms cancelled.
double torque_rate(double p_e_dot, double i_re, double i_im, double i_re_dot, double i_im_dot,
                   double r_a);

/// Electrical power rate from the PMU input stream.
double active_power_rate(const AugmentedInput& u);

AugmentedState augmented_dynamics(const AugmentedState& x, const AugmentedInput& u,
                                  const GeneratorParams& p);

Measurement4 augmented_measurement(const AugmentedState& x, const AugmentedInput& u,
                                   const GeneratorParams& p);

/// Trapezoidal reconstruction of P_m from uniformly sampled P_m rates.
std::vector<double> integrate_pm(std::span<const double> pm_dot, double dt, double pm_initial);

/// Embeds a conventional state; P_m is dropped in favour of its rate.
AugmentedState embed_conventional(const ConventionalState& x, double omega_dot, double pm_dot);

/// The conventional state sharing x's electrical coordinates.
ConventionalState conventional_part(const AugmentedState& x, double p_m);

}  // namespace gencal
