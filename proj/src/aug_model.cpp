#include "gencal/aug_model.hpp"

#include <cmath>

namespace gencal {

PolarRates phasor_log_derivative(Complex phasor, Complex phasor_dot) {
    const double mag = std::abs(phasor);
    if (!(mag > 0.0)) throw InvalidFrame("phasor log-derivative: zero-magnitude phasor");
    const Complex ratio = phasor_dot / phasor;
    return {mag * ratio.real(), ratio.imag()};
}

double active_power(Complex v, Complex i) { return (v * std::conj(i)).real(); }

double active_power_rate(double v, double i, double theta, double phi, double v_dot, double i_dot,
                         double theta_dot, double phi_dot) {
    const double angle = theta - phi;
    return (v_dot * i + v * i_dot) * std::cos(angle) -
           v * i * std::sin(angle) * (theta_dot - phi_dot);
}

double active_power_rate(const AugmentedInput& u) {
    const PolarRates vr = phasor_log_derivative(u.v, u.v_dot);
    const PolarRates ir = phasor_log_derivative(u.i, u.i_dot);
    return active_power_rate(std::abs(u.v), std::abs(u.i), std::arg(u.v), std::arg(u.i),
                             vr.amplitude_rate, ir.amplitude_rate, vr.phase_rate, ir.phase_rate);
}

DqCurrents current_dq_rates(double delta, double frame_rate, double i_re, double i_im,
                            double i_re_dot, double i_im_dot) {
    const double s = std::sin(delta);
    const double c = std::cos(delta);
    return {(i_re_dot + i_im * frame_rate) * s + (i_re * frame_rate - i_im_dot) * c,
            (i_im_dot - i_re * frame_rate) * s + (i_im * frame_rate + i_re_dot) * c};
}

double frame_rate(double omega, const GeneratorParams& p) {
    return p.omega_s * (omega - p.omega_0);
}

double torque_rate(double p_e_dot, double i_re, double i_im, double i_re_dot, double i_im_dot,
                   double r_a) {
    return p_e_dot + 2.0 * r_a * (i_re * i_re_dot + i_im * i_im_dot);
}

AugmentedState augmented_dynamics(const AugmentedState& x, const AugmentedInput& u,
                                  const GeneratorParams& p) {
    using namespace aug;
    const double h = x[kH];
    if (!(h > 0.0)) throw SingularState("augmented dynamics: inertia estimate must be positive");

    const double t_e_dot = torque_rate(active_power_rate(u), u.i.real(), u.i.imag(),
                                       u.i_dot.real(), u.i_dot.imag(), p.r_A);
    const DqCurrents idq = dq_currents(x[kDelta], u.i.real(), u.i.imag());
    const RotorStates rotor{x[kEdp], x[kEqp], x[kPsid], x[kPsiq], x[kEfd], x[kVtr]};
    const RotorStates rates = rotor_rates(rotor, idq, std::abs(u.v), x[kKa], p);

    AugmentedState dx;
    dx[kDelta] = p.omega_s * (x[kOmega] - p.omega_0);
    dx[kOmega] = x[kOmegaDot];
    dx[kOmegaDot] = p.omega_0 / (2.0 * h) * (x[kPmDot] - t_e_dot - p.D * x[kOmegaDot]);
    dx[kEdp] = rates.ed_p;
    dx[kEqp] = rates.eq_p;
    dx[kPsid] = rates.psi_d;
    dx[kPsiq] = rates.psi_q;
    dx[kEfd] = rates.e_fd;
    dx[kVtr] = rates.v_tr;
    dx[kPmDot] = (-x[kPmDot] - x[kOmegaDot] / p.r) / p.T_ef;
    dx[kH] = 0.0;
    dx[kKa] = 0.0;
    return dx;
}

Measurement4 augmented_measurement(const AugmentedState& x, const AugmentedInput& u,
                                   const GeneratorParams& p) {
    using namespace aug;
    const SubtransientFlux f = subtransient_flux(x[kEdp], x[kEqp], x[kPsid], x[kPsiq], p);
    const double s = std::sin(x[kDelta]);
    const double c = std::cos(x[kDelta]);
    const double i_re = u.i.real();
    const double i_im = u.i.imag();
    return {f.q * s + f.d * c + i_im * p.xd_pp - i_re * p.r_A,
            -f.q * c + f.d * s - i_re * p.xd_pp - i_im * p.r_A, x[kOmega], x[kOmegaDot]};
}

std::vector<double> integrate_pm(std::span<const double> pm_dot, double dt, double pm_initial) {
    std::vector<double> pm;
    pm.reserve(pm_dot.size());
    double acc = pm_initial;
    for (std::size_t k = 0; k < pm_dot.size(); ++k) {
        if (k > 0) acc += 0.5 * dt * (pm_dot[k - 1] + pm_dot[k]);
        pm.push_back(acc);
    }
    return pm;
}

AugmentedState embed_conventional(const ConventionalState& x, double omega_dot, double pm_dot) {
    AugmentedState a;
    a[aug::kDelta] = x[conv::kDelta];
    a[aug::kOmega] = x[conv::kOmega];
    a[aug::kOmegaDot] = omega_dot;
    a[aug::kEdp] = x[conv::kEdp];
    a[aug::kEqp] = x[conv::kEqp];
    a[aug::kPsid] = x[conv::kPsid];
    a[aug::kPsiq] = x[conv::kPsiq];
    a[aug::kEfd] = x[conv::kEfd];
    a[aug::kVtr] = x[conv::kVtr];
    a[aug::kPmDot] = pm_dot;
    a[aug::kH] = x[conv::kH];
    a[aug::kKa] = x[conv::kKa];
    return a;
}

ConventionalState conventional_part(const AugmentedState& x, double p_m) {
    ConventionalState c;
    c[conv::kDelta] = x[aug::kDelta];
    c[conv::kOmega] = x[aug::kOmega];
    c[conv::kEdp] = x[aug::kEdp];
    c[conv::kEqp] = x[aug::kEqp];
    c[conv::kPsid] = x[aug::kPsid];
    c[conv::kPsiq] = x[aug::kPsiq];
    c[conv::kEfd] = x[aug::kEfd];
    c[conv::kVtr] = x[aug::kVtr];
    c[conv::kPm] = p_m;
    c[conv::kH] = x[aug::kH];
    c[conv::kKa] = x[aug::kKa];
    return c;
}

}  // namespace gencal
