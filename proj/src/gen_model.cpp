#include "gencal/gen_model.hpp"

#include <cmath>

namespace gencal {

CouplingConstants coupling_constants(const GeneratorParams& p) {
    const double a = p.xq_p - p.x_ls;
    const double b = p.xd_p - p.x_ls;
    if (!(a > 0.0) || !(b > 0.0)) {
        throw InvalidParameter("coupling constants: transient reactances must exceed x_ls");
    }
    CouplingConstants k;
    k.k1 = (p.x_q - p.xq_p) * (p.xq_p - p.xq_pp) / (a * a);
    k.k2 = (p.x_q - p.x_ls) * (p.xq_pp - p.x_ls) / a;
    k.k3 = (p.x_d - p.xd_p) * (p.xd_p - p.xd_pp) / (b * b);
    k.k4 = (p.x_d - p.xd_p) * (p.xd_pp - p.x_ls) / b;
    return k;
}

DqCurrents dq_currents(double delta, double i_re, double i_im) {
    const double s = std::sin(delta);
    const double c = std::cos(delta);
    return {i_re * s - i_im * c, i_im * s + i_re * c};
}

double q_armature_factor(const GeneratorParams& p) {
    const double a = p.xq_p - p.x_ls;
    if (!(a > 0.0)) throw InvalidParameter("q-axis transient reactance must exceed x_ls");
    return (p.x_q - p.xq_p) * (p.xq_pp - p.x_ls) / a;
}

double saturation(double eq_p, const GeneratorParams& p) {
    return p.k_sat1 * eq_p * eq_p + p.k_sat2 * eq_p + p.k_sat3;
}

double electric_torque(double p_e, DqCurrents i, double r_a) {
    return p_e + r_a * (i.d * i.d + i.q * i.q);
}

SubtransientFlux subtransient_flux(double ed_p, double eq_p, double psi_d, double psi_q,
                                   const GeneratorParams& p) {
    const double a = p.xq_p - p.x_ls;
    const double b = p.xd_p - p.x_ls;
    SubtransientFlux f;
    f.q = (p.x_ls - p.xq_pp) / a * ed_p - (p.xq_p - p.xq_pp) / a * psi_q;
    f.d = (p.xd_pp - p.x_ls) / b * eq_p + (p.xd_p - p.xd_pp) / b * psi_d;
    return f;
}

InternalVoltages internal_voltages(SubtransientFlux flux, DqCurrents i, const GeneratorParams& p) {
    InternalVoltages e;
    e.e_d = flux.q - p.r_A * i.d + p.xd_pp * i.q;
    e.e_q = flux.d - p.r_A * i.q - p.xd_pp * i.d;
    e.v = std::hypot(e.e_d, e.e_q);
    return e;
}

Complex subtransient_emf(double delta, SubtransientFlux flux) {
    return Complex(flux.q, flux.d) * std::polar(1.0, delta - kPi / 2.0);
}

Complex branch_current(double delta, SubtransientFlux flux, Complex v, const GeneratorParams& p) {
    return (subtransient_emf(delta, flux) - v) / Complex(p.r_A, p.xd_pp);
}

RotorStates rotor_rates(const RotorStates& s, DqCurrents i, double v_terminal, double k_a,
                        const GeneratorParams& p) {
    const CouplingConstants k = coupling_constants(p);
    RotorStates d;
    d.ed_p = (-s.ed_p - k.k1 * (s.ed_p - s.psi_q) - q_armature_factor(p) * i.q) / p.Tq_p;
    d.eq_p = (s.e_fd - saturation(s.eq_p, p) - k.k3 * (s.eq_p - s.psi_d) - k.k4 * i.d) / p.Td_p;
    d.psi_d = (-s.psi_d + s.eq_p - (p.xd_p - p.x_ls) * i.d) / p.Td_pp;
    d.psi_q = (-s.psi_q + s.ed_p - (p.xq_p - p.x_ls) * i.q) / p.Tq_pp;
    d.e_fd = (-s.e_fd + k_a * (p.pss + p.V_REF - s.v_tr)) / p.T_A;
    d.v_tr = (v_terminal - s.v_tr) / p.T_R;
    return d;
}

double swing_acceleration(double omega, double p_m, double t_e, double h, const GeneratorParams& p) {
    if (!(h > 0.0)) throw SingularState("swing equation: inertia estimate must be positive");
    return p.omega_0 / (2.0 * h) * (p_m - t_e - p.D * (omega - p.omega_0));
}

double governor_rate(double p_m, double omega, const GeneratorParams& p) {
    return (-p_m + (p.omega_0 - omega) / p.r + p.P_m0) / p.T_ef;
}

RotorStates rotor_states(const ConventionalState& x) {
    return {x[conv::kEdp], x[conv::kEqp], x[conv::kPsid], x[conv::kPsiq], x[conv::kEfd],
            x[conv::kVtr]};
}

ConventionalState conventional_dynamics(const ConventionalState& x, const ConventionalInput& u,
                                        const GeneratorParams& p) {
    using namespace conv;
    const DqCurrents idq = dq_currents(x[kDelta], u.i_re, u.i_im);
    const SubtransientFlux flux = subtransient_flux(x[kEdp], x[kEqp], x[kPsid], x[kPsiq], p);
    const double v = internal_voltages(flux, idq, p).v;
    const double t_e = electric_torque(u.p_e, idq, p.r_A);
    const RotorStates rates = rotor_rates(rotor_states(x), idq, v, x[kKa], p);

    ConventionalState dx;
    dx[kDelta] = p.omega_s * (x[kOmega] - p.omega_0);
    dx[kOmega] = swing_acceleration(x[kOmega], x[kPm], t_e, x[kH], p);
    dx[kEdp] = rates.ed_p;
    dx[kEqp] = rates.eq_p;
    dx[kPsid] = rates.psi_d;
    dx[kPsiq] = rates.psi_q;
    dx[kEfd] = rates.e_fd;
    dx[kVtr] = rates.v_tr;
    dx[kPm] = governor_rate(x[kPm], x[kOmega], p);
    dx[kH] = 0.0;
    dx[kKa] = 0.0;
    return dx;
}

Measurement2 conventional_measurement(const ConventionalState& x, const ConventionalInput& u,
                                      const GeneratorParams& p) {
    using namespace conv;
    const SubtransientFlux f = subtransient_flux(x[kEdp], x[kEqp], x[kPsid], x[kPsiq], p);
    const double s = std::sin(x[kDelta]);
    const double c = std::cos(x[kDelta]);
    return {f.q * s + f.d * c + u.i_im * p.xd_pp - u.i_re * p.r_A,
            -f.q * c + f.d * s - u.i_re * p.xd_pp - u.i_im * p.r_A};
}

namespace {

constexpr int kUnknowns = 11;
using Unknowns = Eigen::Matrix<double, kUnknowns, 1>;

// Unknowns: the nine physical states followed by V_REF and P_m0.
Unknowns equilibrium_residual(const Unknowns& z, Complex v, const ConventionalInput& u,
                              GeneratorParams p) {
    p.V_REF = z[9];
    p.P_m0 = z[10];
    ConventionalState x;
    x.head<9>() = z.head<9>();
    x[conv::kH] = p.H;
    x[conv::kKa] = p.K_A;
    const ConventionalState dx = conventional_dynamics(x, u, p);
    const Measurement2 m = conventional_measurement(x, u, p);
    Unknowns r;
    r.head<9>() = dx.head<9>();
    r[9] = m[0] - v.real();
    r[10] = m[1] - v.imag();
    return r;
}

}  // namespace

OperatingPoint equilibrium_solve(Complex v_terminal, Complex i_terminal, const GeneratorParams& p) {
    validate(p);
    const double p_e = (v_terminal * std::conj(i_terminal)).real();
    if (p_e < -1e-12) {
        throw InvalidParameter("equilibrium: terminal conditions absorb active power");
    }
    const ConventionalInput u{p_e, i_terminal.real(), i_terminal.imag()};

    // Phasor-diagram initial guess. The q-axis rests where
    // V_d + r_A I_d - (x_q - x''_q + x''_d) I_q = 0.
    const double xq_eff = p.x_q - p.xq_pp + p.xd_pp;
    const double delta = std::arg(v_terminal + Complex(p.r_A, xq_eff) * i_terminal);
    const DqCurrents idq = dq_currents(delta, i_terminal.real(), i_terminal.imag());
    const double vq = v_terminal.imag() * std::sin(delta) + v_terminal.real() * std::cos(delta);
    const double ed_p = -(p.x_q - p.xq_p) * idq.q;
    const double psi_q = ed_p - (p.xq_p - p.x_ls) * idq.q;
    const double psi_d_pp = vq + p.r_A * idq.q + p.xd_pp * idq.d;
    const double eq_p = psi_d_pp + (p.xd_p - p.xd_pp) * idq.d;
    const double psi_d = eq_p - (p.xd_p - p.x_ls) * idq.d;
    const double e_fd = saturation(eq_p, p) + (p.x_d - p.xd_p) * idq.d;
    const double v_tr = std::abs(v_terminal);
    const double t_e = electric_torque(p_e, idq, p.r_A);

    Unknowns z;
    z << delta, p.omega_0, ed_p, eq_p, psi_d, psi_q, e_fd, v_tr, t_e, v_tr + e_fd / p.K_A - p.pss,
        t_e;

    constexpr double kTolerance = 1e-13;
    Unknowns r = equilibrium_residual(z, v_terminal, u, p);
    double norm = r.lpNorm<Eigen::Infinity>();
    for (int iter = 0; iter < 50 && norm > kTolerance; ++iter) {
        Eigen::Matrix<double, kUnknowns, kUnknowns> jac;
        for (int j = 0; j < kUnknowns; ++j) {
            Unknowns zp = z;
            const double h = 1e-7 * std::max(1.0, std::abs(z[j]));
            zp[j] += h;
            jac.col(j) = (equilibrium_residual(zp, v_terminal, u, p) - r) / h;
        }
        const Unknowns step = jac.colPivHouseholderQr().solve(-r);
        double scale = 1.0;
        bool improved = false;
        for (int k = 0; k < 30; ++k, scale *= 0.5) {
            const Unknowns trial = z + scale * step;
            const Unknowns rt = equilibrium_residual(trial, v_terminal, u, p);
            const double nt = rt.lpNorm<Eigen::Infinity>();
            if (std::isfinite(nt) && nt < norm) {
                z = trial;
                r = rt;
                norm = nt;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    if (!(norm < 1e-11)) {
        throw NonConvergence("equilibrium solve did not converge", norm);
    }

    OperatingPoint op;
    op.params = p;
    op.params.V_REF = z[9];
    op.params.P_m0 = z[10];
    op.state.head<9>() = z.head<9>();
    op.state[conv::kH] = p.H;
    op.state[conv::kKa] = p.K_A;
    op.input = u;
    op.v = v_terminal;
    op.i = i_terminal;
    return op;
}

}  // namespace gencal
