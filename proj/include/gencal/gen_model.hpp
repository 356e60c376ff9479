#pragma once

#include "gencal/common.hpp"
#include "gencal/params.hpp"

namespace gencal {

/// Layout of the conventional sub-transient state vector. The last two
/// entries are the calibration states (estimated H and K_A).
namespace conv {
enum Index : Eigen::Index {
    kDelta = 0,  ///< rotor angle [rad]
    kOmega,      ///< rotor speed [p.u.]
    kEdp,        ///< E'_d
    kEqp,        ///< E'_q
    kPsid,       ///< Psi_d
    kPsiq,       ///< Psi_q
    kEfd,        ///< field voltage
    kVtr,        ///< transducer output
    kPm,         ///< mechanical power
    kH,          ///< inertia estimate
    kKa,         ///< exciter gain estimate
    kSize
};
}  // namespace conv

using ConventionalState = Eigen::Matrix<double, conv::kSize, 1>;
using Measurement2 = Eigen::Vector2d;  ///< (V_re, V_im)

/// Control input of the conventional model.
struct ConventionalInput {
    double p_e = 0.0;
    double i_re = 0.0;
    double i_im = 0.0;
};

struct CouplingConstants {
    double k1 = 0.0;
    double k2 = 0.0;
    double k3 = 0.0;
    double k4 = 0.0;
};

struct DqPair {
    double d = 0.0;
    double q = 0.0;
};
using DqCurrents = DqPair;
using SubtransientFlux = DqPair;  ///< (Psi''_d, Psi''_q)

struct InternalVoltages {
    double e_d = 0.0;
    double e_q = 0.0;
    double v = 0.0;
};

/// The six flux/exciter states shared by every model variant.
struct RotorStates {
    double ed_p = 0.0;
    double eq_p = 0.0;
    double psi_d = 0.0;
    double psi_q = 0.0;
    double e_fd = 0.0;
    double v_tr = 0.0;
};

/// Rotor-winding coupling factors as tabulated for the model. k3/k4 weight
/// the d-axis flux difference and armature reaction.
CouplingConstants coupling_constants(const GeneratorParams& p);

/// Armature-reaction weight of the E'_d equation, (x_q - x'_q)(x''_q - x_ls)/(x'_q - x_ls),
/// the q-axis mirror of k4. The E'_d equation pairs it with k1 on the flux
/// difference.
double q_armature_factor(const GeneratorParams& p);

/// Rotation of the network-frame current into the machine dq frame.
DqCurrents dq_currents(double delta, double i_re, double i_im);

/// q-axis saturation polynomial k_sat1 E'^2 + k_sat2 E' + k_sat3.
double saturation(double eq_p, const GeneratorParams& p);

double electric_torque(double p_e, DqCurrents i, double r_a);

SubtransientFlux subtransient_flux(double ed_p, double eq_p, double psi_d, double psi_q,
                                   const GeneratorParams& p);

/// Terminal voltage components behind the sub-transient impedance.
InternalVoltages internal_voltages(SubtransientFlux flux, DqCurrents i, const GeneratorParams& p);

/// Sub-transient EMF (Psi''_q + j Psi''_d) e^{j(delta - pi/2)} in the network frame.
Complex subtransient_emf(double delta, SubtransientFlux flux);

/// Branch current of the dynamic circuit: (E'' - V) / (r_A + j x''_d).
Complex branch_current(double delta, SubtransientFlux flux, Complex v, const GeneratorParams& p);

/// Time derivatives of the four rotor and two exciter states.
RotorStates rotor_rates(const RotorStates& s, DqCurrents i, double v_terminal, double k_a,
                        const GeneratorParams& p);

/// (omega_0 / 2H) [P_m - T_e - D (omega - omega_0)]. Throws SingularState if h <= 0.
double swing_acceleration(double omega, double p_m, double t_e, double h, const GeneratorParams& p);

/// Single-pole governor: (1/T_ef)[-P_m + (omega_0 - omega)/r + P_m0].
double governor_rate(double p_m, double omega, const GeneratorParams& p);

RotorStates rotor_states(const ConventionalState& x);

ConventionalState conventional_dynamics(const ConventionalState& x, const ConventionalInput& u,
                                        const GeneratorParams& p);

Measurement2 conventional_measurement(const ConventionalState& x, const ConventionalInput& u,
                                      const GeneratorParams& p);

/// Steady operating point. `params` carries the back-solved V_REF and P_m0.
struct OperatingPoint {
    ConventionalState state;
    ConventionalInput input;
    GeneratorParams params;
    Complex v;
    Complex i;
};

/// Solves for the steady state that produces the given terminal phasors.
///
/// The phasor diagram gives a closed-form starting point which a damped
/// Newton iteration (forward-difference Jacobian) then polishes until the
/// dynamics residual and the terminal mismatch are below 1e-13. Throws
/// NonConvergence with the final residual norm otherwise.
OperatingPoint equilibrium_solve(Complex v_terminal, Complex i_terminal, const GeneratorParams& p);

}  // namespace gencal
