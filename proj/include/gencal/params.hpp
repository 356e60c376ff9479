#pragma once

#include "gencal/config.hpp"

namespace gencal {

/// Machine, exciter and single-pole governor constants of one generating unit.
///
/// Member names are the ASCII transliteration of the usual nomenclature and
/// double as the keys of the `[generator]` config section (`xd_p` is x'_d,
/// `Td_pp` is T''_d, ...). Reactances and voltages are per unit on the machine
/// base, time constants in seconds.
struct GeneratorParams {
    double r_A = 0.0;    ///< stator resistance
    double x_d = 0.0;    ///< d-axis synchronous reactance
    double x_q = 0.0;    ///< q-axis synchronous reactance
    double xd_p = 0.0;   ///< d-axis transient reactance
    double xq_p = 0.0;   ///< q-axis transient reactance
    double xd_pp = 0.0;  ///< d-axis sub-transient reactance
    double xq_pp = 0.0;  ///< q-axis sub-transient reactance
    double x_ls = 0.0;   ///< stator leakage reactance
    double Td_p = 0.0;   ///< d-axis transient open-circuit time constant
    double Tq_p = 0.0;   ///< q-axis transient open-circuit time constant
    double Td_pp = 0.0;  ///< d-axis sub-transient open-circuit time constant
    double Tq_pp = 0.0;  ///< q-axis sub-transient open-circuit time constant
    double H = 0.0;      ///< inertia constant
    double D = 0.0;      ///< damping factor (per unit speed)
    double k_sat1 = 0.0;
    double k_sat2 = 0.0;
    double k_sat3 = 0.0;
    double K_A = 0.0;    ///< exciter gain
    double T_A = 0.0;    ///< exciter time constant
    double T_R = 0.0;    ///< voltage transducer time constant
    double V_REF = 0.0;  ///< excitation reference
    double pss = 0.0;    ///< constant stabilizer signal
    double r = 0.0;      ///< governor droop; the governor gain is 1/r
    double T_ef = 0.0;   ///< governor effective time constant
    double P_m0 = 0.0;   ///< steady-state mechanical power
    double omega_0 = 1.0;                          ///< nominal rotor speed
    double omega_s = 2.0 * kPi * 60.0;             ///< synchronous speed, rad/s
};

/// Throws InvalidParameter unless the reactance ordering
/// x >= x' >= x'' > x_ls > 0 holds on both axes and every time constant,
/// H and r are strictly positive.
void validate(const GeneratorParams& p);

/// Reads the `[generator]` section. Every field is required except
/// omega_0 / omega_s; unknown keys are rejected with their line number.
GeneratorParams read_generator_params(const ConfigDocument& doc,
                                      std::string_view section = "generator");
void write_generator_params(const GeneratorParams& p, ConfigDocument& doc,
                            std::string_view section = "generator");

}  // namespace gencal

namespace gencal {

/// Round-rotor machine constants of desk-scale origin (two-area benchmark
/// style unit on its own base), with V_REF / P_m0 left for the equilibrium.
GeneratorParams desk_machine_params();

}  // namespace gencal
