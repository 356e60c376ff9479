#pragma once

#include "gencal/gen_model.hpp"
#include "gencal/governor.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace gencal {

enum class DerivativeMode { Analytic, CenteredDifference };

/// Single machine against an infinite bus through a line reactance, with one
/// timed three-phase fault at the machine terminal.
///
/// The pre-fault operating point is set by the dispatch (p_dispatch at
/// terminal magnitude v_terminal); V_REF and P_m0 of `params` are back-solved
/// and ignored on input.
struct Scenario {
    GeneratorParams params;
    GovernorParameters governor = SimplePoleGovernor{};
    double line_reactance = 0.3;
    double bus_voltage = 1.0;
    double bus_angle = 0.0;  ///< rad
    double p_dispatch = 0.8;
    double v_terminal = 1.0;
    double fault_start = 0.1;
    double fault_duration = 0.1;
    Complex fault_impedance{0.0, 0.05};
    double t_end = 20.0;
    double dt_sim = 1.0 / 9600.0;
    std::uint64_t seed = 1;
    DerivativeMode derivatives = DerivativeMode::Analytic;

    Complex bus_phasor() const { return std::polar(bus_voltage, bus_angle); }
};

/// Throws InvalidParameter when the scenario is not simulable.
void validate(const Scenario& s);

struct NetworkSolution {
    Complex v;
    Complex i;
};

/// Terminal node of the machine's dynamic circuit (E'' behind r_A + j x''_d),
/// the line to the bus and, when present, the fault shunt.
NetworkSolution network_interface(Complex emf, Complex bus, double line_reactance,
                                  const GeneratorParams& p,
                                  std::optional<Complex> fault_impedance = std::nullopt);

struct TruthSample {
    double t = 0.0;
    ConventionalState state;  ///< physical states, P_m, true H and K_A
    double omega_dot = 0.0;
    double pm_dot = 0.0;
    double t_e = 0.0;
    double p_e = 0.0;
    double q_e = 0.0;
    Complex v;
    Complex i;
    Complex v_dot;
    Complex i_dot;
    double f = 0.0;      ///< p.u.
    double rocof = 0.0;  ///< p.u./s
    bool faulted = false;
};

struct TruthTrajectory {
    double dt = 0.0;
    OperatingPoint equilibrium;
    std::vector<TruthSample> samples;
};

/// Dispatch-consistent terminal voltage and current before the fault.
NetworkSolution pre_fault_terminal(const Scenario& s);

/// Operating point of the scenario (equilibrium_solve on the pre-fault terminal).
OperatingPoint scenario_equilibrium(const Scenario& s);

/// Fixed-step RK4 run from the equilibrium through the fault to t_end.
/// The fault is active on steps k with round(start/dt) <= k < round(end/dt).
TruthTrajectory simulate(const Scenario& s);

/// Every `stride`-th sample.
void write_truth_csv(const TruthTrajectory& traj, const std::filesystem::path& path,
                     int stride = 1);

Scenario read_scenario(const ConfigDocument& doc);
void write_scenario(const Scenario& s, ConfigDocument& doc);

}  // namespace gencal
