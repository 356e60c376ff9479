#pragma once

#include "gencal/common.hpp"

#include <variant>

namespace gencal {

enum class TgVariant { SimplePole, MultiStageSteam, Hydro };

/// First-order lag with time constant T_ef.
struct SimplePoleGovernor {
    double r = 0.04;
    double T_ef = 2.4;
};

/// Servo lag, governor lead-lag and reheater lead-lag in series:
/// 1/(1+s T_s) (1+s T_3)/(1+s T_c) (1+s T_4)/(1+s T_5).
struct SteamGovernor {
    double r = 0.04;
    double T_s = 0.1;
    double T_c = 0.5;
    double T_3 = 0.0;
    double T_4 = 1.25;
    double T_5 = 5.0;
};

/// Transient-droop compensation, gate servo and water column:
/// (1+s T_r)/(1+s T_r r_t/r) 1/(1+s T_g) (1-s T_w)/(1+s T_w/2).
struct HydroGovernor {
    double r = 0.05;
    double r_t = 0.38;
    double T_r = 5.0;
    double T_g = 0.2;
    double T_w = 2.0;
};

using GovernorParameters = std::variant<SimplePoleGovernor, SteamGovernor, HydroGovernor>;

/// Turbine-governor driven by the speed error (omega_0 - omega) through the
/// droop gain 1/r. The internal state holds deviations from rest, so the
/// output is P_m0 plus the chain output.
class TgModel {
public:
    struct Rates {
        Vector state_rate;
        double p_m = 0.0;
        double p_m_rate = 0.0;
    };

    TgModel(GovernorParameters parameters, double p_m0);

    TgVariant variant() const noexcept;
    const GovernorParameters& parameters() const noexcept { return parameters_; }
    int order() const noexcept { return static_cast<int>(blocks_.size()); }
    double p_m0() const noexcept { return p_m0_; }
    double droop() const noexcept { return droop_; }

    Vector rest_state() const { return Vector::Zero(order()); }

    double output(const Eigen::Ref<const Vector>& state, double omega, double omega_0) const;

    /// State derivative, P_m and dP_m/dt given the rotor speed and acceleration.
    Rates evaluate(const Eigen::Ref<const Vector>& state, double omega, double omega_dot,
                   double omega_0) const;

    /// Delta P_m / (omega_0 - omega) at angular frequency w [rad/s].
    Complex frequency_response(double w) const;

private:
    struct LeadLag {
        double lead;
        double lag;
    };

    GovernorParameters parameters_;
    double p_m0_;
    double droop_;
    std::vector<LeadLag> blocks_;
};

/// 1/w_c where w_c is the first -3 dB crossing of the speed-to-power
/// response relative to its DC gain.
double effective_time_constant(const TgModel& tg);

const char* to_string(TgVariant v);

}  // namespace gencal

namespace gencal {

/// Free-function form of TgModel::evaluate.
inline TgModel::Rates tg_dynamics(const TgModel& tg, const Eigen::Ref<const Vector>& state,
                                  double omega, double omega_dot, double omega_0) {
    return tg.evaluate(state, omega, omega_dot, omega_0);
}

}  // namespace gencal
