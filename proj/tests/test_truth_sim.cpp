#include "gencal/truth_sim.hpp"

#include "gencal/config.hpp"
#include "gencal/integrator.hpp"
#include "test_helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gencal;

namespace {

Scenario short_scenario(double t_end = 2.0) {
    Scenario s;
    s.params = gencal::testing::params();
    s.t_end = t_end;
    return s;
}

Vector physical(const TruthSample& r) { return r.state.head<9>(); }

}  // namespace

TEST(Rk4, ExponentialLocalErrorIsFifthOrder) {
    const auto f = [](double, const Vector& x) -> Vector { return -x; };
    Vector x0(1);
    x0 << 1.0;
    double previous = 0.0;
    for (double h : {0.1, 0.05, 0.025}) {
        const double err = std::abs(rk4_step(x0, 0.0, h, f)[0] - std::exp(-h));
        EXPECT_LT(err, h * h * h * h * h / 100.0);
        if (previous > 0.0) EXPECT_NEAR(previous / err, 32.0, 1.5);
        previous = err;
    }
}

TEST(Rk4, NonFiniteResultThrows) {
    Vector x0(1);
    x0 << 1.0;
    EXPECT_THROW(rk4_step(x0, 0.0, 0.1, [](double, const Vector&) -> Vector {
                     return Vector::Constant(1, std::nan(""));
                 }),
                 IntegrationError);
}

TEST(Network, OpenCircuitMachineSeesBus) {
    GeneratorParams p = gencal::testing::params();
    const NetworkSolution n = network_interface(1.0, 1.0, 0.3, p);
    EXPECT_NEAR(std::abs(n.i), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(n.v - 1.0), 0.0, 1e-15);
}

TEST(Network, KirchhoffCurrentLaw) {
    const GeneratorParams p = gencal::testing::params();
    const Complex e = std::polar(1.2, 0.5), bus = 1.0, zf(0.0, 0.05);
    for (const std::optional<Complex> fault : {std::optional<Complex>{}, std::optional<Complex>{zf}}) {
        const NetworkSolution n = network_interface(e, bus, 0.3, p, fault);
        EXPECT_NEAR(std::abs(n.i - (e - n.v) / Complex(p.r_A, p.xd_pp)), 0.0, 1e-14);
        Complex out = (n.v - bus) / Complex(0.0, 0.3);
        if (fault) out += n.v / *fault;
        EXPECT_NEAR(std::abs(n.i - out), 0.0, 1e-14);
    }
}

TEST(Network, FaultDepressesTerminalVoltage) {
    const GeneratorParams p = gencal::testing::params();
    const Complex e = std::polar(1.2, 0.5);
    const double healthy = std::abs(network_interface(e, 1.0, 0.3, p).v);
    const double faulted = std::abs(network_interface(e, 1.0, 0.3, p, Complex(0.0, 0.05)).v);
    EXPECT_LT(faulted, 0.5 * healthy);
}

TEST(Network, ZeroImpedanceRejected) {
    const GeneratorParams p = gencal::testing::params();
    EXPECT_THROW(network_interface(1.0, 1.0, 0.0, p), InvalidParameter);
    EXPECT_THROW(network_interface(1.0, 1.0, 0.3, p, Complex(0.0, 0.0)), InvalidParameter);
}

TEST(Scenario, PreFaultPointMatchesDispatch) {
    const Scenario s = short_scenario();
    const NetworkSolution n = pre_fault_terminal(s);
    EXPECT_NEAR(std::abs(n.v), s.v_terminal, 1e-12);
    EXPECT_NEAR((n.v * std::conj(n.i)).real(), s.p_dispatch, 1e-12);
    const OperatingPoint op = scenario_equilibrium(s);
    EXPECT_NEAR(op.params.P_m0, s.p_dispatch + s.params.r_A * std::norm(n.i), 1e-10);
}

TEST(Scenario, ValidationRejectsImpossibleCases) {
    Scenario s = short_scenario();
    s.p_dispatch = 5.0;
    EXPECT_THROW(validate(s), InvalidParameter);
    s = short_scenario();
    s.fault_start = 1.95;
    EXPECT_THROW(validate(s), InvalidParameter);
    s = short_scenario();
    s.dt_sim = 0.0;
    EXPECT_THROW(validate(s), InvalidParameter);
}

TEST(Simulate, UndisturbedRunStaysAtEquilibrium) {
    Scenario s = short_scenario(10.0);
    s.fault_duration = 0.0;
    const TruthTrajectory tr = simulate(s);
    double drift = 0.0;
    for (const TruthSample& r : tr.samples) {
        drift = std::max(drift, (physical(r) - tr.equilibrium.state.head<9>()).lpNorm<Eigen::Infinity>());
    }
    EXPECT_LT(drift, 1e-9);
    EXPECT_NEAR(tr.samples.back().p_e, s.p_dispatch, 1e-8);
}

TEST(Simulate, SampleCountAndFaultFlags) {
    const Scenario s = short_scenario(1.0);
    const TruthTrajectory tr = simulate(s);
    ASSERT_EQ(tr.samples.size(), 9601u);
    EXPECT_FALSE(tr.samples[959].faulted);
    EXPECT_TRUE(tr.samples[960].faulted);
    EXPECT_TRUE(tr.samples[1919].faulted);
    EXPECT_FALSE(tr.samples[1920].faulted);
}

TEST(Simulate, RotorAcceleratesDuringFault) {
    const TruthTrajectory tr = simulate(short_scenario(1.0));
    EXPECT_GT(tr.samples[1919].state[conv::kOmega], 1.0);
    EXPECT_GT(tr.samples[1000].omega_dot, 0.0);
}

TEST(Simulate, FrequencyChannelsFollowRotor) {
    const TruthTrajectory tr = simulate(short_scenario(1.0));
    for (const TruthSample& r : tr.samples) {
        EXPECT_EQ(r.f, r.state[conv::kOmega]);
        EXPECT_EQ(r.rocof, r.omega_dot);
    }
}

TEST(Simulate, PostFaultSwingIsElectromechanical) {
    const TruthTrajectory tr = simulate(short_scenario(6.0));
    // Count zero crossings of omega - 1 after clearing.
    int crossings = 0;
    double first = -1.0, last = -1.0;
    for (std::size_t k = 2000; k + 1 < tr.samples.size(); ++k) {
        const double a = tr.samples[k].state[conv::kOmega] - 1.0;
        const double b = tr.samples[k + 1].state[conv::kOmega] - 1.0;
        if ((a < 0.0) != (b < 0.0)) {
            ++crossings;
            if (first < 0.0) first = tr.samples[k].t;
            last = tr.samples[k].t;
        }
    }
    ASSERT_GE(crossings, 3);
    const double hz = 0.5 * (crossings - 1) / (last - first);
    EXPECT_GT(hz, 0.2);
    EXPECT_LT(hz, 2.0);
}

TEST(Simulate, StepHalvingShowsFourthOrder) {
    std::vector<Vector> end;
    for (double dt : {1.0 / 600.0, 1.0 / 1200.0, 1.0 / 2400.0}) {
        Scenario s = short_scenario(0.5);
        s.dt_sim = dt;
        end.push_back(physical(simulate(s).samples.back()));
    }
    const double ratio = (end[0] - end[1]).norm() / (end[1] - end[2]).norm();
    EXPECT_NEAR(ratio, 16.0, 2.0);
}

TEST(Simulate, AnalyticDerivativesMatchCenteredDifferences) {
    Scenario s = short_scenario(1.0);
    const TruthTrajectory a = simulate(s);
    s.derivatives = DerivativeMode::CenteredDifference;
    const TruthTrajectory c = simulate(s);
    double worst = 0.0;
    for (std::size_t k = 2100; k + 1 < a.samples.size(); k += 37) {
        worst = std::max({worst, std::abs(a.samples[k].v_dot - c.samples[k].v_dot),
                          std::abs(a.samples[k].i_dot - c.samples[k].i_dot),
                          std::abs(a.samples[k].pm_dot - c.samples[k].pm_dot)});
    }
    EXPECT_LT(worst, 1e-4);
}

TEST(Simulate, GovernorChoiceDoesNotMoveEquilibrium) {
    Scenario s = short_scenario();
    const OperatingPoint a = scenario_equilibrium(s);
    s.governor = HydroGovernor{};
    const OperatingPoint b = scenario_equilibrium(s);
    EXPECT_EQ(a.state, b.state);
    EXPECT_EQ(a.params.P_m0, b.params.P_m0);
}

TEST(Simulate, SteamAndHydroRunsStayFinite) {
    for (const GovernorParameters& g :
         {GovernorParameters{SteamGovernor{}}, GovernorParameters{HydroGovernor{}}}) {
        Scenario s = short_scenario(3.0);
        s.governor = g;
        const TruthTrajectory tr = simulate(s);
        EXPECT_TRUE(tr.samples.back().state.allFinite());
    }
}

TEST(ScenarioConfig, RoundTrip) {
    Scenario s = short_scenario(7.5);
    s.governor = SteamGovernor{0.05, 0.2, 0.4, 0.1, 1.0, 4.0};
    s.fault_impedance = Complex(0.001, 0.07);
    s.seed = 99;
    ConfigDocument doc;
    write_scenario(s, doc);
    const Scenario back = read_scenario(ConfigDocument::parse(doc.to_string()));
    EXPECT_EQ(back.t_end, 7.5);
    EXPECT_EQ(back.seed, 99u);
    EXPECT_EQ(back.fault_impedance, s.fault_impedance);
    const auto& g = std::get<SteamGovernor>(back.governor);
    EXPECT_EQ(g.T_4, 1.0);
    EXPECT_EQ(g.r, 0.05);
    EXPECT_EQ(back.params.H, s.params.H);
}
