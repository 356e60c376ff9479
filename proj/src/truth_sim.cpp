#include "gencal/truth_sim.hpp"

#include "gencal/csv.hpp"
#include "gencal/integrator.hpp"

#include <cmath>

namespace gencal {

void validate(const Scenario& s) {
    validate(s.params);
    if (!(s.dt_sim > 0.0)) throw InvalidParameter("scenario: dt_sim must be positive");
    if (!(s.t_end > 0.0)) throw InvalidParameter("scenario: t_end must be positive");
    if (!(s.line_reactance > 0.0)) throw InvalidParameter("scenario: line reactance must be positive");
    if (!(s.bus_voltage > 0.0) || !(s.v_terminal > 0.0)) {
        throw InvalidParameter("scenario: bus and terminal voltages must be positive");
    }
    if (s.fault_start < 0.0 || s.fault_duration < 0.0 ||
        s.fault_start + s.fault_duration > s.t_end) {
        throw InvalidParameter("scenario: fault window must lie within [0, t_end]");
    }
    if (s.fault_duration > 0.0 && std::abs(s.fault_impedance) == 0.0) {
        throw InvalidParameter("scenario: fault impedance must be nonzero");
    }
    const double sine = s.p_dispatch * s.line_reactance / (s.v_terminal * s.bus_voltage);
    if (!(std::abs(sine) < 1.0)) {
        throw InvalidParameter("scenario: dispatch exceeds the line transfer limit");
    }
}

NetworkSolution network_interface(Complex emf, Complex bus, double line_reactance,
                                  const GeneratorParams& p, std::optional<Complex> fault_impedance) {
    const Complex z_machine(p.r_A, p.xd_pp);
    const Complex z_line(0.0, line_reactance);
    if (std::abs(z_machine) == 0.0 || std::abs(z_line) == 0.0 ||
        (fault_impedance && std::abs(*fault_impedance) == 0.0)) {
        throw InvalidParameter("network: zero branch impedance");
    }
    Complex y = 1.0 / z_machine + 1.0 / z_line;
    if (fault_impedance) y += 1.0 / *fault_impedance;
    const Complex v = (emf / z_machine + bus / z_line) / y;
    return {v, (emf - v) / z_machine};
}

NetworkSolution pre_fault_terminal(const Scenario& s) {
    const double theta =
        std::asin(s.p_dispatch * s.line_reactance / (s.v_terminal * s.bus_voltage));
    const Complex bus = s.bus_phasor();
    const Complex v = std::polar(s.v_terminal, s.bus_angle + theta);
    return {v, (v - bus) / Complex(0.0, s.line_reactance)};
}

OperatingPoint scenario_equilibrium(const Scenario& s) {
    validate(s);
    const NetworkSolution pre = pre_fault_terminal(s);
    return equilibrium_solve(pre.v, pre.i, s.params);
}

namespace {

constexpr Eigen::Index kPhysical = 8;

struct Evaluation {
    Vector rate;
    TruthSample sample;
};

class TruthModel {
public:
    TruthModel(const Scenario& s, const OperatingPoint& op)
        : s_(s), p_(op.params), tg_(s.governor, op.params.P_m0), bus_(s.bus_phasor()) {}

    const TgModel& governor() const { return tg_; }

    Evaluation evaluate(const Vector& x, bool faulted) const {
        const double delta = x[0];
        const double omega = x[1];
        const SubtransientFlux flux = subtransient_flux(x[2], x[3], x[4], x[5], p_);
        const Complex emf = subtransient_emf(delta, flux);
        const NetworkSolution net =
            network_interface(emf, bus_, s_.line_reactance, p_,
                              faulted ? std::optional<Complex>(s_.fault_impedance) : std::nullopt);
        const DqCurrents idq = dq_currents(delta, net.i.real(), net.i.imag());
        const Complex s_out = net.v * std::conj(net.i);
        const double t_e = electric_torque(s_out.real(), idq, p_.r_A);

        const auto tg_state = x.tail(x.size() - kPhysical);
        const double p_m = tg_.output(tg_state, omega, p_.omega_0);
        const double omega_dot = swing_acceleration(omega, p_m, t_e, p_.H, p_);
        const TgModel::Rates tg = tg_.evaluate(tg_state, omega, omega_dot, p_.omega_0);
        const RotorStates rotor{x[2], x[3], x[4], x[5], x[6], x[7]};
        const RotorStates rr = rotor_rates(rotor, idq, std::abs(net.v), p_.K_A, p_);

        Evaluation e;
        e.rate.resize(x.size());
        e.rate << p_.omega_s * (omega - p_.omega_0), omega_dot, rr.ed_p, rr.eq_p, rr.psi_d,
            rr.psi_q, rr.e_fd, rr.v_tr, tg.state_rate;

        // Network derivative along the flow: dV = (dE''/Z'') / Y, dI = (dE'' - dV) / Z''.
        const SubtransientFlux dflux = subtransient_flux(rr.ed_p, rr.eq_p, rr.psi_d, rr.psi_q, p_);
        const Complex rot = std::polar(1.0, delta - kPi / 2.0);
        const Complex demf = (Complex(dflux.q, dflux.d) +
                              Complex(0.0, e.rate[0]) * Complex(flux.q, flux.d)) * rot;
        const Complex z_machine(p_.r_A, p_.xd_pp);
        Complex y = 1.0 / z_machine + 1.0 / Complex(0.0, s_.line_reactance);
        if (faulted) y += 1.0 / s_.fault_impedance;
        const Complex dv = demf / z_machine / y;

        TruthSample& r = e.sample;
        r.state << x.head(kPhysical), p_m, p_.H, p_.K_A;
        r.omega_dot = omega_dot;
        r.pm_dot = tg.p_m_rate;
        r.t_e = t_e;
        r.p_e = s_out.real();
        r.q_e = s_out.imag();
        r.v = net.v;
        r.i = net.i;
        r.v_dot = dv;
        r.i_dot = (demf - dv) / z_machine;
        r.f = omega;
        r.rocof = omega_dot;
        r.faulted = faulted;
        return e;
    }

private:
    const Scenario& s_;
    GeneratorParams p_;
    TgModel tg_;
    Complex bus_;
};

void centered_derivatives(std::vector<TruthSample>& samples, double dt) {
    const std::size_t n = samples.size();
    if (n < 2) return;
    std::vector<Complex> v(n), i(n);
    for (std::size_t k = 0; k < n; ++k) {
        v[k] = samples[k].v;
        i[k] = samples[k].i;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t lo = k == 0 ? 0 : k - 1;
        const std::size_t hi = k + 1 == n ? k : k + 1;
        const double span = static_cast<double>(hi - lo) * dt;
        samples[k].v_dot = (v[hi] - v[lo]) / span;
        samples[k].i_dot = (i[hi] - i[lo]) / span;
    }
}

}  // namespace

TruthTrajectory simulate(const Scenario& s) {
    TruthTrajectory traj;
    traj.dt = s.dt_sim;
    traj.equilibrium = scenario_equilibrium(s);
    const TruthModel model(s, traj.equilibrium);

    Vector x(kPhysical + model.governor().order());
    x << traj.equilibrium.state.head(kPhysical), model.governor().rest_state();

    const auto steps = static_cast<long long>(std::llround(s.t_end / s.dt_sim));
    const auto k_on = static_cast<long long>(std::llround(s.fault_start / s.dt_sim));
    const auto k_off =
        static_cast<long long>(std::llround((s.fault_start + s.fault_duration) / s.dt_sim));
    traj.samples.reserve(static_cast<std::size_t>(steps + 1));

    for (long long k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * s.dt_sim;
        const bool faulted = k >= k_on && k < k_off;
        TruthSample sample = model.evaluate(x, faulted).sample;
        sample.t = t;
        if (!sample.state.allFinite()) throw IntegrationError("truth state is not finite", t);
        traj.samples.push_back(sample);
        if (k == steps) break;
        x = rk4_step(x, t, s.dt_sim,
                     [&](double, const Vector& xs) { return model.evaluate(xs, faulted).rate; });
    }
    if (s.derivatives == DerivativeMode::CenteredDifference) {
        centered_derivatives(traj.samples, s.dt_sim);
    }
    return traj;
}

void write_truth_csv(const TruthTrajectory& traj, const std::filesystem::path& path,
                     int stride) {
    if (stride < 1) throw InvalidParameter("stride must be >= 1");
    CsvWriter out(path, "truth",
                  {"t_s", "delta_rad", "omega_pu", "edp_pu", "eqp_pu", "psid_pu", "psiq_pu",
                   "efd_pu", "vtr_pu", "pm_pu", "omega_dot_pups", "pm_dot_pups", "te_pu", "pe_pu",
                   "qe_pu", "v_re_pu", "v_im_pu", "i_re_pu", "i_im_pu", "vdot_re_pups",
                   "vdot_im_pups", "idot_re_pups", "idot_im_pups", "f_pu", "rocof_pups",
                   "faulted"});
    for (std::size_t k = 0; k < traj.samples.size(); k += static_cast<std::size_t>(stride)) {
        const TruthSample& r = traj.samples[k];
        out << r.t;
        for (Eigen::Index j = 0; j <= conv::kPm; ++j) out << r.state[j];
        out << r.omega_dot << r.pm_dot << r.t_e << r.p_e << r.q_e << r.v.real() << r.v.imag()
            << r.i.real() << r.i.imag() << r.v_dot.real() << r.v_dot.imag() << r.i_dot.real()
            << r.i_dot.imag() << r.f << r.rocof << (r.faulted ? 1.0 : 0.0);
        out.end_row();
    }
}

namespace {

struct GovernorKey {
    const char* key;
    double* value;
};

std::vector<GovernorKey> governor_keys(GovernorParameters& g) {
    if (auto* s = std::get_if<SimplePoleGovernor>(&g)) return {{"r", &s->r}, {"T_ef", &s->T_ef}};
    if (auto* s = std::get_if<SteamGovernor>(&g)) {
        return {{"r", &s->r},     {"T_s", &s->T_s}, {"T_c", &s->T_c},
                {"T_3", &s->T_3}, {"T_4", &s->T_4}, {"T_5", &s->T_5}};
    }
    auto& h = std::get<HydroGovernor>(g);
    return {{"r", &h.r}, {"r_t", &h.r_t}, {"T_r", &h.T_r}, {"T_g", &h.T_g}, {"T_w", &h.T_w}};
}

}  // namespace

Scenario read_scenario(const ConfigDocument& doc) {
    Scenario s;
    s.params = read_generator_params(doc, "generator");

    doc.require_known_keys("network", {"line_reactance", "bus_voltage", "bus_angle", "p_dispatch",
                                       "v_terminal"});
    s.line_reactance = doc.get_double("network", "line_reactance", s.line_reactance);
    s.bus_voltage = doc.get_double("network", "bus_voltage", s.bus_voltage);
    s.bus_angle = doc.get_double("network", "bus_angle", s.bus_angle);
    s.p_dispatch = doc.get_double("network", "p_dispatch", s.p_dispatch);
    s.v_terminal = doc.get_double("network", "v_terminal", s.v_terminal);

    doc.require_known_keys("fault", {"start", "duration", "r", "x"});
    s.fault_start = doc.get_double("fault", "start", s.fault_start);
    s.fault_duration = doc.get_double("fault", "duration", s.fault_duration);
    s.fault_impedance = {doc.get_double("fault", "r", s.fault_impedance.real()),
                         doc.get_double("fault", "x", s.fault_impedance.imag())};

    doc.require_known_keys("simulation", {"t_end", "dt", "seed", "derivatives"});
    s.t_end = doc.get_double("simulation", "t_end", s.t_end);
    s.dt_sim = doc.get_double("simulation", "dt", s.dt_sim);
    s.seed = static_cast<std::uint64_t>(doc.get_int("simulation", "seed", 1));
    const std::string mode = doc.get_string("simulation", "derivatives", "analytic");
    if (mode == "analytic") {
        s.derivatives = DerivativeMode::Analytic;
    } else if (mode == "centered") {
        s.derivatives = DerivativeMode::CenteredDifference;
    } else {
        doc.fail(*doc.find("simulation", "derivatives"), "expected 'analytic' or 'centered'");
    }

    const std::string type = doc.get_string("governor", "type", "simple");
    if (type == "simple") {
        s.governor = SimplePoleGovernor{s.params.r, s.params.T_ef};
    } else if (type == "steam") {
        s.governor = SteamGovernor{};
    } else if (type == "hydro") {
        s.governor = HydroGovernor{};
    } else {
        doc.fail(*doc.find("governor", "type"), "expected 'simple', 'steam' or 'hydro'");
    }
    std::vector<std::string> known{"type"};
    for (const auto& k : governor_keys(s.governor)) {
        known.emplace_back(k.key);
        *k.value = doc.get_double("governor", k.key, *k.value);
    }
    doc.require_known_keys("governor", known);

    try {
        validate(s);
        TgModel(s.governor, 0.0);
    } catch (const InvalidParameter& e) {
        throw ConfigError(doc.source(), 0, e.what());
    }
    return s;
}

void write_scenario(const Scenario& s, ConfigDocument& doc) {
    write_generator_params(s.params, doc, "generator");
    GovernorParameters g = s.governor;
    const char* type = g.index() == 0 ? "simple" : g.index() == 1 ? "steam" : "hydro";
    doc.set("governor", "type", std::string(type), "truth turbine-governor realization");
    for (const auto& k : governor_keys(g)) doc.set("governor", k.key, *k.value);
    doc.set("network", "line_reactance", s.line_reactance, "p.u.");
    doc.set("network", "bus_voltage", s.bus_voltage, "p.u.");
    doc.set("network", "bus_angle", s.bus_angle, "rad");
    doc.set("network", "p_dispatch", s.p_dispatch, "p.u.");
    doc.set("network", "v_terminal", s.v_terminal, "p.u.");
    doc.set("fault", "start", s.fault_start, "s");
    doc.set("fault", "duration", s.fault_duration, "s");
    doc.set("fault", "r", s.fault_impedance.real(), "p.u.");
    doc.set("fault", "x", s.fault_impedance.imag(), "p.u.");
    doc.set("simulation", "t_end", s.t_end, "s");
    doc.set("simulation", "dt", s.dt_sim, "s");
    doc.set("simulation", "seed", std::to_string(s.seed));
    doc.set("simulation", "derivatives",
            std::string(s.derivatives == DerivativeMode::Analytic ? "analytic" : "centered"));
}

}  // namespace gencal
