#include "gencal/params.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace gencal {
namespace {

struct Field {
    const char* key;
    double GeneratorParams::*member;
    const char* unit;
    bool optional;
};

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        {"r_A", &GeneratorParams::r_A, "stator resistance [p.u.]", false},
        {"x_d", &GeneratorParams::x_d, "d-axis synchronous reactance [p.u.]", false},
        {"x_q", &GeneratorParams::x_q, "q-axis synchronous reactance [p.u.]", false},
        {"xd_p", &GeneratorParams::xd_p, "d-axis transient reactance [p.u.]", false},
        {"xq_p", &GeneratorParams::xq_p, "q-axis transient reactance [p.u.]", false},
        {"xd_pp", &GeneratorParams::xd_pp, "d-axis sub-transient reactance [p.u.]", false},
        {"xq_pp", &GeneratorParams::xq_pp, "q-axis sub-transient reactance [p.u.]", false},
        {"x_ls", &GeneratorParams::x_ls, "stator leakage reactance [p.u.]", false},
        {"Td_p", &GeneratorParams::Td_p, "d-axis transient open-circuit time constant [s]", false},
        {"Tq_p", &GeneratorParams::Tq_p, "q-axis transient open-circuit time constant [s]", false},
        {"Td_pp", &GeneratorParams::Td_pp, "d-axis sub-transient time constant [s]", false},
        {"Tq_pp", &GeneratorParams::Tq_pp, "q-axis sub-transient time constant [s]", false},
        {"H", &GeneratorParams::H, "inertia constant [s]", false},
        {"D", &GeneratorParams::D, "damping factor [p.u.]", false},
        {"k_sat1", &GeneratorParams::k_sat1, "quadratic saturation factor", false},
        {"k_sat2", &GeneratorParams::k_sat2, "linear saturation factor", false},
        {"k_sat3", &GeneratorParams::k_sat3, "constant saturation factor", false},
        {"K_A", &GeneratorParams::K_A, "exciter gain", false},
        {"T_A", &GeneratorParams::T_A, "exciter time constant [s]", false},
        {"T_R", &GeneratorParams::T_R, "transducer time constant [s]", false},
        {"V_REF", &GeneratorParams::V_REF, "excitation reference [p.u.]", false},
        {"pss", &GeneratorParams::pss, "constant stabilizer signal [p.u.]", false},
        {"r", &GeneratorParams::r, "governor droop (gain 1/r)", false},
        {"T_ef", &GeneratorParams::T_ef, "governor effective time constant [s]", false},
        {"P_m0", &GeneratorParams::P_m0, "steady-state mechanical power [p.u.]", false},
        {"omega_0", &GeneratorParams::omega_0, "nominal rotor speed [p.u.]", true},
        {"omega_s", &GeneratorParams::omega_s, "synchronous speed [rad/s]", true},
    };
    return table;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidParameter("generator parameters: " + what);
}

}  // namespace

void validate(const GeneratorParams& p) {
    const auto finite = [](double v) { return std::isfinite(v); };
    for (const auto& f : fields()) {
        require(finite(p.*f.member), std::string(f.key) + " is not finite");
    }
    require(p.x_ls > 0.0, "x_ls must be positive");
    require(p.xd_pp > p.x_ls, "xd_pp must exceed x_ls");
    require(p.xq_pp > p.x_ls, "xq_pp must exceed x_ls");
    require(p.xd_p >= p.xd_pp && p.x_d >= p.xd_p, "d-axis reactances must satisfy x_d >= xd_p >= xd_pp");
    require(p.xq_p >= p.xq_pp && p.x_q >= p.xq_p, "q-axis reactances must satisfy x_q >= xq_p >= xq_pp");
    require(p.r_A >= 0.0, "r_A must be non-negative");
    require(p.Td_p > 0.0 && p.Tq_p > 0.0 && p.Td_pp > 0.0 && p.Tq_pp > 0.0,
            "open-circuit time constants must be positive");
    require(p.T_A > 0.0 && p.T_R > 0.0 && p.T_ef > 0.0, "control time constants must be positive");
    require(p.H > 0.0, "H must be positive");
    require(p.r > 0.0, "r must be positive");
    require(p.omega_0 > 0.0 && p.omega_s > 0.0, "speeds must be positive");
}

GeneratorParams read_generator_params(const ConfigDocument& doc, std::string_view section) {
    std::vector<std::string> known;
    for (const auto& f : fields()) known.emplace_back(f.key);
    doc.require_known_keys(section, known);

    GeneratorParams p;
    for (const auto& f : fields()) {
        if (f.optional) {
            p.*f.member = doc.get_double(section, f.key, p.*f.member);
        } else {
            p.*f.member = doc.get_double(section, f.key);
        }
    }
    try {
        validate(p);
    } catch (const InvalidParameter& e) {
        throw ConfigError(doc.source(), 0, e.what());
    }
    return p;
}

void write_generator_params(const GeneratorParams& p, ConfigDocument& doc,
                            std::string_view section) {
    for (const auto& f : fields()) doc.set(section, f.key, p.*f.member, f.unit);
}

}  // namespace gencal

namespace gencal {

GeneratorParams desk_machine_params() {
    GeneratorParams p;
    p.r_A = 0.0025;
    p.x_d = 1.8;
    p.x_q = 1.7;
    p.xd_p = 0.3;
    p.xq_p = 0.55;
    p.xd_pp = 0.25;
    p.xq_pp = 0.25;
    p.x_ls = 0.2;
    p.Td_p = 8.0;
    p.Tq_p = 0.4;
    p.Td_pp = 0.03;
    p.Tq_pp = 0.05;
    p.H = 6.5;
    p.D = 2.0;
    p.k_sat1 = 0.0;
    p.k_sat2 = 1.0;
    p.k_sat3 = 0.0;
    p.K_A = 200.0;
    p.T_A = 0.05;
    p.T_R = 0.01;
    p.pss = 0.0;
    p.r = 0.04;
    p.T_ef = 2.4;
    return p;
}

}  // namespace gencal
