#include "gencal/study.hpp"

#include "gencal/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace gencal {

namespace {

std::vector<UnitOffset> table_offsets() {
    return {{"G1", 0.8, 0.6}, {"G2", 1.15, 1.5}, {"G3", 1.5, 1.15}, {"G4", 0.6, 0.8}};
}

std::string format(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string pad(const std::string& text, std::size_t width) {
    return text.size() >= width ? " " + text : std::string(width - text.size(), ' ') + text;
}

}  // namespace

StudyConfig preset_study(std::string_view name) {
    StudyConfig s;
    s.scenario.params = desk_machine_params();
    s.noise.i_magnitude = 0.0;
    s.noise.derivative_noise = false;
    if (name == "A") {
        s.name = "A";
        s.scenario.governor = SimplePoleGovernor{s.scenario.params.r, s.scenario.params.T_ef};
    } else if (name == "B") {
        s.name = "B";
        s.scenario.governor = SteamGovernor{};
        s.pm0_bias = 0.02;
        s.trials = 100;
        s.models = {ModelKind::Conventional, ModelKind::Augmented};
        s.units = table_offsets();
    } else if (name == "C") {
        s.name = "C";
        s.scenario.governor = HydroGovernor{};
        s.pm0_bias = 0.02;
        s.trials = 100;
        s.models = {ModelKind::Augmented};
        s.units = table_offsets();
    } else {
        throw ConfigError("<preset>", 0, "unknown preset '" + std::string(name) + "'");
    }
    return s;
}

StudyConfig read_study(const ConfigDocument& doc) {
    StudyConfig s;
    s.scenario = read_scenario(doc);
    NoiseTargets defaults;
    defaults.i_magnitude = 0.0;
    s.noise = read_noise_targets(doc, defaults);
    s.f_r = doc.get_double("pmu", "f_r", s.f_r);
    s.k_int = static_cast<int>(doc.get_int("pmu", "k_int", s.k_int));
    s.playback = read_playback_config(doc);
    s.pm0_bias = doc.get_double("playback", "pm0_bias", 0.0);

    doc.require_known_keys("study", {"name", "trials", "models", "units"});
    s.name = doc.get_string("study", "name", s.name);
    s.trials = static_cast<int>(doc.get_int("study", "trials", s.trials));
    if (s.trials < 1) doc.fail(*doc.find("study", "trials"), "trials must be >= 1");
    if (!(s.f_r > 0.0)) doc.fail(*doc.find("pmu", "f_r"), "f_r must be positive");
    if (s.k_int < 1) doc.fail(*doc.find("pmu", "k_int"), "k_int must be >= 1");

    if (const auto* e = doc.find("study", "models")) {
        s.models.clear();
        std::istringstream in(e->value);
        std::string word;
        while (in >> word) {
            if (word == "augmented") {
                s.models.push_back(ModelKind::Augmented);
            } else if (word == "conventional") {
                s.models.push_back(ModelKind::Conventional);
            } else {
                doc.fail(*e, "unknown model '" + word + "'");
            }
        }
        if (s.models.empty()) doc.fail(*e, "at least one model is required");
    }
    if (const auto* e = doc.find("study", "units")) {
        std::istringstream in(e->value);
        std::string item;
        while (std::getline(in, item, ',')) {
            std::istringstream fields(item);
            UnitOffset u;
            std::string h, ka;
            if (!(fields >> u.label >> h >> ka)) doc.fail(*e, "expected 'label h_factor ka_factor'");
            try {
                std::size_t used = 0;
                u.h_factor = std::stod(h, &used);
                if (used != h.size()) throw std::invalid_argument(h);
                u.ka_factor = std::stod(ka, &used);
                if (used != ka.size()) throw std::invalid_argument(ka);
            } catch (const std::exception&) {
                doc.fail(*e, "non-numeric unit factor in '" + item + "'");
            }
            s.units.push_back(u);
        }
    }
    return s;
}

void write_study(const StudyConfig& s, ConfigDocument& doc) {
    doc.set("study", "name", s.name);
    doc.set("study", "trials", std::to_string(s.trials), "Monte Carlo trials per unit and model");
    std::string models;
    for (ModelKind m : s.models) models += (models.empty() ? "" : " ") + std::string(to_string(m));
    doc.set("study", "models", models);
    if (!s.units.empty()) {
        std::string units;
        for (const auto& u : s.units) {
            units += (units.empty() ? "" : ", ") + u.label + " " + format_double(u.h_factor) + " " +
                     format_double(u.ka_factor);
        }
        doc.set("study", "units", units, "label, initial H and K_A factors");
    }
    write_scenario(s.scenario, doc);
    write_noise_targets(s.noise, doc);
    doc.set("pmu", "f_r", s.f_r, "frames per second");
    doc.set("pmu", "k_int", std::to_string(s.k_int), "interpolation factor");
    write_playback_config(s.playback, doc);
    doc.set("playback", "pm0_bias", s.pm0_bias, "relative error of the filter's P_m0");
}

std::vector<UnitOffset> effective_units(const StudyConfig& s) {
    if (!s.units.empty()) return s.units;
    return {{"G1", s.playback.h_factor, s.playback.ka_factor}};
}

CampaignSetup campaign_setup(const StudyConfig& s, const UnitOffset& unit, ModelKind model) {
    CampaignSetup c;
    c.scenario = s.scenario;
    c.noise = s.noise;
    if (!(c.noise.i_magnitude > 0.0)) c.noise.i_magnitude = std::abs(pre_fault_terminal(s.scenario).i);
    c.f_r = s.f_r;
    c.k_int = s.k_int;
    c.playback = s.playback;
    c.playback.model = model;
    c.playback.h_factor = unit.h_factor;
    c.playback.ka_factor = unit.ka_factor;
    c.filter_params = filter_params_for(s.scenario, s.pm0_bias);
    return c;
}

void write_estimates_csv(const TrialResult& trial, const TruthTrajectory& truth,
                         const std::filesystem::path& path) {
    const auto names = state_names(trial.model);
    std::vector<std::string> cols{"t"};
    for (const auto& n : names) {
        cols.push_back("est_" + n);
        cols.push_back("true_" + n);
        cols.push_back("var_" + n);
    }
    CsvWriter out(path, std::string("estimates ") + to_string(trial.model), cols);
    const auto ref = reference_states(truth, trial.times, trial.model);
    for (std::size_t k = 0; k < trial.times.size(); ++k) {
        out << trial.times[k];
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(names.size()); ++j) {
            out << trial.estimates[k][j] << ref[k][j] << trial.variances[k][j];
        }
        out.end_row();
    }
}

void write_replay_csv(const ReplayResult& replay, const std::filesystem::path& path) {
    std::vector<std::string> cols{"t"};
    for (const auto& c : replay.cases) {
        cols.push_back("Pe_" + c.label);
        cols.push_back("Qe_" + c.label);
    }
    CsvWriter out(path, "replay", cols);
    for (std::size_t k = 0; k < replay.times.size(); ++k) {
        out << replay.times[k];
        for (const auto& c : replay.cases) out << c.p_e[k] << c.q_e[k];
        out.end_row();
    }
}

void write_montecarlo_csv(const std::vector<UnitCampaign>& campaigns,
                          const std::filesystem::path& path) {
    CsvWriter out(path, "montecarlo",
                  {"unit", "model", "trial", "ok", "H", "KA", "convergence_s", "mse_omega_db"});
    for (const auto& uc : campaigns) {
        for (const auto& st : uc.per_model) {
            for (std::size_t m = 0; m < st.per_trial.size(); ++m) {
                const TrialSummary& t = st.per_trial[m];
                out << uc.unit.label << to_string(st.model) << static_cast<double>(m)
                    << (t.ok ? 1.0 : 0.0) << t.h_final << t.ka_final << t.convergence_time
                    << (t.ok ? t.mse_db[1] : 0.0);
                out.end_row();
            }
        }
    }
}

namespace {

std::string header(const StudyConfig& s) {
    std::ostringstream o;
    const TgModel tg(s.scenario.governor, 0.0);
    o << "gencal report (schema " << kSchemaVersion << ")\n";
    o << "study " << s.name << ": truth governor " << to_string(tg.variant())
      << ", filter T_ef " << format("%.3g", s.scenario.params.T_ef) << " s";
    if (tg.variant() != TgVariant::SimplePole) {
        o << " (truth effective T_ef " << format("%.3f", effective_time_constant(tg)) << " s)";
    }
    o << ", P_m0 bias " << format("%+.1f", 100.0 * s.pm0_bias) << " %\n";
    o << "reference H " << format("%.4g", s.scenario.params.H) << ", K_A "
      << format("%.4g", s.scenario.params.K_A) << "; fault at "
      << format("%.3g", s.scenario.fault_start) << " s for "
      << format("%.3g", s.scenario.fault_duration) << " s; f_r " << format("%.4g", s.f_r)
      << " fps, k_int " << s.k_int << "\n";
    if (s.units.size() > 1) {
        o << "units G1..G" << s.units.size()
          << " are the same single-machine unit started from different initial offsets\n";
    }
    return o.str();
}

}  // namespace

std::string campaign_report(const StudyConfig& s, const std::vector<UnitCampaign>& campaigns) {
    std::ostringstream o;
    o << header(s) << "\n";
    for (std::size_t mi = 0; mi < s.models.size(); ++mi) {
        o << "Mean and standard deviation of the estimated parameters (" << to_string(s.models[mi])
          << " model, " << s.trials << " trials)\n";
        o << "unit   H0 %    KA0 %    mean H    std H     mean K_A   std K_A   failures\n";
        for (const auto& uc : campaigns) {
            const MonteCarloStats& st = uc.per_model[mi];
            o << uc.unit.label << std::string(std::max<std::size_t>(1, 7 - uc.unit.label.size()), ' ')
              << format("%+5.0f", 100.0 * (uc.unit.h_factor - 1.0)) << "   "
              << format("%+5.0f", 100.0 * (uc.unit.ka_factor - 1.0)) << "    "
              << format("%8.4f", st.h_mean) << "  " << format("%7.4f", st.h_std) << "   "
              << format("%9.3f", st.ka_mean) << "  " << format("%7.3f", st.ka_std) << "   "
              << st.failures << "\n";
        }
        o << "\n";
    }
    o << "MSE [dB] after convergence, worst case over trials\n";
    o << "state     ";
    for (const auto& uc : campaigns) {
        for (ModelKind m : s.models) {
            o << pad(uc.unit.label + (m == ModelKind::Augmented ? "/aug" : "/conv"), 10);
        }
    }
    o << "\n";
    std::vector<std::string> names = state_names(ModelKind::Augmented);
    for (const auto& n : state_names(ModelKind::Conventional)) {
        if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    }
    for (const auto& name : names) {
        o << name << std::string(10 - std::min<std::size_t>(9, name.size()), ' ');
        for (const auto& uc : campaigns) {
            for (std::size_t mi = 0; mi < s.models.size(); ++mi) {
                const auto model_names = state_names(s.models[mi]);
                const auto it = std::find(model_names.begin(), model_names.end(), name);
                const Vector& w = uc.per_model[mi].worst_mse_db;
                if (it == model_names.end() || w.size() == 0) {
                    o << pad("-", 10);
                } else {
                    o << format("%10.1f", w[it - model_names.begin()]);
                }
            }
        }
        o << "\n";
    }
    return o.str();
}

std::string playback_report(const StudyConfig& s, const std::vector<TrialResult>& trials) {
    std::ostringstream o;
    o << header(s) << "\n";
    for (const TrialResult& t : trials) {
        o << to_string(t.model) << " model: H " << format("%.4f", t.h_final) << " ("
          << format("%+.2f", 100.0 * (t.h_final / s.scenario.params.H - 1.0)) << " %), K_A "
          << format("%.3f", t.ka_final) << " ("
          << format("%+.2f", 100.0 * (t.ka_final / s.scenario.params.K_A - 1.0))
          << " %), converged at " << format("%.3f", t.convergence_time) << " s\n";
        const auto names = state_names(t.model);
        o << "  MSE [dB] after convergence:";
        for (std::size_t j = 0; j < names.size() && static_cast<Eigen::Index>(j) < t.mse_db.size(); ++j) {
            o << " " << names[j] << " " << format("%.1f", t.mse_db[static_cast<Eigen::Index>(j)]);
        }
        o << "\n";
    }
    return o.str();
}

std::string replay_report(const ReplayResult& replay) {
    std::ostringstream o;
    o << "Output replay against the true parameters\n";
    o << "case           H        K_A       rms P_e     rms Q_e\n";
    for (const auto& c : replay.cases) {
        o << c.label << std::string(std::max<std::size_t>(1, 13 - c.label.size()), ' ')
          << format("%8.4f", c.h) << "  " << format("%9.3f", c.k_a) << "  "
          << format("%10.3e", c.rms_p_e) << "  " << format("%10.3e", c.rms_q_e) << "\n";
    }
    return o.str();
}

void write_plot_data(const std::filesystem::path& dir, const std::filesystem::path& out_path) {
    if (!std::filesystem::is_directory(dir)) {
        throw ConfigError(dir.string(), 0, "result directory does not exist");
    }
    CsvWriter out(out_path, "plot-data", {"t", "channel", "source", "label", "value"});
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    bool truth_written = false;
    for (const auto& f : files) {
        const std::string stem = f.stem().string();
        if (f.extension() != ".csv") continue;
        if (stem.starts_with("estimates_")) {
            const CsvTable t = read_csv(f);
            const std::string label = stem.substr(10);
            const bool emit_truth = !truth_written && label == "augmented";
            for (std::size_t c = 1; c < t.columns.size(); ++c) {
                const std::string& col = t.columns[c];
                const bool est = col.starts_with("est_");
                const bool tru = col.starts_with("true_");
                if (!est && !(tru && emit_truth)) continue;
                const std::string channel = col.substr(est ? 4 : 5);
                for (std::size_t r = 0; r < t.rows.size(); ++r) {
                    out << t.rows[r][0] << channel << (est ? "estimate" : "truth")
                        << (est ? label : std::string("truth")) << t.rows[r][c];
                    out.end_row();
                }
            }
            truth_written = truth_written || emit_truth;
        } else if (stem == "replay") {
            const CsvTable t = read_csv(f);
            for (std::size_t c = 1; c < t.columns.size(); ++c) {
                const std::string& col = t.columns[c];
                const std::string channel = col.substr(0, 2);
                const std::string label = col.substr(3);
                for (std::size_t r = 0; r < t.rows.size(); ++r) {
                    out << t.rows[r][0] << channel << "replay" << label << t.rows[r][c];
                    out.end_row();
                }
            }
        }
    }
}

}  // namespace gencal
