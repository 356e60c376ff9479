#include "gencal/study.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

using namespace gencal;

namespace {

struct Options {
    std::string scenario = "A";
    std::string mode = "scenario";
    std::string model;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> k_int;
    std::optional<double> dt;
    std::string out = "gencal_out";
    bool noiseless = false;
};

StudyConfig load_study(const Options& o) {
    StudyConfig s;
    if (o.scenario == "A" || o.scenario == "B" || o.scenario == "C") {
        s = preset_study(o.scenario);
    } else {
        s = read_study(ConfigDocument::load(o.scenario));
    }
    if (o.seed) s.scenario.seed = *o.seed;
    if (o.trials) {
        if (*o.trials < 1) throw ConfigError("--trials", 0, "must be >= 1");
        s.trials = *o.trials;
    }
    if (o.k_int) {
        if (*o.k_int < 1) throw ConfigError("--k-int", 0, "must be >= 1");
        s.k_int = *o.k_int;
    }
    if (o.dt) {
        if (!(*o.dt > 0.0)) throw ConfigError("--dt", 0, "must be positive");
        s.scenario.dt_sim = *o.dt;
    }
    if (o.noiseless) s.noise = NoiseTargets::noiseless();
    if (o.model == "conventional") {
        s.models = {ModelKind::Conventional};
    } else if (o.model == "augmented") {
        s.models = {ModelKind::Augmented};
    } else if (o.model == "both") {
        s.models = {ModelKind::Conventional, ModelKind::Augmented};
    }
    try {
        validate(s.scenario);
    } catch (const InvalidParameter& e) {
        throw ConfigError(o.scenario, 0, e.what());
    }
    return s;
}

void write_manifest(const StudyConfig& s, const Options& o, const std::filesystem::path& dir) {
    ConfigDocument doc;
    doc.set("run", "scenario", o.scenario);
    doc.set("run", "mode", o.mode);
    doc.set("run", "seed", std::to_string(s.scenario.seed));
    doc.set("run", "trials", std::to_string(s.trials));
    doc.set("run", "out", o.out);
    write_study(s, doc);
    doc.save(dir / "manifest.cfg");
}

void emit(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::app);
    f << text << "\n";
    std::cout << text << "\n";
}

int filter_stride(const StudyConfig& s) {
    const double dt = 1.0 / (s.f_r * s.k_int);
    return std::max(1, static_cast<int>(std::lround(dt / s.scenario.dt_sim)));
}

struct Calibrated {
    std::optional<std::pair<double, double>> conventional;
    std::optional<std::pair<double, double>> augmented;
};

Calibrated run_playbacks(const StudyConfig& s, const TruthTrajectory& truth,
                         const std::filesystem::path& dir, bool write_estimates) {
    Calibrated cal;
    std::vector<TrialResult> results;
    const UnitOffset unit = effective_units(s).front();
    for (ModelKind m : s.models) {
        TrialResult full;
        const TrialSummary sum = run_trial(campaign_setup(s, unit, m), truth, s.scenario.seed, &full);
        if (!sum.ok) throw NumericalError(std::string(to_string(m)) + " playback: " + sum.failure);
        if (write_estimates) {
            write_estimates_csv(full, truth, dir / (std::string("estimates_") + to_string(m) + ".csv"));
        }
        (m == ModelKind::Augmented ? cal.augmented : cal.conventional) =
            std::make_pair(full.h_final, full.ka_final);
        results.push_back(std::move(full));
    }
    emit(dir / "report.txt", playback_report(s, results));
    return cal;
}

Calibrated run_campaign(const StudyConfig& s, const std::filesystem::path& dir) {
    std::vector<UnitCampaign> campaigns;
    for (const UnitOffset& unit : effective_units(s)) {
        UnitCampaign uc{unit, {}};
        for (ModelKind m : s.models) {
            std::cerr << "montecarlo " << unit.label << " " << to_string(m) << " (" << s.trials
                      << " trials)\n";
            uc.per_model.push_back(monte_carlo(campaign_setup(s, unit, m), s.trials, s.scenario.seed));
        }
        campaigns.push_back(std::move(uc));
    }
    write_montecarlo_csv(campaigns, dir / "montecarlo.csv");
    emit(dir / "report.txt", campaign_report(s, campaigns));
    Calibrated cal;
    const auto& first = campaigns.front();
    for (std::size_t i = 0; i < s.models.size(); ++i) {
        const MonteCarloStats& st = first.per_model[i];
        if (st.failures == st.trials) continue;
        (s.models[i] == ModelKind::Augmented ? cal.augmented : cal.conventional) =
            std::make_pair(st.h_mean, st.ka_mean);
    }
    return cal;
}

void run_replay(const StudyConfig& s, const Calibrated& cal, const std::filesystem::path& dir) {
    const UnitOffset unit = effective_units(s).front();
    std::vector<std::tuple<std::string, double, double>> cases;
    cases.emplace_back("uncalibrated", unit.h_factor * s.scenario.params.H,
                       unit.ka_factor * s.scenario.params.K_A);
    if (cal.conventional) cases.emplace_back("Cal1", cal.conventional->first, cal.conventional->second);
    if (cal.augmented) cases.emplace_back("Cal2", cal.augmented->first, cal.augmented->second);
    const ReplayResult replay = replay_outputs(s.scenario, cases, filter_stride(s));
    write_replay_csv(replay, dir / "replay.csv");
    emit(dir / "report.txt",
         replay_report(replay) + "Cal1: conventional-model calibration, Cal2: augmented-model calibration");
}

int run(const Options& o) {
    const std::filesystem::path dir = o.out;
    if (o.mode == "plotdata") {
        write_plot_data(dir, dir / "plot_data.csv");
        return 0;
    }
    const StudyConfig s = load_study(o);
    std::filesystem::create_directories(dir);
    std::filesystem::remove(dir / "report.txt");
    write_manifest(s, o, dir);

    const TruthTrajectory truth = simulate(s.scenario);
    write_truth_csv(truth, dir / "truth.csv", filter_stride(s));
    if (o.mode == "simulate") return 0;

    const CampaignSetup first = campaign_setup(s, effective_units(s).front(), s.models.front());
    write_frames_csv(sample_frames(truth, s.f_r, derive_sigmas(first.noise), s.scenario.seed),
                     dir / "pmu.csv");
    if (o.mode == "synth") return 0;

    if (o.mode == "playback") {
        run_playbacks(s, truth, dir, true);
    } else if (o.mode == "montecarlo") {
        run_campaign(s, dir);
    } else if (o.mode == "replay") {
        run_replay(s, run_playbacks(s, truth, dir, false), dir);
    } else {
        const Calibrated cal = s.trials > 1 ? run_campaign(s, dir) : run_playbacks(s, truth, dir, true);
        if (s.trials > 1) run_playbacks(s, truth, dir, true);
        run_replay(s, cal, dir);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generator inertia and exciter-gain calibration by PMU event playback"};
    Options o;
    app.add_option("--scenario", o.scenario, "Preset A, B, C or a study config file");
    app.add_option("--mode", o.mode, "What to run")
        ->check(CLI::IsMember({"scenario", "simulate", "synth", "playback", "montecarlo", "replay",
                               "plotdata"}));
    app.add_option("--model", o.model, "Override the study's models")
        ->check(CLI::IsMember({"conventional", "augmented", "both"}));
    app.add_option("--seed", o.seed, "Noise seed (trial m uses seed + m)");
    app.add_option("--trials", o.trials, "Monte Carlo trials per unit and model");
    app.add_option("--out", o.out, "Output directory");
    app.add_flag("--noiseless", o.noiseless, "Synthesize frames without noise");
    app.add_option("--k-int", o.k_int, "Interpolation factor");
    app.add_option("--dt", o.dt, "Truth integration step [s]");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        return run(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidParameter& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
