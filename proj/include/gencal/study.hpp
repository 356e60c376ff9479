#pragma once

#include "gencal/calib.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace gencal {

/// Initial parameter factors of one calibrated unit.
struct UnitOffset {
    std::string label;
    double h_factor = 0.8;
    double ka_factor = 0.6;
};

/// A complete, reproducible study: truth scenario, instrument, filter and
/// campaign settings. Serializes to the same config format as Scenario.
struct StudyConfig {
    std::string name = "custom";
    Scenario scenario;
    NoiseTargets noise;  ///< i_magnitude <= 0 means the pre-fault |I|
    double f_r = 60.0;
    int k_int = 16;
    PlaybackConfig playback;
    double pm0_bias = 0.0;
    int trials = 1;
    std::vector<ModelKind> models{ModelKind::Augmented};
    std::vector<UnitOffset> units;  ///< empty: one unit with the playback factors
};

/// Built-in presets "A", "B" and "C". Throws ConfigError for anything else.
StudyConfig preset_study(std::string_view name);

StudyConfig read_study(const ConfigDocument& doc);
void write_study(const StudyConfig& study, ConfigDocument& doc);

/// Units to run, falling back to a single unit with the playback factors.
std::vector<UnitOffset> effective_units(const StudyConfig& study);

/// Campaign inputs for one unit and model, with the noise reference resolved.
CampaignSetup campaign_setup(const StudyConfig& study, const UnitOffset& unit, ModelKind model);

/// t, then est_/true_/var_ columns per state.
void write_estimates_csv(const TrialResult& trial, const TruthTrajectory& truth,
                         const std::filesystem::path& path);

void write_replay_csv(const ReplayResult& replay, const std::filesystem::path& path);

struct UnitCampaign {
    UnitOffset unit;
    std::vector<MonteCarloStats> per_model;  ///< in study.models order
};

void write_montecarlo_csv(const std::vector<UnitCampaign>& campaigns,
                          const std::filesystem::path& path);

/// Plain-text tables: parameter mean/std per unit and model, then per-state
/// worst-case MSE [dB] after convergence.
std::string campaign_report(const StudyConfig& study, const std::vector<UnitCampaign>& campaigns);

std::string playback_report(const StudyConfig& study, const std::vector<TrialResult>& trials);

std::string replay_report(const ReplayResult& replay);

/// Long-format (t, channel, source, label, value) table from the estimate and
/// replay CSVs found in `dir`. Writes a header-only file when there are none.
void write_plot_data(const std::filesystem::path& dir, const std::filesystem::path& out);

}  // namespace gencal
