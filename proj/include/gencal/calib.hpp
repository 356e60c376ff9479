#pragma once

#include "gencal/aug_model.hpp"
#include "gencal/pmu_synth.hpp"
#include "gencal/ukf.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gencal {

/// A parameter estimate counts as converged once it has stayed within
/// `tolerance` (relative) of its final value for `hold` seconds and never
/// leaves that band afterwards.
struct ConvergenceRule {
    double tolerance = 0.05;
    double hold = 1.0;
};

struct PlaybackConfig {
    ModelKind model = ModelKind::Augmented;
    UkfTuning tuning;  ///< n is filled in from the model
    double q_scale = 1e-10;
    double start_offset = 0.033;  ///< s after fault clearance
    double delta_factor = 1.1;
    double h_factor = 0.8;
    double ka_factor = 0.6;
    double p0_floor = 1e-12;
    int substeps = 1;  ///< RK4 steps per filter step
    ConvergenceRule convergence;
};

int state_size(ModelKind model);
const char* to_string(ModelKind model);
/// Short state labels in state-vector order.
std::vector<std::string> state_names(ModelKind model);

struct InitialBelief {
    std::size_t start_index = 0;  ///< frame the filter starts on
    GaussianBelief belief;
    Matrix q;
};

/// x0 from the frame nearest to t_clear + start_offset. The augmented layout is
/// [delta_factor theta0, f0, alpha0, 1 x6, 0, h_factor H, ka_factor K_A]; the
/// conventional one carries the measured P_e in place of alpha0 and the
/// trailing 0. `nominal` supplies the H and K_A the factors apply to.
/// P0 = diag(max(dx^2/3, floor)) with dx = |reference - x0|; without a
/// reference dx defaults to half of |x0| per component.
InitialBelief build_initial_belief(const FrameStream& frames, double t_clear,
                                   const GeneratorParams& nominal, const PlaybackConfig& cfg,
                                   const std::optional<Vector>& reference = std::nullopt);

struct TrialResult {
    ModelKind model = ModelKind::Augmented;
    std::vector<double> times;
    std::vector<Vector> estimates;
    std::vector<Vector> variances;  ///< covariance diagonals
    double h_final = 0.0;
    double ka_final = 0.0;
    double convergence_time = 0.0;
    Vector mse_db;  ///< per state, empty without a reference
};

/// Sequential UKF over the frames from `init.start_index`. Inputs are held
/// first-order between frames inside the transition; the measurement uses the
/// current frame. Throws NumericalError / SingularState with the step index.
TrialResult run_playback(const FrameStream& frames, const GeneratorParams& params_guess,
                         const Matrix& r, const InitialBelief& init, const PlaybackConfig& cfg);

/// True state in the model's coordinates for each estimate time.
std::vector<Vector> reference_states(const TruthTrajectory& truth, const std::vector<double>& times,
                                     ModelKind model);

/// 10 log10 of the mean square, clamped at -200 dB. Throws on an empty window.
double mse_db(std::span<const double> errors);

/// Per-state MSE [dB] of estimates against reference from index `from` on.
Vector mse_db(const std::vector<Vector>& estimates, const std::vector<Vector>& reference,
              std::size_t from);

/// Start of the final in-band run plus the hold, capped at the last time.
double convergence_time(const std::vector<double>& times, const std::vector<double>& values,
                        const ConvergenceRule& rule);

/// Later of the H and K_A convergence times.
double parameter_convergence_time(const TrialResult& trial, const ConvergenceRule& rule);

/// Fills convergence_time and mse_db of `trial` against the truth.
void evaluate_trial(TrialResult& trial, const TruthTrajectory& truth, const ConvergenceRule& rule);

/// Everything a Monte Carlo campaign needs besides the seed.
struct CampaignSetup {
    Scenario scenario;
    NoiseTargets noise;
    double f_r = 60.0;
    int k_int = 16;
    PlaybackConfig playback;
    GeneratorParams filter_params;  ///< model constants the filter assumes
    bool use_reference_p0 = true;
};

struct TrialSummary {
    bool ok = false;
    std::string failure;
    double h_final = 0.0;
    double ka_final = 0.0;
    double convergence_time = 0.0;
    Vector mse_db;
};

struct MonteCarloStats {
    ModelKind model = ModelKind::Augmented;
    int trials = 0;
    int failures = 0;
    double h_mean = 0.0;
    double h_std = 0.0;
    double ka_mean = 0.0;
    double ka_std = 0.0;
    Vector worst_mse_db;  ///< per state, max over successful trials
    std::vector<TrialSummary> per_trial;
};

/// Filter constants for a scenario: the truth machine with the equilibrium
/// V_REF and P_m0 scaled by (1 + pm0_bias).
GeneratorParams filter_params_for(const Scenario& s, double pm0_bias = 0.0);

/// One complete trial: simulate is done by the caller, noise drawn from seed.
TrialSummary run_trial(const CampaignSetup& setup, const TruthTrajectory& truth,
                       std::uint64_t seed, TrialResult* full = nullptr);

/// M trials with seeds seed, seed + 1, ...; trial failures are counted, not
/// thrown. Results are reduced in trial order, so the statistics do not depend
/// on `workers`.
MonteCarloStats monte_carlo(const CampaignSetup& setup, int trials, std::uint64_t seed,
                            int workers = 0);

struct ReplayCase {
    std::string label;
    double h = 0.0;
    double k_a = 0.0;
    std::vector<double> p_e;
    std::vector<double> q_e;
    double rms_p_e = 0.0;  ///< against the true-parameter case
    double rms_q_e = 0.0;
};

struct ReplayResult {
    std::vector<double> times;
    std::vector<ReplayCase> cases;
};

/// Re-simulates the scenario for each (label, H, K_A) and compares P_e / Q_e
/// to the true-parameter run. The first case is always the truth.
ReplayResult replay_outputs(const Scenario& s,
                            const std::vector<std::tuple<std::string, double, double>>& cases,
                            int decimation = 1);

PlaybackConfig read_playback_config(const ConfigDocument& doc, PlaybackConfig defaults = {});
void write_playback_config(const PlaybackConfig& cfg, ConfigDocument& doc);

}  // namespace gencal
