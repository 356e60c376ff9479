#include "gencal/calib.hpp"

#include "gencal/integrator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace gencal {

int state_size(ModelKind model) {
    return model == ModelKind::Augmented ? static_cast<int>(aug::kSize)
                                         : static_cast<int>(conv::kSize);
}

const char* to_string(ModelKind model) {
    return model == ModelKind::Augmented ? "augmented" : "conventional";
}

std::vector<std::string> state_names(ModelKind model) {
    if (model == ModelKind::Augmented) {
        return {"delta", "omega", "omega_dot", "Ed_p", "Eq_p", "Psi_d",
                "Psi_q", "Efd",   "VTR",       "Pm_dot", "H",  "KA"};
    }
    return {"delta", "omega", "Ed_p", "Eq_p", "Psi_d", "Psi_q", "Efd", "VTR", "Pm", "H", "KA"};
}

namespace {

double f_nominal(const GeneratorParams& p) { return p.omega_s / (2.0 * kPi); }

std::size_t nearest_frame(const FrameStream& frames, double t) {
    if (frames.empty()) throw InvalidParameter("empty frame stream");
    const auto it = std::lower_bound(frames.begin(), frames.end(), t,
                                     [](const PmuFrame& f, double x) { return f.t < x; });
    std::size_t k = static_cast<std::size_t>(it - frames.begin());
    if (k == frames.size()) k = frames.size() - 1;
    if (k > 0 && std::abs(frames[k - 1].t - t) <= std::abs(frames[k].t - t)) --k;
    const double spacing =
        frames.size() > 1 ? frames[1].t - frames[0].t : std::numeric_limits<double>::infinity();
    if (std::abs(frames[k].t - t) > 0.5 * spacing + 1e-9) {
        throw InvalidParameter("no frame at the playback start time");
    }
    return k;
}

AugmentedInput augmented_input(const PmuFrame& f) { return {f.v, f.i, f.v_dot, f.i_dot}; }

ConventionalInput conventional_input(const PmuFrame& f) {
    return {active_power(f.v, f.i), f.i.real(), f.i.imag()};
}

AugmentedInput lerp(const AugmentedInput& a, const AugmentedInput& b, double w) {
    return {a.v + w * (b.v - a.v), a.i + w * (b.i - a.i), a.v_dot + w * (b.v_dot - a.v_dot),
            a.i_dot + w * (b.i_dot - a.i_dot)};
}

ConventionalInput lerp(const ConventionalInput& a, const ConventionalInput& b, double w) {
    return {a.p_e + w * (b.p_e - a.p_e), a.i_re + w * (b.i_re - a.i_re),
            a.i_im + w * (b.i_im - a.i_im)};
}

template <class State, class Input, class Dynamics>
Vector hold_transition(const Vector& x, const Input& u0, const Input& u1, double dt, int substeps,
                       const Dynamics& dynamics) {
    State s = x;
    const double h = dt / substeps;
    for (int j = 0; j < substeps; ++j) {
        const double base = static_cast<double>(j) / substeps;
        s = rk4_step(s, base * dt, h, [&](double t, const State& xs) {
            return State(dynamics(xs, lerp(u0, u1, t / dt)));
        });
    }
    return s;
}

}  // namespace

InitialBelief build_initial_belief(const FrameStream& frames, double t_clear,
                                   const GeneratorParams& nominal, const PlaybackConfig& cfg,
                                   const std::optional<Vector>& reference) {
    if (!(cfg.q_scale > 0.0)) throw InvalidParameter("q_scale must be positive");
    if (cfg.start_offset < 0.0) throw InvalidParameter("start_offset must be non-negative");
    if (frames.size() < 2) throw InvalidParameter("playback needs at least two frames");
    InitialBelief init;
    init.start_index = nearest_frame(frames, t_clear + cfg.start_offset);
    const PmuFrame& f = frames[init.start_index];
    const double fn = f_nominal(nominal);
    const int n = state_size(cfg.model);

    Vector x0 = Vector::Ones(n);
    x0[0] = cfg.delta_factor * std::arg(f.v);
    x0[1] = f.f_hz / fn;
    if (cfg.model == ModelKind::Augmented) {
        x0[aug::kOmegaDot] = f.rocof_hzps / fn;
        x0[aug::kPmDot] = 0.0;
    } else {
        x0[conv::kPm] = active_power(f.v, f.i);
    }
    x0[n - 2] = cfg.h_factor * nominal.H;
    x0[n - 1] = cfg.ka_factor * nominal.K_A;

    Vector dx;
    if (reference) {
        if (reference->size() != n) throw InvalidParameter("reference state has the wrong size");
        dx = (*reference - x0).cwiseAbs();
    } else {
        dx = 0.5 * x0.cwiseAbs();
    }
    const Vector var = (dx.array().square() / 3.0).max(cfg.p0_floor);
    init.belief = {x0, var.asDiagonal()};
    const double dt = frames[1].t - frames[0].t;
    init.q = cfg.q_scale * dt * Matrix::Identity(n, n);
    return init;
}

TrialResult run_playback(const FrameStream& frames, const GeneratorParams& p, const Matrix& r,
                         const InitialBelief& init, const PlaybackConfig& cfg) {
    if (cfg.substeps < 1) throw InvalidParameter("substeps must be >= 1");
    UkfTuning tuning = cfg.tuning;
    tuning.n = state_size(cfg.model);
    if (init.belief.mean.size() != tuning.n) throw InvalidParameter("belief size mismatch");
    UnscentedKalmanFilter ukf(init.belief, tuning);
    const double fn = f_nominal(p);
    const bool augmented = cfg.model == ModelKind::Augmented;

    TrialResult out;
    out.model = cfg.model;
    const std::size_t count = frames.size() - init.start_index;
    out.times.reserve(count);
    out.estimates.reserve(count);
    out.variances.reserve(count);
    const auto record = [&](double t) {
        out.times.push_back(t);
        out.estimates.push_back(ukf.belief().mean);
        out.variances.push_back(ukf.belief().covariance.diagonal());
    };
    record(frames[init.start_index].t);

    for (std::size_t k = init.start_index + 1; k < frames.size(); ++k) {
        const PmuFrame& prev = frames[k - 1];
        const PmuFrame& cur = frames[k];
        const double dt = cur.t - prev.t;
        try {
            if (augmented) {
                const AugmentedInput u0 = augmented_input(prev);
                const AugmentedInput u1 = augmented_input(cur);
                ukf.predict(
                    [&](const Vector& x) {
                        return hold_transition<AugmentedState>(
                            x, u0, u1, dt, cfg.substeps,
                            [&](const AugmentedState& s, const AugmentedInput& u) {
                                return augmented_dynamics(s, u, p);
                            });
                    },
                    init.q);
                Vector z(4);
                z << cur.v.real(), cur.v.imag(), cur.f_hz / fn, cur.rocof_hzps / fn;
                ukf.update(
                    [&](const Vector& x) {
                        return Vector(augmented_measurement(AugmentedState(x), u1, p));
                    },
                    z, r);
            } else {
                const ConventionalInput u0 = conventional_input(prev);
                const ConventionalInput u1 = conventional_input(cur);
                ukf.predict(
                    [&](const Vector& x) {
                        return hold_transition<ConventionalState>(
                            x, u0, u1, dt, cfg.substeps,
                            [&](const ConventionalState& s, const ConventionalInput& u) {
                                return conventional_dynamics(s, u, p);
                            });
                    },
                    init.q);
                Vector z(2);
                z << cur.v.real(), cur.v.imag();
                ukf.update(
                    [&](const Vector& x) {
                        return Vector(conventional_measurement(ConventionalState(x), u1, p));
                    },
                    z, r);
            }
        } catch (const Error& e) {
            throw NumericalError(std::string(e.what()) + " at filter step " + std::to_string(k) +
                                 " (t=" + std::to_string(cur.t) + " s)");
        }
        record(cur.t);
    }
    out.h_final = out.estimates.back()[tuning.n - 2];
    out.ka_final = out.estimates.back()[tuning.n - 1];
    out.convergence_time = parameter_convergence_time(out, cfg.convergence);
    return out;
}

std::vector<Vector> reference_states(const TruthTrajectory& truth, const std::vector<double>& times,
                                     ModelKind model) {
    std::vector<Vector> ref;
    ref.reserve(times.size());
    const double t0 = truth.samples.front().t;
    for (double t : times) {
        auto k = static_cast<std::size_t>(std::max(0LL, std::llround((t - t0) / truth.dt)));
        k = std::min(k, truth.samples.size() - 1);
        const TruthSample& s = truth.samples[k];
        if (model == ModelKind::Augmented) {
            ref.emplace_back(embed_conventional(s.state, s.omega_dot, s.pm_dot));
        } else {
            ref.emplace_back(s.state);
        }
    }
    return ref;
}

double mse_db(std::span<const double> errors) {
    if (errors.empty()) throw InvalidParameter("MSE over an empty window");
    double acc = 0.0;
    for (double e : errors) acc += e * e;
    const double mse = acc / static_cast<double>(errors.size());
    if (!(mse > 0.0)) return -200.0;
    return std::max(-200.0, 10.0 * std::log10(mse));
}

Vector mse_db(const std::vector<Vector>& estimates, const std::vector<Vector>& reference,
              std::size_t from) {
    if (estimates.size() != reference.size()) throw InvalidParameter("series length mismatch");
    if (from >= estimates.size()) throw InvalidParameter("MSE over an empty window");
    const Eigen::Index n = estimates.front().size();
    Vector out(n);
    std::vector<double> err(estimates.size() - from);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (std::size_t k = from; k < estimates.size(); ++k) {
            err[k - from] = estimates[k][j] - reference[k][j];
        }
        out[j] = mse_db(err);
    }
    return out;
}

double convergence_time(const std::vector<double>& times, const std::vector<double>& values,
                        const ConvergenceRule& rule) {
    if (times.empty() || times.size() != values.size()) {
        throw InvalidParameter("convergence: mismatched series");
    }
    const double final_value = values.back();
    const double band = rule.tolerance * std::abs(final_value);
    std::size_t k = values.size();
    while (k > 0 && std::abs(values[k - 1] - final_value) <= band) --k;
    const double settled = times[std::min(k, values.size() - 1)];
    return std::min(settled + rule.hold, times.back());
}

double parameter_convergence_time(const TrialResult& trial, const ConvergenceRule& rule) {
    if (trial.estimates.empty()) return 0.0;
    const Eigen::Index n = trial.estimates.front().size();
    std::vector<double> h, ka;
    h.reserve(trial.estimates.size());
    ka.reserve(trial.estimates.size());
    for (const Vector& x : trial.estimates) {
        h.push_back(x[n - 2]);
        ka.push_back(x[n - 1]);
    }
    return std::max(convergence_time(trial.times, h, rule),
                    convergence_time(trial.times, ka, rule));
}

void evaluate_trial(TrialResult& trial, const TruthTrajectory& truth, const ConvergenceRule& rule) {
    trial.convergence_time = parameter_convergence_time(trial, rule);
    const auto it = std::lower_bound(trial.times.begin(), trial.times.end(),
                                     trial.convergence_time - 1e-12);
    auto from = static_cast<std::size_t>(it - trial.times.begin());
    from = std::min(from, trial.times.size() - 1);
    trial.mse_db = mse_db(trial.estimates, reference_states(truth, trial.times, trial.model), from);
}

GeneratorParams filter_params_for(const Scenario& s, double pm0_bias) {
    GeneratorParams p = scenario_equilibrium(s).params;
    p.P_m0 *= 1.0 + pm0_bias;
    return p;
}

TrialSummary run_trial(const CampaignSetup& setup, const TruthTrajectory& truth,
                       std::uint64_t seed, TrialResult* full) {
    TrialSummary summary;
    try {
        const NoiseSpec spec = derive_sigmas(setup.noise);
        const FrameStream frames =
            interpolate(sample_frames(truth, setup.f_r, spec, seed), setup.k_int);
        NoiseTargets filter_noise = setup.noise;
        if (filter_noise.tve == 0.0 && filter_noise.fe == 0.0 && filter_noise.rfe == 0.0) {
            filter_noise = NoiseTargets{};
            filter_noise.v_magnitude = setup.noise.v_magnitude;
            filter_noise.i_magnitude = setup.noise.i_magnitude;
        }
        const Matrix r = measurement_covariance(derive_sigmas(filter_noise), setup.playback.model);
        const double t_clear = setup.scenario.fault_start + setup.scenario.fault_duration;
        std::optional<Vector> reference;
        if (setup.use_reference_p0) {
            const std::size_t k = nearest_frame(frames, t_clear + setup.playback.start_offset);
            reference = reference_states(truth, {frames[k].t}, setup.playback.model).front();
        }
        const InitialBelief init = build_initial_belief(frames, t_clear, setup.scenario.params,
                                                        setup.playback, reference);
        TrialResult trial = run_playback(frames, setup.filter_params, r, init, setup.playback);
        evaluate_trial(trial, truth, setup.playback.convergence);
        summary.ok = true;
        summary.h_final = trial.h_final;
        summary.ka_final = trial.ka_final;
        summary.convergence_time = trial.convergence_time;
        summary.mse_db = trial.mse_db;
        if (full) *full = std::move(trial);
    } catch (const Error& e) {
        summary.ok = false;
        summary.failure = e.what();
    }
    return summary;
}

MonteCarloStats monte_carlo(const CampaignSetup& setup, int trials, std::uint64_t seed,
                            int workers) {
    if (trials < 1) throw InvalidParameter("Monte Carlo needs at least one trial");
    const TruthTrajectory truth = simulate(setup.scenario);

    MonteCarloStats stats;
    stats.model = setup.playback.model;
    stats.trials = trials;
    stats.per_trial.resize(static_cast<std::size_t>(trials));
    if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, trials);

    std::atomic<int> next{0};
    const auto work = [&] {
        for (int m = next++; m < trials; m = next++) {
            stats.per_trial[static_cast<std::size_t>(m)] =
                run_trial(setup, truth, seed + static_cast<std::uint64_t>(m));
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    std::vector<double> h, ka;
    for (const TrialSummary& s : stats.per_trial) {
        if (!s.ok) {
            ++stats.failures;
            continue;
        }
        h.push_back(s.h_final);
        ka.push_back(s.ka_final);
        stats.worst_mse_db = stats.worst_mse_db.size() == 0 ? s.mse_db
                                                            : Vector(stats.worst_mse_db.cwiseMax(s.mse_db));
    }
    const auto moments = [](const std::vector<double>& v, double& mean, double& sd) {
        mean = sd = 0.0;
        if (v.empty()) return;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        if (v.size() < 2) return;
        for (double x : v) sd += (x - mean) * (x - mean);
        sd = std::sqrt(sd / static_cast<double>(v.size() - 1));
    };
    moments(h, stats.h_mean, stats.h_std);
    moments(ka, stats.ka_mean, stats.ka_std);
    return stats;
}

ReplayResult replay_outputs(const Scenario& s,
                            const std::vector<std::tuple<std::string, double, double>>& cases,
                            int decimation) {
    if (decimation < 1) throw InvalidParameter("decimation must be >= 1");
    ReplayResult out;
    std::vector<std::tuple<std::string, double, double>> all;
    all.emplace_back("true", s.params.H, s.params.K_A);
    all.insert(all.end(), cases.begin(), cases.end());
    for (const auto& [label, h, k_a] : all) {
        Scenario sc = s;
        sc.params.H = h;
        sc.params.K_A = k_a;
        const TruthTrajectory traj = simulate(sc);
        ReplayCase c{label, h, k_a, {}, {}, 0.0, 0.0};
        const bool first = out.cases.empty();
        for (std::size_t k = 0; k < traj.samples.size(); k += static_cast<std::size_t>(decimation)) {
            if (first) out.times.push_back(traj.samples[k].t);
            c.p_e.push_back(traj.samples[k].p_e);
            c.q_e.push_back(traj.samples[k].q_e);
        }
        if (!first) {
            const ReplayCase& ref = out.cases.front();
            double sp = 0.0, sq = 0.0;
            for (std::size_t k = 0; k < c.p_e.size(); ++k) {
                sp += (c.p_e[k] - ref.p_e[k]) * (c.p_e[k] - ref.p_e[k]);
                sq += (c.q_e[k] - ref.q_e[k]) * (c.q_e[k] - ref.q_e[k]);
            }
            c.rms_p_e = std::sqrt(sp / static_cast<double>(c.p_e.size()));
            c.rms_q_e = std::sqrt(sq / static_cast<double>(c.q_e.size()));
        }
        out.cases.push_back(std::move(c));
    }
    return out;
}

PlaybackConfig read_playback_config(const ConfigDocument& doc, PlaybackConfig c) {
    doc.require_known_keys("playback",
                           {"model", "gamma", "beta", "kappa", "q_scale", "start_offset",
                            "delta_factor", "h_factor", "ka_factor", "p0_floor", "substeps",
                            "conv_tolerance", "conv_hold", "pm0_bias"});
    const std::string model =
        doc.get_string("playback", "model", c.model == ModelKind::Augmented ? "augmented"
                                                                            : "conventional");
    if (model == "augmented") {
        c.model = ModelKind::Augmented;
    } else if (model == "conventional") {
        c.model = ModelKind::Conventional;
    } else {
        doc.fail(*doc.find("playback", "model"), "expected 'augmented' or 'conventional'");
    }
    c.tuning.gamma = doc.get_double("playback", "gamma", c.tuning.gamma);
    c.tuning.beta = doc.get_double("playback", "beta", c.tuning.beta);
    c.tuning.kappa = doc.get_double("playback", "kappa", c.tuning.kappa);
    c.q_scale = doc.get_double("playback", "q_scale", c.q_scale);
    c.start_offset = doc.get_double("playback", "start_offset", c.start_offset);
    c.delta_factor = doc.get_double("playback", "delta_factor", c.delta_factor);
    c.h_factor = doc.get_double("playback", "h_factor", c.h_factor);
    c.ka_factor = doc.get_double("playback", "ka_factor", c.ka_factor);
    c.p0_floor = doc.get_double("playback", "p0_floor", c.p0_floor);
    c.substeps = static_cast<int>(doc.get_int("playback", "substeps", c.substeps));
    c.convergence.tolerance = doc.get_double("playback", "conv_tolerance", c.convergence.tolerance);
    c.convergence.hold = doc.get_double("playback", "conv_hold", c.convergence.hold);
    const auto check = [&](const char* key, bool ok, const char* what) {
        if (!ok) {
            if (const auto* e = doc.find("playback", key)) doc.fail(*e, what);
            throw ConfigError(doc.source(), 0, what);
        }
    };
    check("q_scale", c.q_scale > 0.0, "q_scale must be positive");
    check("start_offset", c.start_offset >= 0.0, "start_offset must be non-negative");
    check("gamma", c.tuning.gamma > 0.0, "gamma must be positive");
    check("substeps", c.substeps >= 1, "substeps must be >= 1");
    check("p0_floor", c.p0_floor > 0.0, "p0_floor must be positive");
    return c;
}

void write_playback_config(const PlaybackConfig& c, ConfigDocument& doc) {
    doc.set("playback", "model", std::string(to_string(c.model)));
    doc.set("playback", "gamma", c.tuning.gamma);
    doc.set("playback", "beta", c.tuning.beta);
    doc.set("playback", "kappa", c.tuning.kappa);
    doc.set("playback", "q_scale", c.q_scale, "Q = q_scale dt I");
    doc.set("playback", "start_offset", c.start_offset, "s after fault clearance");
    doc.set("playback", "delta_factor", c.delta_factor);
    doc.set("playback", "h_factor", c.h_factor);
    doc.set("playback", "ka_factor", c.ka_factor);
    doc.set("playback", "p0_floor", c.p0_floor);
    doc.set("playback", "substeps", std::to_string(c.substeps));
    doc.set("playback", "conv_tolerance", c.convergence.tolerance);
    doc.set("playback", "conv_hold", c.convergence.hold, "s");
}

}  // namespace gencal
