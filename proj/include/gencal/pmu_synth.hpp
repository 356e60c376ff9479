#pragma once

#include "gencal/truth_sim.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace gencal {

/// Instrument accuracy targets.
struct NoiseTargets {
    double tve = 0.01;         ///< total vector error, fraction
    double fe = 0.005;         ///< frequency error, Hz
    double rfe = 0.1;          ///< ROCOF error, Hz/s
    double v_magnitude = 1.0;  ///< |V| the phasor sigma is referred to
    double i_magnitude = 1.0;  ///< |I| the current sigma is referred to
    double f_nominal = 60.0;
    bool derivative_noise = true;

    static NoiseTargets noiseless() { return {0.0, 0.0, 0.0, 1.0, 1.0, 60.0, false}; }
};

/// Per-channel Gaussian standard deviations. Phasor components are per unit,
/// f and ROCOF in per unit of nominal frequency.
struct NoiseSpec {
    double sigma_v = 0.0;  ///< each of V_re, V_im
    double sigma_i = 0.0;  ///< each of I_re, I_im
    double sigma_v_dot = 0.0;
    double sigma_i_dot = 0.0;
    double sigma_f = 0.0;
    double sigma_rocof = 0.0;
    double f_nominal = 60.0;
};

NoiseSpec derive_sigmas(const NoiseTargets& targets);

struct PmuFrame {
    double t = 0.0;
    Complex v;
    Complex i;
    Complex v_dot;
    Complex i_dot;
    double f_hz = 0.0;
    double rocof_hzps = 0.0;
};

using FrameStream = std::vector<PmuFrame>;

/// Decimates the truth to f_r frames per second (nearest truth sample to each
/// reporting instant) and adds independent Gaussian noise per channel. The
/// draws are made in column order for every frame, so a given seed always
/// yields the same stream.
FrameStream sample_frames(const TruthTrajectory& truth, double f_r, const NoiseSpec& spec,
                          std::uint64_t seed);

/// Linear interpolation of every channel, k_int - 1 new frames per gap.
FrameStream interpolate(const FrameStream& frames, int k_int);

/// diag(sigma_v^2, sigma_v^2, sigma_f^2, sigma_rocof^2), or its leading 2x2
/// block for the conventional model. Throws InvalidParameter unless positive
/// definite.
Matrix measurement_covariance(const NoiseSpec& spec, ModelKind model);

void write_frames_csv(const FrameStream& frames, const std::filesystem::path& path);
FrameStream read_frames_csv(const std::filesystem::path& path);

NoiseTargets read_noise_targets(const ConfigDocument& doc, NoiseTargets defaults = {});
void write_noise_targets(const NoiseTargets& t, ConfigDocument& doc);

}  // namespace gencal
