#include "gencal/pmu_synth.hpp"

#include "gencal/csv.hpp"

#include <cmath>
#include <random>

namespace gencal {

NoiseSpec derive_sigmas(const NoiseTargets& t) {
    if (t.tve < 0.0 || t.fe < 0.0 || t.rfe < 0.0) {
        throw InvalidParameter("noise targets must be non-negative");
    }
    NoiseSpec s;
    s.f_nominal = t.f_nominal;
    s.sigma_v = t.v_magnitude * t.tve / (3.0 * std::sqrt(2.0));
    s.sigma_i = t.i_magnitude * t.tve / (3.0 * std::sqrt(2.0));
    if (t.derivative_noise) {
        const double scale = 2.0 * kPi * t.f_nominal / 10.0;
        s.sigma_v_dot = s.sigma_v * scale;
        s.sigma_i_dot = s.sigma_i * scale;
    }
    s.sigma_f = t.fe > 0.0 ? std::sqrt(1e-5) : 0.0;
    s.sigma_rocof = t.rfe > 0.0 ? std::sqrt(1e-5) : 0.0;
    return s;
}

FrameStream sample_frames(const TruthTrajectory& truth, double f_r, const NoiseSpec& spec,
                          std::uint64_t seed) {
    if (!(f_r > 0.0)) throw InvalidParameter("reporting rate must be positive");
    if (truth.samples.empty()) throw InvalidParameter("empty truth trajectory");
    const double span = truth.samples.back().t - truth.samples.front().t;
    const auto count = static_cast<std::size_t>(std::floor(span * f_r + 1e-9)) + 1;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto noisy = [&](Complex z, double sigma) {
        const double re = normal(rng);
        const double im = normal(rng);
        return z + sigma * Complex(re, im);
    };

    FrameStream frames;
    frames.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        const double t = truth.samples.front().t + static_cast<double>(n) / f_r;
        auto k = static_cast<std::size_t>(std::llround((t - truth.samples.front().t) / truth.dt));
        k = std::min(k, truth.samples.size() - 1);
        const TruthSample& r = truth.samples[k];
        PmuFrame f;
        f.t = t;
        f.v = noisy(r.v, spec.sigma_v);
        f.i = noisy(r.i, spec.sigma_i);
        f.v_dot = noisy(r.v_dot, spec.sigma_v_dot);
        f.i_dot = noisy(r.i_dot, spec.sigma_i_dot);
        const double nf = normal(rng);
        const double na = normal(rng);
        f.f_hz = (r.f + spec.sigma_f * nf) * spec.f_nominal;
        f.rocof_hzps = (r.rocof + spec.sigma_rocof * na) * spec.f_nominal;
        frames.push_back(f);
    }
    return frames;
}

FrameStream interpolate(const FrameStream& frames, int k_int) {
    if (k_int < 1) throw InvalidParameter("interpolation factor must be >= 1");
    if (k_int == 1 || frames.size() < 2) return frames;
    FrameStream out;
    out.reserve((frames.size() - 1) * static_cast<std::size_t>(k_int) + 1);
    for (std::size_t n = 0; n + 1 < frames.size(); ++n) {
        const PmuFrame& a = frames[n];
        const PmuFrame& b = frames[n + 1];
        for (int j = 0; j < k_int; ++j) {
            const double w = static_cast<double>(j) / k_int;
            const auto mix = [w](auto x, auto y) { return x + w * (y - x); };
            out.push_back({mix(a.t, b.t), mix(a.v, b.v), mix(a.i, b.i), mix(a.v_dot, b.v_dot),
                           mix(a.i_dot, b.i_dot), mix(a.f_hz, b.f_hz),
                           mix(a.rocof_hzps, b.rocof_hzps)});
        }
    }
    out.push_back(frames.back());
    return out;
}

Matrix measurement_covariance(const NoiseSpec& spec, ModelKind model) {
    Vector d(model == ModelKind::Augmented ? 4 : 2);
    d[0] = spec.sigma_v * spec.sigma_v;
    d[1] = d[0];
    if (model == ModelKind::Augmented) {
        d[2] = spec.sigma_f * spec.sigma_f;
        d[3] = spec.sigma_rocof * spec.sigma_rocof;
    }
    if (!(d.minCoeff() > 0.0)) {
        throw InvalidParameter("measurement covariance must be positive definite");
    }
    return d.asDiagonal();
}

namespace {

const std::vector<std::string> kFrameColumns{"t", "V_re", "V_im", "I_re", "I_im", "Vd_re",
                                             "Vd_im", "Id_re", "Id_im", "f_hz", "rocof_hzps"};

}  // namespace

void write_frames_csv(const FrameStream& frames, const std::filesystem::path& path) {
    CsvWriter out(path, "pmu-frames", kFrameColumns);
    for (const PmuFrame& f : frames) {
        out << f.t << f.v.real() << f.v.imag() << f.i.real() << f.i.imag() << f.v_dot.real()
            << f.v_dot.imag() << f.i_dot.real() << f.i_dot.imag() << f.f_hz << f.rocof_hzps;
        out.end_row();
    }
}

FrameStream read_frames_csv(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    std::vector<int> col;
    for (const auto& name : kFrameColumns) {
        const int c = table.column(name);
        if (c < 0) throw ConfigError(path.string(), 0, "missing column '" + name + "'");
        col.push_back(c);
    }
    FrameStream frames;
    frames.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto x = [&](int j) { return table.number(r, col[static_cast<std::size_t>(j)]); };
        frames.push_back({x(0), {x(1), x(2)}, {x(3), x(4)}, {x(5), x(6)}, {x(7), x(8)}, x(9),
                          x(10)});
        if (r > 0 && !(frames[r].t > frames[r - 1].t)) {
            throw ConfigError(path.string(), 0, "timestamps must be strictly increasing");
        }
    }
    return frames;
}

NoiseTargets read_noise_targets(const ConfigDocument& doc, NoiseTargets t) {
    doc.require_known_keys("pmu", {"tve", "fe", "rfe", "v_magnitude", "i_magnitude", "f_nominal",
                                   "derivative_noise", "f_r", "k_int"});
    t.tve = doc.get_double("pmu", "tve", t.tve);
    t.fe = doc.get_double("pmu", "fe", t.fe);
    t.rfe = doc.get_double("pmu", "rfe", t.rfe);
    t.v_magnitude = doc.get_double("pmu", "v_magnitude", t.v_magnitude);
    t.i_magnitude = doc.get_double("pmu", "i_magnitude", t.i_magnitude);
    t.f_nominal = doc.get_double("pmu", "f_nominal", t.f_nominal);
    const std::string dn = doc.get_string("pmu", "derivative_noise", t.derivative_noise ? "on" : "off");
    if (dn != "on" && dn != "off") doc.fail(*doc.find("pmu", "derivative_noise"), "expected on/off");
    t.derivative_noise = dn == "on";
    return t;
}

void write_noise_targets(const NoiseTargets& t, ConfigDocument& doc) {
    doc.set("pmu", "tve", t.tve, "fraction");
    doc.set("pmu", "fe", t.fe, "Hz");
    doc.set("pmu", "rfe", t.rfe, "Hz/s");
    doc.set("pmu", "v_magnitude", t.v_magnitude, "p.u.");
    doc.set("pmu", "i_magnitude", t.i_magnitude, "p.u., 0 selects the pre-fault current");
    doc.set("pmu", "f_nominal", t.f_nominal, "Hz");
    doc.set("pmu", "derivative_noise", std::string(t.derivative_noise ? "on" : "off"));
}

}  // namespace gencal
