#include "gencal/governor.hpp"

#include <cmath>

namespace gencal {

TgModel::TgModel(GovernorParameters parameters, double p_m0)
    : parameters_(std::move(parameters)), p_m0_(p_m0) {
    const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (const auto* s = std::get_if<SimplePoleGovernor>(&parameters_)) {
        if (!positive(s->r) || !positive(s->T_ef)) {
            throw InvalidParameter("simple-pole governor: r and T_ef must be positive");
        }
        droop_ = s->r;
        blocks_ = {{0.0, s->T_ef}};
    } else if (const auto* s = std::get_if<SteamGovernor>(&parameters_)) {
        if (!positive(s->r) || !positive(s->T_s) || !positive(s->T_c) || !positive(s->T_5) ||
            s->T_3 < 0.0 || s->T_4 < 0.0) {
            throw InvalidParameter("steam governor: lags and r must be positive, leads non-negative");
        }
        droop_ = s->r;
        blocks_ = {{0.0, s->T_s}, {s->T_3, s->T_c}, {s->T_4, s->T_5}};
    } else {
        const auto& h = std::get<HydroGovernor>(parameters_);
        if (!positive(h.r) || !positive(h.r_t) || !positive(h.T_r) || !positive(h.T_g) ||
            !positive(h.T_w)) {
            throw InvalidParameter("hydro governor: all constants must be positive");
        }
        droop_ = h.r;
        blocks_ = {{h.T_r, h.T_r * h.r_t / h.r}, {0.0, h.T_g}, {-h.T_w, 0.5 * h.T_w}};
    }
}

TgVariant TgModel::variant() const noexcept {
    switch (parameters_.index()) {
        case 0: return TgVariant::SimplePole;
        case 1: return TgVariant::MultiStageSteam;
        default: return TgVariant::Hydro;
    }
}

double TgModel::output(const Eigen::Ref<const Vector>& state, double omega, double omega_0) const {
    double u = (omega_0 - omega) / droop_;
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
        const auto& b = blocks_[j];
        const double z = state[static_cast<Eigen::Index>(j)];
        u = z + b.lead / b.lag * (u - z);
    }
    return p_m0_ + u;
}

TgModel::Rates TgModel::evaluate(const Eigen::Ref<const Vector>& state, double omega,
                                 double omega_dot, double omega_0) const {
    Rates out;
    out.state_rate.resize(order());
    double u = (omega_0 - omega) / droop_;
    double u_dot = -omega_dot / droop_;
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
        const auto& b = blocks_[j];
        const auto idx = static_cast<Eigen::Index>(j);
        const double z = state[idx];
        const double z_dot = (u - z) / b.lag;
        const double ratio = b.lead / b.lag;
        out.state_rate[idx] = z_dot;
        u = z + ratio * (u - z);
        u_dot = z_dot + ratio * (u_dot - z_dot);
    }
    out.p_m = p_m0_ + u;
    out.p_m_rate = u_dot;
    return out;
}

Complex TgModel::frequency_response(double w) const {
    Complex g(1.0 / droop_, 0.0);
    for (const auto& b : blocks_) g *= Complex(1.0, w * b.lead) / Complex(1.0, w * b.lag);
    return g;
}

double effective_time_constant(const TgModel& tg) {
    const double target = std::abs(tg.frequency_response(0.0)) / std::sqrt(2.0);
    const auto excess = [&](double log_w) {
        return std::abs(tg.frequency_response(std::exp(log_w))) - target;
    };
    double lo = std::log(1e-5);
    if (excess(lo) <= 0.0) throw InvalidParameter("governor cutoff below the search range");
    const double step = std::log(1.02);
    double hi = lo;
    while (true) {
        hi = lo + step;
        if (hi > std::log(1e5)) throw InvalidParameter("governor response has no -3 dB crossing");
        if (excess(hi) <= 0.0) break;
        lo = hi;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return 1.0 / std::exp(0.5 * (lo + hi));
}

const char* to_string(TgVariant v) {
    switch (v) {
        case TgVariant::SimplePole: return "simple";
        case TgVariant::MultiStageSteam: return "steam";
        case TgVariant::Hydro: return "hydro";
    }
    return "?";
}

}  // namespace gencal
