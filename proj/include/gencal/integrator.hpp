#pragma once

#include "gencal/common.hpp"

namespace gencal {

/// Classical four-stage Runge-Kutta step of dx/dt = f(t, x).
/// Throws IntegrationError stamped with `t` if the result is not finite.
template <class State, class Rhs>
State rk4_step(const State& x, double t, double dt, Rhs&& f) {
    const State k1 = f(t, x);
    const State k2 = f(t + 0.5 * dt, State(x + 0.5 * dt * k1));
    const State k3 = f(t + 0.5 * dt, State(x + 0.5 * dt * k2));
    const State k4 = f(t + dt, State(x + dt * k3));
    State next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite()) throw IntegrationError("RK4 step produced a non-finite state", t);
    return next;
}

}  // namespace gencal
