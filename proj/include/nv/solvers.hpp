#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nv/state.hpp"
#include "nv/systems.hpp"

namespace nv {

struct Model;

enum class Scheme { Euler, ImprovedEuler, RK3, RK4 };

int stage_count(Scheme s);
const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct IntegrationPlan {
    double dt = 0.0;
    std::int64_t n_steps = 0;
    std::int64_t sample_every = 1;

    double sampling_interval() const { return static_cast<double>(sample_every) * dt; }

    void validate() const {
        require(dt > 0, Errc::ConfigParse, "dt must be positive");
        require(sample_every >= 1, Errc::ConfigParse, "sample_every must be >= 1");
        require(n_steps >= 0 && n_steps % sample_every == 0, Errc::ConfigParse,
                "n_steps must be a non-negative multiple of sample_every");
    }
};

// Recorded samples of a synchronous batch integration, including the initial
// state at t = 0. states is (samples x n x d), row-major.
struct Trajectory {
    std::size_t samples = 0;
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> times;
    std::vector<double> states;

    Trajectory() = default;
    Trajectory(std::size_t samples_, std::size_t n_, std::size_t d_)
        : samples(samples_), n(n_), d(d_), times(samples_, 0.0), states(samples_ * n_ * d_, 0.0) {}

    double state(std::size_t s, std::size_t i, std::size_t j) const {
        return states[(s * n + i) * d + j];
    }
    double& state(std::size_t s, std::size_t i, std::size_t j) {
        return states[(s * n + i) * d + j];
    }

    StateBatch batch_at(std::size_t s) const {
        StateBatch b(n, d);
        std::copy(states.begin() + static_cast<std::ptrdiff_t>(s * n * d),
                  states.begin() + static_cast<std::ptrdiff_t>((s + 1) * n * d), b.data.begin());
        return b;
    }
};

namespace detail {

struct SolverWorkspace {
    StateBatch k1, k2, k3, k4, tmp;
};

// Scheme increment S(f, u, dt). Returns the increment only; the caller adds
// it to u, which keeps the corrected iteration compositional.
template <class Rhs>
void step_increment_into(Scheme scheme, Rhs&& rhs, const StateBatch& u, double dt,
                         StateBatch& inc, SolverWorkspace& ws) {
    const std::size_t len = u.n * u.d;
    if (!inc.same_shape(u)) inc = StateBatch(u.n, u.d);
    auto ensure = [&](StateBatch& b) {
        if (!b.same_shape(u)) b = StateBatch(u.n, u.d);
    };
    switch (scheme) {
        case Scheme::Euler: {
            rhs(u, inc);
            for (std::size_t i = 0; i < len; ++i) inc.data[i] *= dt;
            break;
        }
        case Scheme::ImprovedEuler: {
            ensure(ws.k1);
            ensure(ws.tmp);
            rhs(u, ws.k1);
            for (std::size_t i = 0; i < len; ++i)
                ws.tmp.data[i] = u.data[i] + dt * ws.k1.data[i];
            rhs(ws.tmp, inc);
            for (std::size_t i = 0; i < len; ++i)
                inc.data[i] = 0.5 * dt * (ws.k1.data[i] + inc.data[i]);
            break;
        }
        case Scheme::RK3: {
            ensure(ws.k1);
            ensure(ws.k2);
            ensure(ws.tmp);
            rhs(u, ws.k1);
            for (std::size_t i = 0; i < len; ++i)
                ws.tmp.data[i] = u.data[i] + 0.5 * dt * ws.k1.data[i];
            rhs(ws.tmp, ws.k2);
            for (std::size_t i = 0; i < len; ++i)
                ws.tmp.data[i] = u.data[i] - dt * ws.k1.data[i] + 2.0 * dt * ws.k2.data[i];
            rhs(ws.tmp, inc);
            for (std::size_t i = 0; i < len; ++i)
                inc.data[i] = dt * (ws.k1.data[i] / 6.0 + 2.0 * ws.k2.data[i] / 3.0 +
                                    inc.data[i] / 6.0);
            break;
        }
        case Scheme::RK4: {
            ensure(ws.k1);
            ensure(ws.k2);
            ensure(ws.k3);
            ensure(ws.tmp);
            rhs(u, ws.k1);
            for (std::size_t i = 0; i < len; ++i)
                ws.tmp.data[i] = u.data[i] + 0.5 * dt * ws.k1.data[i];
            rhs(ws.tmp, ws.k2);
            for (std::size_t i = 0; i < len; ++i)
                ws.tmp.data[i] = u.data[i] + 0.5 * dt * ws.k2.data[i];
            rhs(ws.tmp, ws.k3);
            for (std::size_t i = 0; i < len; ++i)
                ws.tmp.data[i] = u.data[i] + dt * ws.k3.data[i];
            rhs(ws.tmp, inc);
            for (std::size_t i = 0; i < len; ++i)
                inc.data[i] = dt * (ws.k1.data[i] / 6.0 + ws.k2.data[i] / 3.0 +
                                    ws.k3.data[i] / 3.0 + inc.data[i] / 6.0);
            break;
        }
    }
}

// Fixed-step loop u <- u + S(f, u, dt), recording every sample_every steps.
// `post_step(u, step)` runs after each update, before the divergence check.
template <class Rhs, class PostStep>
Trajectory integrate_impl(Scheme scheme, Rhs&& rhs, const StateBatch& init,
                          const IntegrationPlan& plan, PostStep&& post_step) {
    plan.validate();
    std::size_t row = 0;
    require(!is_diverged(init, &row), Errc::Divergence,
            "initial state non-finite or out of range at row " + std::to_string(row));

    const std::size_t n_samples = static_cast<std::size_t>(plan.n_steps / plan.sample_every) + 1;
    Trajectory traj(n_samples, init.n, init.d);
    const std::size_t len = init.n * init.d;

    StateBatch u = init;
    StateBatch inc;
    SolverWorkspace ws;

    auto record = [&](std::size_t sample_idx, std::int64_t step) {
        traj.times[sample_idx] = static_cast<double>(step) * plan.dt;
        std::copy(u.data.begin(), u.data.end(),
                  traj.states.begin() + static_cast<std::ptrdiff_t>(sample_idx * len));
    };
    record(0, 0);

    std::size_t sample_idx = 1;
    for (std::int64_t step = 1; step <= plan.n_steps; ++step) {
        step_increment_into(scheme, rhs, u, plan.dt, inc, ws);
        for (std::size_t i = 0; i < len; ++i) u.data[i] += inc.data[i];
        post_step(u, step);
        if (is_diverged(u, &row)) {
            fail(Errc::Divergence, "trajectory " + std::to_string(row) +
                                       " diverged at step " + std::to_string(step));
        }
        if (step % plan.sample_every == 0) record(sample_idx++, step);
    }
    return traj;
}

template <class Rhs>
Trajectory integrate_impl(Scheme scheme, Rhs&& rhs, const StateBatch& init,
                          const IntegrationPlan& plan) {
    return integrate_impl(scheme, rhs, init, plan, [](const StateBatch&, std::int64_t) {});
}

}  // namespace detail

StateBatch step_increment(Scheme scheme, const System& system, const StateBatch& states,
                          double dt);

Trajectory integrate(Scheme scheme, const System& system, const StateBatch& init,
                     const IntegrationPlan& plan);

// Corrected iteration: each macro-step adds the scheme increment plus the
// model's forward output. plan.dt must equal the coarse step the model was
// trained for.
Trajectory integrate_with_corrector(Scheme scheme, const System& system, const Model& model,
                                    const StateBatch& init, const IntegrationPlan& plan);

}  // namespace nv
