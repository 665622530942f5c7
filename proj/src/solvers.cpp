#include "nv/solvers.hpp"

#include <cmath>

#include "nv/model.hpp"

namespace nv {

int stage_count(Scheme s) {
    switch (s) {
        case Scheme::Euler: return 1;
        case Scheme::ImprovedEuler: return 2;
        case Scheme::RK3: return 3;
        case Scheme::RK4: return 4;
    }
    return 0;
}

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Euler: return "euler";
        case Scheme::ImprovedEuler: return "improved_euler";
        case Scheme::RK3: return "rk3";
        case Scheme::RK4: return "rk4";
    }
    return "unknown";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "euler") return Scheme::Euler;
    if (name == "improved_euler") return Scheme::ImprovedEuler;
    if (name == "rk3") return Scheme::RK3;
    if (name == "rk4") return Scheme::RK4;
    fail(Errc::ConfigParse, "unknown scheme name '" + name + "'");
}

namespace {

auto system_rhs(const System& system) {
    return [&system](const StateBatch& u, StateBatch& out) { system.rhs_into(u, out); };
}

void check_model_binding(const Model& model, const System& system, Scheme scheme,
                         const IntegrationPlan& plan) {
    require(model.meta.system == system.id() &&
                static_cast<std::size_t>(model.d) == system.dim(),
            Errc::ModelSystemMismatch, "model was trained for a different system");
    require(model.meta.scheme == scheme, Errc::ModelSystemMismatch,
            "model was trained for a different scheme");
    double coarse = model.meta.coarse_dt();
    require(std::fabs(plan.dt - coarse) <= 1e-12 * std::max(std::fabs(coarse), 1.0),
            Errc::StepSizeMismatch,
            "plan dt " + std::to_string(plan.dt) + " does not match model coarse step " +
                std::to_string(coarse));
}

}  // namespace

StateBatch step_increment(Scheme scheme, const System& system, const StateBatch& states,
                          double dt) {
    require(dt > 0, Errc::ConfigParse, "dt must be positive");
    StateBatch inc(states.n, states.d);
    detail::SolverWorkspace ws;
    detail::step_increment_into(scheme, system_rhs(system), states, dt, inc, ws);
    return inc;
}

Trajectory integrate(Scheme scheme, const System& system, const StateBatch& init,
                     const IntegrationPlan& plan) {
    return detail::integrate_impl(scheme, system_rhs(system), init, plan);
}

Trajectory integrate_with_corrector(Scheme scheme, const System& system, const Model& model,
                                    const StateBatch& init, const IntegrationPlan& plan) {
    plan.validate();
    check_model_binding(model, system, scheme, plan);

    std::size_t row = 0;
    require(!is_diverged(init, &row), Errc::Divergence,
            "initial state non-finite or out of range at row " + std::to_string(row));

    const std::size_t n_samples = static_cast<std::size_t>(plan.n_steps / plan.sample_every) + 1;
    Trajectory traj(n_samples, init.n, init.d);
    const std::size_t len = init.n * init.d;

    StateBatch u = init;
    StateBatch inc, correction;
    detail::SolverWorkspace ws;
    auto rhs = system_rhs(system);

    auto record = [&](std::size_t sample_idx, std::int64_t step) {
        traj.times[sample_idx] = static_cast<double>(step) * plan.dt;
        std::copy(u.data.begin(), u.data.end(),
                  traj.states.begin() + static_cast<std::ptrdiff_t>(sample_idx * len));
    };
    record(0, 0);

    std::size_t sample_idx = 1;
    for (std::int64_t step = 1; step <= plan.n_steps; ++step) {
        detail::step_increment_into(scheme, rhs, u, plan.dt, inc, ws);
        forward_into(model, u, correction);
        for (std::size_t i = 0; i < len; ++i) {
            u.data[i] += inc.data[i];
            u.data[i] += correction.data[i];
        }
        if (is_diverged(u, &row)) {
            fail(Errc::Divergence, "trajectory " + std::to_string(row) +
                                       " diverged at step " + std::to_string(step));
        }
        if (step % plan.sample_every == 0) record(sample_idx++, step);
    }
    return traj;
}

}  // namespace nv
