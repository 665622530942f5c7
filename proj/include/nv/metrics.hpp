#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nv/model.hpp"
#include "nv/solvers.hpp"
#include "nv/systems.hpp"

namespace nv {

// Per-time error summary: mean over trajectories plus the min/max envelope.
struct MseCurve {
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> min;
    std::vector<double> max;

    double overall_mean() const;
    std::string to_table() const;  // "time mean min max"
};

// Per-trajectory squared error averaged over state dimensions, then
// mean/min/max over trajectories at each sample time.
MseCurve mse_curve(const Trajectory& pred, const Trajectory& reference);

// |H(u(t)) - H(u(0))| per trajectory, reduced the same way as mse_curve.
MseCurve energy_error_curve(const Trajectory& traj, const System& system);

// Crossing-count histogram: for each trajectory and time bin, every value bin
// the piecewise-linear curve passes through is marked once.
struct HistogramGrid {
    std::string variable;
    int time_bins = 800;
    int value_bins = 100;
    double t_lo = 0.0, t_hi = 0.0;
    double v_lo = 0.0, v_hi = 0.0;
    std::vector<std::int64_t> counts;  // time_bins x value_bins, time-major

    std::int64_t count(int tb, int vb) const { return counts[static_cast<std::size_t>(tb) * value_bins + vb]; }
    std::int64_t total() const;
    std::string to_table() const;
};

HistogramGrid time_series_histogram(const Trajectory& trajs, std::size_t var_index, double v_lo,
                                    double v_hi, int time_bins = 800, int value_bins = 100);

// Phase-space grid over (theta, omega) for the single-link pendulum.
struct ErrorFieldSpec {
    double theta_lo = 0.0;
    double theta_hi = 1.5707963267948966;  // pi/2
    double omega_lo = 0.0;
    double omega_hi = 0.5;
    int n_theta = 64;
    int n_omega = 64;
};

// r_el: squared norm of the forward-Euler leading error 0.5*(grad f) f dt^2;
// r_nv: squared norm of the corrector output; r_diff: squared norm of their
// difference. Node-major over theta then omega.
struct ErrorField {
    ErrorFieldSpec spec;
    std::vector<double> theta;
    std::vector<double> omega;
    std::vector<double> r_el;
    std::vector<double> r_nv;
    std::vector<double> r_diff;

    std::string to_table() const;
};

// Requires a model trained for the 1-link pendulum with the Euler scheme.
ErrorField error_map(const Model& model, const ErrorFieldSpec& spec = {});

// Analytic Jacobian of the 1-link pendulum rhs at (theta, omega), row-major 2x2.
void single_pendulum_jacobian(double theta, double g, double out[4]);

double median(std::vector<double> values);

}  // namespace nv
