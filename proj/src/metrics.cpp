#include "nv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nv {

double MseCurve::overall_mean() const {
    double s = 0.0;
    for (double v : mean) s += v;
    return mean.empty() ? 0.0 : s / static_cast<double>(mean.size());
}

std::string MseCurve::to_table() const {
    std::ostringstream os;
    os << "time mean min max\n";
    os.precision(17);
    for (std::size_t i = 0; i < times.size(); ++i)
        os << times[i] << " " << mean[i] << " " << min[i] << " " << max[i] << "\n";
    return os.str();
}

MseCurve mse_curve(const Trajectory& pred, const Trajectory& reference) {
    require(pred.samples == reference.samples && pred.n == reference.n && pred.d == reference.d,
            Errc::ShapeMismatch, "prediction and reference shapes differ");
    for (std::size_t s = 0; s < pred.samples; ++s) {
        // tolerate rounding from computing the same nominal time with different step sizes
        double tol = 1e-9 * std::max(1.0, std::fabs(reference.times[s]));
        require(std::fabs(pred.times[s] - reference.times[s]) <= tol, Errc::TimeAxisMismatch,
                "sample times differ at index " + std::to_string(s));
    }
    MseCurve curve;
    curve.times = pred.times;
    curve.mean.resize(pred.samples);
    curve.min.resize(pred.samples);
    curve.max.resize(pred.samples);
    const double inv_d = 1.0 / static_cast<double>(pred.d);
    for (std::size_t s = 0; s < pred.samples; ++s) {
        double sum = 0.0, lo = 0.0, hi = 0.0;
        for (std::size_t i = 0; i < pred.n; ++i) {
            double err = 0.0;
            for (std::size_t j = 0; j < pred.d; ++j) {
                double e = pred.state(s, i, j) - reference.state(s, i, j);
                err += e * e;
            }
            err *= inv_d;
            sum += err;
            if (i == 0) {
                lo = hi = err;
            } else {
                lo = std::min(lo, err);
                hi = std::max(hi, err);
            }
        }
        curve.mean[s] = sum / static_cast<double>(pred.n);
        curve.min[s] = lo;
        curve.max[s] = hi;
    }
    return curve;
}

MseCurve energy_error_curve(const Trajectory& traj, const System& system) {
    std::vector<double> h0 = system.energy(traj.batch_at(0));
    MseCurve curve;
    curve.times = traj.times;
    curve.mean.resize(traj.samples);
    curve.min.resize(traj.samples);
    curve.max.resize(traj.samples);
    for (std::size_t s = 0; s < traj.samples; ++s) {
        std::vector<double> h = system.energy(traj.batch_at(s));
        double sum = 0.0, lo = 0.0, hi = 0.0;
        for (std::size_t i = 0; i < traj.n; ++i) {
            double err = std::fabs(h[i] - h0[i]);
            sum += err;
            if (i == 0) {
                lo = hi = err;
            } else {
                lo = std::min(lo, err);
                hi = std::max(hi, err);
            }
        }
        curve.mean[s] = sum / static_cast<double>(traj.n);
        curve.min[s] = lo;
        curve.max[s] = hi;
    }
    return curve;
}

std::int64_t HistogramGrid::total() const {
    std::int64_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

std::string HistogramGrid::to_table() const {
    std::ostringstream os;
    os << "# variable " << variable << "\n";
    os << "# time_range " << t_lo << " " << t_hi << "\n";
    os << "# value_range " << v_lo << " " << v_hi << "\n";
    os << "time_bin value_bin count\n";
    for (int tb = 0; tb < time_bins; ++tb)
        for (int vb = 0; vb < value_bins; ++vb)
            if (count(tb, vb) != 0) os << tb << " " << vb << " " << count(tb, vb) << "\n";
    return os.str();
}

HistogramGrid time_series_histogram(const Trajectory& trajs, std::size_t var_index, double v_lo,
                                    double v_hi, int time_bins, int value_bins) {
    require(std::isfinite(v_lo) && std::isfinite(v_hi) && v_lo < v_hi, Errc::EmptyRange,
            "value range must be finite with lo < hi");
    require(var_index < trajs.d, Errc::DimensionMismatch, "variable index out of range");
    require(trajs.samples >= 1, Errc::ShapeMismatch, "empty trajectory");

    HistogramGrid grid;
    grid.time_bins = time_bins;
    grid.value_bins = value_bins;
    grid.t_lo = trajs.times.front();
    grid.t_hi = trajs.times.back();
    grid.v_lo = v_lo;
    grid.v_hi = v_hi;
    grid.counts.assign(static_cast<std::size_t>(time_bins) * value_bins, 0);

    const double t_span = grid.t_hi - grid.t_lo;
    const double v_width = (v_hi - v_lo) / value_bins;

    auto time_bin_of = [&](double t) {
        int tb = static_cast<int>(std::floor((t - grid.t_lo) / t_span * time_bins));
        return std::clamp(tb, 0, time_bins - 1);
    };
    auto value_bin_of = [&](double v) {
        int vb = static_cast<int>(std::floor((v - v_lo) / v_width));
        return std::clamp(vb, 0, value_bins - 1);
    };

    // Per-trajectory visit mask: a trajectory contributes at most 1 per cell.
    std::vector<char> visited(grid.counts.size());
    for (std::size_t i = 0; i < trajs.n; ++i) {
        std::fill(visited.begin(), visited.end(), 0);
        auto mark_span = [&](int tb, double va, double vb_val) {
            double lo = std::min(va, vb_val), hi = std::max(va, vb_val);
            if (hi < v_lo || lo > v_hi) return;
            lo = std::max(lo, v_lo);
            hi = std::min(hi, v_hi);
            int b0 = value_bin_of(lo), b1 = value_bin_of(hi);
            for (int b = b0; b <= b1; ++b)
                visited[static_cast<std::size_t>(tb) * value_bins + b] = 1;
        };
        if (trajs.samples == 1 || t_span == 0.0) {
            double v = trajs.state(0, i, var_index);
            mark_span(0, v, v);
        } else {
            for (std::size_t s = 0; s + 1 < trajs.samples; ++s) {
                double t0 = trajs.times[s], t1 = trajs.times[s + 1];
                double va = trajs.state(s, i, var_index);
                double vb = trajs.state(s + 1, i, var_index);
                int tb0 = time_bin_of(t0);
                int tb1 = time_bin_of(t1);
                for (int tb = tb0; tb <= tb1; ++tb) {
                    // Segment values inside this time bin's window.
                    double wa = grid.t_lo + t_span * tb / time_bins;
                    double wb = grid.t_lo + t_span * (tb + 1) / time_bins;
                    double ca = std::max(t0, wa), cb = std::min(t1, wb);
                    if (cb < ca) continue;
                    double fa = (ca - t0) / (t1 - t0);
                    double fb = (cb - t0) / (t1 - t0);
                    mark_span(tb, va + fa * (vb - va), va + fb * (vb - va));
                }
            }
        }
        for (std::size_t c = 0; c < visited.size(); ++c) grid.counts[c] += visited[c];
    }
    return grid;
}

void single_pendulum_jacobian(double theta, double g, double out[4]) {
    out[0] = 0.0;
    out[1] = 1.0;
    out[2] = -g * std::cos(theta);
    out[3] = 0.0;
}

std::string ErrorField::to_table() const {
    std::ostringstream os;
    os << "theta omega r_el r_nv r_diff\n";
    os.precision(17);
    for (std::size_t i = 0; i < theta.size(); ++i)
        os << theta[i] << " " << omega[i] << " " << r_el[i] << " " << r_nv[i] << " " << r_diff[i]
           << "\n";
    return os.str();
}

ErrorField error_map(const Model& model, const ErrorFieldSpec& spec) {
    require(model.meta.system == SystemId::KLinkPendulum && model.d == 2,
            Errc::ModelSystemMismatch, "error map requires a 1-link pendulum model");
    require(model.meta.scheme == Scheme::Euler, Errc::ModelSystemMismatch,
            "error map requires an Euler-scheme model");
    const double g = 9.8;
    const double dt = model.meta.coarse_dt();
    const std::size_t nodes = static_cast<std::size_t>(spec.n_theta) * spec.n_omega;

    ErrorField field;
    field.spec = spec;
    field.theta.resize(nodes);
    field.omega.resize(nodes);
    field.r_el.resize(nodes);
    field.r_nv.resize(nodes);
    field.r_diff.resize(nodes);

    StateBatch grid(nodes, 2);
    std::size_t idx = 0;
    for (int it = 0; it < spec.n_theta; ++it) {
        double th = spec.n_theta == 1
                        ? spec.theta_lo
                        : spec.theta_lo + (spec.theta_hi - spec.theta_lo) * it / (spec.n_theta - 1);
        for (int iw = 0; iw < spec.n_omega; ++iw, ++idx) {
            double om = spec.n_omega == 1
                            ? spec.omega_lo
                            : spec.omega_lo +
                                  (spec.omega_hi - spec.omega_lo) * iw / (spec.n_omega - 1);
            field.theta[idx] = th;
            field.omega[idx] = om;
            grid.at(idx, 0) = th;
            grid.at(idx, 1) = om;
        }
    }

    StateBatch nv_out = forward(model, grid);
    for (std::size_t i = 0; i < nodes; ++i) {
        double th = field.theta[i], om = field.omega[i];
        // (grad f) f for f = (omega, -g sin theta)
        double jf0 = -g * std::sin(th);
        double jf1 = -g * std::cos(th) * om;
        double el0 = 0.5 * jf0 * dt * dt;
        double el1 = 0.5 * jf1 * dt * dt;
        double nv0 = nv_out.at(i, 0), nv1 = nv_out.at(i, 1);
        field.r_el[i] = el0 * el0 + el1 * el1;
        field.r_nv[i] = nv0 * nv0 + nv1 * nv1;
        field.r_diff[i] = (el0 - nv0) * (el0 - nv0) + (el1 - nv1) * (el1 - nv1);
    }
    return field;
}

double median(std::vector<double> values) {
    require(!values.empty(), Errc::EmptyRange, "median of empty set");
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace nv
