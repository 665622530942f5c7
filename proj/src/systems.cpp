#include "nv/systems.hpp"

#include <cmath>
#include <numbers>

#include "nv/rng.hpp"

namespace nv {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::SingularMassMatrix: return "SingularMassMatrix";
        case Errc::UnsupportedSystem: return "UnsupportedSystem";
        case Errc::RejectionBudgetExceeded: return "RejectionBudgetExceeded";
        case Errc::Divergence: return "Divergence";
        case Errc::ModelSystemMismatch: return "ModelSystemMismatch";
        case Errc::StepSizeMismatch: return "StepSizeMismatch";
        case Errc::SamplingMismatch: return "SamplingMismatch";
        case Errc::NonFiniteLoss: return "NonFiniteLoss";
        case Errc::FormatVersionMismatch: return "FormatVersionMismatch";
        case Errc::ChecksumMismatch: return "ChecksumMismatch";
        case Errc::TruncatedFile: return "TruncatedFile";
        case Errc::EmptySplit: return "EmptySplit";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::TimeAxisMismatch: return "TimeAxisMismatch";
        case Errc::EmptyRange: return "EmptyRange";
        case Errc::DegenerateVariance: return "DegenerateVariance";
        case Errc::ConfigParse: return "ConfigParse";
        case Errc::MissingInput: return "MissingInput";
        case Errc::Internal: return "Internal";
    }
    return "Unknown";
}

const char* system_name(SystemId id) {
    switch (id) {
        case SystemId::SpringChain: return "spring_chain";
        case SystemId::HenonHeiles: return "henon_heiles";
        case SystemId::ElasticPendulum: return "elastic_pendulum";
        case SystemId::KLinkPendulum: return "klink_pendulum";
    }
    return "unknown";
}

SystemId system_from_name(const std::string& name) {
    if (name == "spring_chain") return SystemId::SpringChain;
    if (name == "henon_heiles") return SystemId::HenonHeiles;
    if (name == "elastic_pendulum") return SystemId::ElasticPendulum;
    if (name == "klink_pendulum") return SystemId::KLinkPendulum;
    fail(Errc::ConfigParse, "unknown system name '" + name + "'");
}

SpringChainParams SpringChainParams::defaults() {
    return SpringChainParams{
        {0.900, 0.938, 0.925, 0.787, 0.667, 1.348, 0.776, 0.692, 0.941, 0.538,
         1.215, 0.821, 1.121, 0.875, 1.456, 1.111, 1.125, 1.431, 0.663, 1.222},
        {3.900, 3.508, 5.651, 5.533, 3.664, 4.373, 2.555, 5.239, 6.024, 6.942, 5.073,
         3.941, 4.505, 4.744, 3.805, 4.848, 3.477, 3.405, 2.499, 4.735, 4.891},
    };
}

System System::spring_chain(SpringChainParams p) {
    require(!p.masses.empty() && p.stiffness.size() == p.masses.size() + 1,
            Errc::DimensionMismatch, "spring chain needs d masses and d+1 stiffnesses");
    for (double m : p.masses) require(m > 0, Errc::ConfigParse, "masses must be positive");
    for (double k : p.stiffness) require(k > 0, Errc::ConfigParse, "stiffness must be positive");
    std::size_t dim = 2 * p.count();
    return System(SystemId::SpringChain, dim, std::move(p));
}

System System::henon_heiles(HenonHeilesParams p) {
    return System(SystemId::HenonHeiles, 4, p);
}

System System::elastic_pendulum(ElasticPendulumParams p) {
    return System(SystemId::ElasticPendulum, 4, p);
}

System System::klink_pendulum(int links) {
    require(links >= 1, Errc::ConfigParse, "link count must be >= 1");
    KLinkPendulumParams p;
    p.links = links;
    return System(SystemId::KLinkPendulum, 2 * static_cast<std::size_t>(links), p);
}

const SpringChainParams& System::spring_chain_params() const {
    return std::get<SpringChainParams>(params_);
}
const HenonHeilesParams& System::henon_heiles_params() const {
    return std::get<HenonHeilesParams>(params_);
}
const ElasticPendulumParams& System::elastic_pendulum_params() const {
    return std::get<ElasticPendulumParams>(params_);
}
const KLinkPendulumParams& System::klink_pendulum_params() const {
    return std::get<KLinkPendulumParams>(params_);
}

void klink_matrix(const KLinkPendulumParams& params, std::span<const double> theta,
                  std::span<const double> omega, std::vector<double>& a_out,
                  std::vector<double>& b_out) {
    const std::size_t k = static_cast<std::size_t>(params.links);
    a_out.assign(k * k, 0.0);
    b_out.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        double bi = -static_cast<double>(k - i) * params.g * std::sin(theta[i]);
        for (std::size_t j = 0; j < k; ++j) {
            double c = static_cast<double>(k - std::max(i, j));  // c(i,j) with 0-based i,j
            double diff = theta[i] - theta[j];
            a_out[i * k + j] = c * std::cos(diff);
            bi -= c * omega[j] * omega[j] * std::sin(diff);
        }
        b_out[i] = bi;
    }
}

void solve_dense_inplace(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::fabs(a[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double mag = std::fabs(a[r * n + col]);
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        require(best >= 1e-12, Errc::SingularMassMatrix, "pivot magnitude below 1e-12");
        if (pivot != col) {
            for (std::size_t j = col; j < n; ++j) std::swap(a[col * n + j], a[pivot * n + j]);
            std::swap(b[col], b[pivot]);
        }
        double inv = 1.0 / a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            double factor = a[r * n + col] * inv;
            if (factor == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a[r * n + j] -= factor * a[col * n + j];
            b[r] -= factor * b[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * b[j];
        b[i] = s / a[i * n + i];
    }
}

namespace {

void rhs_spring_chain(const SpringChainParams& p, const StateBatch& s, StateBatch& out) {
    const std::size_t d = p.count();
    for (std::size_t row = 0; row < s.n; ++row) {
        const double* q = s.data.data() + row * s.d;
        const double* mom = q + d;
        double* dq = out.data.data() + row * s.d;
        double* dp = dq + d;
        for (std::size_t i = 0; i < d; ++i) {
            dq[i] = mom[i] / p.masses[i];
            double left = (i == 0) ? 0.0 : q[i - 1];
            double right = (i + 1 == d) ? 0.0 : q[i + 1];
            dp[i] = p.stiffness[i] * (left - q[i]) + p.stiffness[i + 1] * (right - q[i]);
        }
    }
}

void rhs_henon_heiles(const HenonHeilesParams& p, const StateBatch& s, StateBatch& out) {
    for (std::size_t row = 0; row < s.n; ++row) {
        const double* u = s.data.data() + row * 4;
        double* du = out.data.data() + row * 4;
        double qx = u[0], qy = u[1], px = u[2], py = u[3];
        du[0] = px;
        du[1] = py;
        du[2] = -qx - 2.0 * p.lambda * qx * qy;
        du[3] = -qy - p.lambda * (qx * qx - qy * qy);
    }
}

void rhs_elastic_pendulum(const ElasticPendulumParams& p, const StateBatch& s, StateBatch& out) {
    for (std::size_t row = 0; row < s.n; ++row) {
        const double* u = s.data.data() + row * 4;
        double* du = out.data.data() + row * 4;
        double theta = u[0], r = u[1], td = u[2], rd = u[3];
        du[0] = td;
        du[1] = rd;
        du[2] = (-p.g * std::sin(theta) - td * rd) / r;
        du[3] = r * td * td - (p.k / p.m) * (r - p.l0) + p.g * std::cos(theta);
    }
}

void rhs_klink(const KLinkPendulumParams& p, const StateBatch& s, StateBatch& out) {
    const std::size_t k = static_cast<std::size_t>(p.links);
    std::vector<double> a, b;
    for (std::size_t row = 0; row < s.n; ++row) {
        const double* u = s.data.data() + row * s.d;
        double* du = out.data.data() + row * s.d;
        std::span<const double> theta(u, k);
        std::span<const double> omega(u + k, k);
        klink_matrix(p, theta, omega, a, b);
        solve_dense_inplace(a, b, k);
        for (std::size_t i = 0; i < k; ++i) {
            du[i] = omega[i];
            du[k + i] = b[i];
        }
    }
}

}  // namespace

void System::rhs_into(const StateBatch& states, StateBatch& out) const {
    require(states.d == dim_, Errc::DimensionMismatch, "state dimension does not match system");
    if (!out.same_shape(states)) out = StateBatch(states.n, states.d);
    switch (id_) {
        case SystemId::SpringChain:
            rhs_spring_chain(spring_chain_params(), states, out);
            break;
        case SystemId::HenonHeiles:
            rhs_henon_heiles(henon_heiles_params(), states, out);
            break;
        case SystemId::ElasticPendulum:
            rhs_elastic_pendulum(elastic_pendulum_params(), states, out);
            break;
        case SystemId::KLinkPendulum:
            rhs_klink(klink_pendulum_params(), states, out);
            break;
    }
}

StateBatch System::rhs(const StateBatch& states) const {
    StateBatch out(states.n, states.d);
    rhs_into(states, out);
    return out;
}

std::vector<double> System::energy(const StateBatch& states) const {
    require(id_ == SystemId::HenonHeiles, Errc::UnsupportedSystem,
            std::string("energy not implemented for ") + system_name(id_));
    require(states.d == dim_, Errc::DimensionMismatch, "state dimension does not match system");
    const double lambda = henon_heiles_params().lambda;
    std::vector<double> h(states.n);
    for (std::size_t row = 0; row < states.n; ++row) {
        const double* u = states.data.data() + row * 4;
        double qx = u[0], qy = u[1], px = u[2], py = u[3];
        // Cubic potential term q_y^3/3 is the form conserved by this flow.
        h[row] = 0.5 * (px * px + py * py) + 0.5 * (qx * qx + qy * qy) +
                 lambda * (qx * qx * qy - qy * qy * qy / 3.0);
    }
    return h;
}

StateBatch System::sample_initial(std::size_t count, std::uint64_t seed) const {
    require(count >= 1, Errc::ConfigParse, "count must be >= 1");
    Rng rng(seed);
    StateBatch out(count, dim_);
    const double pi = std::numbers::pi;
    switch (id_) {
        case SystemId::SpringChain: {
            const std::size_t d = spring_chain_params().count();
            for (std::size_t i = 0; i < count; ++i) {
                for (std::size_t j = 0; j < 2 * d; ++j) out.at(i, j) = rng.uniform(-2.5, 2.5);
            }
            break;
        }
        case SystemId::HenonHeiles: {
            // Rejection sampling until H lands in [1/12, 1/6].
            const std::size_t budget = 10000 * count;
            std::size_t draws = 0;
            StateBatch candidate(1, 4);
            for (std::size_t i = 0; i < count; ++i) {
                for (;;) {
                    require(draws < budget, Errc::RejectionBudgetExceeded,
                            "rejection sampling exceeded 10000x count draws");
                    ++draws;
                    candidate.at(0, 0) = rng.uniform(-1.0, 1.0);
                    candidate.at(0, 1) = rng.uniform(-0.5, 1.0);
                    candidate.at(0, 2) = rng.uniform(-1.0, 1.0);
                    candidate.at(0, 3) = rng.uniform(-1.0, 1.0);
                    double h = energy(candidate)[0];
                    if (h >= 1.0 / 12.0 && h <= 1.0 / 6.0) break;
                }
                for (std::size_t j = 0; j < 4; ++j) out.at(i, j) = candidate.at(0, j);
            }
            break;
        }
        case SystemId::ElasticPendulum: {
            const auto& p = elastic_pendulum_params();
            for (std::size_t i = 0; i < count; ++i) {
                out.at(i, 0) = rng.uniform(0.0, pi / 8.0);
                out.at(i, 1) = p.l0;
                out.at(i, 2) = 0.0;
                out.at(i, 3) = 0.0;
            }
            break;
        }
        case SystemId::KLinkPendulum: {
            const auto& p = klink_pendulum_params();
            const std::size_t k = static_cast<std::size_t>(p.links);
            for (std::size_t i = 0; i < count; ++i) {
                if (k == 1) {
                    out.at(i, 0) = rng.uniform(0.0, pi / 2.0);
                    out.at(i, 1) = rng.uniform(0.0, 0.5);
                } else {
                    for (std::size_t j = 0; j < k; ++j) out.at(i, j) = rng.uniform(0.0, pi / 8.0);
                    for (std::size_t j = 0; j < k; ++j) out.at(i, k + j) = 0.0;
                }
            }
            break;
        }
    }
    return out;
}

}  // namespace nv
