#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nv/state.hpp"

namespace nv {

enum class SystemId { SpringChain, HenonHeiles, ElasticPendulum, KLinkPendulum };

const char* system_name(SystemId id);
SystemId system_from_name(const std::string& name);

// d masses linked by d+1 springs, fixed walls at both ends. State layout is
// (q_1..q_d, p_1..p_d).
struct SpringChainParams {
    std::vector<double> masses;     // d
    std::vector<double> stiffness;  // d + 1

    // 20 masses / 21 stiffnesses used throughout the benchmark runs.
    static SpringChainParams defaults();

    std::size_t count() const { return masses.size(); }
};

// State (q_x, q_y, p_x, p_y).
struct HenonHeilesParams {
    double lambda = 1.0;
};

// State (theta, r, theta_dot, r_dot).
struct ElasticPendulumParams {
    double k = 40.0;
    double m = 1.0;
    double l0 = 10.0;
    double g = 9.8;
};

// K rods/bobs of unit length and mass. State (theta_1..theta_K, omega_1..omega_K).
struct KLinkPendulumParams {
    int links = 2;
    double g = 9.8;
};

// Builds the K x K inertia-coupling matrix A and force vector b for the
// K-link pendulum: A_{ij} = c(i,j) cos(theta_i - theta_j) with
// c(i,j) = K - max(i,j) + 1 (1-based), and
// b_i = -sum_j c(i,j) omega_j^2 sin(theta_i - theta_j) - (K-i+1) g sin(theta_i).
void klink_matrix(const KLinkPendulumParams& params, std::span<const double> theta,
                  std::span<const double> omega, std::vector<double>& a_out,
                  std::vector<double>& b_out);

// Solves the dense n x n system a*x = b in place (a row-major, b overwritten
// with the solution) by Gaussian elimination with partial pivoting.
// Throws SingularMassMatrix when the best pivot magnitude drops below 1e-12.
void solve_dense_inplace(std::vector<double>& a, std::vector<double>& b, std::size_t n);

class System {
public:
    static System spring_chain(SpringChainParams p = SpringChainParams::defaults());
    static System henon_heiles(HenonHeilesParams p = {});
    static System elastic_pendulum(ElasticPendulumParams p = {});
    static System klink_pendulum(int links);

    SystemId id() const { return id_; }
    std::size_t dim() const { return dim_; }

    const SpringChainParams& spring_chain_params() const;
    const HenonHeilesParams& henon_heiles_params() const;
    const ElasticPendulumParams& elastic_pendulum_params() const;
    const KLinkPendulumParams& klink_pendulum_params() const;

    // du/dt evaluated row-wise. Pure; rows never interact.
    void rhs_into(const StateBatch& states, StateBatch& out) const;
    StateBatch rhs(const StateBatch& states) const;

    // Conserved energy per trajectory. Implemented for HenonHeiles only.
    std::vector<double> energy(const StateBatch& states) const;

    // Initial-condition sampler. Deterministic given seed.
    StateBatch sample_initial(std::size_t count, std::uint64_t seed) const;

private:
    System(SystemId id, std::size_t dim,
           std::variant<SpringChainParams, HenonHeilesParams, ElasticPendulumParams,
                        KLinkPendulumParams>
               params)
        : id_(id), dim_(dim), params_(std::move(params)) {}

    SystemId id_;
    std::size_t dim_;
    std::variant<SpringChainParams, HenonHeilesParams, ElasticPendulumParams, KLinkPendulumParams>
        params_;
};

}  // namespace nv
