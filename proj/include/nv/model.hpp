#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>

#include "nv/solvers.hpp"
#include "nv/state.hpp"
#include "nv/systems.hpp"

namespace nv {

// Rational activation sigma(x) = (a3 x^3 + a2 x^2 + a1 x + a0) /
// (b2 x^2 + b1 x + b0), coefficients shared across the hidden layer and
// trainable. Denominator stays positive definite (b2 > 0, b1^2 < 4 b2 b0).
struct RationalCoeffs {
    std::array<double, 4> a{0.0218, 0.5000, 0.5957, 1.1915};
    std::array<double, 3> b{1.0000, 0.0000, 2.3830};

    double eval(double x) const {
        double num = ((a[3] * x + a[2]) * x + a[1]) * x + a[0];
        double den = (b[2] * x + b[1]) * x + b[0];
        return num / den;
    }
};

// Keeps the denominator away from real roots after an optimizer step:
// b2 is floored at 1e-3 and b1 shrunk toward 0 until b1^2 < 4 b2 b0 strictly.
void project_rational(RationalCoeffs& rat);

struct ModelMeta {
    SystemId system = SystemId::SpringChain;
    Scheme scheme = Scheme::Euler;
    int k = 1;              // coarse step = k * fine_dt
    double fine_dt = 0.0;
    double eta = 0.0;       // sampling interval of the training data
    std::uint64_t train_seed = 0;

    double coarse_dt() const { return static_cast<double>(k) * fine_dt; }
};

// One-hidden-layer corrector: u -> Wa * sigma(W1 u + b1). No output bias, so
// zeroing Wa makes the corrector exactly 0.
struct Model {
    int d = 0;
    int width = 0;
    Eigen::MatrixXd w1;  // width x d
    Eigen::VectorXd b1;  // width
    Eigen::MatrixXd wa;  // d x width
    RationalCoeffs rat;
    ModelMeta meta;

    // All-zero weights; forward output is identically zero.
    static Model zeros(int d, int width, const ModelMeta& meta = {});
    // Fan-in uniform initialization: W1, b1 ~ U[-1/sqrt(d), 1/sqrt(d)],
    // Wa ~ U[-1/sqrt(width), 1/sqrt(width)].
    static Model init_random(int d, int width, std::uint64_t seed, const ModelMeta& meta = {});

    bool is_zero_output() const { return wa.isZero(0.0); }
};

// Forward pass on a d x G column block (one state per column).
Eigen::MatrixXd forward_cols(const Model& model, const Eigen::MatrixXd& x);

StateBatch forward(const Model& model, const StateBatch& states);
void forward_into(const Model& model, const StateBatch& states, StateBatch& out);

struct Grads {
    Eigen::MatrixXd w1;
    Eigen::VectorXd b1;
    Eigen::MatrixXd wa;
    std::array<double, 4> a{};
    std::array<double, 3> b{};

    static Grads zeros_like(const Model& m);
};

// Mean-squared loss over a d x G input/target block and exact analytic
// gradients for every trainable parameter, rational coefficients included.
double loss_and_grads(const Model& model, const Eigen::MatrixXd& inputs,
                      const Eigen::MatrixXd& targets, Grads& grads);

struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::int64_t t = 0;

    Eigen::MatrixXd m_w1, v_w1;
    Eigen::VectorXd m_b1, v_b1;
    Eigen::MatrixXd m_wa, v_wa;
    std::array<double, 4> m_a{}, v_a{};
    std::array<double, 3> m_b{}, v_b{};

    static AdamState init(const Model& m, double lr);
};

// Standard bias-corrected Adam update followed by the rational-denominator
// positivity projection. lr_scale multiplies the base rate (schedules).
void adam_step(Model& model, AdamState& adam, const Grads& grads, double lr_scale = 1.0);

// Single-file persistence: magic "NVEC", version, canonical metadata text,
// tensors (W1, b1, Wa, a0..a3, b0..b2) as little-endian f64, checksum trailer.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace nv
