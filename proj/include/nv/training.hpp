#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "nv/dataset.hpp"
#include "nv/model.hpp"

namespace nv {

// Supervised pairs: inputs are states u_{kn}, targets the one-macro-step
// residual u_{k(n+1)} - u_{kn} - S(f, u_{kn}, k*dt). Column per pair.
struct TrainingPairs {
    Eigen::MatrixXd inputs;   // d x G
    Eigen::MatrixXd targets;  // d x G

    std::int64_t count() const { return inputs.cols(); }
};

// Requires the dataset sampling interval eta to equal k * delta (the coarse
// step the corrector will be used at).
TrainingPairs build_training_pairs(const TrajectoryDataset& dataset, Scheme scheme,
                                   const System& system, int k);

struct TrainConfig {
    int epochs = 500;
    int batch_size = 1024;
    double lr = 1e-3;
    int width = 1024;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    bool cosine_decay = false;       // constant lr by default
    bool normalize_by_step = false;  // train on residual / (k*dt); output is
                                     // rescaled afterwards so the model still
                                     // predicts the raw residual
};

struct TrainReport {
    std::vector<double> epoch_loss;
    double final_loss = 0.0;
    double wall_seconds = 0.0;
    std::string config_echo;

    std::string to_text() const;
};

// Deterministic given (pairs, config, seed): fixed init, fixed shuffle order.
Model train(const TrainingPairs& pairs, const TrainConfig& config, std::uint64_t seed,
            const ModelMeta& meta, TrainReport* report = nullptr);

}  // namespace nv
