#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nv/solvers.hpp"
#include "nv/systems.hpp"

namespace nv {

enum class DatasetRole { Train, Test };

const char* role_name(DatasetRole r);
DatasetRole role_from_name(const std::string& name);

// Canonical multi-line text form of a system and its parameters; round-trips
// bit-exactly (floats as hexfloat).
std::string system_to_text(const System& system);
System system_from_text(const std::string& text);

struct DatasetConfig {
    System system;
    DatasetRole role = DatasetRole::Train;
    std::size_t count = 0;            // trajectories
    double delta = 0.0;               // generation step
    Scheme scheme = Scheme::RK4;
    std::int64_t steps_per_sample = 1;  // eta / delta, held exactly as an integer
    std::int64_t n_intervals = 0;       // T / eta
    std::uint64_t seed = 0;

    double eta() const { return static_cast<double>(steps_per_sample) * delta; }
    double duration() const { return static_cast<double>(steps_per_sample * n_intervals) * delta; }
    std::size_t samples() const { return static_cast<std::size_t>(n_intervals) + 1; }

    // Builds a config from the (delta, eta, T) triple, requiring eta/delta
    // and T/eta to be integers within 1e-9 relative.
    static DatasetConfig make(System system, DatasetRole role, std::size_t count, double delta,
                              Scheme scheme, double eta, double duration, std::uint64_t seed);

    std::string to_text() const;
    static DatasetConfig from_text(const std::string& text);
};

// Batch of trajectories sampled every eta. states is (n x samples x d),
// trajectory-major.
struct TrajectoryDataset {
    DatasetConfig config;
    std::size_t n = 0;
    std::size_t samples = 0;
    std::size_t d = 0;
    std::vector<double> states;

    double state(std::size_t traj, std::size_t sample, std::size_t j) const {
        return states[(traj * samples + sample) * d + j];
    }
    double& state(std::size_t traj, std::size_t sample, std::size_t j) {
        return states[(traj * samples + sample) * d + j];
    }

    std::vector<double> times() const;
    StateBatch batch_at(std::size_t sample) const;
    Trajectory to_trajectory() const;
};

TrajectoryDataset generate(const DatasetConfig& config);

void save(const TrajectoryDataset& dataset, const std::string& path);
TrajectoryDataset load(const std::string& path);

// Trajectory-level split, deterministic by seed.
std::pair<TrajectoryDataset, TrajectoryDataset> split(const TrajectoryDataset& dataset,
                                                      double fraction, std::uint64_t seed);

}  // namespace nv
