#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nv/model.hpp"
#include "nv/solvers.hpp"
#include "nv/systems.hpp"

namespace nv {

// One timed configuration: an integration of `init` under `plan`, optionally
// with a corrector model. The batch is divided into `trials` equal partitions
// and each partition is timed as one run.
struct BenchCase {
    std::string name;
    System system;
    Scheme scheme = Scheme::RK4;
    IntegrationPlan plan;
    StateBatch init;
    std::optional<Model> model;
};

struct BenchEntry {
    std::string name;
    int trials = 0;
    std::int64_t steps = 0;
    double mean_seconds = 0.0;
    double std_seconds = 0.0;
    std::vector<double> raw_seconds;
    bool failed = false;
    std::string error;

    double per_step_seconds() const {
        return steps > 0 ? mean_seconds / static_cast<double>(steps) : 0.0;
    }
};

struct BenchReport {
    std::vector<BenchEntry> entries;
    int trials = 0;
    double pause_seconds = 0.0;
    int workers = 1;  // timing is single-threaded unless configured otherwise

    const BenchEntry& entry(const std::string& name) const;
    // Ratio of mean wall times: how many times faster `fast` is than `slow`.
    double speedup(const std::string& slow, const std::string& fast) const;
    // Corrector overhead per macro-step relative to the bare scheme.
    double overhead_epsilon(const std::string& with_corrector,
                            const std::string& without_corrector) const;

    std::string to_table() const;
};

// Times each case `trials` times with a monotonic clock around the
// integration call only, sleeping pause_seconds between runs. Divergence is
// reported as a failed entry, never thrown.
BenchReport benchmark(const std::vector<BenchCase>& cases, int trials = 70,
                      double pause_seconds = 10.0);

}  // namespace nv
