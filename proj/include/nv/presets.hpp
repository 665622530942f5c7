#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nv/dataset.hpp"

namespace nv {

// Named dataset recipe. Counts are the full experiment scale; `scale` shrinks N while
// keeping delta, eta, T, and the initial-state distributions unchanged.
struct Preset {
    std::string name;
    DatasetConfig config;
    int k = 1;                        // coarse-step multiple the corrector trains for
    Scheme corrector_scheme = Scheme::RK4;
};

std::vector<std::string> preset_names();

Preset get_preset(const std::string& name, double scale = 0.01, std::uint64_t seed = 0);

}  // namespace nv
