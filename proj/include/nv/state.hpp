#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "nv/error.hpp"

namespace nv {

// Batch of n states of dimension d, advanced synchronously on one shared
// time axis. Row-major: row i is trajectory i.
struct StateBatch {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> data;  // n * d

    StateBatch() = default;
    StateBatch(std::size_t n_, std::size_t d_) : n(n_), d(d_), data(n_ * d_, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data[i * d + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * d + j]; }

    std::span<double> row(std::size_t i) { return {data.data() + i * d, d}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * d, d}; }

    bool same_shape(const StateBatch& o) const { return n == o.n && d == o.d; }
};

// Divergence guard threshold: components beyond this (or non-finite) abort
// the whole batch rather than propagate silently.
inline constexpr double kDivergenceLimit = 1e8;

inline bool is_diverged(const StateBatch& s, std::size_t* row = nullptr) {
    for (std::size_t i = 0; i < s.n; ++i) {
        for (std::size_t j = 0; j < s.d; ++j) {
            double x = s.at(i, j);
            if (!std::isfinite(x) || std::fabs(x) > kDivergenceLimit) {
                if (row) *row = i;
                return true;
            }
        }
    }
    return false;
}

}  // namespace nv
