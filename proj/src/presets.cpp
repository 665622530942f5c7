#include "nv/presets.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace nv {

namespace {

struct Row {
    const char* name;
    SystemId system;
    int links;  // klink only
    DatasetRole role;
    std::size_t count;
    double delta;
    Scheme gen_scheme;
    double eta;
    double duration;
    int k;
    Scheme corrector_scheme;
};

// Benchmark dataset catalog (full-scale trajectory counts).
const Row kRows[] = {
    {"spring-chain-euler-train", SystemId::SpringChain, 0, DatasetRole::Train, 60000, 1e-3,
     Scheme::Euler, 2e-1, 20.0, 200, Scheme::Euler},
    {"spring-chain-improved-euler-train", SystemId::SpringChain, 0, DatasetRole::Train, 60000,
     1e-3, Scheme::ImprovedEuler, 2e-1, 20.0, 200, Scheme::ImprovedEuler},
    {"spring-chain-rk3-train", SystemId::SpringChain, 0, DatasetRole::Train, 60000, 1e-3,
     Scheme::RK3, 2e-1, 20.0, 200, Scheme::RK3},
    {"spring-chain-rk4-train", SystemId::SpringChain, 0, DatasetRole::Train, 60000, 1e-3,
     Scheme::RK4, 2e-1, 20.0, 200, Scheme::RK4},
    {"spring-chain-test", SystemId::SpringChain, 0, DatasetRole::Test, 10500, 1e-4, Scheme::RK4,
     2e-1, 20.0, 200, Scheme::RK4},
    {"one-link-pendulum-train", SystemId::KLinkPendulum, 1, DatasetRole::Train, 1000, 1e-3,
     Scheme::RK4, 1e-1, 10.0, 100, Scheme::Euler},
    {"two-link-pendulum-train", SystemId::KLinkPendulum, 2, DatasetRole::Train, 300000, 1e-3,
     Scheme::RK4, 1e-1, 10.0, 100, Scheme::RK4},
    {"two-link-pendulum-test", SystemId::KLinkPendulum, 2, DatasetRole::Test, 7000, 1e-4,
     Scheme::RK4, 1e-1, 10.0, 100, Scheme::RK4},
    {"henon-heiles-train", SystemId::HenonHeiles, 0, DatasetRole::Train, 100000, 1e-3,
     Scheme::RK4, 5e-1, 50.0, 500, Scheme::RK4},
    {"henon-heiles-test", SystemId::HenonHeiles, 0, DatasetRole::Test, 70000, 1e-4, Scheme::RK4,
     5e-1, 50.0, 500, Scheme::RK4},
    {"elastic-pendulum-train", SystemId::ElasticPendulum, 0, DatasetRole::Train, 300000, 1e-3,
     Scheme::RK4, 1e-1, 50.0, 100, Scheme::RK4},
    {"elastic-pendulum-test", SystemId::ElasticPendulum, 0, DatasetRole::Test, 14000, 1e-4,
     Scheme::RK4, 1e-1, 50.0, 100, Scheme::RK4},
};

// Figure-recipe aliases.
const std::map<std::string, std::string> kAliases = {
    {"fig2-euler", "spring-chain-euler-train"},
    {"fig2-improved-euler", "spring-chain-improved-euler-train"},
    {"fig2-rk3", "spring-chain-rk3-train"},
    {"fig2-rk4", "spring-chain-rk4-train"},
    {"fig4-hh", "henon-heiles-train"},
    {"fig5-elastic", "elastic-pendulum-train"},
    {"fig5-2link", "two-link-pendulum-train"},
    {"fig7-errormap", "one-link-pendulum-train"},
};

System make_system(const Row& row) {
    switch (row.system) {
        case SystemId::SpringChain: return System::spring_chain();
        case SystemId::HenonHeiles: return System::henon_heiles();
        case SystemId::ElasticPendulum: return System::elastic_pendulum();
        case SystemId::KLinkPendulum: return System::klink_pendulum(row.links);
    }
    fail(Errc::Internal, "unreachable");
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& row : kRows) names.push_back(row.name);
    for (const auto& [alias, target] : kAliases) names.push_back(alias + " -> " + target);
    return names;
}

Preset get_preset(const std::string& name, double scale, std::uint64_t seed) {
    std::string resolved = name;
    if (auto it = kAliases.find(name); it != kAliases.end()) resolved = it->second;
    for (const auto& row : kRows) {
        if (resolved != row.name) continue;
        require(scale > 0, Errc::ConfigParse, "scale must be positive");
        auto count = static_cast<std::size_t>(std::max<long long>(
            1, std::llround(static_cast<double>(row.count) * scale)));
        Preset p{row.name,
                 DatasetConfig::make(make_system(row), row.role, count, row.delta, row.gen_scheme,
                                     row.eta, row.duration, seed),
                 row.k, row.corrector_scheme};
        return p;
    }
    fail(Errc::ConfigParse, "unknown preset '" + name + "'");
}

}  // namespace nv
