#include "nv/dataset.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "nv/io.hpp"
#include "nv/rng.hpp"

namespace nv {

const char* role_name(DatasetRole r) { return r == DatasetRole::Train ? "train" : "test"; }

DatasetRole role_from_name(const std::string& name) {
    if (name == "train") return DatasetRole::Train;
    if (name == "test") return DatasetRole::Test;
    fail(Errc::ConfigParse, "unknown dataset role '" + name + "'");
}

std::string system_to_text(const System& system) {
    std::ostringstream os;
    os << "system " << system_name(system.id()) << "\n";
    switch (system.id()) {
        case SystemId::SpringChain: {
            const auto& p = system.spring_chain_params();
            os << "masses";
            for (double m : p.masses) os << " " << f64_to_text(m);
            os << "\nstiffness";
            for (double k : p.stiffness) os << " " << f64_to_text(k);
            os << "\n";
            break;
        }
        case SystemId::HenonHeiles:
            os << "lambda " << f64_to_text(system.henon_heiles_params().lambda) << "\n";
            break;
        case SystemId::ElasticPendulum: {
            const auto& p = system.elastic_pendulum_params();
            os << "spring_k " << f64_to_text(p.k) << "\nmass " << f64_to_text(p.m)
               << "\nrest_length " << f64_to_text(p.l0) << "\ngravity " << f64_to_text(p.g)
               << "\n";
            break;
        }
        case SystemId::KLinkPendulum:
            os << "links " << system.klink_pendulum_params().links << "\n";
            break;
    }
    return os.str();
}

namespace {

std::map<std::string, std::string> parse_kv_lines(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto pos = line.find(' ');
        require(pos != std::string::npos, Errc::ConfigParse, "malformed line: " + line);
        kv[line.substr(0, pos)] = line.substr(pos + 1);
    }
    return kv;
}

std::vector<double> parse_f64_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(f64_from_text(tok));
    return out;
}

}  // namespace

System system_from_text(const std::string& text) {
    auto kv = parse_kv_lines(text);
    switch (system_from_name(kv.at("system"))) {
        case SystemId::SpringChain: {
            SpringChainParams p;
            p.masses = parse_f64_list(kv.at("masses"));
            p.stiffness = parse_f64_list(kv.at("stiffness"));
            return System::spring_chain(std::move(p));
        }
        case SystemId::HenonHeiles: {
            HenonHeilesParams p;
            p.lambda = f64_from_text(kv.at("lambda"));
            return System::henon_heiles(p);
        }
        case SystemId::ElasticPendulum: {
            ElasticPendulumParams p;
            p.k = f64_from_text(kv.at("spring_k"));
            p.m = f64_from_text(kv.at("mass"));
            p.l0 = f64_from_text(kv.at("rest_length"));
            p.g = f64_from_text(kv.at("gravity"));
            return System::elastic_pendulum(p);
        }
        case SystemId::KLinkPendulum:
            return System::klink_pendulum(std::stoi(kv.at("links")));
    }
    fail(Errc::ConfigParse, "unreachable");
}

namespace {

std::int64_t exact_ratio(double num, double den, const char* what) {
    double ratio = num / den;
    double rounded = std::round(ratio);
    require(rounded >= 1.0 && std::fabs(ratio - rounded) <= 1e-9 * std::fabs(ratio),
            Errc::SamplingMismatch, std::string(what) + " must be a positive integer ratio");
    return static_cast<std::int64_t>(rounded);
}

}  // namespace

DatasetConfig DatasetConfig::make(System system, DatasetRole role, std::size_t count, double delta,
                                  Scheme scheme, double eta, double duration, std::uint64_t seed) {
    require(count >= 1, Errc::ConfigParse, "count must be >= 1");
    require(delta > 0, Errc::ConfigParse, "delta must be positive");
    std::int64_t steps_per_sample = exact_ratio(eta, delta, "eta/delta");
    std::int64_t n_intervals = exact_ratio(duration, eta, "duration/eta");
    return DatasetConfig{std::move(system), role,    count,       delta,
                         scheme,            steps_per_sample, n_intervals, seed};
}

std::string DatasetConfig::to_text() const {
    std::ostringstream os;
    os << system_to_text(system) << "role " << role_name(role) << "\n"
       << "count " << count << "\n"
       << "delta " << f64_to_text(delta) << "\n"
       << "scheme " << scheme_name(scheme) << "\n"
       << "steps_per_sample " << steps_per_sample << "\n"
       << "n_intervals " << n_intervals << "\n"
       << "seed " << seed << "\n";
    return os.str();
}

DatasetConfig DatasetConfig::from_text(const std::string& text) {
    auto kv = parse_kv_lines(text);
    DatasetConfig cfg{system_from_text(text),
                      role_from_name(kv.at("role")),
                      std::stoull(kv.at("count")),
                      f64_from_text(kv.at("delta")),
                      scheme_from_name(kv.at("scheme")),
                      std::stoll(kv.at("steps_per_sample")),
                      std::stoll(kv.at("n_intervals")),
                      std::stoull(kv.at("seed"))};
    return cfg;
}

std::vector<double> TrajectoryDataset::times() const {
    std::vector<double> t(samples);
    double eta = config.eta();
    for (std::size_t s = 0; s < samples; ++s) t[s] = static_cast<double>(s) * eta;
    return t;
}

StateBatch TrajectoryDataset::batch_at(std::size_t sample) const {
    StateBatch b(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) b.at(i, j) = state(i, sample, j);
    return b;
}

Trajectory TrajectoryDataset::to_trajectory() const {
    Trajectory traj(samples, n, d);
    traj.times = times();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t s = 0; s < samples; ++s)
            for (std::size_t j = 0; j < d; ++j) traj.state(s, i, j) = state(i, s, j);
    return traj;
}

TrajectoryDataset generate(const DatasetConfig& config) {
    StateBatch init = config.system.sample_initial(config.count, config.seed);
    IntegrationPlan plan{config.delta, config.steps_per_sample * config.n_intervals,
                         config.steps_per_sample};
    Trajectory traj = integrate(config.scheme, config.system, init, plan);

    TrajectoryDataset ds{config, traj.n, traj.samples, traj.d, {}};
    ds.states.resize(traj.n * traj.samples * traj.d);
    for (std::size_t s = 0; s < traj.samples; ++s)
        for (std::size_t i = 0; i < traj.n; ++i)
            for (std::size_t j = 0; j < traj.d; ++j) ds.state(i, s, j) = traj.state(s, i, j);
    return ds;
}

namespace {
constexpr char kDatasetMagic[4] = {'N', 'V', 'D', 'S'};
constexpr std::uint32_t kDatasetVersion = 1;
}  // namespace

void save(const TrajectoryDataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), Errc::MissingInput, "cannot open for writing: " + path);
    BinWriter w(out);
    w.bytes(kDatasetMagic, 4);
    w.u32(kDatasetVersion);
    w.text_block(dataset.config.to_text());
    w.u64(dataset.n);
    w.u64(dataset.samples);
    w.u64(dataset.d);
    w.f64_array(dataset.states.data(), dataset.states.size());
    w.checksum_trailer();
    require(out.good(), Errc::Internal, "write failed: " + path);
}

TrajectoryDataset load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Errc::MissingInput, "cannot open " + path);
    BinReader r(in);
    char magic[4];
    r.bytes(magic, 4);
    require(std::memcmp(magic, kDatasetMagic, 4) == 0, Errc::FormatVersionMismatch,
            "not a dataset file: " + path);
    std::uint32_t version = r.u32();
    require(version == kDatasetVersion, Errc::FormatVersionMismatch,
            "dataset format version " + std::to_string(version) + ", expected " +
                std::to_string(kDatasetVersion));
    verify_file_checksum(path);
    DatasetConfig config = DatasetConfig::from_text(r.text_block());
    std::size_t n = r.u64();
    std::size_t samples = r.u64();
    std::size_t d = r.u64();
    TrajectoryDataset ds{std::move(config), n, samples, d, {}};
    ds.states.resize(n * samples * d);
    r.f64_array(ds.states.data(), ds.states.size());
    r.verify_checksum_trailer();
    return ds;
}

std::pair<TrajectoryDataset, TrajectoryDataset> split(const TrajectoryDataset& dataset,
                                                      double fraction, std::uint64_t seed) {
    require(fraction > 0.0 && fraction < 1.0, Errc::ConfigParse, "fraction must be in (0, 1)");
    const std::size_t n = dataset.n;
    std::size_t n_a = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    require(n_a >= 1 && n_a < n, Errc::EmptySplit, "split would leave one side empty");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed, 0x5917);
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
        std::swap(order[i - 1], order[j]);
    }

    auto take = [&](std::size_t begin, std::size_t end) {
        TrajectoryDataset part{dataset.config, end - begin, dataset.samples, dataset.d, {}};
        part.config.count = end - begin;
        part.states.resize(part.n * part.samples * part.d);
        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t src = order[i];
            std::copy(dataset.states.begin() +
                          static_cast<std::ptrdiff_t>(src * dataset.samples * dataset.d),
                      dataset.states.begin() +
                          static_cast<std::ptrdiff_t>((src + 1) * dataset.samples * dataset.d),
                      part.states.begin() +
                          static_cast<std::ptrdiff_t>((i - begin) * part.samples * part.d));
        }
        return part;
    };
    return {take(0, n_a), take(n_a, n)};
}

}  // namespace nv
