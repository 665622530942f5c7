#include "nv/bench.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

namespace nv {

namespace {

StateBatch partition_rows(const StateBatch& full, std::size_t begin, std::size_t count) {
    StateBatch part(count, full.d);
    std::copy(full.data.begin() + static_cast<std::ptrdiff_t>(begin * full.d),
              full.data.begin() + static_cast<std::ptrdiff_t>((begin + count) * full.d),
              part.data.begin());
    return part;
}

}  // namespace

BenchReport benchmark(const std::vector<BenchCase>& cases, int trials, double pause_seconds) {
    require(trials >= 2, Errc::ConfigParse, "trials must be >= 2 for a std estimate");
    BenchReport report;
    report.trials = trials;
    report.pause_seconds = pause_seconds;

    for (const auto& bc : cases) {
        BenchEntry entry;
        entry.name = bc.name;
        entry.trials = trials;
        entry.steps = bc.plan.n_steps;
        // Equal partitions; when the batch is smaller than the trial count the
        // whole batch is reused each run.
        const std::size_t chunk =
            bc.init.n >= static_cast<std::size_t>(trials) ? bc.init.n / trials : bc.init.n;
        try {
            for (int t = 0; t < trials; ++t) {
                std::size_t begin =
                    bc.init.n >= static_cast<std::size_t>(trials) ? t * chunk : 0;
                StateBatch part = partition_rows(bc.init, begin, chunk);
                auto t0 = std::chrono::steady_clock::now();
                if (bc.model) {
                    integrate_with_corrector(bc.scheme, bc.system, *bc.model, part, bc.plan);
                } else {
                    integrate(bc.scheme, bc.system, part, bc.plan);
                }
                auto t1 = std::chrono::steady_clock::now();
                entry.raw_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
                if (pause_seconds > 0 && (t + 1 < trials || &bc != &cases.back())) {
                    std::this_thread::sleep_for(std::chrono::duration<double>(pause_seconds));
                }
            }
            double sum = 0.0;
            for (double s : entry.raw_seconds) sum += s;
            entry.mean_seconds = sum / static_cast<double>(entry.raw_seconds.size());
            double sq = 0.0;
            for (double s : entry.raw_seconds) sq += (s - entry.mean_seconds) * (s - entry.mean_seconds);
            entry.std_seconds = std::sqrt(sq / static_cast<double>(entry.raw_seconds.size() - 1));
        } catch (const Error& e) {
            entry.failed = true;
            entry.error = e.what();
        }
        report.entries.push_back(std::move(entry));
    }
    return report;
}

const BenchEntry& BenchReport::entry(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return e;
    fail(Errc::MissingInput, "no bench entry named '" + name + "'");
}

double BenchReport::speedup(const std::string& slow, const std::string& fast) const {
    const auto& a = entry(slow);
    const auto& b = entry(fast);
    require(!a.failed && !b.failed, Errc::MissingInput, "cannot compare failed bench entries");
    return a.mean_seconds / b.mean_seconds;
}

double BenchReport::overhead_epsilon(const std::string& with_corrector,
                                     const std::string& without_corrector) const {
    const auto& w = entry(with_corrector);
    const auto& wo = entry(without_corrector);
    require(!w.failed && !wo.failed, Errc::MissingInput, "cannot compare failed bench entries");
    return w.per_step_seconds() / wo.per_step_seconds() - 1.0;
}

std::string BenchReport::to_table() const {
    std::ostringstream os;
    os << "# trials " << trials << " pause_seconds " << pause_seconds << " workers " << workers
       << "\n";
    os << "name trials steps mean_seconds std_seconds status\n";
    os.precision(9);
    for (const auto& e : entries) {
        os << e.name << " " << e.trials << " " << e.steps << " " << e.mean_seconds << " "
           << e.std_seconds << " " << (e.failed ? "failed" : "ok") << "\n";
    }
    return os.str();
}

}  // namespace nv
