#include "nv/training.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "nv/rng.hpp"

namespace nv {

TrainingPairs build_training_pairs(const TrajectoryDataset& dataset, Scheme scheme,
                                   const System& system, int k) {
    require(k >= 1, Errc::ConfigParse, "k must be >= 1");
    require(system.id() == dataset.config.system.id() && system.dim() == dataset.d,
            Errc::ModelSystemMismatch, "system does not match dataset");
    const double eta = dataset.config.eta();
    const double coarse = static_cast<double>(k) * dataset.config.delta;
    require(std::fabs(eta - coarse) <= 1e-12 * std::fabs(eta), Errc::SamplingMismatch,
            "dataset sampling interval " + std::to_string(eta) +
                " does not equal k*delta = " + std::to_string(coarse));
    require(dataset.samples >= 2, Errc::SamplingMismatch,
            "dataset needs at least two samples per trajectory");

    const std::size_t n = dataset.n;
    const std::size_t d = dataset.d;
    const std::size_t intervals = dataset.samples - 1;
    TrainingPairs pairs;
    pairs.inputs.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n * intervals));
    pairs.targets.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n * intervals));

    for (std::size_t s = 0; s < intervals; ++s) {
        StateBatch u = dataset.batch_at(s);
        StateBatch inc = step_increment(scheme, system, u, coarse);
        for (std::size_t i = 0; i < n; ++i) {
            Eigen::Index col = static_cast<Eigen::Index>(s * n + i);
            for (std::size_t j = 0; j < d; ++j) {
                double uj = u.at(i, j);
                pairs.inputs(static_cast<Eigen::Index>(j), col) = uj;
                pairs.targets(static_cast<Eigen::Index>(j), col) =
                    dataset.state(i, s + 1, j) - uj - inc.at(i, j);
            }
        }
    }
    return pairs;
}

std::string TrainReport::to_text() const {
    std::ostringstream os;
    os << "# training report\n" << config_echo;
    os << "wall_seconds " << wall_seconds << "\n";
    os << "final_loss " << final_loss << "\n";
    os << "# epoch loss\n";
    for (std::size_t e = 0; e < epoch_loss.size(); ++e) os << e + 1 << " " << epoch_loss[e] << "\n";
    return os.str();
}

Model train(const TrainingPairs& pairs, const TrainConfig& config, std::uint64_t seed,
            const ModelMeta& meta, TrainReport* report) {
    const std::int64_t g_total = pairs.count();
    require(g_total >= config.batch_size || config.epochs == 0, Errc::ConfigParse,
            "need at least one full batch of training pairs");
    const int d = static_cast<int>(pairs.inputs.rows());

    ModelMeta m = meta;
    m.train_seed = seed;
    Rng rng(seed, 0x7a41);
    Model model = Model::init_random(d, config.width, seed, m);
    AdamState adam = AdamState::init(model, config.lr);
    adam.beta1 = config.beta1;
    adam.beta2 = config.beta2;
    adam.eps = config.eps;

    const double scale = config.normalize_by_step ? 1.0 / m.coarse_dt() : 1.0;

    auto t0 = std::chrono::steady_clock::now();
    std::vector<std::int64_t> order(static_cast<std::size_t>(g_total));
    std::iota(order.begin(), order.end(), 0);
    Grads grads = Grads::zeros_like(model);
    Eigen::MatrixXd xb, tb;

    std::vector<double> epoch_losses;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        Rng shuffle_rng = rng.split(static_cast<std::uint64_t>(epoch) + 1);
        for (std::size_t i = order.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(shuffle_rng.next_u64() % i);
            std::swap(order[i - 1], order[j]);
        }
        double lr_scale = 1.0;
        if (config.cosine_decay) {
            lr_scale = 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(epoch) /
                                             static_cast<double>(config.epochs)));
        }

        double loss_sum = 0.0;
        std::int64_t seen = 0;
        for (std::int64_t begin = 0; begin < g_total; begin += config.batch_size) {
            const std::int64_t bs = std::min<std::int64_t>(config.batch_size, g_total - begin);
            xb.resize(d, bs);
            tb.resize(d, bs);
            for (std::int64_t c = 0; c < bs; ++c) {
                const auto src = static_cast<Eigen::Index>(order[static_cast<std::size_t>(begin + c)]);
                xb.col(c) = pairs.inputs.col(src);
                tb.col(c) = scale * pairs.targets.col(src);
            }
            double loss = loss_and_grads(model, xb, tb, grads);
            if (!std::isfinite(loss)) {
                fail(Errc::NonFiniteLoss, "loss became non-finite at epoch " +
                                              std::to_string(epoch + 1) + ", batch offset " +
                                              std::to_string(begin));
            }
            adam_step(model, adam, grads, lr_scale);
            loss_sum += loss * static_cast<double>(bs);
            seen += bs;
        }
        epoch_losses.push_back(loss_sum / static_cast<double>(seen));
    }

    if (config.normalize_by_step && config.epochs > 0) {
        // The output layer is linear with no bias, so undoing the target
        // scaling on Wa restores raw-residual predictions exactly.
        model.wa *= m.coarse_dt();
    }

    if (report) {
        report->epoch_loss = epoch_losses;
        report->final_loss = epoch_losses.empty() ? 0.0 : epoch_losses.back();
        report->wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ostringstream os;
        os << "epochs " << config.epochs << "\nbatch_size " << config.batch_size << "\nlr "
           << config.lr << "\nwidth " << config.width << "\nbeta1 " << config.beta1 << "\nbeta2 "
           << config.beta2 << "\neps " << config.eps << "\ncosine_decay " << config.cosine_decay
           << "\nnormalize_by_step " << config.normalize_by_step << "\nseed " << seed
           << "\npairs " << g_total << "\n";
        report->config_echo = os.str();
    }
    return model;
}

}  // namespace nv
