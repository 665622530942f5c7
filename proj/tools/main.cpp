// Command-line front end: dataset generation, corrector training, simulation,
// evaluation, benchmarking, and error-map export.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "nv/bench.hpp"
#include "nv/dataset.hpp"
#include "nv/io.hpp"
#include "nv/metrics.hpp"
#include "nv/model.hpp"
#include "nv/presets.hpp"
#include "nv/stats.hpp"
#include "nv/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kThresholdExit = 1;
constexpr int kErrcExitBase = 10;  // exit code = 10 + error category number

std::string out_dir_default() {
    if (const char* env = std::getenv("NV_OUT")) return env;
    return ".";
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    nv::require(out.good(), nv::Errc::MissingInput, "cannot write " + path.string());
    out << text;
}

// Every run writes a manifest echoing the fully resolved configuration, the
// seeds, the container format versions, and checksums of all inputs/outputs.
struct Manifest {
    json j;

    Manifest(const std::string& verb) {
        j["verb"] = verb;
        j["format_versions"] = {{"dataset", 1}, {"model", 1}};
        j["workers"] = 1;
    }
    void arg(const std::string& key, const json& value) { j["args"][key] = value; }
    void input(const std::string& path) {
        j["inputs"][path] = nv::fnv64_file(path);
    }
    void output(const std::string& path) {
        j["outputs"][path] = nv::fnv64_file(path);
    }
    void write(const fs::path& dir) { write_text(dir / "manifest.json", j.dump(2) + "\n"); }
};

// Merges config-file values into CLI defaults; explicit flags win.
void apply_config_file(CLI::App& app, const std::string& path) {
    std::ifstream in(path);
    nv::require(in.good(), nv::Errc::MissingInput, "cannot open config file " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        nv::fail(nv::Errc::ConfigParse, std::string("config file: ") + e.what());
    }
    for (auto& [key, value] : cfg.items()) {
        CLI::Option* opt = app.get_option_no_throw("--" + key);
        nv::require(opt != nullptr, nv::Errc::ConfigParse, "unknown config key '" + key + "'");
        if (opt->count() == 0) {
            std::string text = value.is_string() ? value.get<std::string>() : value.dump();
            opt->add_result(text);
        }
    }
}

struct SimArgs {
    std::string init_from;
    std::string model_path;
    std::string out = out_dir_default();
    double dt = 0.0;
    double duration = 0.0;
    std::int64_t sample_every = 1;
    std::string scheme = "rk4";
    std::string config_file;
};

nv::TrajectoryDataset trajectory_as_dataset(const nv::Trajectory& traj,
                                            const nv::DatasetConfig& base, double dt,
                                            std::int64_t sample_every) {
    nv::DatasetConfig cfg{base.system,
                          nv::DatasetRole::Test,
                          traj.n,
                          dt,
                          base.scheme,
                          sample_every,
                          static_cast<std::int64_t>(traj.samples) - 1,
                          base.seed};
    nv::TrajectoryDataset ds{cfg, traj.n, traj.samples, traj.d, {}};
    ds.states.resize(traj.n * traj.samples * traj.d);
    for (std::size_t s = 0; s < traj.samples; ++s)
        for (std::size_t i = 0; i < traj.n; ++i)
            for (std::size_t j = 0; j < traj.d; ++j) ds.state(i, s, j) = traj.state(s, i, j);
    return ds;
}

int run_cli(int argc, char** argv) {
    CLI::App app{
        "Batched fixed-step ODE simulation with a learned macro-step corrector.\n"
        "Exit codes: 0 success; 1 threshold violated; 10+N error category N\n"
        "(1 DimensionMismatch, 2 SingularMassMatrix, 3 UnsupportedSystem,\n"
        " 4 RejectionBudgetExceeded, 5 Divergence, 6 ModelSystemMismatch,\n"
        " 7 StepSizeMismatch, 8 SamplingMismatch, 9 NonFiniteLoss,\n"
        " 10 FormatVersionMismatch, 11 ChecksumMismatch, 12 TruncatedFile,\n"
        " 13 EmptySplit, 14 ShapeMismatch, 15 TimeAxisMismatch, 16 EmptyRange,\n"
        " 17 DegenerateVariance, 18 ConfigParse, 19 MissingInput, 20 Internal)\n"
        "Environment: NV_OUT overrides the default output directory."};
    app.require_subcommand(1);

    // ---- generate ----
    auto* gen = app.add_subcommand("generate", "Generate a trajectory dataset from a preset");
    std::string gen_preset, gen_out = out_dir_default(), gen_config;
    double gen_scale = 0.01;
    std::uint64_t gen_seed = 0;
    std::size_t gen_count_override = 0;
    gen->add_option("--preset", gen_preset, "Dataset preset name")->required();
    gen->add_option("--scale", gen_scale, "Multiplier on the full-scale trajectory count");
    gen->add_option("--seed", gen_seed, "Sampling seed");
    gen->add_option("--count", gen_count_override, "Override trajectory count directly");
    gen->add_option("--out", gen_out, "Output directory");
    gen->add_option("--config", gen_config, "JSON config file with flag defaults");

    // ---- describe ----
    auto* desc = app.add_subcommand("describe", "Print dataset config, counts, checksum");
    std::string desc_input;
    desc->add_option("--input", desc_input, "Dataset file")->required();

    // ---- train ----
    auto* tr = app.add_subcommand("train", "Train a corrector on a dataset");
    std::string tr_dataset, tr_out = out_dir_default(), tr_scheme, tr_config;
    int tr_k = 0, tr_epochs = 500, tr_batch = 1024, tr_width = 1024;
    double tr_lr = 1e-3;
    std::uint64_t tr_seed = 0;
    bool tr_cosine = false, tr_normalize = false;
    tr->add_option("--dataset", tr_dataset, "Training dataset file")->required();
    tr->add_option("--k", tr_k, "Coarse-step multiple (defaults to dataset eta/delta)");
    tr->add_option("--scheme", tr_scheme, "Corrector scheme (defaults to dataset scheme)");
    tr->add_option("--epochs", tr_epochs, "Training epochs");
    tr->add_option("--batch-size", tr_batch, "Mini-batch size");
    tr->add_option("--lr", tr_lr, "Adam learning rate");
    tr->add_option("--width", tr_width, "Hidden width");
    tr->add_option("--seed", tr_seed, "Training seed");
    tr->add_flag("--cosine-decay", tr_cosine, "Cosine learning-rate decay");
    tr->add_flag("--normalize-by-step", tr_normalize, "Train on residual / (k*dt)");
    tr->add_option("--out", tr_out, "Output directory");
    tr->add_option("--config", tr_config, "JSON config file with flag defaults");

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "Integrate from a dataset's initial states");
    SimArgs sa;
    sim->add_option("--init-from", sa.init_from, "Dataset supplying system + initial states")
        ->required();
    sim->add_option("--model", sa.model_path, "Corrector model file (omit for plain solver)");
    sim->add_option("--scheme", sa.scheme, "Solver scheme");
    sim->add_option("--dt", sa.dt, "Step size")->required();
    sim->add_option("--duration", sa.duration, "Integration horizon T")->required();
    sim->add_option("--sample-every", sa.sample_every, "Steps between recorded samples");
    sim->add_option("--out", sa.out, "Output directory");
    sim->add_option("--config", sa.config_file, "JSON config file with flag defaults");

    // ---- evaluate ----
    auto* ev = app.add_subcommand("evaluate", "MSE / energy / histogram metrics");
    std::string ev_pred, ev_ref, ev_traj, ev_out = out_dir_default();
    bool ev_mse = false, ev_energy = false, ev_hist = false;
    int ev_var = 0;
    std::vector<double> ev_range;
    double ev_max_mean_mse = -1.0;
    ev->add_flag("--mse", ev_mse, "MSE curve between --pred and --ref");
    ev->add_flag("--energy", ev_energy, "Energy-error curve of --traj");
    ev->add_flag("--histogram", ev_hist, "Time-series histogram of --traj");
    ev->add_option("--pred", ev_pred, "Predicted trajectory file");
    ev->add_option("--ref", ev_ref, "Reference trajectory file");
    ev->add_option("--traj", ev_traj, "Trajectory file");
    ev->add_option("--var", ev_var, "Histogram variable index");
    ev->add_option("--range", ev_range, "Histogram value range lo hi")->expected(2);
    ev->add_option("--max-mean-mse", ev_max_mean_mse,
                   "Fail (exit 1) when overall mean MSE exceeds this");
    ev->add_option("--out", ev_out, "Output directory");

    // ---- bench ----
    auto* be = app.add_subcommand("bench", "Wall-clock comparison fine vs coarse vs corrector");
    std::string be_dataset, be_model, be_out = out_dir_default();
    double be_fine_dt = 1e-3, be_duration = 0.0, be_pause = 10.0;
    int be_trials = 70;
    be->add_option("--test-dataset", be_dataset, "Dataset supplying system + initial states")
        ->required();
    be->add_option("--model", be_model, "Corrector model file")->required();
    be->add_option("--fine-dt", be_fine_dt, "Fine step size");
    be->add_option("--duration", be_duration, "Horizon (defaults to one coarse sample)");
    be->add_option("--trials", be_trials, "Timing trials");
    be->add_option("--pause", be_pause, "Seconds to sleep between runs (0 for CI)");
    be->add_option("--out", be_out, "Output directory");

    // ---- error-map ----
    auto* em = app.add_subcommand("error-map", "Phase-space error fields of a 1-link model");
    std::string em_model, em_out = out_dir_default();
    int em_nodes = 64;
    em->add_option("--model", em_model, "1-link pendulum Euler model")->required();
    em->add_option("--nodes", em_nodes, "Grid nodes per axis");
    em->add_option("--out", em_out, "Output directory");

    // ---- rerun ----
    auto* rr = app.add_subcommand("rerun", "Re-execute a run from its manifest alone");
    std::string rr_manifest;
    rr->add_option("--manifest", rr_manifest, "manifest.json of a previous run")->required();

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        if (!gen_config.empty()) apply_config_file(*gen, gen_config);
        fs::create_directories(gen_out);
        nv::Preset preset = nv::get_preset(gen_preset, gen_scale, gen_seed);
        if (gen_count_override > 0) preset.config.count = gen_count_override;
        nv::TrajectoryDataset ds = nv::generate(preset.config);
        std::string path = (fs::path(gen_out) / "dataset.nvds").string();
        nv::save(ds, path);
        Manifest m("generate");
        m.arg("preset", gen_preset);
        m.arg("out", gen_out);
        m.arg("scale", gen_scale);
        m.arg("seed", gen_seed);
        m.arg("count", preset.config.count);
        m.arg("config_text", preset.config.to_text());
        m.output(path);
        m.write(gen_out);
        std::cout << "wrote " << path << " (" << ds.n << " trajectories, " << ds.samples
                  << " samples, dim " << ds.d << ")\n";
        return 0;
    }

    if (desc->parsed()) {
        nv::TrajectoryDataset ds = nv::load(desc_input);
        std::cout << ds.config.to_text();
        std::cout << "samples " << ds.samples << "\npayload_doubles " << ds.states.size()
                  << "\nfile_checksum " << nv::fnv64_file(desc_input) << "\n";
        return 0;
    }

    if (tr->parsed()) {
        if (!tr_config.empty()) apply_config_file(*tr, tr_config);
        fs::create_directories(tr_out);
        nv::TrajectoryDataset ds = nv::load(tr_dataset);
        int k = tr_k > 0 ? tr_k : static_cast<int>(ds.config.steps_per_sample);
        nv::Scheme scheme =
            tr_scheme.empty() ? ds.config.scheme : nv::scheme_from_name(tr_scheme);
        nv::TrainingPairs pairs = nv::build_training_pairs(ds, scheme, ds.config.system, k);
        nv::TrainConfig cfg;
        cfg.epochs = tr_epochs;
        cfg.batch_size = tr_batch;
        cfg.lr = tr_lr;
        cfg.width = tr_width;
        cfg.cosine_decay = tr_cosine;
        cfg.normalize_by_step = tr_normalize;
        nv::ModelMeta meta;
        meta.system = ds.config.system.id();
        meta.scheme = scheme;
        meta.k = k;
        meta.fine_dt = ds.config.delta;
        meta.eta = ds.config.eta();
        nv::TrainReport report;
        nv::Model model = nv::train(pairs, cfg, tr_seed, meta, &report);
        std::string model_path = (fs::path(tr_out) / "model.nvec").string();
        nv::save_model(model, model_path);
        write_text(fs::path(tr_out) / "train_report.txt", report.to_text());
        Manifest m("train");
        m.arg("dataset", tr_dataset);
        m.arg("out", tr_out);
        m.arg("k", k);
        m.arg("scheme", nv::scheme_name(scheme));
        m.arg("epochs", tr_epochs);
        m.arg("batch_size", tr_batch);
        m.arg("lr", tr_lr);
        m.arg("width", tr_width);
        m.arg("seed", tr_seed);
        m.arg("cosine_decay", tr_cosine);
        m.arg("normalize_by_step", tr_normalize);
        m.input(tr_dataset);
        m.output(model_path);
        m.write(tr_out);
        std::cout << "wrote " << model_path << " (final loss " << report.final_loss << ")\n";
        return 0;
    }

    if (sim->parsed()) {
        if (!sa.config_file.empty()) apply_config_file(*sim, sa.config_file);
        fs::create_directories(sa.out);
        nv::TrajectoryDataset src = nv::load(sa.init_from);
        nv::StateBatch init = src.batch_at(0);
        std::int64_t n_steps = static_cast<std::int64_t>(std::llround(sa.duration / sa.dt));
        nv::IntegrationPlan plan{sa.dt, n_steps, sa.sample_every};
        nv::Scheme scheme = nv::scheme_from_name(sa.scheme);
        nv::Trajectory traj;
        if (sa.model_path.empty()) {
            traj = nv::integrate(scheme, src.config.system, init, plan);
        } else {
            nv::Model model = nv::load_model(sa.model_path);
            traj = nv::integrate_with_corrector(scheme, src.config.system, model, init, plan);
        }
        nv::DatasetConfig base = src.config;
        base.scheme = scheme;
        nv::TrajectoryDataset out_ds =
            trajectory_as_dataset(traj, base, sa.dt, sa.sample_every);
        std::string path = (fs::path(sa.out) / "trajectory.nvds").string();
        nv::save(out_ds, path);
        Manifest m("simulate");
        m.arg("init_from", sa.init_from);
        m.arg("out", sa.out);
        m.arg("model", sa.model_path);
        m.arg("scheme", sa.scheme);
        m.arg("dt", sa.dt);
        m.arg("duration", sa.duration);
        m.arg("sample_every", sa.sample_every);
        m.input(sa.init_from);
        if (!sa.model_path.empty()) m.input(sa.model_path);
        m.output(path);
        m.write(sa.out);
        std::cout << "wrote " << path << "\n";
        return 0;
    }

    if (ev->parsed()) {
        fs::create_directories(ev_out);
        Manifest m("evaluate");
        json summary;
        int exit_code = 0;
        if (ev_mse) {
            nv::require(!ev_pred.empty() && !ev_ref.empty(), nv::Errc::MissingInput,
                        "--mse needs --pred and --ref");
            nv::Trajectory pred = nv::load(ev_pred).to_trajectory();
            nv::Trajectory ref = nv::load(ev_ref).to_trajectory();
            nv::MseCurve curve = nv::mse_curve(pred, ref);
            write_text(fs::path(ev_out) / "mse.txt", curve.to_table());
            summary["mean_mse"] = curve.overall_mean();
            m.input(ev_pred);
            m.input(ev_ref);
            if (ev_max_mean_mse >= 0 && curve.overall_mean() > ev_max_mean_mse)
                exit_code = kThresholdExit;
        }
        if (ev_energy) {
            nv::require(!ev_traj.empty(), nv::Errc::MissingInput, "--energy needs --traj");
            nv::TrajectoryDataset ds = nv::load(ev_traj);
            nv::MseCurve curve = nv::energy_error_curve(ds.to_trajectory(), ds.config.system);
            write_text(fs::path(ev_out) / "energy_error.txt", curve.to_table());
            summary["mean_energy_error"] = curve.overall_mean();
            m.input(ev_traj);
        }
        if (ev_hist) {
            nv::require(!ev_traj.empty(), nv::Errc::MissingInput, "--histogram needs --traj");
            nv::TrajectoryDataset ds = nv::load(ev_traj);
            nv::Trajectory traj = ds.to_trajectory();
            double lo, hi;
            if (ev_range.size() == 2) {
                lo = ev_range[0];
                hi = ev_range[1];
            } else {
                // Default: data min/max padded 5%; the chosen range is recorded.
                lo = traj.states[static_cast<std::size_t>(ev_var)];
                hi = lo;
                for (std::size_t s = 0; s < traj.samples; ++s)
                    for (std::size_t i = 0; i < traj.n; ++i) {
                        double v = traj.state(s, i, static_cast<std::size_t>(ev_var));
                        lo = std::min(lo, v);
                        hi = std::max(hi, v);
                    }
                double pad = 0.05 * (hi - lo);
                lo -= pad;
                hi += pad;
            }
            nv::HistogramGrid grid =
                nv::time_series_histogram(traj, static_cast<std::size_t>(ev_var), lo, hi);
            grid.variable = "var" + std::to_string(ev_var);
            write_text(fs::path(ev_out) / "histogram.txt", grid.to_table());
            summary["histogram_total"] = grid.total();
            summary["histogram_range"] = {grid.v_lo, grid.v_hi};
            m.input(ev_traj);
        }
        nv::require(ev_mse || ev_energy || ev_hist, nv::Errc::ConfigParse,
                    "pick at least one of --mse/--energy/--histogram");
        write_text(fs::path(ev_out) / "summary.json", summary.dump(2) + "\n");
        m.arg("max_mean_mse", ev_max_mean_mse);
        m.arg("out", ev_out);
        m.write(ev_out);
        return exit_code;
    }

    if (be->parsed()) {
        fs::create_directories(be_out);
        nv::TrajectoryDataset ds = nv::load(be_dataset);
        nv::Model model = nv::load_model(be_model);
        double coarse = model.meta.coarse_dt();
        double duration = be_duration > 0 ? be_duration : coarse;
        nv::StateBatch init = ds.batch_at(0);
        auto steps = [&](double dt) {
            return static_cast<std::int64_t>(std::llround(duration / dt));
        };
        nv::Scheme scheme = model.meta.scheme;
        std::vector<nv::BenchCase> cases;
        cases.push_back({"fine", ds.config.system, scheme,
                         {be_fine_dt, steps(be_fine_dt), steps(be_fine_dt)}, init, std::nullopt});
        cases.push_back({"coarse", ds.config.system, scheme,
                         {coarse, steps(coarse), steps(coarse)}, init, std::nullopt});
        cases.push_back({"corrector", ds.config.system, scheme,
                         {coarse, steps(coarse), steps(coarse)}, init, model});
        nv::BenchReport report = nv::benchmark(cases, be_trials, be_pause);
        std::string table = report.to_table();
        nv::TTestResult tt =
            nv::t_tests(report.entry("fine").raw_seconds, report.entry("corrector").raw_seconds);
        write_text(fs::path(be_out) / "bench.txt", table + "# t-tests fine vs corrector\n" +
                                                       tt.to_text());
        json summary;
        summary["speedup_fine_over_corrector"] = report.speedup("fine", "corrector");
        summary["epsilon"] = report.overhead_epsilon("corrector", "coarse");
        summary["student_p"] = tt.student_p;
        summary["welch_p"] = tt.welch_p;
        write_text(fs::path(be_out) / "bench_summary.json", summary.dump(2) + "\n");
        Manifest m("bench");
        m.arg("test_dataset", be_dataset);
        m.arg("out", be_out);
        m.arg("model", be_model);
        m.arg("fine_dt", be_fine_dt);
        m.arg("duration", duration);
        m.arg("trials", be_trials);
        m.arg("pause", be_pause);
        m.input(be_dataset);
        m.input(be_model);
        m.write(be_out);
        std::cout << table;
        return 0;
    }

    if (em->parsed()) {
        fs::create_directories(em_out);
        nv::Model model = nv::load_model(em_model);
        nv::ErrorFieldSpec spec;
        spec.n_theta = em_nodes;
        spec.n_omega = em_nodes;
        nv::ErrorField field = nv::error_map(model, spec);
        std::string path = (fs::path(em_out) / "errormap.txt").string();
        write_text(path, field.to_table());
        Manifest m("error-map");
        m.arg("model", em_model);
        m.arg("nodes", em_nodes);
        m.arg("out", em_out);
        m.input(em_model);
        m.output(path);
        m.write(em_out);
        std::cout << "wrote " << path << "\n";
        return 0;
    }

    if (rr->parsed()) {
        std::ifstream in(rr_manifest);
        nv::require(in.good(), nv::Errc::MissingInput, "cannot open " + rr_manifest);
        json mj;
        in >> mj;
        std::vector<std::string> args{"nv", mj.at("verb").get<std::string>()};
        for (auto& [key, value] : mj.at("args").items()) {
            if (value.is_null()) continue;
            std::string text = value.is_string() ? value.get<std::string>() : value.dump();
            if (text.empty()) continue;
            if (key == "config_text") continue;
            if (value.is_boolean()) {
                if (value.get<bool>()) args.push_back("--" + key);
                continue;
            }
            std::string flag = key;
            for (auto& ch : flag)
                if (ch == '_') ch = '-';
            args.push_back("--" + flag);
            args.push_back(text);
        }
        std::vector<char*> argv2;
        for (auto& s : args) argv2.push_back(s.data());
        return run_cli(static_cast<int>(argv2.size()), argv2.data());
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const nv::Error& e) {
        std::cerr << "error " << e.what() << "\n";
        return kErrcExitBase + static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error Internal: " << e.what() << "\n";
        return kErrcExitBase + static_cast<int>(nv::Errc::Internal);
    }
}
