#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "rfreg/erf.hpp"
#include "rfreg/threading.hpp"
#include "rfreg/train.hpp"

namespace fs = std::filesystem;
using namespace rfreg;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    bool strict = false;
};

ExperimentConfig load_config(const GlobalOpts& g) {
    ExperimentConfig cfg = g.config_path.empty() ? ExperimentConfig{} : parse_config_file(g.config_path);
    if (g.seed_set) cfg.seed = g.seed;
    if (!g.out.empty()) cfg.report_dir = g.out;
    return cfg;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
    if (!out) throw StateError("cannot write " + path);
}

int cmd_train(const GlobalOpts& g) {
    auto cfg = load_config(g);
    auto record = run(cfg);
    std::cout << "final_accuracy=" << record.final_accuracy << " nonzero=" << record.summary.nonzero_params
              << " record=" << record.record_path << " checkpoint=" << record.checkpoint_path << "\n";
    return 0;
}

int cmd_sweep(const GlobalOpts& g) {
    auto cfg = load_config(g);
    auto cells = sweep(cfg);
    int failed = 0;
    for (const auto& c : cells) {
        if (!c.ok) ++failed;
        std::cout << "rho=" << c.rho << " variant=" << c.variant << " width=" << c.width << " seed=" << c.seed
                  << " status=" << (c.ok ? "ok" : "error") << " final_acc=" << c.final_accuracy << "\n";
    }
    if (failed) std::cerr << failed << " of " << cells.size() << " sweep cells failed\n";
    return 0;
}

int cmd_summarize(const GlobalOpts& g, const std::string& csv_out) {
    auto cfg = load_config(g);
    Network net = build(cfg.arch);
    init_weights(net, cfg.seed);
    auto s = summarize(net);
    std::cout << std::left << std::setw(28) << "layer" << std::setw(22) << "shape" << std::setw(12) << "total"
              << "nonzero\n";
    std::ostringstream csv;
    csv << "layer,shape,total,nonzero\n";
    for (const auto& lc : s.per_layer) {
        std::ostringstream shape;
        for (std::size_t i = 0; i < lc.shape.size(); ++i) shape << (i ? "x" : "") << lc.shape[i];
        std::cout << std::left << std::setw(28) << lc.name << std::setw(22) << shape.str() << std::setw(12)
                  << lc.total << lc.nonzero << "\n";
        csv << lc.name << "," << shape.str() << "," << lc.total << "," << lc.nonzero << "\n";
    }
    std::cout << "total=" << s.total_params << " nonzero=" << s.nonzero_params << " rf_t=" << s.rf.rf_t
              << " rf_f=" << s.rf.rf_f << "\n";
    csv << "TOTAL,," << s.total_params << "," << s.nonzero_params << "\n";
    write_file(csv_out, csv.str());
    return 0;
}

int cmd_rf_table(const GlobalOpts& g) {
    auto cfg = load_config(g);
    std::cout << "rho\trf_t\trf_f\tparams\n";
    for (int rho = 0; rho <= kRhoMax; ++rho) {
        ArchSpec spec = cfg.arch;
        spec.rho = rho;
        Network net = build(spec);
        auto s = summarize(net);
        std::cout << rho << "\t" << s.rf.rf_t << "\t" << s.rf.rf_f << "\t" << s.total_params << "\n";
    }
    return 0;
}

int cmd_erf(const GlobalOpts& g, const std::string& csv_out, const std::string& ckpt, int batch) {
    auto cfg = load_config(g);
    Network net = build(cfg.arch);
    init_weights(net, cfg.seed);
    if (!ckpt.empty()) restore_network(net, load_checkpoint(ckpt), nullptr);

    int t = cfg.data.synth.time_frames, f = cfg.data.synth.n_mels;
    auto input = make_tensor({batch, cfg.arch.in_channels, t, f});
    std::mt19937_64 rng(cfg.seed + 17);
    std::normal_distribution<float> dist(0.0f, 1.0f);
    for (std::size_t i = 0; i < input->numel(); ++i) input->at(i) = dist(rng);

    auto report = measure_erf(net, input);
    std::ostringstream csv;
    for (int it = 0; it < report.t; ++it) {
        for (int jf = 0; jf < report.f; ++jf) csv << (jf ? "," : "") << report.at(it, jf);
        csv << "\n";
    }
    write_file(csv_out, csv.str());
    std::cout << "width_t=" << report.width_t << " width_f=" << report.width_f
              << " argmax_t=" << report.argmax_t << " argmax_f=" << report.argmax_f
              << " clipped=" << (report.clipped ? 1 : 0) << " map=" << csv_out << "\n";
    return 0;
}

int cmd_features(const GlobalOpts& g, const std::string& wav_path, const std::string& out_path) {
    auto cfg = load_config(g);
    auto wav = load_wav(wav_path);
    auto spec = wav_to_logmel(wav, cfg.data.features);
    CheckpointEntry e;
    e.name = "logmel:" + wav_path;
    e.shape = spec->shape();
    e.data.assign(spec->data(), spec->data() + spec->numel());
    save_checkpoint(out_path, {e});
    std::cout << "shape=" << spec->shape_str() << " out=" << out_path << "\n";
    return 0;
}

int cmd_prune_plan(const GlobalOpts& g, long target, const std::string& csv_out) {
    auto cfg = load_config(g);
    Network net = build(cfg.arch);
    auto s = summarize(net);
    PruneState state;
    state.ramp_epochs = cfg.prune.ramp_epochs;
    state.gamma = prune_gamma(state.ramp_epochs);
    init_prune_state(state, net);
    long dense = s.total_params - state.total_prunable;
    long prunable_target = target - dense;
    if (prunable_target < 0 || prunable_target > state.total_prunable)
        throw ConfigError("target " + std::to_string(target) + " infeasible: model has " +
                          std::to_string(s.total_params) + " params, " +
                          std::to_string(state.total_prunable) + " prunable");
    std::ostringstream csv;
    csv << "epoch,pruned,nonzero\n";
    for (int e = 0; e <= state.ramp_epochs; ++e) {
        long pruned = schedule_pruned_count(e, state.total_prunable, prunable_target, state.ramp_epochs,
                                            state.gamma);
        csv << e << "," << pruned << "," << (s.total_params - pruned) << "\n";
    }
    write_file(csv_out, csv.str());
    std::cout << "total=" << s.total_params << " prunable=" << state.total_prunable << " target=" << target
              << " plan=" << csv_out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Receptive-field-regularized low-complexity CNN toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--config", g.config_path, "experiment config file");
    auto* seed_opt = app.add_option("--seed", g.seed, "override the config seed");
    app.add_option("--out", g.out, "override the report directory");
    app.add_flag("--strict-determinism", g.strict, "single-threaded numeric paths");

    auto* train_cmd = app.add_subcommand("train", "train one configuration");
    auto* sweep_cmd = app.add_subcommand("sweep", "run a config grid");
    std::string csv_out = "model_summary.csv";
    auto* summarize_cmd = app.add_subcommand("summarize", "print and export the parameter table");
    summarize_cmd->add_option("--csv", csv_out, "CSV output path");
    auto* rf_cmd = app.add_subcommand("rf-table", "receptive field per rho");
    std::string erf_csv = "erf_map.csv", erf_ckpt;
    int erf_batch = 16;
    auto* erf_cmd = app.add_subcommand("erf", "measure the effective receptive field");
    erf_cmd->add_option("--csv", erf_csv, "energy map CSV path");
    erf_cmd->add_option("--checkpoint", erf_ckpt, "checkpoint to probe");
    erf_cmd->add_option("--batch", erf_batch, "probe batch size");
    std::string wav_path, feat_out = "features.ckpt";
    auto* feat_cmd = app.add_subcommand("features", "extract log-mel features from a WAV file");
    feat_cmd->add_option("--wav", wav_path, "input WAV")->required();
    feat_cmd->add_option("--feat-out", feat_out, "output container path");
    long plan_target = 400000;
    std::string plan_csv = "prune_plan.csv";
    auto* plan_cmd = app.add_subcommand("prune-plan", "per-epoch pruned-count schedule");
    plan_cmd->add_option("--target", plan_target, "target non-zero parameter count");
    plan_cmd->add_option("--csv", plan_csv, "schedule CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    g.seed_set = seed_opt->count() > 0;

    if (g.strict) set_num_threads(1);

    try {
        if (*train_cmd) return cmd_train(g);
        if (*sweep_cmd) return cmd_sweep(g);
        if (*summarize_cmd) return cmd_summarize(g, csv_out);
        if (*rf_cmd) return cmd_rf_table(g);
        if (*erf_cmd) return cmd_erf(g, erf_csv, erf_ckpt, erf_batch);
        if (*feat_cmd) return cmd_features(g, wav_path, feat_out);
        if (*plan_cmd) return cmd_prune_plan(g, plan_target, plan_csv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
