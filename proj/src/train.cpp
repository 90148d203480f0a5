#include "rfreg/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

namespace rfreg {

namespace fs = std::filesystem;

float learning_rate(const OptimizerConfig& opt, int epoch) {
    if (opt.warmup_epochs > 0 && epoch < opt.warmup_epochs)
        return opt.lr * static_cast<float>(epoch + 1) / static_cast<float>(opt.warmup_epochs);
    int past = epoch - opt.warmup_epochs;
    int steps = opt.decay_every > 0 ? past / opt.decay_every : 0;
    return opt.lr * std::pow(opt.lr_decay, static_cast<float>(steps));
}

namespace {

struct EvalResult {
    double loss = 0.0;
    double acc = 0.0;
};

TensorPtr make_batch(const Dataset& d, const std::vector<int>& idx, std::size_t lo, std::size_t hi,
                     std::vector<int>& labels) {
    int c = d.x[0]->dim(0), t = d.x[0]->dim(1), f = d.x[0]->dim(2);
    int n = static_cast<int>(hi - lo);
    auto batch = make_tensor({n, c, t, f});
    labels.resize(static_cast<std::size_t>(n));
    std::size_t per = static_cast<std::size_t>(c) * t * f;
    for (int i = 0; i < n; ++i) {
        const Tensor& src = *d.x[static_cast<std::size_t>(idx[lo + i])];
        std::copy(src.data(), src.data() + per, batch->data() + static_cast<std::size_t>(i) * per);
        labels[static_cast<std::size_t>(i)] = d.y[static_cast<std::size_t>(idx[lo + i])];
    }
    return batch;
}

EvalResult evaluate(Network& net, const Dataset& d, int batch_size) {
    EvalResult r;
    std::vector<int> idx(d.x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::size_t total = d.x.size();
    long correct = 0;
    double loss_sum = 0.0;
    for (std::size_t lo = 0; lo < total; lo += static_cast<std::size_t>(batch_size)) {
        std::size_t hi = std::min(total, lo + static_cast<std::size_t>(batch_size));
        std::vector<int> labels;
        auto batch = make_batch(d, idx, lo, hi, labels);
        auto logits = net.forward(nullptr, batch, false);
        auto loss = softmax_cross_entropy(nullptr, logits, labels);
        loss_sum += static_cast<double>(loss->at(0)) * static_cast<double>(hi - lo);
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (argmax_row(*logits, static_cast<int>(i)) == labels[i]) ++correct;
    }
    r.loss = loss_sum / static_cast<double>(total);
    r.acc = static_cast<double>(correct) / static_cast<double>(total);
    return r;
}

void write_text_atomic(const std::string& path, const std::string& text) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << text;
        if (!out) throw StateError("cannot write " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw StateError("cannot rename " + tmp);
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

void load_config_dataset(const ExperimentConfig& cfg, Dataset& train, Dataset& test) {
    if (cfg.data.kind == "synthetic") {
        SynthConfig sc = cfg.data.synth;
        sc.channels = cfg.arch.in_channels;
        auto data = synth_dataset(sc, cfg.data.seed ? cfg.data.seed : cfg.seed);
        train = std::move(data.train);
        test = std::move(data.test);
    } else {
        auto entries = load_manifest(cfg.data.manifest);
        int max_label = 0;
        for (const auto& e : entries) {
            auto wav = load_wav(e.path);
            auto spec = wav_to_logmel(wav, cfg.data.features);
            auto& d = (e.split == "train") ? train : test;
            d.x.push_back(spec);
            d.y.push_back(e.label);
            max_label = std::max(max_label, e.label);
        }
        train.num_classes = test.num_classes = max_label + 1;
    }
}

}  // namespace

RunRecord run_on(const ExperimentConfig& cfg, const Dataset& train_in, const Dataset& test_in) {
    cfg.arch.validate();
    if (train_in.x.empty()) throw ConfigError("training split is empty");
    if (train_in.num_classes != cfg.arch.num_classes)
        throw ConfigError("data has " + std::to_string(train_in.num_classes) + " classes but arch expects " +
                          std::to_string(cfg.arch.num_classes));

    Dataset train = train_in, test = test_in;
    {
        // Deep-copy sample tensors: normalization must not leak into the
        // caller's dataset.
        for (auto& x : train.x) x = std::make_shared<Tensor>(*x);
        for (auto& x : test.x) x = std::make_shared<Tensor>(*x);
    }
    auto stats = compute_stats(train);  // training split only, also for eval data
    normalize_dataset(train, stats);
    normalize_dataset(test, stats);

    Network net = build(cfg.arch);
    init_weights(net, cfg.seed);
    ModelSummary initial = summarize(net);

    PruneState prune_state;
    bool pruning = cfg.prune.enabled;
    long prunable_target = 0;
    if (pruning) {
        prune_state.ramp_epochs = cfg.prune.ramp_epochs;
        prune_state.scope = cfg.prune.scope;
        prune_state.gamma = prune_gamma(cfg.prune.ramp_epochs);
        prune_state.target_nonzero = cfg.prune.target_nonzero;
        init_prune_state(prune_state, net);
        long dense = initial.total_params - prune_state.total_prunable;
        prunable_target = cfg.prune.target_nonzero - dense;
        if (prunable_target < 0 || prunable_target > prune_state.total_prunable)
            throw ConfigError("prune target " + std::to_string(cfg.prune.target_nonzero) +
                              " is infeasible for a model with " + std::to_string(initial.total_params) +
                              " parameters (" + std::to_string(prune_state.total_prunable) + " prunable)");
    }

    fs::path dir = fs::path(cfg.report_dir) / cfg.name;
    fs::create_directories(dir);
    std::string ckpt_path = (dir / "checkpoint.ckpt").string();
    write_text_atomic((dir / "config.cfg").string(), serialize_config(cfg));

    RunRecord record;
    record.record_path = (dir / "record.csv").string();
    record.checkpoint_path = ckpt_path;

    SgdOptimizer opt(cfg.optimizer.momentum, cfg.optimizer.weight_decay);
    std::mt19937_64 shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<int> order(train.x.size());
    std::iota(order.begin(), order.end(), 0);

    std::ostringstream csv;
    csv << "epoch,lr,train_loss,train_acc,test_loss,test_acc,nonzero_params\n";

    for (int epoch = 0; epoch < cfg.optimizer.epochs; ++epoch) {
        if (pruning) {
            long want = schedule_pruned_count(epoch, prune_state.total_prunable, prunable_target,
                                              prune_state.ramp_epochs, prune_state.gamma);
            apply_magnitude_pruning(net, prune_state, want);
        }
        float lr = learning_rate(cfg.optimizer, epoch);
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double loss_sum = 0.0;
        long correct = 0;
        for (std::size_t lo = 0; lo < order.size(); lo += static_cast<std::size_t>(cfg.optimizer.batch_size)) {
            std::size_t hi = std::min(order.size(), lo + static_cast<std::size_t>(cfg.optimizer.batch_size));
            std::vector<int> labels;
            auto batch = make_batch(train, order, lo, hi, labels);
            Tape tape;
            for (auto& p : net.params) p.tensor->zero_grad();
            auto logits = net.forward(&tape, batch, true);
            auto loss = softmax_cross_entropy(&tape, logits, labels);
            if (!std::isfinite(loss->at(0))) {
                save_checkpoint(ckpt_path, network_entries(net, pruning ? &prune_state : nullptr));
                throw StateError("non-finite loss at epoch " + std::to_string(epoch) +
                                 "; last-good checkpoint written to " + ckpt_path);
            }
            loss_sum += static_cast<double>(loss->at(0)) * static_cast<double>(hi - lo);
            for (std::size_t i = 0; i < labels.size(); ++i)
                if (argmax_row(*logits, static_cast<int>(i)) == labels[i]) ++correct;
            loss->grad()[0] = 1.0f;
            tape.backward();
            opt.step(net.params, lr);
            if (pruning) enforce_masks(net, prune_state);
        }

        EpochStats es;
        es.epoch = epoch;
        es.lr = lr;
        es.train_loss = loss_sum / static_cast<double>(order.size());
        es.train_acc = static_cast<double>(correct) / static_cast<double>(order.size());
        auto ev = evaluate(net, test, cfg.optimizer.batch_size);
        es.test_loss = ev.loss;
        es.test_acc = ev.acc;
        es.nonzero_params = summarize(net).nonzero_params;
        record.epochs.push_back(es);
        csv << es.epoch << "," << fmt(es.lr) << "," << fmt(es.train_loss) << "," << fmt(es.train_acc) << ","
            << fmt(es.test_loss) << "," << fmt(es.test_acc) << "," << es.nonzero_params << "\n";
    }

    if (record.epochs.empty()) {
        record.final_accuracy = evaluate(net, test, cfg.optimizer.batch_size).acc;
    } else {
        std::size_t last = std::min<std::size_t>(10, record.epochs.size());
        double s = 0.0;
        for (std::size_t i = record.epochs.size() - last; i < record.epochs.size(); ++i)
            s += record.epochs[i].test_acc;
        record.final_accuracy = s / static_cast<double>(last);
    }
    record.summary = summarize(net);

    write_text_atomic(record.record_path, csv.str());
    save_checkpoint(ckpt_path, network_entries(net, pruning ? &prune_state : nullptr));
    return record;
}

RunRecord run(const ExperimentConfig& cfg) {
    Dataset train, test;
    load_config_dataset(cfg, train, test);
    return run_on(cfg, train, test);
}

ExperimentConfig apply_variant(ExperimentConfig cfg, const std::string& variant) {
    cfg.arch.damping.enabled = variant.find("damped") != std::string::npos;
    cfg.arch.decomp.enabled = variant.find("decomp") != std::string::npos;
    cfg.prune.enabled = variant.find("pruned") != std::string::npos;
    if (variant != "plain" && !cfg.arch.damping.enabled && !cfg.arch.decomp.enabled && !cfg.prune.enabled)
        throw ConfigError("unknown sweep variant '" + variant +
                          "' (expected plain or a combination of damped/decomp/pruned)");
    return cfg;
}

std::vector<SweepCell> sweep(const ExperimentConfig& base) {
    std::vector<int> rhos = base.sweep_rhos.empty() ? std::vector<int>{base.arch.rho} : base.sweep_rhos;
    std::vector<std::string> variants =
        base.sweep_variants.empty() ? std::vector<std::string>{"plain"} : base.sweep_variants;
    std::vector<int> widths =
        base.sweep_widths.empty() ? std::vector<int>{base.arch.base_channels} : base.sweep_widths;
    std::vector<std::uint64_t> seeds =
        base.sweep_seeds.empty() ? std::vector<std::uint64_t>{base.seed} : base.sweep_seeds;

    std::vector<SweepCell> cells;
    for (int rho : rhos)
        for (const auto& variant : variants)
            for (int width : widths)
                for (std::uint64_t seed : seeds) {
                    SweepCell cell;
                    cell.rho = rho;
                    cell.variant = variant;
                    cell.width = width;
                    cell.seed = seed;
                    try {
                        ExperimentConfig cfg = apply_variant(base, variant);
                        cfg.arch.rho = rho;
                        cfg.arch.base_channels = width;
                        cfg.seed = seed;
                        std::ostringstream nm;
                        nm << base.name << "_rho" << rho << "_" << variant << "_w" << width << "_s" << seed;
                        cfg.name = nm.str();
                        auto record = run(cfg);
                        cell.ok = true;
                        cell.final_accuracy = record.final_accuracy;
                        cell.nonzero = record.summary.nonzero_params;
                        cell.rf_t = record.summary.rf.rf_t;
                        cell.rf_f = record.summary.rf.rf_f;
                    } catch (const std::exception& ex) {
                        cell.ok = false;
                        cell.error = ex.what();
                    }
                    cells.push_back(std::move(cell));
                }

    fs::create_directories(base.report_dir);
    std::ostringstream csv;
    csv << "rho,variant,width,seed,status,final_acc,nonzero,rf_t,rf_f,error\n";
    for (const auto& c : cells)
        csv << c.rho << "," << c.variant << "," << c.width << "," << c.seed << ","
            << (c.ok ? "ok" : "error") << "," << fmt(c.final_accuracy) << "," << c.nonzero << "," << c.rf_t
            << "," << c.rf_f << ",\"" << c.error << "\"\n";
    write_text_atomic((fs::path(base.report_dir) / "summary.csv").string(), csv.str());
    return cells;
}

}  // namespace rfreg
