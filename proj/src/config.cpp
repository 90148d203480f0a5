#include "rfreg/config.hpp"

#include <fstream>
#include <sstream>

namespace rfreg {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

template <typename T>
T parse_num(const std::string& key, const std::string& v) {
    std::istringstream is(v);
    T out;
    is >> out;
    if (is.fail() || !is.eof())
        throw ConfigError("config key '" + key + "': cannot parse '" + v + "'");
    return out;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::istringstream is(v);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));

        if (key == "name") cfg.name = val;
        else if (key == "seed") cfg.seed = parse_num<std::uint64_t>(key, val);
        else if (key == "report.dir") cfg.report_dir = val;
        else if (key == "arch.base_channels") cfg.arch.base_channels = parse_num<int>(key, val);
        else if (key == "arch.rho") cfg.arch.rho = parse_num<int>(key, val);
        else if (key == "arch.num_blocks") cfg.arch.num_blocks = parse_num<int>(key, val);
        else if (key == "arch.num_classes") cfg.arch.num_classes = parse_num<int>(key, val);
        else if (key == "arch.in_channels") cfg.arch.in_channels = parse_num<int>(key, val);
        else if (key == "damping.enabled") cfg.arch.damping.enabled = parse_bool(key, val);
        else if (key == "damping.lambda") cfg.arch.damping.lambda = parse_num<float>(key, val);
        else if (key == "damping.axis") cfg.arch.damping.axis = damp_axis_from_string(val);
        else if (key == "decomp.enabled") cfg.arch.decomp.enabled = parse_bool(key, val);
        else if (key == "decomp.Z") cfg.arch.decomp.Z = parse_num<int>(key, val);
        else if (key == "decomp.apply_to") {
            if (val == "blocks") cfg.arch.decomp.apply_to = DecompApplyTo::spatial_block_convs;
            else if (val == "all") cfg.arch.decomp.apply_to = DecompApplyTo::all_convs;
            else throw ConfigError("decomp.apply_to must be blocks|all, got '" + val + "'");
        }
        else if (key == "prune.enabled") cfg.prune.enabled = parse_bool(key, val);
        else if (key == "prune.target_nonzero") cfg.prune.target_nonzero = parse_num<long>(key, val);
        else if (key == "prune.ramp_epochs") cfg.prune.ramp_epochs = parse_num<int>(key, val);
        else if (key == "prune.scope") cfg.prune.scope = prune_scope_from_string(val);
        else if (key == "data.kind") {
            if (val != "synthetic" && val != "manifest")
                throw ConfigError("data.kind must be synthetic|manifest, got '" + val + "'");
            cfg.data.kind = val;
        }
        else if (key == "data.num_classes") cfg.data.synth.num_classes = parse_num<int>(key, val);
        else if (key == "data.n_train_per_class") cfg.data.synth.n_train_per_class = parse_num<int>(key, val);
        else if (key == "data.n_test_per_class") cfg.data.synth.n_test_per_class = parse_num<int>(key, val);
        else if (key == "data.time_frames") cfg.data.synth.time_frames = parse_num<int>(key, val);
        else if (key == "data.n_mels") cfg.data.synth.n_mels = parse_num<int>(key, val);
        else if (key == "data.difficulty") cfg.data.synth.difficulty = parse_num<float>(key, val);
        else if (key == "data.seed") cfg.data.seed = parse_num<std::uint64_t>(key, val);
        else if (key == "data.manifest") cfg.data.manifest = val;
        else if (key == "features.sample_rate") cfg.data.features.sample_rate = parse_num<int>(key, val);
        else if (key == "features.window") cfg.data.features.window = parse_num<int>(key, val);
        else if (key == "features.hop") cfg.data.features.hop = parse_num<int>(key, val);
        else if (key == "features.n_mels") cfg.data.features.n_mels = parse_num<int>(key, val);
        else if (key == "optimizer.lr") cfg.optimizer.lr = parse_num<float>(key, val);
        else if (key == "optimizer.momentum") cfg.optimizer.momentum = parse_num<float>(key, val);
        else if (key == "optimizer.weight_decay") cfg.optimizer.weight_decay = parse_num<float>(key, val);
        else if (key == "optimizer.epochs") cfg.optimizer.epochs = parse_num<int>(key, val);
        else if (key == "optimizer.warmup_epochs") cfg.optimizer.warmup_epochs = parse_num<int>(key, val);
        else if (key == "optimizer.batch_size") cfg.optimizer.batch_size = parse_num<int>(key, val);
        else if (key == "optimizer.lr_decay") cfg.optimizer.lr_decay = parse_num<float>(key, val);
        else if (key == "optimizer.decay_every") cfg.optimizer.decay_every = parse_num<int>(key, val);
        else if (key == "sweep.rhos") {
            for (const auto& s : split_list(val)) cfg.sweep_rhos.push_back(parse_num<int>(key, s));
        }
        else if (key == "sweep.variants") cfg.sweep_variants = split_list(val);
        else if (key == "sweep.widths") {
            for (const auto& s : split_list(val)) cfg.sweep_widths.push_back(parse_num<int>(key, s));
        }
        else if (key == "sweep.seeds") {
            for (const auto& s : split_list(val)) cfg.sweep_seeds.push_back(parse_num<std::uint64_t>(key, s));
        }
        else throw ConfigError("unknown config key '" + key + "' (line " + std::to_string(lineno) + ")");
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config_text(os.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "name = " << cfg.name << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "report.dir = " << cfg.report_dir << "\n";
    os << "arch.base_channels = " << cfg.arch.base_channels << "\n";
    os << "arch.rho = " << cfg.arch.rho << "\n";
    os << "arch.num_blocks = " << cfg.arch.num_blocks << "\n";
    os << "arch.num_classes = " << cfg.arch.num_classes << "\n";
    os << "arch.in_channels = " << cfg.arch.in_channels << "\n";
    os << "damping.enabled = " << (cfg.arch.damping.enabled ? "true" : "false") << "\n";
    os << "damping.lambda = " << cfg.arch.damping.lambda << "\n";
    os << "damping.axis = " << to_string(cfg.arch.damping.axis) << "\n";
    os << "decomp.enabled = " << (cfg.arch.decomp.enabled ? "true" : "false") << "\n";
    os << "decomp.Z = " << cfg.arch.decomp.Z << "\n";
    os << "decomp.apply_to = "
       << (cfg.arch.decomp.apply_to == DecompApplyTo::all_convs ? "all" : "blocks") << "\n";
    os << "prune.enabled = " << (cfg.prune.enabled ? "true" : "false") << "\n";
    os << "prune.target_nonzero = " << cfg.prune.target_nonzero << "\n";
    os << "prune.ramp_epochs = " << cfg.prune.ramp_epochs << "\n";
    os << "prune.scope = " << (cfg.prune.scope == PruneScope::global ? "global" : "per_layer") << "\n";
    os << "data.kind = " << cfg.data.kind << "\n";
    os << "data.num_classes = " << cfg.data.synth.num_classes << "\n";
    os << "data.n_train_per_class = " << cfg.data.synth.n_train_per_class << "\n";
    os << "data.n_test_per_class = " << cfg.data.synth.n_test_per_class << "\n";
    os << "data.time_frames = " << cfg.data.synth.time_frames << "\n";
    os << "data.n_mels = " << cfg.data.synth.n_mels << "\n";
    os << "data.difficulty = " << cfg.data.synth.difficulty << "\n";
    os << "data.seed = " << cfg.data.seed << "\n";
    if (!cfg.data.manifest.empty()) os << "data.manifest = " << cfg.data.manifest << "\n";
    os << "optimizer.lr = " << cfg.optimizer.lr << "\n";
    os << "optimizer.momentum = " << cfg.optimizer.momentum << "\n";
    os << "optimizer.weight_decay = " << cfg.optimizer.weight_decay << "\n";
    os << "optimizer.epochs = " << cfg.optimizer.epochs << "\n";
    os << "optimizer.warmup_epochs = " << cfg.optimizer.warmup_epochs << "\n";
    os << "optimizer.batch_size = " << cfg.optimizer.batch_size << "\n";
    os << "optimizer.lr_decay = " << cfg.optimizer.lr_decay << "\n";
    os << "optimizer.decay_every = " << cfg.optimizer.decay_every << "\n";
    auto join = [&os](const char* key, const auto& items) {
        if (items.empty()) return;
        os << key << " = ";
        for (std::size_t i = 0; i < items.size(); ++i) os << (i ? "," : "") << items[i];
        os << "\n";
    };
    join("sweep.rhos", cfg.sweep_rhos);
    join("sweep.variants", cfg.sweep_variants);
    join("sweep.widths", cfg.sweep_widths);
    join("sweep.seeds", cfg.sweep_seeds);
    return os.str();
}

}  // namespace rfreg
