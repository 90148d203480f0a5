#include "rfreg/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rfreg/audio.hpp"

namespace rfreg {

namespace {
constexpr const char* kMagic = "RFCKPT1";
}

void save_checkpoint(const std::string& path, const std::vector<CheckpointEntry>& entries) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw StateError("cannot write checkpoint: " + tmp);
        out << kMagic << "\n";
        long offset = 0;
        for (const auto& e : entries) {
            out << e.name << " f32 " << e.shape.size();
            for (int d : e.shape) out << " " << d;
            out << " " << offset << " " << e.data.size() << "\n";
            offset += static_cast<long>(e.data.size());
        }
        out << "END\n";
        for (const auto& e : entries)
            out.write(reinterpret_cast<const char*>(e.data.data()),
                      static_cast<std::streamsize>(e.data.size() * sizeof(float)));
        if (!out) throw StateError("write failure on checkpoint: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw StateError("cannot rename checkpoint into place: " + path);
}

std::vector<CheckpointEntry> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open checkpoint: " + path);
    std::string line;
    if (!std::getline(in, line) || line != kMagic)
        throw ParseError("bad checkpoint magic in " + path);
    std::vector<CheckpointEntry> entries;
    std::vector<long> counts;
    while (std::getline(in, line)) {
        if (line == "END") break;
        std::istringstream ls(line);
        CheckpointEntry e;
        std::string dtype;
        std::size_t ndim;
        long offset, count;
        if (!(ls >> e.name >> dtype >> ndim)) throw ParseError("bad manifest line: " + line);
        if (dtype != "f32") throw ParseError("unsupported dtype '" + dtype + "' in " + path);
        e.shape.resize(ndim);
        for (auto& d : e.shape)
            if (!(ls >> d)) throw ParseError("bad manifest shape: " + line);
        if (!(ls >> offset >> count)) throw ParseError("bad manifest offsets: " + line);
        counts.push_back(count);
        entries.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        entries[i].data.resize(static_cast<std::size_t>(counts[i]));
        in.read(reinterpret_cast<char*>(entries[i].data.data()),
                static_cast<std::streamsize>(counts[i] * static_cast<long>(sizeof(float))));
        if (!in) throw ParseError("checkpoint payload truncated: " + path);
    }
    return entries;
}

std::vector<CheckpointEntry> network_entries(Network& net, const PruneState* prune) {
    std::vector<CheckpointEntry> entries;
    for (const auto& p : net.params) {
        CheckpointEntry e;
        e.name = p.name;
        e.shape = p.tensor->shape();
        e.data.assign(p.tensor->data(), p.tensor->data() + p.tensor->numel());
        entries.push_back(std::move(e));
    }
    for (auto& [name, bn] : batchnorm_refs(net)) {
        entries.push_back({name + ".running_mean", {static_cast<int>(bn->running_mean.size())},
                           bn->running_mean});
        entries.push_back({name + ".running_var", {static_cast<int>(bn->running_var.size())},
                           bn->running_var});
    }
    if (prune) {
        for (std::size_t mp = 0; mp < prune->masks.size(); ++mp) {
            const auto& ref = net.params[prune->prunable_params[mp]];
            CheckpointEntry e;
            e.name = "mask:" + ref.name;
            e.shape = ref.tensor->shape();
            e.data.resize(prune->masks[mp].size());
            for (std::size_t i = 0; i < e.data.size(); ++i)
                e.data[i] = prune->masks[mp][i] ? 1.0f : 0.0f;
            entries.push_back(std::move(e));
        }
    }
    return entries;
}

void restore_network(Network& net, const std::vector<CheckpointEntry>& entries, PruneState* prune) {
    auto find = [&entries](const std::string& name) -> const CheckpointEntry* {
        for (const auto& e : entries)
            if (e.name == name) return &e;
        return nullptr;
    };
    for (auto& p : net.params) {
        const auto* e = find(p.name);
        if (!e) throw StateError("checkpoint missing parameter '" + p.name + "'");
        if (e->data.size() != p.tensor->numel())
            throw DimensionError("checkpoint size mismatch for '" + p.name + "'");
        std::memcpy(p.tensor->data(), e->data.data(), e->data.size() * sizeof(float));
    }
    for (auto& [name, bn] : batchnorm_refs(net)) {
        const auto* m = find(name + ".running_mean");
        const auto* v = find(name + ".running_var");
        if (!m || !v) throw StateError("checkpoint missing running stats for '" + name + "'");
        bn->running_mean = m->data;
        bn->running_var = v->data;
    }
    if (prune) {
        for (std::size_t mp = 0; mp < prune->masks.size(); ++mp) {
            const auto& ref = net.params[prune->prunable_params[mp]];
            const auto* e = find("mask:" + ref.name);
            if (!e) continue;  // unpruned checkpoint
            for (std::size_t i = 0; i < prune->masks[mp].size(); ++i)
                prune->masks[mp][i] = e->data[i] != 0.0f ? 1 : 0;
        }
        long pruned = 0;
        for (const auto& m : prune->masks)
            for (auto b : m)
                if (!b) ++pruned;
        prune->pruned_count = pruned;
    }
}

}  // namespace rfreg
